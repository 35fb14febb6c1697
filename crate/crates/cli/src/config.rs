use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fracdecomp::decomp::{Method, WeightMode};
use fracdecomp::eval::GridSpec;
use fracdecomp::problems::SourceMode;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_OUT: &str = "fracdecomp-out";
pub const DEFAULT_ITERATIONS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    Ladm,
    Mldm,
    Both,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Ladm => vec![Method::Ladm],
            MethodChoice::Mldm => vec![Method::Mldm],
            MethodChoice::Both => vec![Method::Ladm, Method::Mldm],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    PaperLiteral,
    Manufactured,
    Frozen,
}

impl From<ModeChoice> for SourceMode {
    fn from(m: ModeChoice) -> Self {
        match m {
            ModeChoice::PaperLiteral => SourceMode::PaperLiteral,
            ModeChoice::Manufactured => SourceMode::Manufactured,
            ModeChoice::Frozen => SourceMode::Frozen,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightChoice {
    Normalized,
    PaperLiteral,
}

impl From<WeightChoice> for WeightMode {
    fn from(w: WeightChoice) -> Self {
        match w {
            WeightChoice::Normalized => WeightMode::Normalized,
            WeightChoice::PaperLiteral => WeightMode::PaperLiteral,
        }
    }
}

/// Flags of the `solve` subcommand. Every field is optional so that a
/// config file can supply it; flags win over the file.
#[derive(Clone, Debug, Default, Args)]
pub struct SolveArgs {
    /// Built-in problem id (see `list`).
    #[arg(short, long, conflicts_with = "file")]
    pub problem: Option<String>,
    /// TOML problem file.
    #[arg(short, long)]
    pub file: Option<PathBuf>,
    /// Comma-separated fractional orders in (0, 1].
    #[arg(short, long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    #[arg(short, long, value_enum)]
    pub method: Option<MethodChoice>,
    /// Number of iterations after the zeroth component.
    #[arg(short = 'n', long)]
    pub iters: Option<usize>,
    /// Source data for built-in problems.
    #[arg(long, value_enum)]
    pub mode: Option<ModeChoice>,
    /// Boundary-correction weights.
    #[arg(short, long, value_enum)]
    pub weights: Option<WeightChoice>,
    /// Evaluation grid as `NXxNT`, e.g. `41x21`.
    #[arg(short, long)]
    pub grid: Option<String>,
    /// Final time of the evaluation grid.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Output directory.
    #[arg(short, long, env = "FRACDECOMP_OUT")]
    pub out: Option<PathBuf>,
    /// Worker threads for the per-alpha jobs.
    #[arg(short, long)]
    pub jobs: Option<usize>,
    /// Solve printed data even when it contradicts the exact solution.
    #[arg(long)]
    pub allow_inconsistent: bool,
    /// Write 0 in the seconds column so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
    /// Do not print the summary table.
    #[arg(short, long)]
    pub quiet: bool,
    /// TOML file with the same fields as the flags.
    #[arg(short, long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    problem: Option<String>,
    file: Option<PathBuf>,
    alpha: Option<Vec<f64>>,
    method: Option<MethodChoice>,
    iters: Option<usize>,
    mode: Option<ModeChoice>,
    weights: Option<WeightChoice>,
    grid: Option<GridSpec>,
    out: Option<PathBuf>,
    jobs: Option<usize>,
    allow_inconsistent: Option<bool>,
    timing: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSource {
    Builtin(String),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSource,
    /// Empty means the order stated in a problem file, or 1 for built-ins.
    pub alphas: Vec<f64>,
    pub method: MethodChoice,
    pub iterations: usize,
    pub mode: SourceMode,
    pub weights: WeightMode,
    pub grid: GridSpec,
    pub out: PathBuf,
    pub jobs: usize,
    pub allow_inconsistent: bool,
    pub timing: bool,
    pub quiet: bool,
}

impl RunConfig {
    pub fn builtin(id: &str) -> RunConfig {
        RunConfig {
            problem: ProblemSource::Builtin(id.to_string()),
            alphas: vec![1.0],
            method: MethodChoice::Both,
            iterations: DEFAULT_ITERATIONS,
            mode: SourceMode::Manufactured,
            weights: WeightMode::Normalized,
            grid: GridSpec::default(),
            out: PathBuf::from(DEFAULT_OUT),
            jobs: 1,
            allow_inconsistent: false,
            timing: true,
            quiet: false,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(a) = self.alphas.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return Err(CliError::Input(format!("alpha = {a} is outside (0, 1]")));
        }
        if self.jobs == 0 {
            return Err(CliError::Input("--jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// `41x21` into point counts.
pub fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Input(format!("grid `{text}` is not of the form NXxNT"));
    let (nx, nt) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((
        nx.trim().parse().map_err(|_| bad())?,
        nt.trim().parse().map_err(|_| bad())?,
    ))
}

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

impl SolveArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let problem = match (&self.problem, &self.file, file.problem, file.file) {
            (Some(id), _, _, _) => ProblemSource::Builtin(id.clone()),
            (None, Some(path), _, _) => ProblemSource::File(path.clone()),
            (None, None, Some(id), None) => ProblemSource::Builtin(id),
            (None, None, None, Some(path)) => ProblemSource::File(path),
            (None, None, Some(_), Some(_)) => {
                return Err(CliError::Input(
                    "config gives both `problem` and `file`".into(),
                ))
            }
            (None, None, None, None) => {
                return Err(CliError::Input("give --problem or --file".into()))
            }
        };
        let mut grid = file.grid.unwrap_or_default();
        if let Some(g) = &self.grid {
            (grid.nx, grid.nt) = parse_grid(g)?;
        }
        if let Some(t) = self.tmax {
            grid.t_max = t;
        }
        let cfg = RunConfig {
            problem,
            alphas: if self.alpha.is_empty() {
                file.alpha.unwrap_or_default()
            } else {
                self.alpha.clone()
            },
            method: self.method.or(file.method).unwrap_or(MethodChoice::Both),
            iterations: self.iters.or(file.iters).unwrap_or(DEFAULT_ITERATIONS),
            mode: self
                .mode
                .or(file.mode)
                .map_or(SourceMode::Manufactured, Into::into),
            weights: self
                .weights
                .or(file.weights)
                .map_or(WeightMode::Normalized, Into::into),
            grid,
            out: self
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            jobs: self.jobs.or(file.jobs).unwrap_or(1),
            allow_inconsistent: self.allow_inconsistent || file.allow_inconsistent.unwrap_or(false),
            timing: !self.no_timing && file.timing.unwrap_or(true),
            quiet: self.quiet,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_strings() {
        assert_eq!(parse_grid("41x21").unwrap(), (41, 21));
        assert_eq!(parse_grid("5X3").unwrap(), (5, 3));
        assert!(parse_grid("41").is_err());
        assert!(parse_grid("ax2").is_err());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "problem = \"p5\"\nalpha = [0.5, 0.7]\niters = 5\nmethod = \"mldm\"\n[grid]\nnx = 11\n",
        )
        .unwrap();
        let args = SolveArgs {
            config: Some(path),
            iters: Some(2),
            ..SolveArgs::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!(cfg.problem, ProblemSource::Builtin("p5".into()));
        assert_eq!(cfg.alphas, vec![0.5, 0.7]);
        assert_eq!(cfg.iterations, 2);
        assert_eq!(cfg.method, MethodChoice::Mldm);
        assert_eq!(cfg.grid.nx, 11);
        assert_eq!(cfg.grid.nt, GridSpec::default().nt);
    }

    #[test]
    fn bad_alpha_is_input_error() {
        let args = SolveArgs {
            problem: Some("p5".into()),
            alpha: vec![1.5],
            ..SolveArgs::default()
        };
        assert_eq!(args.resolve().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn unknown_config_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "problem = \"p5\"\nbogus = 1\n").unwrap();
        let args = SolveArgs {
            config: Some(path),
            ..SolveArgs::default()
        };
        assert_eq!(args.resolve().unwrap_err().exit_code(), 2);
    }
}
