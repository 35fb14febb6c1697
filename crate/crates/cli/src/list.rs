use std::fmt::Write as _;

use fracdecomp::problems::{builtin, validate_consistency, SourceMode, BUILTINS};

use crate::CliError;

/// Orders at which the printed data of each built-in is audited.
pub const AUDIT_ALPHAS: [f64; 2] = [1.0, 0.5];

fn interval(lo: f64, hi: f64) -> String {
    format!("[{lo},{hi}]")
}

/// Table of built-in problems: dimension, domain, operators and whether the
/// printed data agrees with the exact solution.
pub fn cmd_list() -> Result<String, CliError> {
    let mut out = String::new();
    out.push_str("id   dim domain         Qu               Nu               printed data (alpha=1)             printed data (alpha=0.5)\n");
    for def in &BUILTINS {
        let d = def.domain();
        let mut domain = interval(d.x.lo, d.x.hi);
        if let Some(y) = d.y {
            domain.push('x');
            domain.push_str(&interval(y.lo, y.hi));
        }
        let mut status = Vec::new();
        for alpha in AUDIT_ALPHAS {
            let p = builtin(def.id, alpha, SourceMode::PaperLiteral)
                .map_err(|e| CliError::Failure(e.to_string()))?;
            let report = validate_consistency(&p).map_err(|e| CliError::Failure(e.to_string()))?;
            status.push(report.status());
        }
        let nonlinear = def.nonlinear();
        let _ = writeln!(
            out,
            "{:<4} {:<3} {:<14} {:<16} {:<16} {:<34} {}",
            def.id,
            format!("{}D", d.dimension()),
            domain,
            def.linear().to_string(),
            if nonlinear.is_empty() {
                "-".to_string()
            } else {
                nonlinear.to_string()
            },
            status[0],
            status[1],
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row<'a>(table: &'a str, id: &str) -> &'a str {
        table
            .lines()
            .find(|l| l.starts_with(&format!("{id} ")))
            .unwrap()
    }

    #[test]
    fn rows_flag_consistency() {
        let table = cmd_list().unwrap();
        assert_eq!(table.lines().count(), 1 + BUILTINS.len());
        assert!(row(&table, "p1").contains("inconsistent (source)"));
        assert!(row(&table, "p5").contains(" consistent"));
        assert!(!row(&table, "p5").contains("inconsistent"));
        assert!(row(&table, "p2").contains("2D"));
        assert!(row(&table, "p4").contains("inconsistent (source, initial)"));
    }
}
