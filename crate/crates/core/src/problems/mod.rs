//! Built-in benchmark problems, manufactured sources and problem files.

mod consistency;
mod file;
mod registry;
mod spec;

pub use consistency::{
    validate_consistency, CheckKind, ConsistencyCheck, ConsistencyReport, CONSISTENCY_SAMPLES,
    CONSISTENCY_TOL,
};
pub use file::parse_problem_file;
pub use registry::{builtin, builtin_def, builtin_ids, Builtin, BUILTINS};
pub use spec::{manufacture_source, ProblemSpec, SourceMode};

use crate::decomp::DecompError;
use crate::symx::{ParseError, SymError};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ProblemError {
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("fractional order {0} must lie in (0, 1]")]
    Alpha(f64),
    #[error("in `{field}`:\n{}", error.annotate(text))]
    Expr {
        field: String,
        text: String,
        error: ParseError,
    },
    #[error("{0}")]
    Invalid(String),
    #[error("problem file: {0}")]
    Toml(String),
    #[error("no exact solution to compare against")]
    MissingExact,
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Sym(#[from] SymError),
}
