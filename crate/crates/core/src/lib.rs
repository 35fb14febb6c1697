//! Laplace-Adomian and modified Laplace decomposition solvers for
//! time-fractional initial-boundary value problems.

pub mod decomp;
pub mod eval;
pub mod fracterm;
pub mod problems;
pub mod symx;
