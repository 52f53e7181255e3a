//! Deterministic numerics: resolvent tables, exact means, the potential
//! operator G^{(α)}, and the Laplace-functional solver.

pub mod resolvent;
pub mod solver;
pub mod test_function;

pub use resolvent::{build_resolvent, check_tightness, exact_mean_n, Grid, ResolventTable, TightnessReport};
pub use solver::{
    scaled_w_integral, solve_g, solve_with_weights, CellWeights, Nonlinearity, SibuyaNonlinearity, SolverState,
};
pub use test_function::{g_alpha, TestFunction};
