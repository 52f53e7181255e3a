//! Stable laws and the limit processes of the rescaled counting process.

pub mod limit;
pub mod samplers;

pub use limit::{
    c_alpha, gaussian_limit_variance, simulate_gaussian_limit, simulate_limit_process, LimitModel, PathGrid, Regime,
};
pub use samplers::{sample_positive_stable, sample_skewed_stable, PositiveStable, SkewedStable};
