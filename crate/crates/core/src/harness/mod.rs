//! Experiment orchestration: configuration, estimators, runners, reports,
//! and the acceptance criteria.

pub mod config;
pub mod criteria;
pub mod estimators;
pub mod experiments;
pub mod report;

pub use config::{ExperimentConfig, Mode, Model};
pub use estimators::{empirical_laplace, hill_estimator, LaplaceEstimate};
pub use experiments::{limit_log_laplace, run_clt_experiment, run_limit_comparison};
pub use report::{Check, Report};
