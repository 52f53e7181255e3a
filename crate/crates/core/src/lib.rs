pub mod error;
pub mod harness;
pub mod kernels;
pub mod marks;
pub mod numeric;
pub mod renewal;
pub mod simulator;
pub mod stable;

pub use error::{Error, Result};
