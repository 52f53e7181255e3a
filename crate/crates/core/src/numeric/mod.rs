//! Shared numerical building blocks.

pub mod interp;
pub mod quad;
pub mod special;
