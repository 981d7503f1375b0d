//! Numeric kernels behind the built-in methods.

pub mod ml;
pub mod rng;
pub mod stats;
pub mod visu;
