//! Numerical laboratory for Bessel potential spaces, uniformly localized
//! norms and Sobolev multipliers of the Riesz family `|x|^{-alpha}`.

pub mod besselnorm;
pub mod cli;
pub mod error;
pub mod exec;
pub mod gridfield;
pub mod multiplier;
pub mod riesz;
pub mod sharpness;
pub mod special;

pub use error::{Error, Result};
