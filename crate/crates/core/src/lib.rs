//! Truncated Riesz transforms on periodic grids.
//!
//! The crate evaluates the radial multiplier `m` with `R_j^t = M^t R_j`,
//! applies Riesz-type and Poisson-type Fourier multipliers to sampled fields,
//! takes maximal functions over finite truncation grids and runs seeded
//! experiments that measure the associated norm ratios.

pub mod error;
pub mod exec;
pub mod experiments;
pub mod quad;
pub mod grid;
pub mod multiplier;
pub mod operators;
pub mod specfun;

pub use error::{Error, Result};
