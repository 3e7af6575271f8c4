//! Operators acting on sampled fields.

pub mod maximal;
pub mod rotations;
pub mod spatial;
pub mod symbols;

pub use maximal::*;
pub use rotations::*;
pub use spatial::*;
pub use symbols::*;
