#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ensembles;
pub mod inequalities;
pub mod error;
pub mod matrix;
pub mod numerics;
pub mod oracle;
pub mod radii;
pub mod rng;
pub mod semihilbert;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use semihilbert::{AContext, AOperator, ContextOptions};
