//! Exact symbolic calculus for Poisson structures on fiber bundles.
//!
//! The crate is organised bottom-up: [`ring`] supplies exact coefficients,
//! [`calculus`] the multivector and form calculus, [`fibration`] connections
//! and bigradings, [`coupling`] coupling data and the bigraded complex, and
//! [`cohomology`] truncated cohomology computations.

pub mod error;
pub mod fibration;
pub mod linalg;
pub mod calculus;
pub mod cohomology;
pub mod corpus;
pub mod coupling;
pub mod ring;

pub use error::{Error, Result};
