//! Numerical certification of lace-expansion coefficient bounds for oriented
//! percolation on finite space-time lattices.
//!
//! The library computes the expansion coefficients exactly on small models
//! (the oracles in [`oracle`]), evaluates the diagrammatic upper bounds they
//! are claimed to satisfy ([`kernels`], [`diagrams`]), and reports signed
//! margins for every inequality ([`verify`]).

pub mod cache;
pub mod connectivity;
pub mod convolution;
pub mod diagrams;
pub mod error;
pub mod kernels;
pub mod model;
pub mod verify;
pub mod oracle;

pub use error::{Error, Result};
pub use model::{ModelSpec, StepKernel};
