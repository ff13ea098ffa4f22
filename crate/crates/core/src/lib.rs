//! Resummation engine: contour-integral representations of Taylor
//! coefficients, analytic continuation, singularity analysis, generalized
//! Borel summation and evaluation of slowly convergent sums.

pub mod cli;
pub mod complexfn;
pub mod error;
pub mod kernels;
pub mod models;
pub mod quadrature;
pub mod reconstruct;
pub mod special;
pub mod sums;

pub use error::{Error, Result};
pub use num_complex::Complex64;
