//! Sparse multivariate polynomial arithmetic over word-size prime fields:
//! gcd, square-free decomposition, root extraction and factorization.

pub mod bivar;
pub mod cli;
pub mod error;
pub mod field;
pub mod mfactor;
pub mod mgcd;
pub mod mreduce;
pub mod project;
pub mod rng;
pub mod sparseinterp;
pub mod sparsepoly;
pub mod unipoly;

pub use error::{Error, Result};
pub use field::{Fp, PrimeField};
