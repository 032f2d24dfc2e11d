//! McEliece-type encryption over generalized Reed-Solomon codes hidden by a
//! rank-one perturbed permutation, and a key-recovery attack against it built
//! on the square-code distinguisher.
//!
//! Not a cipher for real use: the scheme is implemented so it can be broken.

pub mod attack;
pub mod cli;
pub mod codes;
pub mod error;
pub mod gf;
pub mod grs;
pub mod linalg;
pub mod poly;
pub mod rng;
pub mod scheme;

pub use error::{Error, Result};
