//! Numerical verification of Brunn-Minkowski type inequalities for convex
//! bodies near the Euclidean ball.

pub mod bodies;
pub mod cli;
pub mod error;
pub mod inequalities;
pub mod jet;
pub mod linalg;
pub mod measures;
pub mod oracles;
pub mod polynomial;
pub mod quadrature;
pub mod sphere_core;
pub mod variation;

pub use error::{Error, Result};
