//! Compositional data on the probability simplex: Aitchison geometry,
//! exponential-family coordinates, and shrinkage estimators for sparse
//! multinomial counts.
//!
//! - [`simplex`]: compositions, clr, perturbation and powering, geodesics, distances.
//! - [`infogeo`]: natural and expectation coordinates, KL divergence, Dirichlet evidence.
//! - [`shrinkage`]: linear and exponential shrinkage with data-driven weights.
//! - [`simlab`]: seeded sampling, Monte Carlo oracles and the estimator benchmark.

pub mod error;
pub mod infogeo;
pub mod shrinkage;
pub mod simlab;
pub mod simplex;

pub use error::{Error, Result};
pub use simplex::{Composition, CountVector, TangentVector};
