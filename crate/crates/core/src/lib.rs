//! Frequentist p-values and Bayes factors for a normal mean with known
//! variance, with the truncated scale-invariant prior family, its Bartlett
//! limit, the Laplace approximation and a Monte Carlo cross-check.

pub mod bayes;
pub mod cli;
pub mod error;
pub mod frequentist;
pub mod model;
pub mod montecarlo;
pub mod numerics;
pub mod output;
pub mod sweep;

pub use error::{Error, Result};
