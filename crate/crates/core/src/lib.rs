//! Global sensitivity analysis built on cumulative residual entropy (CRE).
//!
//! The crate provides:
//!
//! - parametric input distributions with seeded sampling and closed-form CRE
//!   ([`distributions`]),
//! - order-statistic estimators of CRE and conditional CRE ([`estimators`]),
//! - the CRE importance measures κ_i, κ_ij, CRMI and the full decomposition
//!   ([`importance`]),
//! - comparison indices: Sobol main/total effects, the delta index and binned
//!   Shannon mutual information ([`baselines`]),
//! - benchmark models ([`models`]) and the uncertainty-reduction cost workflow
//!   ([`costs`]),
//! - a config-driven experiment runner with reports and convergence studies
//!   ([`experiment`]).
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default). Every parallel path has a sequential twin selected through
//! [`Execution`], and both produce bit-identical results.

pub mod baselines;
pub mod costs;
pub mod distributions;
pub mod error;
pub mod estimators;
mod exec;
pub mod experiment;
pub mod importance;
pub mod models;
pub mod rng;
pub mod sample;

pub use error::{GsaError, Result};
pub use exec::Execution;
pub use rng::RngSeed;
pub use sample::SampleMatrix;
