//! Covariate-drift analysis toolkit.
//!
//! The crate is organised bottom-up:
//!
//! - [`numcore`]: special functions, distribution CDFs, descriptive statistics,
//!   a Jacobi eigensolver, SPD solves and seeded multivariate-normal sampling.
//! - [`possibility`]: fuzzy sets, possibility/necessity measures, the
//!   probability-to-possibility transformation and nonspecificity.
//! - [`ingest`]: typed loading of the garment-employee productivity CSV.
//! - [`eda`]: correlation matrices, distribution summaries, web-plot edges.
//! - [`factor`]: Kaiser retention and maximum-likelihood factor analysis.
//! - [`drift`]: expanding-window statistics and the H1/H2 drift tests.
//! - [`regress`]: ordinary least squares with full inference.
//! - [`dynamics`]: STM/Hebbian network dynamics, decay models and a
//!   stochastic delay-equation simulator.
// NaN-rejecting comparisons are written as negations on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]


pub mod drift;
pub mod dynamics;
pub mod eda;
mod error;
pub mod factor;
pub mod ingest;
pub mod numcore;
pub mod possibility;
pub mod regress;

pub use error::{Error, Result};
