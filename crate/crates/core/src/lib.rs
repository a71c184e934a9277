//! Blind separation of sources driven by nonparametric autoregressive dynamics.
//!
//! The pipeline mixes hidden sources `s_t = f(s_{t-1}, ..., s_{t-p}) + e_t` with an
//! invertible matrix, estimates the innovations of the observed process with
//! (recursive) Nadaraya-Watson kernel regression, runs FastICA on the innovations
//! and clusters the ICA coordinates into dependent groups. Recovery is scored with
//! an Amari-index that handles unequal subspace dimensions.
//!
//! Modules:
//! - [`synth`]: hidden driver generators (image densities, geometric forms, ikeda map)
//! - [`far`]: the generative model, kernel regression and the linear AR baseline
//! - [`ica`]: whitening and symmetric FastICA
//! - [`isa`]: KCCA dependence, greedy and NCut clustering, demixing assembly
//! - [`metrics`]: block Amari-index and block-permutation diagnostics
//! - [`harness`]: seeded experiments, box-plot statistics and reports

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod far;
pub mod harness;
pub mod ica;
pub mod isa;
pub mod linalg;
pub mod metrics;
pub mod rng;
pub mod series;
pub mod synth;

pub use error::{Error, Result};
pub use series::TimeSeries;
