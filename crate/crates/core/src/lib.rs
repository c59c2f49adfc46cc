//! Chi-square unbiased risk estimation (CURE) and CURE-optimized transform-domain
//! denoisers for squared-magnitude MR images.
//!
//! The observation model is `y ~ χ²_K(x)`: every sample is the sum of `K`
//! squared unit-variance Gaussians whose squared means add up to the unknown
//! noncentrality `x`. Squared MR magnitudes rescaled by `1/σ²` follow this
//! model with `K = 2`.
//!
//! Modules:
//! - [`chi2model`]: sampling, moments, rescaling and magnitude reconstruction.
//! - [`risk`]: image-domain CURE, its filterbank form, and per-subband Haar CURE.
//! - [`transforms`]: undecimated Haar, overlapping block DCT, unnormalized Haar DWT.
//! - [`shrinkage`]: LET atoms with exact partials, weight solve, CUREshrink, joint LET.
//! - [`pipeline`]: magnitude-image denoising, quality metrics, phantoms, experiments.

pub mod chi2model;
pub mod error;
pub mod image;
pub mod jet;
pub mod pipeline;
pub mod risk;
pub mod shrinkage;
pub mod transforms;

pub use error::{CureError, Result};
pub use image::Image;
