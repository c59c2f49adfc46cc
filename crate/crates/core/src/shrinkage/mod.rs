//! Thresholding functions, LET weight solving and the CURE-optimized denoisers.
//!
//! - [`pointwise`]: pointwise LET over undecimated filterbanks (Haar UWT, BDCT, or both).
//! - [`cureshrink`]: signal-dependent soft thresholding with a CURE-selected threshold.
//! - [`joint`]: the eight-atom inter-/intra-scale LET of a Haar subband.
//! - [`haar`]: the Haar DWT driver applying either subband rule.

pub mod atoms;
pub mod cureshrink;
pub mod haar;
pub mod joint;
pub mod pointwise;
pub mod solve;

pub use atoms::{let_atom_pointwise, nowak_shrink, smooth_pos, smooth_pos_derivs, soft_threshold_atom};
pub use cureshrink::{cureshrink_evaluate, cureshrink_subband, CureShrinkConfig, ShrinkChoice};
pub use haar::{haar_curelet_denoise, haar_cureshrink_denoise, haar_denoise, HaarRule};
pub use joint::{joint_let_atoms, joint_let_atoms_with, GammaKernel, JointLetConfig, JointSmoothing};
pub use pointwise::{uwt_curelet_denoise, LetAtoms, LetTransform, PointwiseLetConfig, WeightGrouping};
pub use solve::{solve_weights, NormalSystem};

use crate::image::Image;
use crate::risk::RiskReport;

/// A denoised intensity field with its CURE bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Denoised {
    pub estimate: Image,
    /// `(y − K/2)ᵀ∂f − yᵀ∂²f` over the field the denoiser ran on.
    pub divergence: f64,
    pub report: RiskReport,
    /// Chosen parameters per band or subband (LET weights, or the single threshold of CUREshrink).
    pub weights: Vec<(String, Vec<f64>)>,
}
