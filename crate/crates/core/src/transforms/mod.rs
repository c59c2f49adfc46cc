//! Linear transforms: undecimated Haar and overlapping block DCT filterbanks,
//! the unnormalized Haar DWT, Haar parents, and cycle spinning.
//!
//! All transforms use periodic boundaries.

pub mod bdct;
pub mod cycle_spin;
pub mod filterbank;
pub mod haar;
pub mod parent;
pub mod uwt;

pub use bdct::{bdct_analyze, bdct_synthesize};
pub use cycle_spin::{cycle_spin, cycle_spin_with, spin_shifts};
pub use filterbank::{Band, BandKind, BandMeta, FilterBank, SeparableKernel, SubbandSet};
pub use haar::{haar_dwt_analyze, haar_dwt_synthesize, HaarLevel, HaarPyramid, Orientation};
pub use parent::{parent_field, parent_offset};
pub use uwt::{uwt_haar_analyze, uwt_haar_synthesize};

use crate::chi2model::NoisyField;
use crate::error::Result;
use crate::image::Image;

/// Variance channel `w̄_b` of every band of `bank`.
pub fn variance_channel(y: &NoisyField, bank: &FilterBank) -> Result<Vec<Image>> {
    bank.variance_channel(y.samples())
}

/// Coefficient variance from the variance channel: `Var(w) = 4(E[w̄] − K/2)`.
pub fn variance_from_channel(mean_wbar: f64, dof: f64) -> f64 {
    4.0 * (mean_wbar - dof / 2.0)
}
