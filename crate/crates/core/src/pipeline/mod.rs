//! End-to-end magnitude MR denoising, quality metrics, phantoms and Monte Carlo protocols.

pub mod denoise;
pub mod experiment;
pub mod metrics;
pub mod phantom;

pub use denoise::{denoise_mr, denoise_squared, resolve_sigma, DenoiseOptions, Method, MrDenoised, SigmaSpec};
pub use experiment::{monte_carlo_experiment, run_once, ExperimentRow, Protocol, RunResult, CSV_HEADER, DEFAULT_SIGMAS};
pub use metrics::{cipsnr, psnr, quality, ssim_mean, AffineFit, QualityReport, PSNR_CAP};
pub use phantom::{edge_fraction, make_phantom, PhantomKind};

use crate::error::{CureError, Result};
use crate::image::Image;

/// What the samples of an [`ImageBuffer`] represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Magnitude,
    SquaredRescaled,
    CleanReference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    pub image: Image,
    pub semantics: Semantics,
    /// Bit depth of the file the data came from, if any.
    pub bit_depth: Option<u8>,
}

impl ImageBuffer {
    pub fn new(image: Image, semantics: Semantics, bit_depth: Option<u8>) -> Result<Self> {
        if semantics == Semantics::Magnitude && image.data().iter().any(|v| *v < 0.0) {
            return Err(CureError::param("image", "magnitude data must be nonnegative"));
        }
        Ok(Self {
            image,
            semantics,
            bit_depth,
        })
    }
}
