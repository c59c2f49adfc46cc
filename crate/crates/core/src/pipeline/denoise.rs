//! Magnitude MR denoising: estimate σ, rescale the squared magnitudes, apply a
//! CURE-optimized denoiser to the chi-square field, map back to magnitudes.

use std::fmt;
use std::str::FromStr;

use crate::chi2model::{estimate_sigma_background, reconstruct_magnitude, rescale_squared, NoisyField};
use crate::error::{CureError, Result};
use crate::image::Image;
use crate::risk::cure_from_divergence;
use crate::shrinkage::{
    haar_denoise, uwt_curelet_denoise, CureShrinkConfig, HaarRule, JointLetConfig, LetTransform,
    PointwiseLetConfig,
};
use crate::transforms::cycle_spin_with;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// CUREshrink in the Haar DWT.
    HaarShrink,
    /// Joint inter-/intra-scale Haar LET averaged over this many cycle spins.
    HaarLet { spins: usize },
    Uwt,
    Bdct,
    UwtBdct,
}

impl FromStr for Method {
    type Err = CureError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "haar-shrink" => Self::HaarShrink,
            "haar-cs1" => Self::HaarLet { spins: 1 },
            "haar-cs4" => Self::HaarLet { spins: 4 },
            "haar-cs8" => Self::HaarLet { spins: 8 },
            "haar-cs16" => Self::HaarLet { spins: 16 },
            "uwt" => Self::Uwt,
            "bdct" => Self::Bdct,
            "uwt-bdct" => Self::UwtBdct,
            other => {
                return Err(CureError::param(
                    "method",
                    format!(
                        "unknown method `{other}` (expected haar-shrink, haar-cs{{1,4,8,16}}, uwt, bdct, uwt-bdct)"
                    ),
                ))
            }
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::HaarShrink => f.write_str("haar-shrink"),
            Self::HaarLet { spins } => write!(f, "haar-cs{spins}"),
            Self::Uwt => f.write_str("uwt"),
            Self::Bdct => f.write_str("bdct"),
            Self::UwtBdct => f.write_str("uwt-bdct"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SigmaSpec {
    Known(f64),
    /// Estimated from the pixels flagged `true` (signal-free background).
    Auto(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenoiseOptions {
    /// Mixing between `√|x̂|` and `√max(x̂, 0)` in the magnitude reconstruction.
    pub lambda: f64,
    pub levels: usize,
    pub pointwise_lambdas: [f64; 2],
    pub joint_lambdas: [f64; 2],
}

impl Default for DenoiseOptions {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            levels: 3,
            pointwise_lambdas: [3.0, 9.0],
            joint_lambdas: [1.0, 9.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SquaredEstimate {
    pub estimate: Image,
    pub cure: f64,
}

/// Runs `method` on a chi-square field. For the Haar methods the field is
/// first padded periodically to a multiple of `2^levels` and CURE refers to
/// the padded field.
pub fn denoise_squared(y: &NoisyField, method: Method, opts: &DenoiseOptions) -> Result<SquaredEstimate> {
    match method {
        Method::Uwt | Method::Bdct | Method::UwtBdct => {
            let transform = match method {
                Method::Uwt => LetTransform::HaarUwt,
                Method::Bdct => LetTransform::Bdct,
                _ => LetTransform::Mixed,
            };
            let cfg = PointwiseLetConfig {
                transform,
                levels: opts.levels,
                lambdas: opts.pointwise_lambdas.to_vec(),
                ..PointwiseLetConfig::default()
            };
            let d = uwt_curelet_denoise(y, &cfg)?;
            Ok(SquaredEstimate {
                estimate: d.estimate,
                cure: d.report.cure,
            })
        }
        Method::HaarShrink | Method::HaarLet { .. } => {
            let (rule, spins) = match method {
                Method::HaarShrink => (HaarRule::CureShrink(CureShrinkConfig::default()), 1),
                Method::HaarLet { spins } => (
                    HaarRule::JointLet(JointLetConfig {
                        lambdas: opts.joint_lambdas,
                        ..JointLetConfig::default()
                    }),
                    spins,
                ),
                _ => unreachable!(),
            };
            let img = y.samples();
            if opts.levels == 0 || opts.levels > 16 {
                return Err(CureError::param("levels", "must be in 1..=16"));
            }
            let block = 1usize << opts.levels;
            let pw = img.width().div_ceil(block) * block;
            let ph = if img.is_1d() { 1 } else { img.height().div_ceil(block) * block };
            let padded = if (pw, ph) == (img.width(), img.height()) {
                img.clone()
            } else {
                img.periodic_extend(pw, ph)
            };
            let k = y.dof();
            let (est, div) = cycle_spin_with(&padded, spins, |shifted| {
                let d = haar_denoise(&NoisyField::new(shifted.clone(), k)?, opts.levels, &rule)?;
                Ok((d.estimate, d.divergence))
            })?;
            let cure = cure_from_divergence(padded.data(), k, est.data(), div)?;
            Ok(SquaredEstimate {
                estimate: est.crop(img.width(), img.height()),
                cure,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MrDenoised {
    pub magnitude: Image,
    pub sigma: f64,
    /// Denoised rescaled squared magnitude `x̂`.
    pub squared: Image,
    pub cure: f64,
}

pub fn resolve_sigma(m: &Image, sigma: &SigmaSpec) -> Result<f64> {
    match sigma {
        SigmaSpec::Known(s) if *s > 0.0 && s.is_finite() => Ok(*s),
        SigmaSpec::Known(s) => Err(CureError::param("sigma", format!("must be positive, got {s}"))),
        SigmaSpec::Auto(mask) => estimate_sigma_background(m.data(), mask),
    }
}

/// Rescale `y = m²/σ²`, denoise with `method`, reconstruct `μ̂ = σ(λ√|x̂| + (1−λ)√max(x̂,0))`.
pub fn denoise_mr(m: &Image, sigma: &SigmaSpec, method: Method, opts: &DenoiseOptions) -> Result<MrDenoised> {
    if m.data().iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(CureError::param("magnitude", "must be finite and nonnegative"));
    }
    let sigma = resolve_sigma(m, sigma)?;
    let y = rescale_squared(m, sigma)?;
    let sq = denoise_squared(&y, method, opts)?;
    let mag = reconstruct_magnitude(sq.estimate.data(), sigma, opts.lambda)?;
    Ok(MrDenoised {
        magnitude: Image::new(m.width(), m.height(), mag)?,
        sigma,
        squared: sq.estimate,
        cure: sq.cure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for name in ["haar-shrink", "haar-cs1", "haar-cs4", "haar-cs8", "haar-cs16", "uwt", "bdct", "uwt-bdct"] {
            assert_eq!(name.parse::<Method>().unwrap().to_string(), name);
        }
        assert!("haar-cs2".parse::<Method>().is_err());
    }

    #[test]
    fn auto_sigma_needs_enough_background() {
        let m = Image::filled(8, 8, 1.0);
        assert!(resolve_sigma(&m, &SigmaSpec::Auto(vec![false; 64])).is_err());
        assert!(resolve_sigma(&m, &SigmaSpec::Known(0.0)).is_err());
    }
}
