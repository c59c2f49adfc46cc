//! Pointwise LET over undecimated filterbanks.
//!
//! Each highpass band contributes one atom per `λ`,
//! `f_{b,λ} = R_b θ_λ(D_b y, D̄_b y)`, and the lowpass band one bias-removed
//! atom `R_0 (D_0 y − tapsum·K)`. The weights minimize image-domain CURE,
//! which is quadratic in them.

use rayon::prelude::*;

use super::atoms::{guard_epsilon, let_atom_pointwise, DEFAULT_BETA};
use super::solve::NormalSystem;
use super::Denoised;
use crate::chi2model::NoisyField;
use crate::error::{check_len, CureError, Result};
use crate::image::{dot, Image};
use crate::jet::Jet;
use crate::risk::{band_divergence, cure_from_divergence, BandPowers, RiskReport, SubbandEvaluation};
use crate::transforms::{BandKind, FilterBank};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LetTransform {
    HaarUwt,
    Bdct,
    /// Atoms of both transforms pooled into one system.
    Mixed,
}

/// Which highpass bands share a weight per `λ`. The lowpass atom always has its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightGrouping {
    PerBand,
    /// Bands with equal [`Band::group`](crate::transforms::Band) (UWT level, BDCT `max(u, v)`).
    PerGroup,
    PerBank,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointwiseLetConfig {
    pub transform: LetTransform,
    pub levels: usize,
    pub lambdas: Vec<f64>,
    pub beta: f64,
    pub uwt_grouping: WeightGrouping,
    pub bdct_grouping: WeightGrouping,
}

impl Default for PointwiseLetConfig {
    fn default() -> Self {
        Self {
            transform: LetTransform::HaarUwt,
            levels: 3,
            lambdas: vec![3.0, 9.0],
            beta: DEFAULT_BETA,
            uwt_grouping: WeightGrouping::PerGroup,
            bdct_grouping: WeightGrouping::PerGroup,
        }
    }
}

impl PointwiseLetConfig {
    pub fn with_transform(transform: LetTransform) -> Self {
        Self {
            transform,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() || self.lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(CureError::param("lambdas", "need at least one positive value"));
        }
        if !(self.beta > 0.0) {
            return Err(CureError::param("beta", "must be positive"));
        }
        Ok(())
    }

    pub fn banks(&self, img: &Image) -> Result<Vec<FilterBank>> {
        let uwt = || FilterBank::uwt_haar_for(img, self.levels);
        Ok(match self.transform {
            LetTransform::HaarUwt => vec![uwt()?],
            LetTransform::Bdct => vec![FilterBank::bdct8()],
            LetTransform::Mixed => vec![uwt()?, FilterBank::bdct8()],
        })
    }
}

/// Image-domain atoms `f_i` with their divergences.
#[derive(Debug, Clone)]
pub struct LetAtoms {
    pub labels: Vec<String>,
    pub images: Vec<Image>,
    pub divergences: Vec<f64>,
}

struct BandAtoms {
    labels: Vec<String>,
    images: Vec<Image>,
    divergences: Vec<f64>,
}

impl LetAtoms {
    pub fn build(y: &NoisyField, cfg: &PointwiseLetConfig) -> Result<Self> {
        cfg.validate()?;
        let img = y.samples();
        let k = y.dof();
        let banks = cfg.banks(img)?;
        for bank in &banks {
            bank.check_size(img)?;
        }
        let bands: Vec<(usize, usize)> = banks
            .iter()
            .enumerate()
            .flat_map(|(k, b)| (0..b.bands.len()).map(move |i| (k, i)))
            .collect();
        let parts: Vec<BandAtoms> = bands
            .par_iter()
            .map(|&(bank_idx, band_idx)| {
                let bank = &banks[bank_idx];
                let band = &bank.bands[band_idx];
                let grouping = if bank.name.contains("DCT") {
                    cfg.bdct_grouping
                } else {
                    cfg.uwt_grouping
                };
                let prefix = match (band.kind, grouping) {
                    (BandKind::Lowpass, _) | (_, WeightGrouping::PerBand) => band.label.clone(),
                    (_, WeightGrouping::PerGroup) => format!("{}#g{}", bank.name, band.group),
                    (_, WeightGrouping::PerBank) => bank.name.clone(),
                };
                let w = band.kernel.correlate(img);
                let powers = BandPowers::new(img, k, band);
                let mut out = BandAtoms {
                    labels: Vec::new(),
                    images: Vec::new(),
                    divergences: Vec::new(),
                };
                let mut push = |label: String, ev: SubbandEvaluation| -> Result<()> {
                    let theta = Image::new(img.width(), img.height(), ev.theta.clone())?;
                    out.divergences.push(band_divergence(band, &powers, &ev));
                    out.images.push(band.synthesize(&theta));
                    out.labels.push(label);
                    Ok(())
                };
                match band.kind {
                    BandKind::Lowpass => {
                        push(prefix, SubbandEvaluation::identity(w.data(), band.tap_sum() * k))?;
                    }
                    BandKind::Highpass => {
                        let wbar = band.kernel.powi(2).correlate(img);
                        let eps = guard_epsilon(w.norm_sq() / w.len() as f64);
                        for &lambda in &cfg.lambdas {
                            let jets: Vec<Jet> = w
                                .data()
                                .iter()
                                .zip(wbar.data())
                                .map(|(&u, &v)| let_atom_pointwise(u, v, lambda, cfg.beta, eps))
                                .collect();
                            push(format!("{prefix}:{lambda}"), SubbandEvaluation::from_jets(&jets))?;
                        }
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        // atoms with equal labels share one weight: sum them
        let mut atoms = LetAtoms {
            labels: Vec::new(),
            images: Vec::new(),
            divergences: Vec::new(),
        };
        for p in parts {
            for ((label, image), div) in p.labels.into_iter().zip(p.images).zip(p.divergences) {
                match atoms.labels.iter().position(|l| *l == label) {
                    Some(i) => {
                        atoms.images[i].add_scaled(&image, 1.0);
                        atoms.divergences[i] += div;
                    }
                    None => {
                        atoms.labels.push(label);
                        atoms.images.push(image);
                        atoms.divergences.push(div);
                    }
                }
            }
        }
        Ok(atoms)
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `M_ij = f_iᵀf_j`, `c_i = f_iᵀ(y − K) − 4·div_i`.
    pub fn normal_system(&self, y: &NoisyField) -> Result<NormalSystem> {
        let target: Vec<f64> = y.samples().data().iter().map(|v| v - y.dof()).collect();
        let c = self
            .images
            .par_iter()
            .zip(&self.divergences)
            .map(|(f, d)| dot(f.data(), &target) - 4.0 * d)
            .collect();
        let views: Vec<&[f64]> = self.images.iter().map(|f| f.data()).collect();
        NormalSystem::from_atoms(&views, c)
    }

    /// `(Σ a_i f_i, Σ a_i div_i)`.
    pub fn combine(&self, weights: &[f64]) -> Result<(Image, f64)> {
        check_len(self.len(), weights.len())?;
        let first = self.images.first().ok_or_else(|| CureError::param("atoms", "empty family"))?;
        let mut out = Image::zeros(first.width(), first.height());
        let mut div = 0.0;
        for ((f, d), &a) in self.images.iter().zip(&self.divergences).zip(weights) {
            out.add_scaled(f, a);
            div += a * d;
        }
        Ok((out, div))
    }

    /// Estimate, divergence and CURE for given weights.
    pub fn evaluate(&self, y: &NoisyField, weights: &[f64]) -> Result<Denoised> {
        let (estimate, divergence) = self.combine(weights)?;
        let cure = cure_from_divergence(y.samples().data(), y.dof(), estimate.data(), divergence)?;
        let n = y.samples().len() as f64;
        let per_band = self
            .labels
            .iter()
            .zip(&self.divergences)
            .zip(weights)
            .map(|((l, d), a)| (l.clone(), 8.0 * a * d / n))
            .collect();
        Ok(Denoised {
            estimate,
            divergence,
            report: RiskReport {
                cure,
                mse_oracle: None,
                per_band,
            },
            weights: vec![("let".to_string(), weights.to_vec())],
        })
    }
}

/// CURE-optimal pointwise LET over the configured filterbank(s).
pub fn uwt_curelet_denoise(y: &NoisyField, cfg: &PointwiseLetConfig) -> Result<Denoised> {
    let atoms = LetAtoms::build(y, cfg)?;
    let weights = atoms.normal_system(y)?.solve()?;
    atoms.evaluate(y, &weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chi2model::{sample_chi2, CleanField};
    use crate::risk::cure_filterbank_divergence;

    #[test]
    fn divergences_agree_with_filterbank_cure() {
        let x = CleanField::new(Image::from_fn(16, 16, |r, c| ((r * 3 + c) % 7) as f64 * 4.0)).unwrap();
        let y = sample_chi2(&x, 2, 3).unwrap();
        let shared = PointwiseLetConfig {
            levels: 2,
            ..Default::default()
        };
        assert_eq!(LetAtoms::build(&y, &shared).unwrap().len(), 2 * 2 + 1);
        let cfg = PointwiseLetConfig {
            uwt_grouping: WeightGrouping::PerBand,
            ..shared
        };
        let atoms = LetAtoms::build(&y, &cfg).unwrap();
        assert_eq!(atoms.len(), 6 * 2 + 1);
        // unit weight on the first λ of each highpass band and on the lowpass atom
        let weights: Vec<f64> = atoms
            .labels
            .iter()
            .map(|l| if l.contains(':') && !l.ends_with(":3") { 0.0 } else { 1.0 })
            .collect();
        let ours = atoms.evaluate(&y, &weights).unwrap();

        let bank = FilterBank::uwt_haar(2).unwrap();
        let evs: Vec<SubbandEvaluation> = bank
            .bands
            .iter()
            .map(|band| {
                let w = band.kernel.correlate(y.samples());
                if band.kind == BandKind::Lowpass {
                    return SubbandEvaluation::identity(w.data(), band.tap_sum() * 2.0);
                }
                let wbar = band.kernel.powi(2).correlate(y.samples());
                let eps = guard_epsilon(w.norm_sq() / w.len() as f64);
                let jets: Vec<Jet> = w
                    .data()
                    .iter()
                    .zip(wbar.data())
                    .map(|(&u, &v)| let_atom_pointwise(u, v, 3.0, DEFAULT_BETA, eps))
                    .collect();
                SubbandEvaluation::from_jets(&jets)
            })
            .collect();
        let (f, report) = cure_filterbank_divergence(&y, &bank, &evs).unwrap();
        assert!(f.max_abs_diff(&ours.estimate) < 1e-9);
        assert!((report.cure - ours.report.cure).abs() < 1e-9 * report.cure.abs().max(1.0));
    }

    #[test]
    fn solved_weights_minimize_cure() {
        let x = CleanField::new(Image::from_fn(16, 16, |r, _| if r < 8 { 10.0 } else { 60.0 })).unwrap();
        let y = sample_chi2(&x, 2, 11).unwrap();
        let cfg = PointwiseLetConfig {
            levels: 2,
            ..Default::default()
        };
        let atoms = LetAtoms::build(&y, &cfg).unwrap();
        let a = atoms.normal_system(&y).unwrap().solve().unwrap();
        let best = atoms.evaluate(&y, &a).unwrap().report.cure;
        for i in 0..atoms.len() {
            let mut single = vec![0.0; atoms.len()];
            single[i] = 1.0;
            assert!(best <= atoms.evaluate(&y, &single).unwrap().report.cure + 1e-9);
        }
    }

    #[test]
    fn rejects_bad_lambda() {
        let y = NoisyField::new(Image::filled(16, 16, 2.0), 2.0).unwrap();
        let cfg = PointwiseLetConfig {
            lambdas: vec![0.0],
            ..Default::default()
        };
        assert!(uwt_curelet_denoise(&y, &cfg).is_err());
    }
}
