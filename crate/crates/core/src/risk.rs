//! Chi-square unbiased risk estimates.
//!
//! For `y ~ χ²_K(x)` and an estimator `f(y)` that is `C¹` in each `y_n`,
//!
//! ```text
//! CURE = (‖f − (y − K)‖² − 4·1ᵀ(y − K/2)) / N + 8·((y − K/2)ᵀ∂f − yᵀ∂²f) / N
//! ```
//!
//! has the same expectation as `‖f − x‖²/N`. `∂f` and `∂²f` are the diagonal
//! first and second derivatives. The second term is called the *divergence*
//! here; for filterbank estimators it is computed band by band from
//! correlations of `y` with powers of the analysis taps.

use rayon::prelude::*;

use crate::chi2model::{CleanField, NoisyField};
use crate::error::{check_len, Result};
use crate::image::{dot, Image};
use crate::jet::Jet;
use crate::transforms::{Band, FilterBank};

/// `f(y)` with its diagonal derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorEvaluation {
    pub f: Vec<f64>,
    pub df: Vec<f64>,
    pub d2f: Vec<f64>,
}

/// A coefficient-domain function `θ(u, v)` evaluated over one band, with the
/// partials with respect to the coefficient `u` and the variance proxy `v`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SubbandEvaluation {
    pub theta: Vec<f64>,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d11: Vec<f64>,
    pub d22: Vec<f64>,
    pub d12: Vec<f64>,
}

impl SubbandEvaluation {
    pub fn zeros(n: usize) -> Self {
        Self {
            theta: vec![0.0; n],
            d1: vec![0.0; n],
            d2: vec![0.0; n],
            d11: vec![0.0; n],
            d22: vec![0.0; n],
            d12: vec![0.0; n],
        }
    }

    /// `θ(u, v) = u − offset` (keep-all, optionally removing a constant bias).
    pub fn identity(w: &[f64], offset: f64) -> Self {
        let mut ev = Self::zeros(w.len());
        ev.theta = w.iter().map(|v| v - offset).collect();
        ev.d1.fill(1.0);
        ev
    }

    pub fn from_jets(jets: &[Jet]) -> Self {
        let n = jets.len();
        let mut ev = Self {
            theta: Vec::with_capacity(n),
            d1: Vec::with_capacity(n),
            d2: Vec::with_capacity(n),
            d11: Vec::with_capacity(n),
            d22: Vec::with_capacity(n),
            d12: Vec::with_capacity(n),
        };
        for j in jets {
            ev.theta.push(j.v);
            ev.d1.push(j.d1);
            ev.d2.push(j.d2);
            ev.d11.push(j.d11);
            ev.d22.push(j.d22);
            ev.d12.push(j.d12);
        }
        ev
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    fn check(&self) -> Result<()> {
        let n = self.theta.len();
        for v in [&self.d1, &self.d2, &self.d11, &self.d22, &self.d12] {
            check_len(n, v.len())?;
        }
        Ok(())
    }

    /// `Σ_k a_k ev_k` (all partials are linear in the weights).
    pub fn linear_combination(evs: &[SubbandEvaluation], weights: &[f64]) -> Result<Self> {
        check_len(evs.len(), weights.len())?;
        let n = evs.first().map_or(0, |e| e.len());
        let mut out = Self::zeros(n);
        for (ev, &a) in evs.iter().zip(weights) {
            check_len(n, ev.len())?;
            for (dst, src) in [
                (&mut out.theta, &ev.theta),
                (&mut out.d1, &ev.d1),
                (&mut out.d2, &ev.d2),
                (&mut out.d11, &ev.d11),
                (&mut out.d22, &ev.d22),
                (&mut out.d12, &ev.d12),
            ] {
                dst.iter_mut().zip(src).for_each(|(d, s)| *d += a * s);
            }
        }
        Ok(out)
    }
}

/// Risk summary of one estimate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RiskReport {
    pub cure: f64,
    pub mse_oracle: Option<f64>,
    /// Per-band contribution, in the units of the band's own estimate.
    pub per_band: Vec<(String, f64)>,
}

/// `(y − K/2)ᵀ∂f − yᵀ∂²f`.
pub fn image_divergence(y: &[f64], dof: f64, df: &[f64], d2f: &[f64]) -> Result<f64> {
    check_len(y.len(), df.len())?;
    check_len(y.len(), d2f.len())?;
    Ok(y
        .iter()
        .zip(df)
        .zip(d2f)
        .map(|((&yn, &d1), &d2)| (yn - dof / 2.0) * d1 - yn * d2)
        .sum())
}

/// CURE from the estimate and its (precomputed) divergence term.
pub fn cure_from_divergence(y: &[f64], dof: f64, f: &[f64], divergence: f64) -> Result<f64> {
    check_len(y.len(), f.len())?;
    let n = y.len() as f64;
    let fidelity: f64 = y
        .iter()
        .zip(f)
        .map(|(&yn, &fn_)| (fn_ - (yn - dof)).powi(2) - 4.0 * (yn - dof / 2.0))
        .sum();
    Ok((fidelity + 8.0 * divergence) / n)
}

/// Image-domain CURE of an estimator with known diagonal derivatives.
pub fn cure_image(y: &NoisyField, ev: &EstimatorEvaluation) -> Result<f64> {
    let yd = y.samples().data();
    check_len(yd.len(), ev.f.len())?;
    let div = image_divergence(yd, y.dof(), &ev.df, &ev.d2f)?;
    cure_from_divergence(yd, y.dof(), &ev.f, div)
}

/// `‖f − x‖²/N`.
pub fn mse_oracle(f: &[f64], x: &CleanField) -> Result<f64> {
    mse(f, x.values().data())
}

pub fn mse(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum::<f64>() / a.len() as f64)
}

/// Per-subband CURE for the unnormalized Haar transform, with `s` the
/// same-scale scaling coefficients of dof `K_j`.
pub fn cure_subband(w: &[f64], s: &[f64], dof_j: f64, ev: &SubbandEvaluation) -> Result<f64> {
    check_len(w.len(), s.len())?;
    check_len(w.len(), ev.len())?;
    ev.check()?;
    let n = w.len() as f64;
    let half = dof_j / 2.0;
    let mut acc = 0.0;
    for i in 0..w.len() {
        let (wi, si) = (w[i], s[i]);
        acc += (ev.theta[i] - wi).powi(2) - 4.0 * (si - half);
        acc += 8.0 * ((si - half) * ev.d1[i] + wi * ev.d2[i]);
        acc -= 8.0 * (wi * (ev.d11[i] + ev.d22[i]) + 2.0 * si * ev.d12[i]);
    }
    Ok(acc / n)
}

/// Correlations of the data with the tap powers `d^p` that the divergence of
/// a pointwise band estimator needs.
#[derive(Debug, Clone)]
pub struct BandPowers {
    /// `D∘² (y − K/2)`
    q2: Image,
    /// `D∘³ (y − K/2)`
    q3: Image,
    /// `D∘³ y`, `D∘⁴ y`, `D∘⁵ y`
    p3: Image,
    p4: Image,
    p5: Image,
}

impl BandPowers {
    pub fn new(y: &Image, dof: f64, band: &Band) -> Self {
        let corr = |p: i32| band.kernel.powi(p).correlate(y);
        let centred = |p: i32| {
            let k = band.kernel.powi(p);
            let bias = dof / 2.0 * k.tap_sum();
            k.correlate(y).map(|v| v - bias)
        };
        Self {
            q2: centred(2),
            q3: centred(3),
            p3: corr(3),
            p4: corr(4),
            p5: corr(5),
        }
    }
}

/// Divergence `(y − K/2)ᵀ∂f − yᵀ∂²f` of `f = R_b θ(D_b y, D̄_b y)` with
/// `R_b = c_b D_bᵀ` and `D̄_b = D_b∘²`.
pub fn band_divergence(band: &Band, powers: &BandPowers, ev: &SubbandEvaluation) -> f64 {
    let first = dot(&ev.d1, powers.q2.data()) + dot(&ev.d2, powers.q3.data());
    let second = dot(&ev.d11, powers.p3.data())
        + 2.0 * dot(&ev.d12, powers.p4.data())
        + dot(&ev.d22, powers.p5.data());
    band.synthesis_scale * (first - second)
}

/// Image-domain CURE of `f(y) = Σ_b R_b θ_b(w_b, w̄_b)` evaluated through
/// band correlations instead of the `N x N` transform matrices.
pub fn cure_filterbank_divergence(
    y: &NoisyField,
    bank: &FilterBank,
    evs: &[SubbandEvaluation],
) -> Result<(Image, RiskReport)> {
    if evs.len() != bank.bands.len() {
        return Err(crate::CureError::IncompleteBands(format!(
            "{} bands but {} evaluations",
            bank.bands.len(),
            evs.len()
        )));
    }
    let img = y.samples();
    bank.check_size(img)?;
    for ev in evs {
        check_len(img.len(), ev.len())?;
        ev.check()?;
    }
    let parts: Vec<(Image, f64)> = bank
        .bands
        .par_iter()
        .zip(evs)
        .map(|(band, ev)| {
            let theta = Image::new(img.width(), img.height(), ev.theta.clone())?;
            let powers = BandPowers::new(img, y.dof(), band);
            Ok((band.synthesize(&theta), band_divergence(band, &powers, ev)))
        })
        .collect::<Result<_>>()?;
    let mut f = Image::zeros(img.width(), img.height());
    let mut div = 0.0;
    let n = img.len() as f64;
    let mut per_band = Vec::with_capacity(parts.len());
    for (band, (fb, db)) in bank.bands.iter().zip(&parts) {
        f.add_scaled(fb, 1.0);
        div += db;
        per_band.push((band.label.clone(), 8.0 * db / n));
    }
    let cure = cure_from_divergence(img.data(), y.dof(), f.data(), div)?;
    Ok((
        f,
        RiskReport {
            cure,
            mse_oracle: None,
            per_band,
        },
    ))
}
