//! Noncentral chi-square observation model.
//!
//! Squared MR magnitudes divided by `σ²` are noncentral chi-square with two
//! degrees of freedom, with noncentrality equal to the rescaled noise-free
//! squared magnitude. Sampling is constructive (sums of squared Gaussians) and
//! uses one ChaCha stream per sample index, so every pixel's draw depends only
//! on `(seed, index)` and not on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{check_len, CureError, Result};
use crate::image::Image;

/// Noisy chi-square observation `y` with common degrees of freedom `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyField {
    samples: Image,
    dof: f64,
}

impl NoisyField {
    pub fn new(samples: Image, dof: f64) -> Result<Self> {
        if !(dof > 0.0 && dof.is_finite()) {
            return Err(CureError::param("dof", format!("must be positive, got {dof}")));
        }
        if samples.data().iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(CureError::param("samples", "must be finite and nonnegative"));
        }
        Ok(Self { samples, dof })
    }

    pub fn samples(&self) -> &Image {
        &self.samples
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn into_samples(self) -> Image {
        self.samples
    }
}

/// Noise-free noncentrality parameters `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CleanField {
    values: Image,
}

impl CleanField {
    pub fn new(values: Image) -> Result<Self> {
        if values.data().iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(CureError::param("values", "must be finite and nonnegative"));
        }
        Ok(Self { values })
    }

    /// `x = μ²/σ²` for a noise-free magnitude image `μ`.
    pub fn from_magnitude(mu: &Image, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Self::new(mu.map(|m| m * m / (sigma * sigma)))
    }

    pub fn values(&self) -> &Image {
        &self.values
    }
}

/// Complex measurements `m = μ + σ(g₁ + i g₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexImage {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub sigma: f64,
}

impl ComplexImage {
    pub fn magnitude(&self) -> Vec<f64> {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(a, b)| a.hypot(*b))
            .collect()
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(CureError::param("sigma", format!("must be positive, got {sigma}")))
    }
}

/// Per-index generator: stream `index` of the ChaCha8 key derived from `seed`.
fn stream_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Draws `y_n ~ χ²_K(x_n)` as `(√x_n + g₁)² + g₂² + … + g_K²`.
pub fn sample_chi2(x: &CleanField, dof: u32, seed: u64) -> Result<NoisyField> {
    if dof == 0 {
        return Err(CureError::param("dof", "sampling needs an integer K >= 1"));
    }
    let src = x.values();
    let data: Vec<f64> = src
        .data()
        .par_iter()
        .enumerate()
        .map(|(n, &xn)| {
            let mut rng = stream_rng(seed, n);
            let g: f64 = StandardNormal.sample(&mut rng);
            let mut y = (xn.sqrt() + g).powi(2);
            for _ in 1..dof {
                let g: f64 = StandardNormal.sample(&mut rng);
                y += g * g;
            }
            y
        })
        .collect();
    NoisyField::new(Image::new(src.width(), src.height(), data)?, dof as f64)
}

/// Accepts a real-valued `K` and rejects it unless it is a positive integer.
pub fn sample_chi2_real_dof(x: &CleanField, dof: f64, seed: u64) -> Result<NoisyField> {
    if !(dof >= 1.0) || dof.fract() != 0.0 || dof > u32::MAX as f64 {
        return Err(CureError::param(
            "dof",
            format!("sampling needs an integer K >= 1, got {dof}"),
        ));
    }
    sample_chi2(x, dof as u32, seed)
}

/// Mean vector `x + K` and `E‖y‖² = ‖x‖² + 2(K+2)·1ᵀx + N·K(K+2)`.
pub fn moments(x: &CleanField, dof: f64) -> Result<(Vec<f64>, f64)> {
    if !(dof > 0.0) {
        return Err(CureError::param("dof", "must be positive"));
    }
    let xs = x.values().data();
    let n = xs.len() as f64;
    let mean = xs.iter().map(|&v| v + dof).collect();
    let sq: f64 = xs.iter().map(|v| v * v).sum();
    let sum: f64 = xs.iter().sum();
    let second = sq + 2.0 * (dof + 2.0) * sum + n * dof * (dof + 2.0);
    Ok((mean, second))
}

/// Complex Gaussian measurements around real means `mu`.
pub fn sample_complex(mu: &[f64], sigma: f64, seed: u64) -> Result<ComplexImage> {
    check_sigma(sigma)?;
    let (re, im): (Vec<f64>, Vec<f64>) = mu
        .par_iter()
        .enumerate()
        .map(|(n, &m)| {
            let mut rng = stream_rng(seed, n);
            let g1: f64 = StandardNormal.sample(&mut rng);
            let g2: f64 = StandardNormal.sample(&mut rng);
            (m + sigma * g1, sigma * g2)
        })
        .unzip();
    Ok(ComplexImage { re, im, sigma })
}

/// Rician magnitudes `|μ + σ(g₁ + i g₂)|`.
pub fn sample_rician(mu_magnitude: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if mu_magnitude.iter().any(|&m| !(m >= 0.0)) {
        return Err(CureError::param("mu_magnitude", "must be nonnegative"));
    }
    Ok(sample_complex(mu_magnitude, sigma, seed)?.magnitude())
}

/// `y_n = |m_n|²/σ²` with `K = 2`.
pub fn rescale_squared(m_magnitude: &Image, sigma: f64) -> Result<NoisyField> {
    check_sigma(sigma)?;
    let s2 = sigma * sigma;
    NoisyField::new(m_magnitude.map(|m| m * m / s2), 2.0)
}

/// `μ̂_n = σ(λ√|x̂_n| + (1−λ)√max(x̂_n, 0))`.
pub fn reconstruct_magnitude(xhat: &[f64], sigma: f64, lambda: f64) -> Result<Vec<f64>> {
    check_sigma(sigma)?;
    if !(0.0..=1.0).contains(&lambda) {
        return Err(CureError::param("lambda", format!("must lie in [0, 1], got {lambda}")));
    }
    Ok(xhat
        .iter()
        .map(|&v| sigma * (lambda * v.abs().sqrt() + (1.0 - lambda) * v.max(0.0).sqrt()))
        .collect())
}

pub const MIN_BACKGROUND_PIXELS: usize = 16;

/// Moment-matching noise level from a signal-free region:
/// `σ̂ = sqrt(Σ_{n∈S} |m_n|² / (2|S|))`.
pub fn estimate_sigma_background(m_magnitude: &[f64], mask: &[bool]) -> Result<f64> {
    check_len(m_magnitude.len(), mask.len())?;
    let (count, sum_sq) = m_magnitude
        .iter()
        .zip(mask)
        .filter(|(_, &keep)| keep)
        .fold((0usize, 0.0), |(c, s), (m, _)| (c + 1, s + m * m));
    if count < MIN_BACKGROUND_PIXELS {
        return Err(CureError::param(
            "mask",
            format!("selects {count} pixels, need at least {MIN_BACKGROUND_PIXELS}"),
        ));
    }
    let sigma = (sum_sq / (2.0 * count as f64)).sqrt();
    if sigma > 0.0 && sigma.is_finite() {
        Ok(sigma)
    } else {
        Err(CureError::NonFinite("background noise estimate"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clean(values: Vec<f64>) -> CleanField {
        CleanField::new(Image::from_row(values).unwrap()).unwrap()
    }

    fn mean_var(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0);
        (m, var)
    }

    #[test]
    fn central_mean_is_dof() {
        let x = clean(vec![0.0; 100_000]);
        let y = sample_chi2(&x, 2, 11).unwrap();
        let (m, var) = mean_var(y.samples().data());
        let se = (var / 1e5).sqrt();
        assert!((m - 2.0).abs() < 3.0 * se, "mean {m}, se {se}");
    }

    #[test]
    fn noncentral_variance_matches_moments() {
        // Var = 2K + 4x = 20 for x = 4, K = 2.
        let x = clean(vec![4.0; 1_000_000]);
        let y = sample_chi2(&x, 2, 5).unwrap();
        let (m, var) = mean_var(y.samples().data());
        // κ₄ = 48(K + 4x), Var(s²) ≈ (κ₄ + 2κ₂²)/n
        let se_var = ((48.0 * 18.0 + 2.0 * 400.0) / 1e6_f64).sqrt();
        assert!((var - 20.0).abs() < 4.0 * se_var, "var {var}");
        assert!((m - 6.0).abs() < 4.0 * (20.0 / 1e6_f64).sqrt());
    }

    #[test]
    fn sampling_is_deterministic_and_order_free() {
        let x = clean((0..500).map(|i| i as f64 * 0.1).collect());
        let a = sample_chi2(&x, 3, 42).unwrap();
        let b = sample_chi2(&x, 3, 42).unwrap();
        assert_eq!(a, b);
        // A prefix of the field draws the same values as the full field.
        let head = clean((0..10).map(|i| i as f64 * 0.1).collect());
        let h = sample_chi2(&head, 3, 42).unwrap();
        assert_eq!(&a.samples().data()[..10], h.samples().data());
        let c = sample_chi2(&x, 3, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn non_integer_dof_rejected_for_sampling() {
        let x = clean(vec![1.0; 4]);
        assert!(sample_chi2_real_dof(&x, 2.5, 0).is_err());
        assert!(sample_chi2_real_dof(&x, 0.0, 0).is_err());
        assert!(sample_chi2(&x, 0, 0).is_err());
        assert!(sample_chi2_real_dof(&x, 2.0, 0).is_ok());
        // analytic moments accept real K
        assert!(moments(&x, 2.5).is_ok());
    }

    #[test]
    fn moments_examples() {
        let (mean, sq) = moments(&clean(vec![0.0, 0.0]), 2.0).unwrap();
        assert_eq!(mean, vec![2.0, 2.0]);
        assert_eq!(sq, 16.0);
        let (mean, sq) = moments(&clean(vec![4.0]), 2.0).unwrap();
        assert_eq!(mean, vec![6.0]);
        assert_eq!(sq, 56.0);
        assert_eq!(sq - mean[0] * mean[0], 2.0 * 2.0 + 4.0 * 4.0);
    }

    #[test]
    fn rician_central_case() {
        let m = sample_rician(&vec![0.0; 200_000], 1.0, 3).unwrap();
        let sq: Vec<f64> = m.iter().map(|v| v * v).collect();
        let (mean, var) = mean_var(&sq);
        assert!((mean - 2.0).abs() < 4.0 * (var / 2e5).sqrt());
    }

    /// E|μ + g₁ + i g₂| by 2-D trapezoidal quadrature over the Gaussian density.
    fn rician_mean_quadrature(mu: f64, sigma: f64) -> f64 {
        let h = 0.01;
        let lim = 9.0;
        let steps = (2.0 * lim / h) as i32;
        let norm = 1.0 / (2.0 * std::f64::consts::PI);
        let mut acc = 0.0;
        for i in 0..=steps {
            let a = -lim + i as f64 * h;
            for j in 0..=steps {
                let b = -lim + j as f64 * h;
                let w = norm * (-(a * a + b * b) / 2.0).exp();
                acc += w * (mu + sigma * a).hypot(sigma * b);
            }
        }
        acc * h * h
    }

    #[test]
    fn rician_mean_matches_quadrature() {
        let oracle = rician_mean_quadrature(10.0, 1.0);
        assert!((oracle - 10.0499).abs() < 1e-3, "oracle {oracle}");
        let m = sample_rician(&vec![10.0; 1_000_000], 1.0, 9).unwrap();
        let (mean, var) = mean_var(&m);
        assert!((mean - oracle).abs() < 4.0 * (var / 1e6).sqrt(), "{mean} vs {oracle}");
    }

    #[test]
    fn rescaled_rician_is_chi2_with_two_dof() {
        let sigma = 2.0;
        let mu = 7.0;
        let m = sample_rician(&vec![mu; 200_000], sigma, 17).unwrap();
        let y = rescale_squared(&Image::from_row(m).unwrap(), sigma).unwrap();
        assert_eq!(y.dof(), 2.0);
        let (mean, var) = mean_var(y.samples().data());
        let x = mu * mu / (sigma * sigma);
        assert!((mean - (x + 2.0)).abs() < 4.0 * (var / 2e5).sqrt());
    }

    #[test]
    fn sigma_must_be_positive() {
        assert!(sample_rician(&[1.0], 0.0, 0).is_err());
        assert!(sample_rician(&[1.0], -1.0, 0).is_err());
        assert!(rescale_squared(&Image::from_row(vec![1.0]).unwrap(), 0.0).is_err());
    }

    #[test]
    fn rescale_examples() {
        let y = rescale_squared(&Image::from_row(vec![5.0]).unwrap(), 1.0).unwrap();
        assert_eq!(y.samples().data(), &[25.0]);
        let y = rescale_squared(&Image::from_row(vec![3.0, 4.0]).unwrap(), 2.0).unwrap();
        assert_eq!(y.samples().data(), &[2.25, 4.0]);
    }

    #[test]
    fn reconstruct_examples() {
        assert_eq!(reconstruct_magnitude(&[9.0], 1.0, 0.5).unwrap(), vec![3.0]);
        assert_eq!(reconstruct_magnitude(&[-4.0], 1.0, 0.5).unwrap(), vec![1.0]);
        assert_eq!(reconstruct_magnitude(&[-4.0], 2.0, 0.0).unwrap(), vec![0.0]);
        assert!(reconstruct_magnitude(&[1.0], 1.0, 1.5).is_err());
        assert!(reconstruct_magnitude(&[1.0], 1.0, -0.1).is_err());
    }

    #[test]
    fn sigma_background_examples() {
        let s = estimate_sigma_background(&vec![2.0; 16], &vec![true; 16]).unwrap();
        assert!((s - 2.0_f64.sqrt()).abs() < 1e-12);
        assert!(estimate_sigma_background(&[1.0; 20], &[false; 20]).is_err());
        assert!(estimate_sigma_background(&[1.0; 20], &[true; 19]).is_err());
    }

    #[test]
    fn sigma_background_monte_carlo() {
        let n = 4096;
        let mask = vec![true; n];
        for trial in 0..100 {
            let m = sample_rician(&vec![0.0; n], 3.0, 1000 + trial).unwrap();
            let s = estimate_sigma_background(&m, &mask).unwrap();
            assert!((2.9..=3.1).contains(&s), "trial {trial}: {s}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn reconstruction_is_sqrt_on_nonnegative(
                x in 0.0f64..1e6, sigma in 0.01f64..100.0, lambda in 0.0f64..=1.0, dx in 0.0f64..10.0
            ) {
                let out = reconstruct_magnitude(&[x, x + dx], sigma, lambda).unwrap();
                prop_assert!((out[0] - sigma * x.sqrt()).abs() <= 1e-9 * (1.0 + out[0]));
                prop_assert!(out[1] >= out[0]);
            }

            #[test]
            fn sigma_estimate_is_scale_equivariant(
                vals in proptest::collection::vec(0.1f64..50.0, 16..64), c in 0.01f64..100.0
            ) {
                let mask = vec![true; vals.len()];
                let s1 = estimate_sigma_background(&vals, &mask).unwrap();
                let scaled: Vec<f64> = vals.iter().map(|v| v * c).collect();
                let s2 = estimate_sigma_background(&scaled, &mask).unwrap();
                prop_assert!((s2 - c * s1).abs() <= 1e-9 * s2);
            }

            #[test]
            fn rescale_times_sigma_sq_is_constant(m in 0.0f64..1e3, s1 in 0.1f64..10.0, s2 in 0.1f64..10.0) {
                let img = Image::from_row(vec![m]).unwrap();
                let a = rescale_squared(&img, s1).unwrap().samples().data()[0] * s1 * s1;
                let b = rescale_squared(&img, s2).unwrap().samples().data()[0] * s2 * s2;
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
            }
        }
    }
}
