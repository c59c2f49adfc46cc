//! Image quality metrics: PSNR, contrast-invariant PSNR and mean SSIM.

use crate::error::{check_len, CureError, Result};
use crate::image::Image;

/// Reported in place of `+∞` when the estimate matches the reference exactly.
pub const PSNR_CAP: f64 = 99.0;

fn peak_and_check(est: &[f64], reference: &[f64]) -> Result<f64> {
    check_len(reference.len(), est.len())?;
    let peak = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if reference.is_empty() || peak == 0.0 {
        return Err(CureError::param("reference", "must not be all zero"));
    }
    Ok(peak)
}

/// `10 log₁₀(N‖μ‖²_∞ / ‖μ̂ − μ‖²)`, with the peak taken from the reference.
pub fn psnr(est: &[f64], reference: &[f64]) -> Result<f64> {
    let peak = peak_and_check(est, reference)?;
    let err: f64 = est.iter().zip(reference).map(|(a, b)| (a - b).powi(2)).sum();
    Ok(psnr_from(reference.len(), peak, err))
}

fn psnr_from(n: usize, peak: f64, err: f64) -> f64 {
    if err == 0.0 {
        return PSNR_CAP;
    }
    (10.0 * (n as f64 * peak * peak / err).log10()).min(PSNR_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit {
    pub psnr: f64,
    pub a: f64,
    pub b: f64,
}

/// PSNR of `a*μ̂ + b*`, the least-squares affine correction of the estimate.
/// A constant estimate only admits the offset fit (`a* = 0`).
pub fn cipsnr(est: &[f64], reference: &[f64]) -> Result<AffineFit> {
    let peak = peak_and_check(est, reference)?;
    let n = est.len() as f64;
    let se: f64 = est.iter().sum();
    let sr: f64 = reference.iter().sum();
    let see: f64 = est.iter().map(|v| v * v).sum();
    let ser: f64 = est.iter().zip(reference).map(|(a, b)| a * b).sum();
    let denom = n * see - se * se;
    let a = if denom > 1e-12 * (n * see).max(f64::MIN_POSITIVE) {
        (n * ser - se * sr) / denom
    } else {
        0.0
    };
    let b = (sr - a * se) / n;
    let err: f64 = est
        .iter()
        .zip(reference)
        .map(|(e, r)| (a * e + b - r).powi(2))
        .sum();
    let plain: f64 = est.iter().zip(reference).map(|(x, y)| (x - y).powi(2)).sum();
    // rounding must not let the affine fit look worse than the identity
    let err = err.min(plain);
    Ok(AffineFit {
        psnr: psnr_from(est.len(), peak, err),
        a,
        b,
    })
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;

fn gaussian_window(size: usize) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let w: Vec<f64> = (0..size)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|v| v / s).collect()
}

/// Separable valid-region filtering with window `wr` (rows) and `wc` (columns).
fn filter_valid(img: &[f64], width: usize, height: usize, wr: &[f64], wc: &[f64]) -> (Vec<f64>, usize, usize) {
    let ow = width + 1 - wc.len();
    let oh = height + 1 - wr.len();
    let mut tmp = vec![0.0; ow * height];
    for r in 0..height {
        for c in 0..ow {
            tmp[r * ow + c] = wc.iter().enumerate().map(|(k, w)| w * img[r * width + c + k]).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = wr.iter().enumerate().map(|(k, w)| w * tmp[(r + k) * ow + c]).sum();
        }
    }
    (out, ow, oh)
}

/// Mean SSIM with an 11×11 Gaussian window (σ = 1.5), `C₁ = (0.01L)²`,
/// `C₂ = (0.03L)²`, over the valid region. Windows shrink to fit smaller images.
pub fn ssim_mean(est: &Image, reference: &Image, dynamic_range: f64) -> Result<f64> {
    reference.check_same_shape(est)?;
    if !(dynamic_range > 0.0) {
        return Err(CureError::param("dynamic_range", "must be positive"));
    }
    let (w, h) = (reference.width(), reference.height());
    let wc = gaussian_window(SSIM_WINDOW.min(w));
    let wr = gaussian_window(SSIM_WINDOW.min(h));
    let c1 = (0.01 * dynamic_range).powi(2);
    let c2 = (0.03 * dynamic_range).powi(2);
    let x = est.data();
    let y = reference.data();
    let prod = |f: &dyn Fn(usize) -> f64| (0..x.len()).map(f).collect::<Vec<f64>>();
    let xx = prod(&|i| x[i] * x[i]);
    let yy = prod(&|i| y[i] * y[i]);
    let xy = prod(&|i| x[i] * y[i]);
    let (mx, ow, oh) = filter_valid(x, w, h, &wr, &wc);
    let (my, _, _) = filter_valid(y, w, h, &wr, &wc);
    let (sxx, _, _) = filter_valid(&xx, w, h, &wr, &wc);
    let (syy, _, _) = filter_valid(&yy, w, h, &wr, &wc);
    let (sxy, _, _) = filter_valid(&xy, w, h, &wr, &wc);
    let mut total = 0.0;
    for i in 0..ow * oh {
        let (ux, uy) = (mx[i], my[i]);
        let vx = sxx[i] - ux * ux;
        let vy = syy[i] - uy * uy;
        let cov = sxy[i] - ux * uy;
        total += ((2.0 * ux * uy + c1) * (2.0 * cov + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
    }
    Ok(total / (ow * oh) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub psnr: f64,
    pub cipsnr: f64,
    pub ssim: f64,
    pub affine: (f64, f64),
}

/// All three metrics against a clean reference; SSIM uses `L = max(reference)`.
pub fn quality(est: &Image, reference: &Image) -> Result<QualityReport> {
    reference.check_same_shape(est)?;
    let p = psnr(est.data(), reference.data())?;
    let ci = cipsnr(est.data(), reference.data())?;
    let range = reference.data().iter().fold(0.0f64, |m, &v| m.max(v));
    let ssim = ssim_mean(est, reference, if range > 0.0 { range } else { 1.0 })?;
    Ok(QualityReport {
        psnr: p,
        cipsnr: ci.psnr,
        ssim,
        affine: (ci.a, ci.b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn psnr_examples() {
        assert_eq!(psnr(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), PSNR_CAP);
        let p = psnr(&[0.0, 8.0], &[0.0, 10.0]).unwrap();
        assert!((p - 10.0 * 50f64.log10()).abs() < 1e-12);
        assert!((p - 16.9897).abs() < 1e-4);
        assert!(psnr(&[1.0], &[1.0, 2.0]).is_err());
        assert!(psnr(&[1.0, 2.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn cipsnr_examples() {
        let r = [1.0, 4.0, 2.0, 8.0];
        let e: Vec<f64> = r.iter().map(|v| 2.0 * v + 5.0).collect();
        let fit = cipsnr(&e, &r).unwrap();
        assert!((fit.a - 0.5).abs() < 1e-12 && (fit.b + 2.5).abs() < 1e-12);
        assert!(fit.psnr > 90.0);
        let fit = cipsnr(&r, &r).unwrap();
        assert!((fit.a - 1.0).abs() < 1e-12 && fit.b.abs() < 1e-12);
        let fit = cipsnr(&[3.0; 4], &r).unwrap();
        assert_eq!(fit.a, 0.0);
        assert!((fit.b - 3.75).abs() < 1e-12);
    }

    #[test]
    fn ssim_examples() {
        let r = Image::from_fn(32, 32, |i, j| ((i * 7 + j * 3) % 11) as f64 * 20.0);
        assert!((ssim_mean(&r, &r, 200.0).unwrap() - 1.0).abs() < 1e-12);
        let mut prev = 1.0;
        for amp in [5.0, 20.0, 80.0, 300.0] {
            let noisy = Image::from_fn(32, 32, |i, j| {
                r.get(i, j) + amp * (((i * 131 + j * 71) % 17) as f64 / 8.0 - 1.0)
            });
            let s = ssim_mean(&noisy, &r, 200.0).unwrap();
            assert!(s < prev && (-1.0..=1.0).contains(&s));
            prev = s;
        }
        assert!(prev < 0.2);
    }

    proptest! {
        #[test]
        fn cipsnr_dominates_psnr(v in proptest::collection::vec((0.0f64..255.0, 0.0f64..255.0), 2..64)) {
            let (e, r): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
            prop_assume!(r.iter().any(|&x| x > 0.0));
            let p = psnr(&e, &r).unwrap();
            let c = cipsnr(&e, &r).unwrap().psnr;
            prop_assert!(c >= p - 1e-9);
        }
    }
}
