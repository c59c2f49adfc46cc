//! Joint inter-/intra-scale LET for one unnormalized Haar subband.
//!
//! With `γ_n(u)` a Gaussian-weighted local magnitude average, the eight atoms are
//!
//! ```text
//! θ_{1,2} = Φ_λ(γ(s), γ(w))·w     θ_{3,4} = Φ_λ(γ(s), γ(p))·w
//! θ_{5,6} = Φ_λ(γ(s), γ(w))·p     θ_{7,8} = Φ_λ(γ(s), γ(p))·p
//! Φ_λ(v, u) = ramp(1 − 4λv/(u² + ε))   (C¹ ramp, see `smooth_ramp_derivs`)
//! ```
//!
//! Subband CURE needs `∂θ_n/∂w_n` and `∂θ_n/∂s_n` only, because the pixels of
//! block `n` enter no other `w_k` or `s_k`. Those partials are exact: `w_n`
//! enters `γ_n(w)` through the centre tap, `s_n` enters `γ_n(s)` through the
//! centre tap and `γ_n(p)` through `p_{n−e}` and `p_{n+e}`.

use rayon::prelude::*;

use super::atoms::{guard_epsilon, shrink_factor, smooth_abs_derivs, DEFAULT_BETA};
use crate::error::{CureError, Result};
use crate::image::{wrap, Image};
use crate::jet::Jet;
use crate::risk::SubbandEvaluation;
use crate::transforms::SeparableKernel;

/// Truncated Gaussian `e^{−o²/(2σ²)}/√(2π)` per axis, wrapped periodically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaKernel {
    pub sigma: f64,
    pub radius: usize,
}

impl Default for GammaKernel {
    fn default() -> Self {
        Self { sigma: 1.0, radius: 4 }
    }
}

impl GammaKernel {
    pub fn weight(&self, offset: isize) -> f64 {
        let o = offset as f64 / self.sigma;
        (-0.5 * o * o).exp() / (2.0 * std::f64::consts::PI).sqrt()
    }

    /// Effective weight of every periodic offset `0..size` along one axis.
    pub fn wrapped(&self, size: usize) -> Vec<f64> {
        let mut out = vec![0.0; size];
        let r = self.radius as isize;
        for o in -r..=r {
            out[wrap(o, size)] += self.weight(o);
        }
        out
    }

    fn axis_taps(&self, size: usize) -> Vec<(isize, f64)> {
        if size > 2 * self.radius {
            let r = self.radius as isize;
            (-r..=r).map(|o| (o, self.weight(o))).collect()
        } else {
            self.wrapped(size).into_iter().enumerate().map(|(o, v)| (o as isize, v)).collect()
        }
    }

    /// Smoothing kernel on a `width x height` periodic grid. 1-D fields use no vertical weighting.
    pub fn kernel(&self, width: usize, height: usize, two_d: bool) -> SeparableKernel {
        let horizontal = self.axis_taps(width);
        if two_d {
            SeparableKernel::new(self.axis_taps(height), horizontal)
        } else {
            SeparableKernel::horizontal_only(horizontal)
        }
    }

    /// Weight of offset `(dr, dc)` in [`kernel`](Self::kernel).
    pub fn effective(&self, width: usize, height: usize, two_d: bool, dr: isize, dc: isize) -> f64 {
        let h = self.wrapped(width)[wrap(dc, width)];
        if two_d {
            h * self.wrapped(height)[wrap(dr, height)]
        } else if wrap(dr, height) == 0 {
            h
        } else {
            0.0
        }
    }

    /// `γ(u) = G ⋆ |u|`.
    pub fn smooth_magnitude(&self, u: &Image, two_d: bool) -> Image {
        self.kernel(u.width(), u.height(), two_d).correlate(&u.map(f64::abs))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointLetConfig {
    pub lambdas: [f64; 2],
    pub beta: f64,
    pub gamma: GammaKernel,
}

impl Default for JointLetConfig {
    fn default() -> Self {
        Self {
            lambdas: [1.0, 9.0],
            beta: DEFAULT_BETA,
            gamma: GammaKernel::default(),
        }
    }
}

fn rms(u: &Image) -> f64 {
    (u.norm_sq() / u.len().max(1) as f64).sqrt()
}

/// Data-scaled constants of the joint atoms. The atoms' partials treat them as fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointSmoothing {
    /// Corner of the smoothed magnitudes `√(u² + η²)` of `w` and `p`.
    pub eta_w: f64,
    pub eta_p: f64,
    /// Guards added to `γ(w)²` and `γ(p)²`.
    pub eps_w: f64,
    pub eps_p: f64,
}

impl JointSmoothing {
    pub fn from_data(w: &Image, p: &Image, two_d: bool, gamma: &GammaKernel) -> Self {
        let kernel = gamma.kernel(w.width(), w.height(), two_d);
        let eta_w = 1e-3 * rms(w) + 1e-9;
        let eta_p = 1e-3 * rms(p) + 1e-9;
        let guard = |u: &Image, eta: f64| {
            let g = kernel.correlate(&u.map(|v| smooth_abs_derivs(v, eta).0));
            guard_epsilon(g.norm_sq() / g.len().max(1) as f64)
        };
        Self {
            eta_w,
            eta_p,
            eps_w: guard(w, eta_w),
            eps_p: guard(p, eta_p),
        }
    }
}

/// The eight atoms with their `(w_n, s_n)` partials. `e` is the parent offset
/// (`p_n = s_{n+e} − s_{n−e}`) and `two_d` selects the smoothing geometry.
pub fn joint_let_atoms(
    w: &Image,
    s: &Image,
    p: &Image,
    e: (isize, isize),
    two_d: bool,
    cfg: &JointLetConfig,
) -> Result<Vec<SubbandEvaluation>> {
    w.check_same_shape(p)?;
    let sm = JointSmoothing::from_data(w, p, two_d, &cfg.gamma);
    joint_let_atoms_with(w, s, p, e, two_d, cfg, &sm)
}

/// [`joint_let_atoms`] with explicit smoothing constants.
pub fn joint_let_atoms_with(
    w: &Image,
    s: &Image,
    p: &Image,
    e: (isize, isize),
    two_d: bool,
    cfg: &JointLetConfig,
    sm: &JointSmoothing,
) -> Result<Vec<SubbandEvaluation>> {
    w.check_same_shape(s)?;
    w.check_same_shape(p)?;
    if !(cfg.beta > 0.0) || cfg.lambdas.iter().any(|l| !(*l > 0.0)) {
        return Err(CureError::param("joint LET", "lambdas and beta must be positive"));
    }
    let (width, height) = (w.width(), w.height());
    let g = cfg.gamma;
    let kernel = g.kernel(width, height, two_d);
    let g0 = g.effective(width, height, two_d, 0, 0);
    let ge = g.effective(width, height, two_d, e.0, e.1);

    let JointSmoothing {
        eta_w,
        eta_p,
        eps_w,
        eps_p,
    } = *sm;
    let smooth_abs = |u: &Image, eta: f64| u.map(|v| smooth_abs_derivs(v, eta).0);
    let gw = kernel.correlate(&smooth_abs(w, eta_w));
    let gp = kernel.correlate(&smooth_abs(p, eta_p));
    let gs = kernel.correlate(s);

    // s_n enters p_{n−e} with +1 and p_{n+e} with −1; they cancel when the two coincide.
    let coincide = wrap(2 * e.0, height) == 0 && wrap(2 * e.1, width) == 0;

    let per_pixel: Vec<[Jet; 8]> = (0..w.len())
        .into_par_iter()
        .map(|n| {
            let (r, c) = (n / width, n % width);
            let wn = w.data()[n];
            let (_, aw1, aw2) = smooth_abs_derivs(wn, eta_w);
            let jw = Jet {
                v: gw.data()[n],
                d1: g0 * aw1,
                d11: g0 * aw2,
                ..Jet::constant(0.0)
            };
            let js = Jet {
                v: gs.data()[n],
                d2: g0,
                ..Jet::constant(0.0)
            };
            let mut jp = Jet::constant(gp.data()[n]);
            if !coincide {
                let lo = p.get_wrapped(r, c, -e.0, -e.1);
                let hi = p.get_wrapped(r, c, e.0, e.1);
                let (_, lo1, lo2) = smooth_abs_derivs(lo, eta_p);
                let (_, hi1, hi2) = smooth_abs_derivs(hi, eta_p);
                jp.d2 = ge * (lo1 - hi1);
                jp.d22 = ge * (lo2 + hi2);
            }
            let carrier_w = Jet::var1(wn);
            let carrier_p = Jet::constant(p.data()[n]);
            let mut out = [Jet::default(); 8];
            for (k, &lambda) in cfg.lambdas.iter().enumerate() {
                let fw = shrink_factor(lambda, js, jw, cfg.beta, eps_w);
                let fp = shrink_factor(lambda, js, jp, cfg.beta, eps_p);
                out[k] = fw * carrier_w;
                out[2 + k] = fp * carrier_w;
                out[4 + k] = fw * carrier_p;
                out[6 + k] = fp * carrier_p;
            }
            out
        })
        .collect();

    Ok((0..8)
        .map(|k| {
            let jets: Vec<Jet> = per_pixel.iter().map(|a| a[k]).collect();
            SubbandEvaluation::from_jets(&jets)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn impulse_response() {
        let g = GammaKernel::default();
        let mut d = Image::zeros(16, 1);
        d.set(0, 0, 1.0);
        let out = g.smooth_magnitude(&d, false);
        assert!((out.get(0, 0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        let mut d = Image::zeros(16, 16);
        d.set(3, 3, -1.0);
        let out = g.smooth_magnitude(&d, true);
        assert!((out.get(3, 3) - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn wrapped_weights_fold_onto_small_grids() {
        let g = GammaKernel::default();
        let total: f64 = (-4..=4).map(|o| g.weight(o)).sum();
        let w = g.wrapped(3);
        assert!((w.iter().sum::<f64>() - total).abs() < 1e-15);
        assert!((w[1] - w[2]).abs() < 1e-15);
        let img = Image::from_fn(3, 3, |r, c| (r * 3 + c) as f64);
        let direct = g.smooth_magnitude(&img, true);
        let mut brute = 0.0;
        for dr in -4..=4isize {
            for dc in -4..=4isize {
                brute += g.weight(dr) * g.weight(dc) * img.get_wrapped(1, 2, dr, dc);
            }
        }
        assert!((direct.get(1, 2) - brute).abs() < 1e-12);
    }

    #[test]
    fn zero_parent_kills_parent_atoms() {
        let w = Image::from_fn(8, 8, |r, c| ((r * 5 + c * 3) % 7) as f64 - 3.0);
        let s = Image::filled(8, 8, 0.1);
        let p = Image::zeros(8, 8);
        let atoms = joint_let_atoms(&w, &s, &p, (0, 1), true, &JointLetConfig::default()).unwrap();
        for k in [2, 3, 4, 5, 6, 7] {
            assert!(atoms[k].theta.iter().all(|t| t.abs() < 1e-9), "atom {k}");
        }
        assert!(atoms[0].theta.iter().any(|t| t.abs() > 1e-3));
    }
}
