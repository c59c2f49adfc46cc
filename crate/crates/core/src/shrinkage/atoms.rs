//! Elementary thresholding functions with exact partial derivatives.

use crate::jet::Jet;

pub const DEFAULT_BETA: f64 = 0.02;

/// Smooth stand-in for `max(u, 0)`: `(u + √(u² + β²)) / 2`.
pub fn smooth_pos(u: f64, beta: f64) -> f64 {
    smooth_pos_derivs(u, beta).0
}

/// Value, first and second derivative of [`smooth_pos`], evaluated without
/// cancellation for large negative `u`.
pub fn smooth_pos_derivs(u: f64, beta: f64) -> (f64, f64, f64) {
    let b2 = beta * beta;
    let r = (u * u + b2).sqrt();
    if u >= 0.0 {
        ((u + r) / 2.0, (1.0 + u / r) / 2.0, b2 / (2.0 * r * r * r))
    } else {
        let d = r - u;
        (b2 / (2.0 * d), b2 / (2.0 * r * d), b2 / (2.0 * r * r * r))
    }
}

pub fn smooth_pos_jet(u: Jet, beta: f64) -> Jet {
    let (f, f1, f2) = smooth_pos_derivs(u.v, beta);
    u.compose(f, f1, f2)
}

/// `C¹` ramp equal to `max(u, 0)` outside `(−β, β)` and to `(u + β)²/(4β)` inside.
/// Unlike [`smooth_pos`] it is exactly zero on the killed side.
pub fn smooth_ramp_derivs(u: f64, beta: f64) -> (f64, f64, f64) {
    if u <= -beta {
        (0.0, 0.0, 0.0)
    } else if u >= beta {
        (u, 1.0, 0.0)
    } else {
        let t = u + beta;
        (t * t / (4.0 * beta), t / (2.0 * beta), 1.0 / (2.0 * beta))
    }
}

pub fn smooth_ramp_jet(u: Jet, beta: f64) -> Jet {
    let (f, f1, f2) = smooth_ramp_derivs(u.v, beta);
    u.compose(f, f1, f2)
}

/// Smooth magnitude `√(u² + η²)` with its first two derivatives.
pub fn smooth_abs_derivs(u: f64, eta: f64) -> (f64, f64, f64) {
    let r = (u * u + eta * eta).sqrt();
    (r, u / r, eta * eta / (r * r * r))
}

pub fn smooth_abs_jet(u: Jet, eta: f64) -> Jet {
    let (f, f1, f2) = smooth_abs_derivs(u.v, eta);
    u.compose(f, f1, f2)
}

/// Guard added to squared magnitudes in shrinkage denominators.
pub fn guard_epsilon(mean_sq: f64) -> f64 {
    1e-12 * (mean_sq + 1.0)
}

/// Shrinkage factor `ramp(1 − 4λ·v / (u² + ε))`, with the `C¹` ramp of [`smooth_ramp_derivs`].
pub fn shrink_factor(lambda: f64, variance: Jet, magnitude: Jet, beta: f64, eps: f64) -> Jet {
    let denom = (magnitude * magnitude).offset(eps);
    let phi = Jet::constant(1.0) - variance.scale(4.0 * lambda).div(denom);
    smooth_ramp_jet(phi, beta)
}

/// Pointwise LET atom `θ(w, w̄) = ramp(1 − 4λ w̄/(w² + ε))·w`.
pub fn let_atom_pointwise(w: f64, wbar: f64, lambda: f64, beta: f64, eps: f64) -> Jet {
    let u = Jet::var1(w);
    shrink_factor(lambda, Jet::var2(wbar), u, beta, eps) * u
}

/// Smoothed signal-dependent soft threshold
/// `θ(w, s) = (w/|w|_η)·smooth_pos(|w|_η − a√s)`, `|w|_η = √(w² + η²)`.
pub fn soft_threshold_atom(w: f64, s: f64, a: f64, beta: f64, eta: f64, s_guard: f64) -> Jet {
    let u = Jet::var1(w);
    let mag = smooth_abs_jet(u, eta);
    let thr = Jet::var2(s.max(0.0)).offset(s_guard).sqrt().scale(a);
    u.div(mag) * smooth_pos_jet(mag - thr, beta)
}

/// Nowak's fixed rule `max(1 − λ·4 max(w̄ − 1, 1)/w², 0)·w` (`K = 2`), kept as a baseline.
pub fn nowak_shrink(w: f64, wbar: f64, lambda: f64) -> f64 {
    if w == 0.0 {
        return 0.0;
    }
    (1.0 - lambda * 4.0 * (wbar - 1.0).max(1.0) / (w * w)).max(0.0) * w
}
