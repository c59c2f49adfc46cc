//! CUREshrink: soft thresholding at `a√s_n`, with `a` minimizing subband CURE.

use super::atoms::{soft_threshold_atom, DEFAULT_BETA};
use crate::error::{check_len, CureError, Result};
use crate::jet::Jet;
use crate::risk::{cure_subband, SubbandEvaluation};

#[derive(Debug, Clone, PartialEq)]
pub struct CureShrinkConfig {
    /// Smoothing of the threshold corner, relative to `√mean(s)`.
    pub beta: f64,
    pub grid_step: f64,
    pub grid_max: f64,
    /// Final bracket width of the golden-section refinement.
    pub tolerance: f64,
}

impl Default for CureShrinkConfig {
    fn default() -> Self {
        Self {
            beta: DEFAULT_BETA,
            grid_step: 0.05,
            grid_max: 4.0,
            tolerance: 1e-3,
        }
    }
}

impl CureShrinkConfig {
    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(CureError::param("beta", "must be positive"));
        }
        if !(self.grid_step > 0.0 && self.grid_max >= 0.0 && self.tolerance > 0.0) {
            return Err(CureError::param("grid", "step and tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkChoice {
    pub threshold: f64,
    pub cure: f64,
    pub evaluation: SubbandEvaluation,
}

struct Smoothing {
    beta: f64,
    s_guard: f64,
}

fn smoothing(s: &[f64], cfg: &CureShrinkConfig) -> Smoothing {
    let mean_s = s.iter().sum::<f64>() / s.len().max(1) as f64;
    Smoothing {
        beta: cfg.beta * mean_s.max(0.0).sqrt() + 1e-12,
        s_guard: 1e-12 * (mean_s.abs() + 1.0),
    }
}

fn evaluate_with(w: &[f64], s: &[f64], a: f64, sm: &Smoothing) -> SubbandEvaluation {
    let jets: Vec<Jet> = w
        .iter()
        .zip(s)
        .map(|(&u, &v)| soft_threshold_atom(u, v, a, sm.beta, sm.beta, sm.s_guard))
        .collect();
    SubbandEvaluation::from_jets(&jets)
}

/// Smoothed soft threshold at a fixed `a`.
pub fn cureshrink_evaluate(w: &[f64], s: &[f64], a: f64, cfg: &CureShrinkConfig) -> Result<SubbandEvaluation> {
    cfg.validate()?;
    check_len(w.len(), s.len())?;
    if !(a >= 0.0 && a.is_finite()) {
        return Err(CureError::param("threshold", "must be finite and nonnegative"));
    }
    Ok(evaluate_with(w, s, a, &smoothing(s, cfg)))
}

/// Picks `a` on the grid `{0, step, …, max}`, then refines around the best
/// grid point by golden-section search.
pub fn cureshrink_subband(w: &[f64], s: &[f64], dof_j: f64, cfg: &CureShrinkConfig) -> Result<ShrinkChoice> {
    cfg.validate()?;
    check_len(w.len(), s.len())?;
    if s.iter().any(|&v| v < 0.0) {
        return Err(CureError::param("s", "scaling coefficients must be nonnegative"));
    }
    let sm = smoothing(s, cfg);
    let cure_at = |a: f64| -> Result<f64> { cure_subband(w, s, dof_j, &evaluate_with(w, s, a, &sm)) };

    let steps = (cfg.grid_max / cfg.grid_step).round() as usize;
    let mut best = (0.0, cure_at(0.0)?);
    for i in 1..=steps {
        let a = i as f64 * cfg.grid_step;
        let c = cure_at(a)?;
        if c < best.1 {
            best = (a, c);
        }
    }

    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = ((best.0 - cfg.grid_step).max(0.0), best.0 + cfg.grid_step);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (cure_at(x1)?, cure_at(x2)?);
    while hi - lo > cfg.tolerance {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = cure_at(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = cure_at(x2)?;
        }
    }
    for (a, c) in [(x1, f1), (x2, f2)] {
        if c < best.1 {
            best = (a, c);
        }
    }
    Ok(ShrinkChoice {
        threshold: best.0,
        cure: best.1,
        evaluation: evaluate_with(w, s, best.0, &sm),
    })
}
