//! CURE-optimal weights of a linear expansion of thresholds.
//!
//! CURE is quadratic in the LET weights `a`; its minimizer solves `M a = c`
//! with `M` the Gram matrix of the atoms.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{CureError, Result};
use crate::image::dot;

/// Condition number above which a Tikhonov term is added.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Tikhonov weight relative to `trace(M)/I`.
pub const TIKHONOV_SCALE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalSystem {
    pub m: DMatrix<f64>,
    pub c: DVector<f64>,
}

impl NormalSystem {
    pub fn new(m: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() != c.len() {
            return Err(CureError::LengthMismatch {
                expected: m.nrows(),
                found: c.len(),
            });
        }
        Ok(Self { m, c })
    }

    /// Gram matrix of the atoms with the supplied right-hand side.
    pub fn from_atoms(atoms: &[&[f64]], c: Vec<f64>) -> Result<Self> {
        let n = atoms.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let vals: Vec<f64> = pairs.par_iter().map(|&(i, j)| dot(atoms[i], atoms[j])).collect();
        let mut m = DMatrix::zeros(n, n);
        for (&(i, j), v) in pairs.iter().zip(vals) {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        Self::new(m, DVector::from_vec(c))
    }

    pub fn solve(&self) -> Result<Vec<f64>> {
        solve_weights(&self.m, &self.c)
    }

    pub fn residual(&self, a: &[f64]) -> f64 {
        (&self.m * DVector::from_column_slice(a) - &self.c).norm()
    }
}

/// Pseudo-inverse solution of `M a = c` through the eigendecomposition of the
/// symmetric `M`; when `cond(M) > 1e12`, solves `(M + δI) a = c` with
/// `δ = 1e−9·trace(M)/I` instead.
pub fn solve_weights(m: &DMatrix<f64>, c: &DVector<f64>) -> Result<Vec<f64>> {
    if m.iter().chain(c.iter()).any(|v| !v.is_finite()) {
        return Err(CureError::NonFinite("LET normal system"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let lmax = eig.eigenvalues.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if lmax == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let lmin = eig.eigenvalues.iter().fold(f64::INFINITY, |acc, &v| acc.min(v));
    let delta = if lmin <= 0.0 || lmax / lmin > CONDITION_LIMIT {
        TIKHONOV_SCALE * m.trace().abs().max(lmax) / n as f64
    } else {
        0.0
    };
    let cutoff = 1e-15 * lmax;
    let proj = eig.eigenvectors.transpose() * c;
    let mut a = DVector::zeros(n);
    for i in 0..n {
        let mu = eig.eigenvalues[i] + delta;
        if mu.abs() > cutoff {
            a += eig.eigenvectors.column(i) * (proj[i] / mu);
        }
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(CureError::NonFinite("LET weights"));
    }
    Ok(a.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let a = solve_weights(&DMatrix::identity(2, 2), &DVector::from_vec(vec![2.0, -1.0])).unwrap();
        assert!((a[0] - 2.0).abs() < 1e-14 && (a[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_system_minimal_norm() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let c = DVector::from_vec(vec![2.0, 2.0]);
        let a = solve_weights(&m, &c).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-8 && (a[1] - 1.0).abs() < 1e-8, "{a:?}");
        let sys = NormalSystem::new(m, c).unwrap();
        assert!(sys.residual(&a) <= 1e-8 * (sys.c.norm() + 1.0));
    }

    #[test]
    fn rejects_non_finite() {
        let m = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(solve_weights(&m, &DVector::from_vec(vec![1.0])).is_err());
    }

    #[test]
    fn gram_from_atoms() {
        let a = [1.0, 2.0, 0.0];
        let b = [0.0, 1.0, 1.0];
        let sys = NormalSystem::from_atoms(&[&a, &b], vec![1.0, 1.0]).unwrap();
        assert_eq!(sys.m[(0, 0)], 5.0);
        assert_eq!(sys.m[(0, 1)], 2.0);
        assert_eq!(sys.m[(1, 0)], 2.0);
        assert_eq!(sys.m[(1, 1)], 2.0);
    }
}
