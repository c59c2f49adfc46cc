//! Cycle spinning: averaging a shift-variant denoiser over circular shifts.

use rayon::prelude::*;

use crate::error::{CureError, Result};
use crate::image::Image;

pub const ALLOWED_SPINS: [usize; 4] = [1, 4, 8, 16];

/// The fixed shift list `(dr, dc)`: the diagonal `(k, k)` for `k = 0..4`, then the
/// remaining pairs of `{0..3}²` in row-major order. `n_spins` takes a prefix.
pub fn spin_shifts(n_spins: usize) -> Result<Vec<(isize, isize)>> {
    if !ALLOWED_SPINS.contains(&n_spins) {
        return Err(CureError::param(
            "n_spins",
            format!("must be one of {ALLOWED_SPINS:?}, got {n_spins}"),
        ));
    }
    let mut shifts: Vec<(isize, isize)> = (0..4).map(|k| (k, k)).collect();
    for dr in 0..4 {
        for dc in 0..4 {
            if dr != dc {
                shifts.push((dr, dc));
            }
        }
    }
    shifts.truncate(n_spins);
    Ok(shifts)
}

/// Averages `unshift(denoise(shift(y)))` over the spin list. The denoiser
/// returns its estimate together with a scalar (e.g. a divergence term) that is
/// averaged alongside it.
pub fn cycle_spin_with<F>(y: &Image, n_spins: usize, denoise: F) -> Result<(Image, f64)>
where
    F: Fn(&Image) -> Result<(Image, f64)> + Sync,
{
    let mut shifts = spin_shifts(n_spins)?;
    if y.is_1d() {
        // 1-D signals only shift along the row; keep distinct shifts.
        shifts = shifts.into_iter().map(|(_, dc)| (0, dc)).collect();
        shifts.dedup();
    }
    let runs: Vec<(Image, f64)> = shifts
        .par_iter()
        .map(|&(dr, dc)| {
            let (est, extra) = denoise(&y.shifted(dr, dc))?;
            Ok((est.shifted(-dr, -dc), extra))
        })
        .collect::<Result<_>>()?;
    let k = runs.len() as f64;
    let mut avg = Image::zeros(y.width(), y.height());
    let mut extra = 0.0;
    for (est, e) in &runs {
        avg.add_scaled(est, 1.0 / k);
        extra += e / k;
    }
    Ok((avg, extra))
}

pub fn cycle_spin<F>(y: &Image, n_spins: usize, denoise: F) -> Result<Image>
where
    F: Fn(&Image) -> Result<Image> + Sync,
{
    cycle_spin_with(y, n_spins, |s| Ok((denoise(s)?, 0.0))).map(|(img, _)| img)
}
