//! Unnormalized Haar DWT.
//!
//! Analysis taps are `1 ± z⁻¹`, synthesis taps `(1 ± z)/2`. Scaling
//! coefficients are plain block sums, so `s^j` of chi-square data is again
//! chi-square with dof `2^j K` (1-D) or `4^j K` (2-D) and can serve as the
//! variance proxy of the same-scale wavelet coefficients.

use crate::chi2model::NoisyField;
use crate::error::{CureError, Result};
use crate::image::Image;

/// Subband orientation. `Row` is the single detail band of a 1-D transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Row,
    /// Differences along the column index (horizontal detail).
    HL,
    /// Differences along the row index (vertical detail).
    LH,
    /// Diagonal detail.
    HH,
}

impl Orientation {
    pub fn label(self) -> &'static str {
        match self {
            Orientation::Row => "H",
            Orientation::HL => "HL",
            Orientation::LH => "LH",
            Orientation::HH => "HH",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarLevel {
    pub details: Vec<(Orientation, Image)>,
    /// `s^j`.
    pub scaling: Image,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HaarPyramid {
    pub levels: Vec<HaarLevel>,
    two_d: bool,
    original: (usize, usize),
    padded: (usize, usize),
}

impl HaarPyramid {
    /// Decomposes `img` over `levels` scales, padding periodically to a multiple of `2^levels`.
    pub fn analyze(img: &Image, levels: usize) -> Result<Self> {
        if !(1..=16).contains(&levels) {
            return Err(CureError::param("levels", format!("must be in 1..=16, got {levels}")));
        }
        let two_d = !img.is_1d();
        let block = 1usize << levels;
        let round_up = |n: usize| n.div_ceil(block) * block;
        let padded = (
            round_up(img.width()),
            if two_d { round_up(img.height()) } else { 1 },
        );
        let mut current = if padded == (img.width(), img.height()) {
            img.clone()
        } else {
            img.periodic_extend(padded.0, padded.1)
        };
        let mut out = Vec::with_capacity(levels);
        for _ in 0..levels {
            let level = if two_d {
                analyze_2d(&current)
            } else {
                analyze_1d(&current)
            };
            current = level.scaling.clone();
            out.push(level);
        }
        Ok(Self {
            levels: out,
            two_d,
            original: (img.width(), img.height()),
            padded,
        })
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn is_2d(&self) -> bool {
        self.two_d
    }

    pub fn is_padded(&self) -> bool {
        self.original != self.padded
    }

    /// `(width, height)` of the analysed (padded) field.
    pub fn padded_size(&self) -> (usize, usize) {
        self.padded
    }

    /// Number of input samples aggregated by one level-`j` coefficient (`2^j` or `4^j`).
    pub fn block_size(&self, level: usize) -> f64 {
        let base: f64 = if self.two_d { 4.0 } else { 2.0 };
        base.powi(level as i32)
    }

    /// Dof of `s^j` when the input has dof `base_dof`.
    pub fn level_dof(&self, level: usize, base_dof: f64) -> f64 {
        self.block_size(level) * base_dof
    }

    pub fn coarsest_scaling(&self) -> &Image {
        &self.levels.last().expect("at least one level").scaling
    }

    pub fn coarsest_scaling_mut(&mut self) -> &mut Image {
        &mut self.levels.last_mut().expect("at least one level").scaling
    }

    /// Inverse transform from the coarsest scaling field and all details, cropped to the input size.
    pub fn synthesize(&self) -> Result<Image> {
        let full = self.synthesize_padded()?;
        Ok(if self.is_padded() {
            full.crop(self.original.0, self.original.1)
        } else {
            full
        })
    }

    /// Inverse transform over the padded domain.
    pub fn synthesize_padded(&self) -> Result<Image> {
        let mut current = self.coarsest_scaling().clone();
        for level in self.levels.iter().rev() {
            let expected = if self.two_d { 3 } else { 1 };
            if level.details.len() != expected {
                return Err(CureError::IncompleteBands(format!(
                    "level needs {expected} detail bands, found {}",
                    level.details.len()
                )));
            }
            for (_, d) in &level.details {
                current.check_same_shape(d)?;
            }
            current = if self.two_d {
                synthesize_2d(&current, &level.details)?
            } else {
                synthesize_1d(&current, &level.details[0].1)
            };
        }
        Ok(current)
    }
}

fn analyze_1d(s: &Image) -> HaarLevel {
    let half = s.width() / 2;
    let d = s.data();
    let scaling = (0..half).map(|n| d[2 * n] + d[2 * n + 1]).collect();
    let detail = (0..half).map(|n| d[2 * n + 1] - d[2 * n]).collect();
    HaarLevel {
        details: vec![(Orientation::Row, Image::new(half, 1, detail).expect("shape"))],
        scaling: Image::new(half, 1, scaling).expect("shape"),
    }
}

fn synthesize_1d(s: &Image, w: &Image) -> Image {
    let mut out = Vec::with_capacity(2 * s.len());
    for (sv, wv) in s.data().iter().zip(w.data()) {
        out.push((sv - wv) / 2.0);
        out.push((sv + wv) / 2.0);
    }
    Image::new(2 * s.width(), 1, out).expect("shape")
}

fn analyze_2d(s: &Image) -> HaarLevel {
    let (w, h) = (s.width() / 2, s.height() / 2);
    let mut sc = Image::zeros(w, h);
    let mut hl = Image::zeros(w, h);
    let mut lh = Image::zeros(w, h);
    let mut hh = Image::zeros(w, h);
    for r in 0..h {
        for c in 0..w {
            let a = s.get(2 * r, 2 * c);
            let b = s.get(2 * r, 2 * c + 1);
            let cc = s.get(2 * r + 1, 2 * c);
            let d = s.get(2 * r + 1, 2 * c + 1);
            sc.set(r, c, a + b + cc + d);
            hl.set(r, c, (b + d) - (a + cc));
            lh.set(r, c, (cc + d) - (a + b));
            hh.set(r, c, (a + d) - (b + cc));
        }
    }
    HaarLevel {
        details: vec![
            (Orientation::HL, hl),
            (Orientation::LH, lh),
            (Orientation::HH, hh),
        ],
        scaling: sc,
    }
}

fn synthesize_2d(s: &Image, details: &[(Orientation, Image)]) -> Result<Image> {
    let find = |o: Orientation| {
        details
            .iter()
            .find(|(k, _)| *k == o)
            .map(|(_, img)| img)
            .ok_or_else(|| CureError::IncompleteBands(format!("missing {} band", o.label())))
    };
    let (hl, lh, hh) = (find(Orientation::HL)?, find(Orientation::LH)?, find(Orientation::HH)?);
    let (w, h) = (s.width(), s.height());
    let mut out = Image::zeros(2 * w, 2 * h);
    for r in 0..h {
        for c in 0..w {
            let (sv, x, y, z) = (s.get(r, c), hl.get(r, c), lh.get(r, c), hh.get(r, c));
            out.set(2 * r, 2 * c, (sv - x - y + z) / 4.0);
            out.set(2 * r, 2 * c + 1, (sv + x - y - z) / 4.0);
            out.set(2 * r + 1, 2 * c, (sv - x + y - z) / 4.0);
            out.set(2 * r + 1, 2 * c + 1, (sv + x + y + z) / 4.0);
        }
    }
    Ok(out)
}

pub fn haar_dwt_analyze(y: &NoisyField, levels: usize) -> Result<HaarPyramid> {
    HaarPyramid::analyze(y.samples(), levels)
}

pub fn haar_dwt_synthesize(pyramid: &HaarPyramid) -> Result<Image> {
    pyramid.synthesize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_d_example() {
        let y = Image::from_row(vec![1.0, 3.0, 2.0, 2.0]).unwrap();
        let p = HaarPyramid::analyze(&y, 1).unwrap();
        assert_eq!(p.levels[0].scaling.data(), &[4.0, 4.0]);
        assert_eq!(p.levels[0].details[0].1.data(), &[2.0, 0.0]);
        assert_eq!(p.synthesize().unwrap(), y);
    }

    #[test]
    fn two_d_block() {
        let y = Image::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let p = HaarPyramid::analyze(&y, 1).unwrap();
        let l = &p.levels[0];
        assert_eq!(l.scaling.data(), &[10.0]);
        let sums: Vec<f64> = l.details.iter().map(|(_, d)| d.data()[0]).collect();
        // HL, LH, HH
        assert_eq!(sums, vec![2.0, 4.0, 0.0]);
        assert_eq!(p.synthesize().unwrap(), y);
    }

    #[test]
    fn zeroed_details_give_block_average() {
        let y = Image::from_row(vec![1.0, 3.0]).unwrap();
        let mut p = HaarPyramid::analyze(&y, 1).unwrap();
        p.levels[0].details[0].1.data_mut().fill(0.0);
        assert_eq!(p.synthesize().unwrap().data(), &[2.0, 2.0]);
    }

    #[test]
    fn padding_round_trip() {
        let y = Image::from_fn(13, 17, |r, c| ((r * 5 + c * 3) % 11) as f64);
        let p = HaarPyramid::analyze(&y, 3).unwrap();
        assert!(p.is_padded());
        assert_eq!(p.padded_size(), (16, 24));
        assert!(p.synthesize().unwrap().max_abs_diff(&y) < 1e-12);
    }

    #[test]
    fn dof_scaling() {
        let p2 = HaarPyramid::analyze(&Image::zeros(8, 8), 2).unwrap();
        assert_eq!(p2.level_dof(2, 2.0), 32.0);
        let p1 = HaarPyramid::analyze(&Image::zeros(8, 1), 2).unwrap();
        assert_eq!(p1.level_dof(2, 2.0), 8.0);
    }

    #[test]
    fn missing_band_is_rejected() {
        let mut p = HaarPyramid::analyze(&Image::zeros(4, 4), 1).unwrap();
        p.levels[0].details.pop();
        assert!(p.synthesize().is_err());
    }
}
