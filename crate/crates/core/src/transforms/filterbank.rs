//! Undecimated filterbanks built from separable periodic kernels.
//!
//! Band `b` analyses by correlation, `w_b[n] = Σ_k d_b[k] y[n + k]` (the
//! circulant `D_b`), and synthesizes with `R_b = c_b D_bᵀ`. The scales `c_b`
//! are chosen so that `Σ_b R_b D_b = Id`.

use crate::error::{CureError, Result};
use crate::image::{wrap, Image};

/// 1-D taps as `(offset, value)` pairs.
pub type Taps = Vec<(isize, f64)>;

/// `d[i, j] = vertical[i] · horizontal[j]` at offset `(vertical.0, horizontal.0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableKernel {
    pub vertical: Taps,
    pub horizontal: Taps,
}

impl SeparableKernel {
    pub fn new(vertical: Taps, horizontal: Taps) -> Self {
        Self {
            vertical,
            horizontal,
        }
    }

    /// Row-only kernel for 1-D signals.
    pub fn horizontal_only(horizontal: Taps) -> Self {
        Self::new(vec![(0, 1.0)], horizontal)
    }

    /// Elementwise power `d^p` (still separable).
    pub fn powi(&self, p: i32) -> SeparableKernel {
        let pw = |t: &Taps| t.iter().map(|&(o, v)| (o, v.powi(p))).collect();
        SeparableKernel::new(pw(&self.vertical), pw(&self.horizontal))
    }

    pub fn tap_sum(&self) -> f64 {
        let s = |t: &Taps| t.iter().map(|(_, v)| v).sum::<f64>();
        s(&self.vertical) * s(&self.horizontal)
    }

    pub fn norm_sq(&self) -> f64 {
        self.powi(2).tap_sum()
    }

    /// `out[r, c] = Σ_{i,j} v_i h_j img[r + o_i, c + o_j]` (periodic).
    pub fn correlate(&self, img: &Image) -> Image {
        self.filter(img, 1)
    }

    /// Adjoint of [`correlate`](Self::correlate): `out[r, c] = Σ v_i h_j img[r − o_i, c − o_j]`.
    pub fn correlate_adjoint(&self, img: &Image) -> Image {
        self.filter(img, -1)
    }

    fn filter(&self, img: &Image, sign: isize) -> Image {
        let (w, h) = (img.width(), img.height());
        let src = img.data();
        let mut tmp = vec![0.0; w * h];
        for r in 0..h {
            let row = &src[r * w..(r + 1) * w];
            let out = &mut tmp[r * w..(r + 1) * w];
            for &(o, v) in &self.horizontal {
                let shift = wrap(sign * o, w);
                for (c, dst) in out.iter_mut().enumerate() {
                    let cc = if c + shift >= w { c + shift - w } else { c + shift };
                    *dst += v * row[cc];
                }
            }
        }
        let mut out = vec![0.0; w * h];
        for &(o, v) in &self.vertical {
            let shift = wrap(sign * o, h);
            for r in 0..h {
                let rr = (r + shift) % h;
                let src_row = &tmp[rr * w..(rr + 1) * w];
                let dst_row = &mut out[r * w..(r + 1) * w];
                for (d, s) in dst_row.iter_mut().zip(src_row) {
                    *d += v * s;
                }
            }
        }
        Image::new(w, h, out).expect("shape preserved")
    }

    /// Dense `N x N` circulant matrix (row-major) of the correlation on a `width x height` grid.
    pub fn dense(&self, width: usize, height: usize) -> Vec<f64> {
        let n = width * height;
        let mut m = vec![0.0; n * n];
        for r in 0..height {
            for c in 0..width {
                let row = r * width + c;
                for &(oi, vi) in &self.vertical {
                    for &(oj, vj) in &self.horizontal {
                        let rr = wrap(r as isize + oi, height);
                        let cc = wrap(c as isize + oj, width);
                        m[row * n + rr * width + cc] += vi * vj;
                    }
                }
            }
        }
        m
    }

    /// Largest tap offset extent along each axis.
    pub fn support(&self) -> (usize, usize) {
        let ext = |t: &Taps| {
            let lo = t.iter().map(|p| p.0).min().unwrap_or(0);
            let hi = t.iter().map(|p| p.0).max().unwrap_or(0);
            (hi - lo + 1) as usize
        };
        (ext(&self.horizontal), ext(&self.vertical))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    Lowpass,
    Highpass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub kernel: SeparableKernel,
    /// `c_b` in `R_b = c_b D_bᵀ`.
    pub synthesis_scale: f64,
    pub kind: BandKind,
    pub level: usize,
    /// Scale-like index; bands sharing it may share LET weights (UWT level, BDCT `max(u, v)`).
    pub group: usize,
    pub label: String,
}

impl Band {
    pub fn tap_sum(&self) -> f64 {
        self.kernel.tap_sum()
    }

    /// `R_b θ`.
    pub fn synthesize(&self, coeffs: &Image) -> Image {
        let mut out = self.kernel.correlate_adjoint(coeffs);
        out.data_mut()
            .iter_mut()
            .for_each(|v| *v *= self.synthesis_scale);
        out
    }
}

/// Descriptor of an undecimated filterbank: analysis kernels, synthesis scales, band roles.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub name: String,
    pub bands: Vec<Band>,
    pub levels: usize,
    /// Minimum `(width, height)` the bank accepts.
    pub min_size: (usize, usize),
}

/// Band metadata carried alongside coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMeta {
    pub label: String,
    pub level: usize,
    pub kind: BandKind,
    pub tap_sum: f64,
}

/// Coefficients of every band plus (optionally) the variance channel `w̄_b = D̄_b y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandSet {
    pub coeffs: Vec<Image>,
    pub variance: Option<Vec<Image>>,
    pub meta: Vec<BandMeta>,
}

impl FilterBank {
    pub fn check_size(&self, img: &Image) -> Result<()> {
        let (mw, mh) = self.min_size;
        if img.width() < mw || img.height() < mh {
            return Err(CureError::TooSmall {
                width: img.width(),
                height: img.height(),
                reason: format!("{} needs at least {mw}x{mh}", self.name),
            });
        }
        Ok(())
    }

    pub fn lowpass_index(&self) -> Option<usize> {
        self.bands.iter().position(|b| b.kind == BandKind::Lowpass)
    }

    pub fn analyze(&self, y: &Image) -> Result<SubbandSet> {
        self.check_size(y)?;
        use rayon::prelude::*;
        let coeffs = self
            .bands
            .par_iter()
            .map(|b| b.kernel.correlate(y))
            .collect();
        Ok(SubbandSet {
            coeffs,
            variance: None,
            meta: self.meta(),
        })
    }

    /// Analysis with the variance channel attached.
    pub fn analyze_with_variance(&self, y: &Image) -> Result<SubbandSet> {
        let mut set = self.analyze(y)?;
        set.variance = Some(self.variance_channel(y)?);
        Ok(set)
    }

    /// `w̄_b`: correlation with the squared analysis taps.
    pub fn variance_channel(&self, y: &Image) -> Result<Vec<Image>> {
        self.check_size(y)?;
        use rayon::prelude::*;
        Ok(self
            .bands
            .par_iter()
            .map(|b| b.kernel.powi(2).correlate(y))
            .collect())
    }

    pub fn synthesize(&self, set: &SubbandSet) -> Result<Image> {
        if set.coeffs.len() != self.bands.len() {
            return Err(CureError::IncompleteBands(format!(
                "{} expects {} bands, got {}",
                self.name,
                self.bands.len(),
                set.coeffs.len()
            )));
        }
        let first = &set.coeffs[0];
        let mut out = Image::zeros(first.width(), first.height());
        for (band, c) in self.bands.iter().zip(&set.coeffs) {
            first.check_same_shape(c)?;
            out.add_scaled(&band.synthesize(c), 1.0);
        }
        Ok(out)
    }

    pub fn meta(&self) -> Vec<BandMeta> {
        self.bands
            .iter()
            .map(|b| BandMeta {
                label: b.label.clone(),
                level: b.level,
                kind: b.kind,
                tap_sum: b.tap_sum(),
            })
            .collect()
    }
}
