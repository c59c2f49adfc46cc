//! Fully overlapping 8x8 block DCT.
//!
//! One band per orthonormal DCT-II basis pattern, evaluated at every pixel
//! offset (redundancy 64). The frame is tight: synthesis is the adjoint scaled
//! by 1/64. The DC band (tap sum 8) plays the lowpass role.

use std::f64::consts::PI;

use super::filterbank::{Band, BandKind, FilterBank, SeparableKernel, SubbandSet, Taps};
use crate::error::Result;
use crate::image::Image;

pub const BLOCK: usize = 8;

fn dct_vector(freq: usize) -> Taps {
    let n = BLOCK as f64;
    let c = if freq == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
    (0..BLOCK)
        .map(|k| {
            let v = c * (PI * (2 * k + 1) as f64 * freq as f64 / (2.0 * n)).cos();
            (k as isize, v)
        })
        .collect()
}

impl FilterBank {
    pub fn bdct8() -> FilterBank {
        let scale = 1.0 / (BLOCK * BLOCK) as f64;
        let mut bands = Vec::with_capacity(BLOCK * BLOCK);
        for u in 0..BLOCK {
            for v in 0..BLOCK {
                let kind = if u == 0 && v == 0 {
                    BandKind::Lowpass
                } else {
                    BandKind::Highpass
                };
                bands.push(Band {
                    kernel: SeparableKernel::new(dct_vector(u), dct_vector(v)),
                    synthesis_scale: scale,
                    kind,
                    level: 1,
                    group: u.max(v),
                    label: format!("bdct-{u}{v}"),
                });
            }
        }
        FilterBank {
            name: "8x8 overlapping block DCT".into(),
            bands,
            levels: 1,
            min_size: (BLOCK, BLOCK),
        }
    }
}

pub fn bdct_analyze(y: &Image) -> Result<SubbandSet> {
    FilterBank::bdct8().analyze_with_variance(y)
}

pub fn bdct_synthesize(set: &SubbandSet) -> Result<Image> {
    FilterBank::bdct8().synthesize(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(w: usize, h: usize) -> Image {
        Image::from_fn(w, h, |r, c| ((r * 31 + c * 17) % 23) as f64 * 0.7 - 3.0)
    }

    #[test]
    fn unit_norm_bands_and_dc_tap_sum() {
        let bank = FilterBank::bdct8();
        assert_eq!(bank.bands.len(), 64);
        for b in &bank.bands {
            assert!((b.kernel.norm_sq() - 1.0).abs() < 1e-13);
            if b.kind == BandKind::Highpass {
                assert!(b.tap_sum().abs() < 1e-12);
            } else {
                assert!((b.tap_sum() - 8.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_and_constant() {
        let y = ramp(16, 16);
        let back = bdct_synthesize(&bdct_analyze(&y).unwrap()).unwrap();
        assert!(back.max_abs_diff(&y) < 1e-10);
        let c = Image::filled(8, 8, 2.5);
        let set = bdct_analyze(&c).unwrap();
        for (i, band) in set.coeffs.iter().enumerate() {
            let expect = if i == 0 { 20.0 } else { 0.0 };
            assert!(band.data().iter().all(|v| (v - expect).abs() < 1e-12));
        }
    }

    #[test]
    fn parseval_against_dense_basis() {
        // Oracle: build every band's dense 64x64 matrix on an 8x8 grid and sum ‖D_b y‖².
        let y = ramp(8, 8);
        let bank = FilterBank::bdct8();
        let n = 64;
        let mut dense_energy = 0.0;
        for b in &bank.bands {
            let d = b.kernel.dense(8, 8);
            for i in 0..n {
                let w: f64 = (0..n).map(|j| d[i * n + j] * y.data()[j]).sum();
                dense_energy += w * w;
            }
        }
        let fast: f64 = bdct_analyze(&y).unwrap().coeffs.iter().map(|c| c.norm_sq()).sum();
        assert!((dense_energy - 64.0 * y.norm_sq()).abs() < 1e-9 * dense_energy);
        assert!((fast - dense_energy).abs() < 1e-9 * dense_energy);
    }

    #[test]
    fn rejects_small_input() {
        assert!(bdct_analyze(&Image::zeros(7, 8)).is_err());
    }
}
