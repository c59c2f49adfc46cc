//! Undecimated (à-trous) Haar filterbank with unit-norm analysis bands.
//!
//! At level `j` the cumulative 1-D lowpass is a box of length `2^j` with value
//! `2^{-j/2}`; the highpass is `-2^{-j/2}` on the first half of that support and
//! `+2^{-j/2}` on the second. 2-D bands are separable products (HL, LH, HH per
//! level, one final LL). Synthesis scales are `4^{-j}` (2-D) or `2^{-j}` (1-D).

use super::filterbank::{Band, BandKind, FilterBank, SeparableKernel, SubbandSet, Taps};
use crate::error::{CureError, Result};
use crate::image::Image;

fn box_taps(level: usize) -> Taps {
    let len = 1usize << level;
    let v = (len as f64).sqrt().recip();
    (0..len).map(|k| (k as isize, v)).collect()
}

fn detail_taps(level: usize) -> Taps {
    let half = 1usize << (level - 1);
    let v = ((2 * half) as f64).sqrt().recip();
    (0..2 * half)
        .map(|k| (k as isize, if k < half { -v } else { v }))
        .collect()
}

impl FilterBank {
    /// 2-D undecimated Haar with `levels` scales: `3·levels` highpass bands + 1 lowpass.
    pub fn uwt_haar(levels: usize) -> Result<FilterBank> {
        check_levels(levels)?;
        let mut bands = Vec::with_capacity(3 * levels + 1);
        for j in 1..=levels {
            let scale = 0.25_f64.powi(j as i32);
            let (lo, hi) = (box_taps(j), detail_taps(j));
            for (label, v, h) in [
                ("HL", lo.clone(), hi.clone()),
                ("LH", hi.clone(), lo.clone()),
                ("HH", hi.clone(), hi.clone()),
            ] {
                bands.push(Band {
                    kernel: SeparableKernel::new(v, h),
                    synthesis_scale: scale,
                    kind: BandKind::Highpass,
                    level: j,
                    group: j,
                    label: format!("uwt-{label}{j}"),
                });
            }
        }
        bands.push(Band {
            kernel: SeparableKernel::new(box_taps(levels), box_taps(levels)),
            synthesis_scale: 0.25_f64.powi(levels as i32),
            kind: BandKind::Lowpass,
            level: levels,
            group: levels,
            label: format!("uwt-LL{levels}"),
        });
        let side = 1usize << levels;
        Ok(FilterBank {
            name: format!("undecimated Haar (J={levels})"),
            bands,
            levels,
            min_size: (side, side),
        })
    }

    /// 1-D undecimated Haar for `1 x n` signals: `levels` highpass bands + 1 lowpass.
    pub fn uwt_haar_1d(levels: usize) -> Result<FilterBank> {
        check_levels(levels)?;
        let mut bands: Vec<Band> = (1..=levels)
            .map(|j| Band {
                kernel: SeparableKernel::horizontal_only(detail_taps(j)),
                synthesis_scale: 0.5_f64.powi(j as i32),
                kind: BandKind::Highpass,
                level: j,
                group: j,
                label: format!("uwt-H{j}"),
            })
            .collect();
        bands.push(Band {
            kernel: SeparableKernel::horizontal_only(box_taps(levels)),
            synthesis_scale: 0.5_f64.powi(levels as i32),
            kind: BandKind::Lowpass,
            level: levels,
            group: levels,
            label: format!("uwt-L{levels}"),
        });
        Ok(FilterBank {
            name: format!("undecimated 1-D Haar (J={levels})"),
            bands,
            levels,
            min_size: (1usize << levels, 1),
        })
    }

    /// Picks the 1-D bank for height-1 inputs, the 2-D bank otherwise.
    pub fn uwt_haar_for(img: &Image, levels: usize) -> Result<FilterBank> {
        if img.is_1d() {
            Self::uwt_haar_1d(levels)
        } else {
            Self::uwt_haar(levels)
        }
    }
}

fn check_levels(levels: usize) -> Result<()> {
    if (1..=16).contains(&levels) {
        Ok(())
    } else {
        Err(CureError::param("levels", format!("must be in 1..=16, got {levels}")))
    }
}

/// Analysis with the variance channel.
pub fn uwt_haar_analyze(y: &Image, levels: usize) -> Result<SubbandSet> {
    FilterBank::uwt_haar_for(y, levels)?.analyze_with_variance(y)
}

pub fn uwt_haar_synthesize(set: &SubbandSet, levels: usize, one_d: bool) -> Result<Image> {
    let bank = if one_d {
        FilterBank::uwt_haar_1d(levels)?
    } else {
        FilterBank::uwt_haar(levels)?
    };
    bank.synthesize(set)
}
