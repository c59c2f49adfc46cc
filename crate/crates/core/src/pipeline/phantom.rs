//! Deterministic synthetic magnitude images in `[0, 255]`.

use std::fmt;
use std::str::FromStr;

use crate::error::{CureError, Result};
use crate::image::Image;

pub const MIN_PHANTOM_SIZE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhantomKind {
    SheppLogan,
    Piecewise,
    Constant,
}

impl FromStr for PhantomKind {
    type Err = CureError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shepp-logan" => Ok(Self::SheppLogan),
            "piecewise" => Ok(Self::Piecewise),
            "constant" => Ok(Self::Constant),
            other => Err(CureError::param("phantom", format!("unknown kind `{other}`"))),
        }
    }
}

impl fmt::Display for PhantomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SheppLogan => "shepp-logan",
            Self::Piecewise => "piecewise",
            Self::Constant => "constant",
        })
    }
}

pub const CONSTANT_LEVEL: f64 = 128.0;

/// `(intensity, semi-axis a, semi-axis b, centre x, centre y, angle°)` of the
/// modified (high-contrast) Shepp-Logan head.
const SHEPP_LOGAN: [[f64; 6]; 10] = [
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0],
    [-0.2, 0.11, 0.31, 0.22, 0.0, -18.0],
    [-0.2, 0.16, 0.41, -0.22, 0.0, 18.0],
    [0.1, 0.21, 0.25, 0.0, 0.35, 0.0],
    [0.1, 0.046, 0.046, 0.0, 0.1, 0.0],
    [0.1, 0.046, 0.046, 0.0, -0.1, 0.0],
    [0.1, 0.046, 0.023, -0.08, -0.605, 0.0],
    [0.1, 0.023, 0.023, 0.0, -0.606, 0.0],
    [0.1, 0.023, 0.046, 0.06, -0.605, 0.0],
];

fn shepp_logan(size: usize) -> Image {
    Image::from_fn(size, size, |r, c| {
        let x = (2 * c + 1) as f64 / size as f64 - 1.0;
        let y = 1.0 - (2 * r + 1) as f64 / size as f64;
        let mut v = 0.0;
        for [amp, a, b, x0, y0, deg] in SHEPP_LOGAN {
            let (s, co) = deg.to_radians().sin_cos();
            let (dx, dy) = (x - x0, y - y0);
            let u = dx * co + dy * s;
            let w = -dx * s + dy * co;
            if (u / a).powi(2) + (w / b).powi(2) <= 1.0 {
                v += amp;
            }
        }
        (v.clamp(0.0, 1.0) * 255.0).round()
    })
}

/// Flat regions on a dim background: a bright rectangle, a mid-grey disc and a
/// grid of small squares.
fn piecewise(size: usize) -> Image {
    let s = size as f64;
    Image::from_fn(size, size, |r, c| {
        let (y, x) = (r as f64 / s, c as f64 / s);
        let mut v = 20.0;
        if (0.1..0.9).contains(&y) && (0.1..0.9).contains(&x) {
            v = 90.0;
        }
        if (0.18..0.5).contains(&y) && (0.18..0.45).contains(&x) {
            v = 200.0;
        }
        if (y - 0.62).powi(2) + (x - 0.62).powi(2) < 0.2f64.powi(2) {
            v = 150.0;
        }
        if (0.2..0.44).contains(&y) && (0.55..0.85).contains(&x) && (r / 4 + c / 4) % 2 == 0 {
            v = 255.0;
        }
        v
    })
}

pub fn make_phantom(kind: PhantomKind, size: usize) -> Result<Image> {
    if size < MIN_PHANTOM_SIZE {
        return Err(CureError::param(
            "size",
            format!("phantoms need size >= {MIN_PHANTOM_SIZE}, got {size}"),
        ));
    }
    Ok(match kind {
        PhantomKind::SheppLogan => shepp_logan(size),
        PhantomKind::Piecewise => piecewise(size),
        PhantomKind::Constant => Image::filled(size, size, CONSTANT_LEVEL),
    })
}

/// Fraction of pixels with a 4-neighbour of a different value (no wrap).
pub fn edge_fraction(img: &Image) -> f64 {
    let (w, h) = (img.width(), img.height());
    let mut edges = 0usize;
    for r in 0..h {
        for c in 0..w {
            let v = img.get(r, c);
            let differs = (r > 0 && img.get(r - 1, c) != v)
                || (r + 1 < h && img.get(r + 1, c) != v)
                || (c > 0 && img.get(r, c - 1) != v)
                || (c + 1 < w && img.get(r, c + 1) != v);
            edges += differs as usize;
        }
    }
    edges as f64 / img.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_is_flat() {
        let p = make_phantom(PhantomKind::Constant, 64).unwrap();
        assert!(p.data().iter().all(|&v| v == CONSTANT_LEVEL));
    }

    #[test]
    fn ranges_and_determinism() {
        for kind in [PhantomKind::SheppLogan, PhantomKind::Piecewise] {
            let a = make_phantom(kind, 128).unwrap();
            assert!(a.data().iter().all(|v| (0.0..=255.0).contains(v)));
            assert_eq!(a, make_phantom(kind, 128).unwrap());
            assert!(a.data().iter().any(|&v| v == 255.0));
        }
    }

    #[test]
    fn too_small_rejected() {
        assert!(make_phantom(PhantomKind::SheppLogan, 31).is_err());
    }

    #[test]
    fn names_round_trip() {
        for kind in [PhantomKind::SheppLogan, PhantomKind::Piecewise, PhantomKind::Constant] {
            assert_eq!(kind.to_string().parse::<PhantomKind>().unwrap(), kind);
        }
    }
}
