//! Group-delay compensated parents for unnormalized Haar subbands.
//!
//! For a child subband at scale `j`, the parent is the centred difference of
//! the same-scale scaling field `s^j` along the child's detail direction:
//! `p_n = s_{n+e} − s_{n−e}` with periodic wrap.

use super::haar::Orientation;
use crate::image::Image;

/// Offset `e = (dr, dc)` of the centred difference for an orientation.
pub fn parent_offset(orientation: Orientation) -> (isize, isize) {
    match orientation {
        Orientation::Row | Orientation::HL => (0, 1),
        Orientation::LH => (1, 0),
        Orientation::HH => (1, 1),
    }
}

pub fn parent_field(scaling: &Image, orientation: Orientation) -> Image {
    let (dr, dc) = parent_offset(orientation);
    Image::from_fn(scaling.width(), scaling.height(), |r, c| {
        scaling.get_wrapped(r, c, dr, dc) - scaling.get_wrapped(r, c, -dr, -dc)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_d_periodic() {
        let s = Image::from_row(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(parent_field(&s, Orientation::Row).data(), &[-2.0, 2.0, 2.0, -2.0]);
    }

    #[test]
    fn constant_gives_zero() {
        let s = Image::filled(6, 5, 4.0);
        for o in [Orientation::HL, Orientation::LH, Orientation::HH] {
            assert!(parent_field(&s, o).data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn ramp_interior_is_two() {
        let s = Image::from_fn(8, 8, |r, c| (r + c) as f64);
        for (o, expect) in [(Orientation::HL, 2.0), (Orientation::LH, 2.0), (Orientation::HH, 4.0)] {
            let p = parent_field(&s, o);
            for r in 1..7 {
                for c in 1..7 {
                    assert_eq!(p.get(r, c), expect);
                }
            }
        }
        let row = Image::from_row((0..10).map(|n| n as f64).collect()).unwrap();
        let p = parent_field(&row, Orientation::Row);
        assert!(p.data()[1..9].iter().all(|&v| v == 2.0));
    }
}
