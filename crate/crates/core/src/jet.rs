//! Second-order forward-mode differentiation in two variables.
//!
//! Every thresholding atom is a function `θ(u, v)` of a transform coefficient
//! `u` and a variance proxy `v`; CURE needs its value and five partials
//! `∂u, ∂v, ∂uu, ∂vv, ∂uv`. Composing atoms out of [`Jet`] arithmetic gives
//! those partials exactly.

use std::ops::{Add, Mul, Neg, Sub};

/// Value plus first and second partial derivatives with respect to `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d22: f64,
    pub d12: f64,
}

impl Jet {
    pub const fn constant(v: f64) -> Self {
        Jet {
            v,
            d1: 0.0,
            d2: 0.0,
            d11: 0.0,
            d22: 0.0,
            d12: 0.0,
        }
    }

    /// The first independent variable `u`.
    pub const fn var1(v: f64) -> Self {
        Jet {
            d1: 1.0,
            ..Jet::constant(v)
        }
    }

    /// The second independent variable `v`.
    pub const fn var2(v: f64) -> Self {
        Jet {
            d2: 1.0,
            ..Jet::constant(v)
        }
    }

    /// Applies a scalar function given its value and first two derivatives at `self.v`.
    #[inline]
    pub fn compose(self, f: f64, f1: f64, f2: f64) -> Jet {
        Jet {
            v: f,
            d1: f1 * self.d1,
            d2: f1 * self.d2,
            d11: f2 * self.d1 * self.d1 + f1 * self.d11,
            d22: f2 * self.d2 * self.d2 + f1 * self.d22,
            d12: f2 * self.d1 * self.d2 + f1 * self.d12,
        }
    }

    #[inline]
    pub fn recip(self) -> Jet {
        let r = 1.0 / self.v;
        self.compose(r, -r * r, 2.0 * r * r * r)
    }

    #[inline]
    pub fn sqrt(self) -> Jet {
        let s = self.v.sqrt();
        self.compose(s, 0.5 / s, -0.25 / (s * self.v))
    }

    #[inline]
    pub fn scale(self, k: f64) -> Jet {
        Jet {
            v: k * self.v,
            d1: k * self.d1,
            d2: k * self.d2,
            d11: k * self.d11,
            d22: k * self.d22,
            d12: k * self.d12,
        }
    }

    #[inline]
    pub fn offset(self, k: f64) -> Jet {
        Jet {
            v: self.v + k,
            ..self
        }
    }

    #[inline]
    pub fn div(self, other: Jet) -> Jet {
        self * other.recip()
    }
}

impl Add for Jet {
    type Output = Jet;
    #[inline]
    fn add(self, o: Jet) -> Jet {
        Jet {
            v: self.v + o.v,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d11: self.d11 + o.d11,
            d22: self.d22 + o.d22,
            d12: self.d12 + o.d12,
        }
    }
}

impl Sub for Jet {
    type Output = Jet;
    #[inline]
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    #[inline]
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    #[inline]
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + self.v * o.d2,
            d11: self.d11 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d11,
            d22: self.d22 * o.v + 2.0 * self.d2 * o.d2 + self.v * o.d22,
            d12: self.d12 * o.v + self.d1 * o.d2 + self.d2 * o.d1 + self.v * o.d12,
        }
    }
}
