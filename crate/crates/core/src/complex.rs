//! Scalars on the Riemann sphere and Möbius transformations acting on them.

use std::fmt;

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Magnitude below which a Möbius denominator is treated as a pole.
pub const POLE_EPS: f64 = 1e-14;

#[inline]
pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// A point of the extended plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedComplex {
    Finite(Complex),
    Infinity,
}

impl ExtendedComplex {
    pub fn finite(self) -> Option<Complex> {
        match self {
            Self::Finite(w) => Some(w),
            Self::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }

    /// Chordal distance `2|u - v| / sqrt((1 + |u|²)(1 + |v|²))`, with
    /// `d(u, ∞) = 2 / sqrt(1 + |u|²)`.
    pub fn chordal(self, other: Self) -> f64 {
        match (self, other) {
            (Self::Infinity, Self::Infinity) => 0.0,
            (Self::Finite(u), Self::Infinity) | (Self::Infinity, Self::Finite(u)) => {
                2.0 / (1.0 + u.norm_sqr()).sqrt()
            }
            (Self::Finite(u), Self::Finite(v)) => {
                2.0 * (u - v).norm() / ((1.0 + u.norm_sqr()) * (1.0 + v.norm_sqr())).sqrt()
            }
        }
    }

    /// Promotes non-finite components to `Infinity`.
    pub fn from_complex(w: Complex) -> Self {
        if w.re.is_finite() && w.im.is_finite() {
            Self::Finite(w)
        } else {
            Self::Infinity
        }
    }
}

impl From<Complex> for ExtendedComplex {
    fn from(w: Complex) -> Self {
        Self::from_complex(w)
    }
}

impl fmt::Display for ExtendedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(w) => write!(f, "{}", DisplayComplex(*w)),
            Self::Infinity => write!(f, "inf"),
        }
    }
}

/// `a+bi` formatting with the shortest round-trip representation of each
/// component and negative zero printed as zero.
#[derive(Debug, Clone, Copy)]
pub struct DisplayComplex(pub Complex);

impl fmt::Display for DisplayComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = if self.0.re == 0.0 { 0.0 } else { self.0.re };
        let im = if self.0.im == 0.0 { 0.0 } else { self.0.im };
        if im.is_sign_negative() {
            write!(f, "{}-{}i", re, -im)
        } else {
            write!(f, "{}+{}i", re, im)
        }
    }
}

/// `w ↦ (a w + b) / (c w + d)` with `ad - bc ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl Mobius {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self> {
        let m = Self { a, b, c, d };
        if m.det().norm() < POLE_EPS {
            return Err(Error::ParamOutOfRange {
                param: "mobius",
                reason: "ad - bc vanishes".into(),
            });
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self {
            a: Complex::new(1.0, 0.0),
            b: Complex::new(0.0, 0.0),
            c: Complex::new(0.0, 0.0),
            d: Complex::new(1.0, 0.0),
        }
    }

    /// `w ↦ A w + B`.
    pub fn affine(scale: Complex, shift: Complex) -> Self {
        Self {
            a: scale,
            b: shift,
            c: Complex::new(0.0, 0.0),
            d: Complex::new(1.0, 0.0),
        }
    }

    /// `w ↦ w / (1 + k w)`; fixes the origin with unit derivative there.
    pub fn shift(k: Complex) -> Self {
        Self {
            a: Complex::new(1.0, 0.0),
            b: Complex::new(0.0, 0.0),
            c: k,
            d: Complex::new(1.0, 0.0),
        }
    }

    /// Disk automorphism `z ↦ (z + z0) / (1 + conj(z0) z)`.
    pub fn disk_automorphism(z0: Complex) -> Self {
        Self {
            a: Complex::new(1.0, 0.0),
            b: z0,
            c: z0.conj(),
            d: Complex::new(1.0, 0.0),
        }
    }

    pub fn det(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn pole(&self) -> ExtendedComplex {
        if self.c.norm() == 0.0 {
            ExtendedComplex::Infinity
        } else {
            ExtendedComplex::Finite(-self.d / self.c)
        }
    }

    /// Value and first three derivatives at a finite point.
    pub fn derivatives(&self, w: Complex) -> Result<[Complex; 4]> {
        let den = self.c * w + self.d;
        if den.norm() < POLE_EPS * (1.0 + self.c.norm() * w.norm()) {
            return Err(Error::PoleAtPoint { at: w });
        }
        let inv = den.inv();
        let det = self.det();
        let d1 = det * inv * inv;
        let d2 = -2.0 * self.c * d1 * inv;
        let d3 = -3.0 * self.c * d2 * inv;
        Ok([(self.a * w + self.b) * inv, d1, d2, d3])
    }

    pub fn apply(&self, w: ExtendedComplex) -> ExtendedComplex {
        match w {
            ExtendedComplex::Infinity => {
                if self.c.norm() == 0.0 {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::from_complex(self.a / self.c)
                }
            }
            ExtendedComplex::Finite(w) => {
                let den = self.c * w + self.d;
                if den.norm() < POLE_EPS * (1.0 + self.c.norm() * w.norm()) {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::from_complex((self.a * w + self.b) / den)
                }
            }
        }
    }
}
