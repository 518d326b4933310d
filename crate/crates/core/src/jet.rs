//! Order-3 jets of analytic maps and their composition.
//!
//! Every derivative used downstream (Schwarzian, Taylor coefficients, the
//! reflection) is assembled from closed-form stage derivatives through the
//! chain rule below; nothing in the library differentiates numerically.

use crate::complex::Complex;
use crate::error::{Error, Result};

/// Base-point tolerance for [`Jet3::compose`], relative to `max(1, |value|)`.
pub const COMPOSE_TOL: f64 = 1e-12;

/// Value and first three derivatives of a map at `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet3 {
    pub at: Complex,
    pub f0: Complex,
    pub f1: Complex,
    pub f2: Complex,
    pub f3: Complex,
}

impl Jet3 {
    pub fn identity(at: Complex) -> Self {
        Self {
            at,
            f0: at,
            f1: Complex::new(1.0, 0.0),
            f2: Complex::new(0.0, 0.0),
            f3: Complex::new(0.0, 0.0),
        }
    }

    pub fn from_derivatives(at: Complex, d: [Complex; 4]) -> Self {
        Self {
            at,
            f0: d[0],
            f1: d[1],
            f2: d[2],
            f3: d[3],
        }
    }

    /// Applies an outer map whose value and derivatives at `self.f0` are `outer`.
    ///
    /// Faà di Bruno to order three:
    /// `(f∘g)' = f'g'`, `(f∘g)'' = f''g'² + f'g''`,
    /// `(f∘g)''' = f'''g'³ + 3f''g'g'' + f'g'''`.
    pub fn chain(&self, outer: [Complex; 4]) -> Self {
        let [h0, h1, h2, h3] = outer;
        let g1 = self.f1;
        let g2 = self.f2;
        let g3 = self.f3;
        Self {
            at: self.at,
            f0: h0,
            f1: h1 * g1,
            f2: h2 * g1 * g1 + h1 * g2,
            f3: h3 * g1 * g1 * g1 + 3.0 * h2 * g1 * g2 + h1 * g3,
        }
    }

    /// `outer ∘ inner`, where `outer` was evaluated at `inner.f0`.
    pub fn compose(outer: &Jet3, inner: &Jet3) -> Result<Jet3> {
        let scale = 1.0f64.max(inner.f0.norm());
        if (outer.at - inner.f0).norm() > COMPOSE_TOL * scale {
            return Err(Error::BasePointMismatch {
                outer_at: outer.at,
                inner_value: inner.f0,
            });
        }
        Ok(inner.chain([outer.f0, outer.f1, outer.f2, outer.f3]))
    }

    /// `A f + B`.
    pub fn affine(&self, scale: Complex, shift: Complex) -> Self {
        Self {
            at: self.at,
            f0: scale * self.f0 + shift,
            f1: scale * self.f1,
            f2: scale * self.f2,
            f3: scale * self.f3,
        }
    }

    /// `f''/(2f')`, the pre-Schwarzian half used by the reflection formula.
    pub fn half_log_derivative(&self) -> Complex {
        self.f2 / (2.0 * self.f1)
    }
}
