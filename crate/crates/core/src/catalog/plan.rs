//! Compiled stage pipelines.
//!
//! A catalog expression compiles to a left-to-right list of elementary
//! stages. Each stage knows its value and first three derivatives at a finite
//! point, and its value on the extended plane for boundary evaluation.

use crate::complex::{Complex, ExtendedComplex, Mobius, POLE_EPS};
use crate::error::{Error, Result};
use crate::jet::Jet3;

/// Distance to ±1 below which `atanh` is treated as infinite on the circle.
const ATANH_END_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Stage {
    Mobius(Mobius),
    /// `½ log((1 + w)/(1 - w))`.
    Atanh,
    /// Principal power `w^β`.
    Power(f64),
}

impl Stage {
    fn derivatives(&self, w: Complex) -> Result<[Complex; 4]> {
        match self {
            Stage::Mobius(m) => m.derivatives(w),
            Stage::Atanh => {
                let q = Complex::new(1.0, 0.0) - w * w;
                if q.norm() < POLE_EPS {
                    return Err(Error::PoleAtPoint { at: w });
                }
                let d1 = q.inv();
                let d2 = 2.0 * w * d1 * d1;
                let d3 = (2.0 + 6.0 * w * w) * d1 * d1 * d1;
                Ok([w.atanh(), d1, d2, d3])
            }
            Stage::Power(beta) => {
                if w.norm() < POLE_EPS {
                    return Err(Error::PoleAtPoint { at: w });
                }
                let p = (beta * w.ln()).exp();
                let inv = w.inv();
                let d1 = beta * p * inv;
                let d2 = (beta - 1.0) * d1 * inv;
                let d3 = (beta - 2.0) * d2 * inv;
                Ok([p, d1, d2, d3])
            }
        }
    }

    fn value(&self, w: Complex) -> Complex {
        match self {
            Stage::Mobius(m) => (m.a * w + m.b) / (m.c * w + m.d),
            Stage::Atanh => w.atanh(),
            Stage::Power(beta) => (beta * w.ln()).exp(),
        }
    }

    fn extended(&self, w: ExtendedComplex) -> ExtendedComplex {
        match (self, w) {
            (Stage::Mobius(m), w) => m.apply(w),
            (Stage::Atanh, ExtendedComplex::Infinity) => ExtendedComplex::Infinity,
            (Stage::Atanh, ExtendedComplex::Finite(w)) => {
                let one = Complex::new(1.0, 0.0);
                if (one - w).norm() < ATANH_END_EPS || (one + w).norm() < ATANH_END_EPS {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::from_complex(w.atanh())
                }
            }
            (Stage::Power(_), ExtendedComplex::Infinity) => ExtendedComplex::Infinity,
            (Stage::Power(beta), ExtendedComplex::Finite(w)) => {
                if w.norm() == 0.0 {
                    ExtendedComplex::Finite(Complex::new(0.0, 0.0))
                } else {
                    ExtendedComplex::from_complex((beta * w.ln()).exp())
                }
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Plan {
    pub(crate) stages: Vec<Stage>,
}

impl Plan {
    pub(crate) fn single(stage: Stage) -> Self {
        Self {
            stages: vec![stage],
        }
    }

    pub(crate) fn then(mut self, stage: Stage) -> Self {
        self.stages.push(stage);
        self
    }

    pub(crate) fn prepend(mut self, stage: Stage) -> Self {
        self.stages.insert(0, stage);
        self
    }

    pub(crate) fn jet(&self, z: Complex) -> Result<Jet3> {
        let mut j = Jet3::identity(z);
        for stage in &self.stages {
            j = j.chain(stage.derivatives(j.f0)?);
        }
        let finite = [j.f0, j.f1, j.f2, j.f3]
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite());
        if !finite {
            return Err(Error::PoleAtPoint { at: z });
        }
        Ok(j)
    }

    pub(crate) fn value(&self, z: Complex) -> Complex {
        self.stages.iter().fold(z, |w, s| s.value(w))
    }

    pub(crate) fn extended(&self, z: Complex) -> ExtendedComplex {
        self.stages
            .iter()
            .fold(ExtendedComplex::Finite(z), |w, s| s.extended(w))
    }

    /// Checks that every power stage receives arguments off `(-∞, 0]` along
    /// a dense sample of the circle of radius `radius`.
    pub(crate) fn check_branch_cuts(&self, radius: f64, samples: usize) -> Result<()> {
        for (idx, stage) in self.stages.iter().enumerate() {
            if !matches!(stage, Stage::Power(_)) {
                continue;
            }
            let prefix = &self.stages[..idx];
            for k in 0..samples {
                let theta = std::f64::consts::TAU * k as f64 / samples as f64;
                let z = Complex::from_polar(radius, theta);
                let u = prefix.iter().fold(z, |w, s| s.value(w));
                let on_cut = u.re <= 0.0 && u.im.abs() <= 1e-12 * u.norm().max(1e-300);
                if on_cut || !u.re.is_finite() || !u.im.is_finite() {
                    return Err(Error::BranchCutViolation { near: z });
                }
            }
        }
        Ok(())
    }
}
