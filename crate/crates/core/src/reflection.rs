//! The quasiconformal reflection across `∂f(D)` induced by the extension
//! `z ↦ f(z) + (1 - |z|²) f'(z) / (conj(z) - (1 - |z|²) f''(z)/(2 f'(z)))`,
//! parametrized throughout by the disk coordinate.

use rayon::prelude::*;

use crate::catalog::{jet_eval, koebe_b2, MappingSpec};
use crate::complex::{Complex, ExtendedComplex, Mobius, POLE_EPS};
use crate::error::{Error, Result};
use crate::grid::GridMeta;
use crate::jet::Jet3;
use crate::nehari::CRITICAL_EPS;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionSample {
    pub z: Complex,
    pub w: Complex,
    pub r: ExtendedComplex,
    /// Second coefficient of the Koebe transform at `z`.
    pub b2: Complex,
}

/// Reflection from a jet. The denominator equals `-b₂`.
pub fn reflect_jet(j: &Jet3) -> Result<ReflectionSample> {
    if j.f1.norm() < CRITICAL_EPS {
        return Err(Error::CriticalPoint {
            at: j.at,
            derivative_abs: j.f1.norm(),
        });
    }
    let z = j.at;
    let b2 = koebe_b2(j);
    let r = if b2.norm() < POLE_EPS {
        ExtendedComplex::Infinity
    } else {
        ExtendedComplex::from_complex(j.f0 - (1.0 - z.norm_sqr()) * j.f1 / b2)
    };
    Ok(ReflectionSample { z, w: j.f0, r, b2 })
}

pub fn reflect(map: &MappingSpec, z: Complex) -> Result<ReflectionSample> {
    reflect_jet(&jet_eval(map, z)?)
}

/// The extension at `|z| > 1`: the reflection taken at `1/conj(z)`.
pub fn extend(map: &MappingSpec, z: Complex) -> Result<ExtendedComplex> {
    if !(z.norm() > 1.0) {
        return Err(Error::DomainViolation { z });
    }
    Ok(reflect(map, z.conj().inv())?.r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivarianceReport {
    /// Max chordal distance between `R[M∘f]` and `M(R[f])`.
    pub max_residual: f64,
    pub arg_max: Complex,
    /// Grid points where `M∘f` has a pole or a jet failed.
    pub skipped: usize,
}

/// Compares the reflection of `M∘f` with `M` applied to the reflection of
/// `f`, chordally, over `grid`.
pub fn mobius_equivariance_check(
    map: &MappingSpec,
    m: &Mobius,
    grid: &GridMeta,
) -> Result<EquivarianceReport> {
    grid.validate()?;
    let points = grid.points();
    let residuals: Vec<Option<f64>> = points
        .par_iter()
        .map(|p| {
            let j = jet_eval(map, p.z).ok()?;
            let outer = m.derivatives(j.f0).ok()?;
            let mj = j.chain(outer);
            let lhs = reflect_jet(&mj).ok()?.r;
            let rhs = m.apply(reflect_jet(&j).ok()?.r);
            Some(lhs.chordal(rhs))
        })
        .collect();
    let mut report = EquivarianceReport {
        max_residual: 0.0,
        arg_max: Complex::new(0.0, 0.0),
        skipped: 0,
    };
    for (p, r) in points.iter().zip(residuals) {
        match r {
            Some(r) if r > report.max_residual => {
                report.max_residual = r;
                report.arg_max = p.z;
            }
            Some(r) if r.is_nan() => report.skipped += 1,
            Some(_) => {}
            None => report.skipped += 1,
        }
    }
    Ok(report)
}
