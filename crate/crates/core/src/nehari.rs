//! Schwarzian derivative, the Nehari functional `(1 - |z|²)² |Sf(z)|` and
//! grid certification of the bound `≤ 2`.

use crate::catalog::{jet_eval, MappingSpec};
use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::grid::{extremum, golden_max, GridMeta};
use crate::jet::Jet3;

pub const CRITICAL_EPS: f64 = 1e-14;
pub const NEHARI_BOUND: f64 = 2.0;
pub const NEHARI_TOL: f64 = 1e-9;

/// Default certification rings.
pub const CERT_RINGS: [f64; 5] = [0.0, 0.5, 0.9, 0.99, 0.999];
pub const CERT_ANGLES: usize = 4096;

/// `f'''/f' - (3/2)(f''/f')²` from a jet.
pub fn schwarzian_of_jet(j: &Jet3) -> Result<Complex> {
    if j.f1.norm() < CRITICAL_EPS {
        return Err(Error::CriticalPoint {
            at: j.at,
            derivative_abs: j.f1.norm(),
        });
    }
    let p = j.f2 / j.f1;
    Ok(j.f3 / j.f1 - 1.5 * p * p)
}

pub fn schwarzian(map: &MappingSpec, z: Complex) -> Result<Complex> {
    schwarzian_of_jet(&jet_eval(map, z)?)
}

pub fn nehari_functional(map: &MappingSpec, z: Complex) -> Result<f64> {
    let s = schwarzian(map, z)?;
    let w = 1.0 - z.norm_sqr();
    Ok(w * w * s.norm())
}

#[derive(Debug, Clone)]
pub struct CertReport {
    pub sup_estimate: f64,
    pub arg_sup: Complex,
    pub grid: GridMeta,
    pub pass: bool,
    /// `sup / 2`.
    pub t_parameter: f64,
    /// Grid points where the functional could not be evaluated.
    pub failures: Vec<(Complex, Error)>,
}

pub fn default_cert_grid() -> GridMeta {
    GridMeta {
        rings: CERT_RINGS.to_vec(),
        angles: CERT_ANGLES,
        seed: 0,
    }
}

/// Grid supremum of the Nehari functional, refined by golden-section
/// searches in θ (one angular step either side) and then in r (half the
/// gap to the neighbouring rings, never past the outermost ring).
pub fn certify_nehari(map: &MappingSpec, grid: &GridMeta) -> Result<CertReport> {
    grid.validate()?;
    let points = grid.points();
    let eval = |z: Complex| nehari_functional(map, z).ok();
    let (best, _) = extremum(&points, true, eval);
    let failures: Vec<(Complex, Error)> = points
        .iter()
        .filter_map(|p| nehari_functional(map, p.z).err().map(|e| (p.z, e)))
        .collect();

    let Some(best) = best else {
        return Ok(CertReport {
            sup_estimate: f64::NAN,
            arg_sup: Complex::new(0.0, 0.0),
            grid: grid.clone(),
            pass: false,
            t_parameter: f64::NAN,
            failures,
        });
    };

    let mut sup = best.value;
    let mut arg = best.at;
    let r_max = *grid.rings.last().unwrap();
    if best.radius > 0.0 {
        let step = grid.step();
        let r = best.radius;
        let score = |v: Option<f64>| v.unwrap_or(f64::NEG_INFINITY);
        let (t, v) = golden_max(
            |t| score(eval(Complex::from_polar(r, t))),
            best.theta - step,
            best.theta + step,
            40,
        );
        if v > sup {
            sup = v;
            arg = Complex::from_polar(r, t);
        }
        let theta = arg.arg();
        let idx = grid.rings.iter().position(|&x| x == r).unwrap_or(0);
        let lo = if idx == 0 {
            0.0
        } else {
            0.5 * (r + grid.rings[idx - 1])
        };
        let hi = grid.rings.get(idx + 1).map_or(r_max, |&n| 0.5 * (r + n));
        if hi > lo {
            let (rr, v) = golden_max(|s| score(eval(Complex::from_polar(s, theta))), lo, hi, 40);
            if v > sup {
                sup = v;
                arg = Complex::from_polar(rr, theta);
            }
        }
    }
    Ok(CertReport {
        sup_estimate: sup,
        arg_sup: arg,
        grid: grid.clone(),
        pass: sup <= NEHARI_BOUND + NEHARI_TOL,
        t_parameter: sup / 2.0,
        failures,
    })
}
