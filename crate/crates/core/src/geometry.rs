//! Convex-domain geometry: the coefficient inequality and its sharpened
//! form, mediatrices of `[w, R_w]`, and the starlike-quotient apparatus
//! behind them.

use rayon::prelude::*;

use crate::catalog::{jet_eval, koebe_b2, MappingSpec, A2_ZERO_EPS};
use crate::complex::{Complex, ExtendedComplex};
use crate::error::{Error, Result};
use crate::grid::GridMeta;
use crate::reflection::ReflectionSample;

pub const BOUND_TOL: f64 = 1e-9;
/// Probe-ring residual below which a scan reports boundary contact.
pub const CONTACT_THRESHOLD: f64 = 1e-3;
/// Radius inside which the quotient `(f(z) - f(ζ))/(z - ζ)` is replaced by
/// its Taylor expansion at `ζ`.
pub const QUOTIENT_SWITCH: f64 = 1e-4;

/// Perpendicular bisector of `[w, R_w]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSpec {
    pub midpoint: Complex,
    /// Unit vector from `w` toward `R_w`; zero when degenerate.
    pub normal: Complex,
    /// `R_w = ∞`: the line sits at infinity and `H_w` is the whole plane.
    pub degenerate: bool,
}

impl LineSpec {
    /// `Re{conj(n)(p - P)}`: negative on the side `H_w` containing `w`.
    pub fn signed_distance(&self, p: Complex) -> f64 {
        if self.degenerate {
            f64::NEG_INFINITY
        } else {
            (self.normal.conj() * (p - self.midpoint)).re
        }
    }
}

pub fn mediatrix(sample: &ReflectionSample) -> Result<LineSpec> {
    let w = sample.w;
    match sample.r {
        ExtendedComplex::Infinity => Ok(LineSpec {
            midpoint: w,
            normal: Complex::new(0.0, 0.0),
            degenerate: true,
        }),
        ExtendedComplex::Finite(r) => {
            let d = r - w;
            if d.norm() < 1e-14 {
                return Err(Error::CoincidentPoints { w });
            }
            Ok(LineSpec {
                midpoint: 0.5 * (w + r),
                normal: d / d.norm(),
                degenerate: false,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundScanReport {
    /// Grid infimum of `Re{a₂ f}`.
    pub inf_lhs: f64,
    pub arg_inf: Complex,
    /// Grid minimum of `Re{a₂ f(z)} - [-1/2 + (1/2)(1 - |z|²)|f(z)/z|²]`.
    pub min_residual_24: f64,
    pub arg_residual: Complex,
    pub failures: usize,
    pub pass: bool,
}

/// One point of a coefficient-bound scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSample {
    pub z: Complex,
    pub on_circle: bool,
    /// `(Re{a₂ f}, residual)`; `None` where `f` could not be evaluated or is
    /// infinite on the circle.
    pub values: Option<(f64, f64)>,
}

/// `Re{a₂ f}` and the residual of its sharpened lower bound over the grid
/// and on `|z| = 1` (same angles), where the weight `1 - |z|²` vanishes.
pub fn coefficient_bound_samples(map: &MappingSpec, grid: &GridMeta) -> Result<Vec<BoundSample>> {
    grid.validate()?;
    let a2 = map.a2();
    let f1_at_0 = jet_eval(map, Complex::new(0.0, 0.0))?.f1;
    let mut points = grid.points();
    let interior = points.len();
    points.extend(grid.ring_points(1.0));
    Ok(points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let on_circle = i >= interior;
            let values = (|| {
                let (f, weight) = if on_circle {
                    (map.boundary_value(p.z).ok()?.finite()?, 0.0)
                } else {
                    (map.value(p.z).ok()?, (1.0 - p.radius) * (1.0 + p.radius))
                };
                let lhs = (a2 * f).re;
                let q = if p.radius == 0.0 { f1_at_0 } else { f / p.z };
                let rhs = -0.5 + 0.5 * weight * q.norm_sqr();
                Some((lhs, lhs - rhs))
            })();
            BoundSample {
                z: p.z,
                on_circle,
                values,
            }
        })
        .collect())
}

/// Reduces [`coefficient_bound_samples`]. Infinite boundary values of
/// unbounded images are skipped without counting as failures.
pub fn coefficient_bound_scan(map: &MappingSpec, grid: &GridMeta) -> Result<BoundScanReport> {
    let samples = coefficient_bound_samples(map, grid)?;
    let mut rep = BoundScanReport {
        inf_lhs: f64::INFINITY,
        arg_inf: Complex::new(0.0, 0.0),
        min_residual_24: f64::INFINITY,
        arg_residual: Complex::new(0.0, 0.0),
        failures: 0,
        pass: false,
    };
    for s in samples {
        let Some((lhs, res)) = s.values else {
            if !s.on_circle {
                rep.failures += 1;
            }
            continue;
        };
        if lhs < rep.inf_lhs {
            rep.inf_lhs = lhs;
            rep.arg_inf = s.z;
        }
        if res < rep.min_residual_24 {
            rep.min_residual_24 = res;
            rep.arg_residual = s.z;
        }
    }
    rep.pass = rep.inf_lhs > -0.5 - BOUND_TOL && rep.min_residual_24 >= -BOUND_TOL;
    Ok(rep)
}

/// Per-base-point summary of a mediatrix scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediatrixRow {
    pub z0: Complex,
    pub b2: Complex,
    /// Min over probes of `Re{b₂ g(z)} + 1/2`; `+∞` for vacuous bases.
    pub min_residual: f64,
    pub arg_probe: Complex,
    /// Same minimum restricted to the outermost probe ring.
    pub outer_residual: f64,
    /// Max over probes of the signed distance of `f(σ(z))` to the mediatrix
    /// at `f(z0)`; negative means the image stays inside `H_w`.
    pub max_signed_distance: f64,
    pub vacuous: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MediatrixReport {
    pub min_residual: f64,
    pub arg_base: Complex,
    pub arg_probe: Complex,
    /// Min residual over the outermost probe ring.
    pub contact_residual: f64,
    pub contact: bool,
    pub max_signed_distance: f64,
    pub vacuous_bases: usize,
    pub failures: usize,
    pub rows: Vec<MediatrixRow>,
    pub pass: bool,
}

/// Checks `Re{b₂ g} > -1/2` for the Koebe transform `g` at every base
/// point, which places `f(D)` on the `w` side of the mediatrix at `f(z0)`.
pub fn mediatrix_scan(
    map: &MappingSpec,
    base_grid: &GridMeta,
    probe_grid: &GridMeta,
) -> Result<MediatrixReport> {
    base_grid.validate()?;
    probe_grid.validate()?;
    let bases = base_grid.points();
    let probes = probe_grid.points();
    let outer = *probe_grid.rings.last().unwrap();
    let rows: Vec<(Option<MediatrixRow>, usize)> = bases
        .par_iter()
        .map(|b| {
            let z0 = b.z;
            let Ok(j) = jet_eval(map, z0) else {
                return (None, 1);
            };
            let b2 = koebe_b2(&j);
            if b2.norm() < A2_ZERO_EPS {
                let row = MediatrixRow {
                    z0,
                    b2,
                    min_residual: f64::INFINITY,
                    arg_probe: Complex::new(0.0, 0.0),
                    outer_residual: f64::INFINITY,
                    max_signed_distance: f64::NEG_INFINITY,
                    vacuous: true,
                };
                return (Some(row), 0);
            }
            let scale = (1.0 - z0.norm_sqr()) * j.f1;
            let line = crate::reflection::reflect_jet(&j)
                .ok()
                .and_then(|s| mediatrix(&s).ok());
            let mut row = MediatrixRow {
                z0,
                b2,
                min_residual: f64::INFINITY,
                arg_probe: Complex::new(0.0, 0.0),
                outer_residual: f64::INFINITY,
                max_signed_distance: f64::NEG_INFINITY,
                vacuous: false,
            };
            let mut fails = 0;
            for p in &probes {
                let s = (p.z + z0) / (1.0 + z0.conj() * p.z);
                let Ok(fs) = map.value(s) else {
                    fails += 1;
                    continue;
                };
                let g = (fs - j.f0) / scale;
                let res = (b2 * g).re + 0.5;
                if res < row.min_residual {
                    row.min_residual = res;
                    row.arg_probe = p.z;
                }
                if p.radius == outer && res < row.outer_residual {
                    row.outer_residual = res;
                }
                if let Some(l) = &line {
                    row.max_signed_distance = row.max_signed_distance.max(l.signed_distance(fs));
                }
            }
            (Some(row), fails)
        })
        .collect();

    let mut rep = MediatrixReport {
        min_residual: f64::INFINITY,
        arg_base: Complex::new(0.0, 0.0),
        arg_probe: Complex::new(0.0, 0.0),
        contact_residual: f64::INFINITY,
        contact: false,
        max_signed_distance: f64::NEG_INFINITY,
        vacuous_bases: 0,
        failures: 0,
        rows: Vec::with_capacity(rows.len()),
        pass: false,
    };
    for (row, fails) in rows {
        rep.failures += fails;
        let Some(row) = row else { continue };
        if row.vacuous {
            rep.vacuous_bases += 1;
        }
        if row.min_residual < rep.min_residual {
            rep.min_residual = row.min_residual;
            rep.arg_base = row.z0;
            rep.arg_probe = row.arg_probe;
        }
        rep.contact_residual = rep.contact_residual.min(row.outer_residual);
        rep.max_signed_distance = rep.max_signed_distance.max(row.max_signed_distance);
        rep.rows.push(row);
    }
    rep.contact = rep.contact_residual < CONTACT_THRESHOLD;
    rep.pass = rep.min_residual >= -BOUND_TOL;
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProofMachineryReport {
    pub zeta: Complex,
    /// Grid minimum of `Re G`, `G = zF'/F`.
    pub min_re_g: f64,
    pub argmin: Complex,
    /// Grid maximum of `|h|`, `-1 + 1/G = z h`.
    pub max_abs_h: f64,
    pub arg_max_h: Complex,
    pub min_abs_h: f64,
    pub a1g: Complex,
    pub a2g: Complex,
    /// `(1 - |a₁(G)|²) - |a₂(G) - a₁(G)²|`.
    pub schwarz_pick_slack: f64,
    pub failures: usize,
}

/// Evaluates `G = 1 + z Q'/Q` with `Q(z) = (f(z) - f(ζ))/(z - ζ)`; this is
/// `zF'/F` for `F(z) = (ζ z / f(ζ)) Q(z)`.
struct StarlikeQuotient<'a> {
    map: &'a MappingSpec,
    zeta: Complex,
    f_zeta: [Complex; 4],
    a1: Complex,
    a2: Complex,
}

impl<'a> StarlikeQuotient<'a> {
    fn new(map: &'a MappingSpec, zeta: Complex) -> Result<Self> {
        let jz = jet_eval(map, zeta)?;
        let j0 = jet_eval(map, Complex::new(0.0, 0.0))?;
        let d0 = j0.f0 - jz.f0;
        let d1 = j0.f1;
        let d2 = j0.f2 / 2.0;
        let q0 = -d0 / zeta;
        let q1 = -(d1 + d0 / zeta) / zeta;
        let q2 = -(d2 + d1 / zeta + d0 / (zeta * zeta)) / zeta;
        if q0.norm() < 1e-300 {
            return Err(Error::CriticalPoint {
                at: zeta,
                derivative_abs: 0.0,
            });
        }
        let a1 = q1 / q0;
        let a2 = 2.0 * q2 / q0 - a1 * a1;
        Ok(Self {
            map,
            zeta,
            f_zeta: [jz.f0, jz.f1, jz.f2, jz.f3],
            a1,
            a2,
        })
    }

    fn g(&self, z: Complex) -> Result<Complex> {
        let d = z - self.zeta;
        let [f0, f1, f2, f3] = self.f_zeta;
        let (q, dq) = if d.norm() < QUOTIENT_SWITCH {
            (
                f1 + f2 * d / 2.0 + f3 * d * d / 6.0,
                f2 / 2.0 + f3 * d / 3.0,
            )
        } else {
            let j = jet_eval(self.map, z)?;
            let q = (j.f0 - f0) / d;
            (q, (j.f1 - q) / d)
        };
        if q.norm() < 1e-300 {
            return Err(Error::CriticalPoint {
                at: z,
                derivative_abs: 0.0,
            });
        }
        Ok(1.0 + z * dq / q)
    }

    /// `h = (1/G - 1)/z`, with the first-order series near the origin.
    fn h(&self, z: Complex, g: Complex) -> Complex {
        if z.norm() < QUOTIENT_SWITCH {
            -self.a1 + (self.a1 * self.a1 - self.a2) * z
        } else {
            (g.inv() - 1.0) / z
        }
    }
}

pub fn proof_machinery_check(
    map: &MappingSpec,
    zeta: Complex,
    grid: &GridMeta,
) -> Result<ProofMachineryReport> {
    grid.validate()?;
    let n = zeta.norm();
    if !(n > 0.0 && n < 1.0) {
        return Err(Error::ParamOutOfRange {
            param: "zeta",
            reason: format!("|zeta| = {n} not in (0, 1)"),
        });
    }
    let sq = StarlikeQuotient::new(map, zeta)?;
    let points = grid.points();
    let vals: Vec<Option<(f64, f64)>> = points
        .par_iter()
        .map(|p| {
            let g = sq.g(p.z).ok()?;
            let h = sq.h(p.z, g);
            let (re, abs) = (g.re, h.norm());
            (re.is_finite() && abs.is_finite()).then_some((re, abs))
        })
        .collect();
    let mut rep = ProofMachineryReport {
        zeta,
        min_re_g: f64::INFINITY,
        argmin: Complex::new(0.0, 0.0),
        max_abs_h: 0.0,
        arg_max_h: Complex::new(0.0, 0.0),
        min_abs_h: f64::INFINITY,
        a1g: sq.a1,
        a2g: sq.a2,
        schwarz_pick_slack: (1.0 - sq.a1.norm_sqr()) - (sq.a2 - sq.a1 * sq.a1).norm(),
        failures: 0,
    };
    for (p, v) in points.iter().zip(vals) {
        let Some((re, abs)) = v else {
            rep.failures += 1;
            continue;
        };
        if re < rep.min_re_g {
            rep.min_re_g = re;
            rep.argmin = p.z;
        }
        if abs > rep.max_abs_h {
            rep.max_abs_h = abs;
            rep.arg_max_h = p.z;
        }
        rep.min_abs_h = rep.min_abs_h.min(abs);
    }
    Ok(rep)
}
