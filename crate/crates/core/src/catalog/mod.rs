//! Closed-form catalog of unit-disk mappings and the combinators that
//! generate the objects the scans quantify over.

mod plan;

use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;

use crate::complex::{Complex, ExtendedComplex, Mobius};
use crate::error::{Error, Result};
use crate::jet::Jet3;

pub(crate) use plan::{Plan, Stage};

/// Default cap on expression nesting.
pub const MAX_DEPTH: usize = 8;

/// Second coefficients below this magnitude are treated as exactly zero.
pub const A2_ZERO_EPS: f64 = 1e-12;

/// Rings used by the convexity certificate.
pub const CONVEXITY_RINGS: [f64; 3] = [0.9, 0.99, 0.999];
pub const CONVEXITY_ANGLES: usize = 4096;
pub const CONVEXITY_TOL: f64 = -1e-9;

/// Expression tree of catalog primitives and combinators.
#[derive(Debug, Clone, PartialEq)]
pub enum MapExpr {
    Identity,
    /// `z / (1 + x z)`, `x ∈ (-1, 1)`.
    Disk {
        x: f64,
    },
    /// `z / (1 + c z)`, `|c| = 1`.
    Halfplane {
        c: Complex,
    },
    /// `(1/2a)[((1+z)/(1-z))^a - 1]`, `a ∈ (0, 1)`.
    SectorReal {
        a: f64,
    },
    /// `L(z) = ½ log((1+z)/(1-z))`.
    Strip,
    /// `L / (1 + a L)`, `a ≠ 0`.
    MobiusOfStrip {
        a: Complex,
    },
    /// Koebe transform of `L` at the real point `x ∈ (0, 1)`.
    StripShift {
        x: f64,
    },
    Koebe {
        inner: Box<MapExpr>,
        z0: Complex,
    },
    /// `f / (1 + a₂ f)`.
    MobiusShift {
        inner: Box<MapExpr>,
    },
    /// `A f + B`.
    Affine {
        inner: Box<MapExpr>,
        scale: Complex,
        shift: Complex,
    },
    /// Extremal sector built from the disk automorphism parameter `a`.
    SectorFromAutomorphism {
        a: Complex,
    },
}

impl MapExpr {
    pub fn depth(&self) -> usize {
        match self {
            MapExpr::Koebe { inner, .. }
            | MapExpr::MobiusShift { inner }
            | MapExpr::Affine { inner, .. } => 1 + inner.depth(),
            _ => 1,
        }
    }

    pub fn koebe(inner: MapExpr, z0: Complex) -> Self {
        MapExpr::Koebe {
            inner: Box::new(inner),
            z0,
        }
    }

    pub fn mobius_shift(inner: MapExpr) -> Self {
        MapExpr::MobiusShift {
            inner: Box::new(inner),
        }
    }

    pub fn affine(inner: MapExpr, scale: Complex, shift: Complex) -> Self {
        MapExpr::Affine {
            inner: Box::new(inner),
            scale,
            shift,
        }
    }

    /// True for post-Möbius images of `L` itself (no precomposition).
    fn strip_conjugate(&self) -> bool {
        match self {
            MapExpr::Strip | MapExpr::MobiusOfStrip { .. } => true,
            MapExpr::Affine { inner, .. } | MapExpr::MobiusShift { inner } => {
                inner.strip_conjugate()
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Unknown,
}

/// A validated map with its cached second coefficient.
#[derive(Debug, Clone)]
pub struct MappingSpec {
    expr: MapExpr,
    plan: Plan,
    a2: Complex,
    normalized: bool,
    convexity_certified: bool,
    convexity_min: f64,
    bounded_hint: Boundedness,
}

impl MappingSpec {
    pub fn expr(&self) -> &MapExpr {
        &self.expr
    }

    /// `f''(0) / (2 f'(0))`: the second coefficient of the normalized
    /// presentation `(f - f(0)) / f'(0)`; equals `a₂` whenever `f(0) = 0`
    /// and `f'(0) = 1`.
    pub fn a2(&self) -> Complex {
        self.a2
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn convexity_certified(&self) -> bool {
        self.convexity_certified
    }

    pub fn convexity_min(&self) -> f64 {
        self.convexity_min
    }

    pub fn bounded_hint(&self) -> Boundedness {
        self.bounded_hint
    }

    pub fn jet(&self, z: Complex) -> Result<Jet3> {
        jet_eval(self, z)
    }

    /// Value only, for `|z| < 1`. Cheaper than a jet.
    pub fn value(&self, z: Complex) -> Result<Complex> {
        if z.norm() >= 1.0 {
            return Err(Error::DomainViolation { z });
        }
        let w = self.plan.value(z);
        if w.re.is_finite() && w.im.is_finite() {
            Ok(w)
        } else {
            Err(Error::PoleAtPoint { at: z })
        }
    }

    /// Value on the closed disk in the extended plane, using the continuous
    /// extension of each stage to `|z| = 1`.
    pub fn boundary_value(&self, z: Complex) -> Result<ExtendedComplex> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::DomainViolation { z });
        }
        Ok(self.plan.extended(z))
    }
}

/// Exact jet of the composite map at `z`, `|z| < 1`.
pub fn jet_eval(map: &MappingSpec, z: Complex) -> Result<Jet3> {
    if !(z.norm() < 1.0) {
        return Err(Error::DomainViolation { z });
    }
    map.plan.jet(z)
}

/// Taylor coefficients `a_k = f^(k)(0) / k!` for `k = 0..=n`, `n ≤ 3`.
pub fn taylor_coefficients(map: &MappingSpec, n: usize) -> Result<Vec<Complex>> {
    if n > 3 {
        return Err(Error::ParamOutOfRange {
            param: "n",
            reason: format!("order {n} exceeds the jet order 3"),
        });
    }
    let j = jet_eval(map, Complex::new(0.0, 0.0))?;
    let all = [j.f0, j.f1, j.f2 / 2.0, j.f3 / 6.0];
    Ok(all[..=n].to_vec())
}

fn out_of_range(param: &'static str, reason: impl Into<String>) -> Error {
    Error::ParamOutOfRange {
        param,
        reason: reason.into(),
    }
}

fn finite(param: &'static str, v: Complex) -> Result<()> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(out_of_range(param, "not finite"))
    }
}

fn snap_a2(a2: Complex) -> Complex {
    if a2.norm() < A2_ZERO_EPS {
        Complex::new(0.0, 0.0)
    } else {
        a2
    }
}

/// Parameters of the extremal sector map attached to an automorphism `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorParams {
    pub a: Complex,
    /// Unimodular `c = -(1 - conj(a)) / (1 - a)`.
    pub c: Complex,
    /// `(1 - |a|²) / (2 (1 - Re a))`.
    pub beta: f64,
    /// Vertex value `f(-1) = 1 / (h(0) - 1)` with `h(0) = a c`.
    pub b: Complex,
}

impl SectorParams {
    pub fn from_automorphism(a: Complex) -> Result<Self> {
        finite("a", a)?;
        if a.norm() >= 1.0 {
            return Err(out_of_range("a", format!("|a| = {} must be < 1", a.norm())));
        }
        let one = Complex::new(1.0, 0.0);
        let c = -(one - a.conj()) / (one - a);
        let beta = (1.0 - a.norm_sqr()) / (2.0 * (1.0 - a.re));
        let b = (a * c - one).inv();
        Ok(Self { a, c, beta, b })
    }

    /// `a₂ = -h(0) + b h'(0)/2` with `h(0) = a c` and `h'(0) = c (1 - |a|²)`.
    pub fn a2_from_automorphism(&self) -> Complex {
        let h0 = self.a * self.c;
        let h1 = self.c * (1.0 - self.a.norm_sqr());
        -h0 + self.b * h1 / 2.0
    }
}

fn compile(expr: &MapExpr) -> Result<Plan> {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    Ok(match expr {
        MapExpr::Identity => Plan::default(),
        MapExpr::Disk { x } => {
            if !(x.abs() < 1.0) {
                return Err(out_of_range("x", format!("{x} not in (-1, 1)")));
            }
            Plan::single(Stage::Mobius(Mobius::shift(Complex::new(*x, 0.0))))
        }
        MapExpr::Halfplane { c } => {
            finite("c", *c)?;
            if (c.norm() - 1.0).abs() > 1e-12 {
                return Err(out_of_range("c", format!("|c| = {} must be 1", c.norm())));
            }
            Plan::single(Stage::Mobius(Mobius::shift(*c)))
        }
        MapExpr::SectorReal { a } => {
            if !(*a > 0.0 && *a < 1.0) {
                return Err(out_of_range("a", format!("{a} not in (0, 1)")));
            }
            let u = Mobius::new(one, one, -one, one)?;
            let k = Complex::new(1.0 / (2.0 * a), 0.0);
            Plan::single(Stage::Mobius(u))
                .then(Stage::Power(*a))
                .then(Stage::Mobius(Mobius::affine(k, -k)))
        }
        MapExpr::Strip => Plan::single(Stage::Atanh),
        MapExpr::MobiusOfStrip { a } => {
            finite("a", *a)?;
            if a.norm() == 0.0 {
                return Err(out_of_range("a", "must be nonzero"));
            }
            Plan::single(Stage::Atanh).then(Stage::Mobius(Mobius::shift(*a)))
        }
        MapExpr::StripShift { x } => {
            if !(*x > 0.0 && *x < 1.0) {
                return Err(out_of_range("x", format!("{x} not in (0, 1)")));
            }
            koebe_plan(Plan::single(Stage::Atanh), Complex::new(*x, 0.0))?
        }
        MapExpr::Koebe { inner, z0 } => {
            finite("z0", *z0)?;
            if !(z0.norm() < 1.0) {
                return Err(Error::DomainViolation { z: *z0 });
            }
            koebe_plan(compile(inner)?, *z0)?
        }
        MapExpr::MobiusShift { inner } => {
            let p = compile(inner)?;
            let j = p.jet(zero)?;
            check_normalized(&j)?;
            let a2 = snap_a2(j.half_log_derivative());
            if a2 == zero {
                p
            } else {
                p.then(Stage::Mobius(Mobius::shift(a2)))
            }
        }
        MapExpr::Affine {
            inner,
            scale,
            shift,
        } => {
            finite("A", *scale)?;
            finite("B", *shift)?;
            if scale.norm() == 0.0 {
                return Err(out_of_range("A", "must be nonzero"));
            }
            compile(inner)?.then(Stage::Mobius(Mobius::affine(*scale, *shift)))
        }
        MapExpr::SectorFromAutomorphism { a } => {
            let sp = SectorParams::from_automorphism(*a)?;
            let u = Mobius::new(one, one, sp.c, one)?;
            Plan::single(Stage::Mobius(u))
                .then(Stage::Power(sp.beta))
                .then(Stage::Mobius(Mobius::affine(-sp.b, sp.b)))
        }
    })
}

fn koebe_plan(inner: Plan, z0: Complex) -> Result<Plan> {
    let j = inner.jet(z0)?;
    let scale = (1.0 - z0.norm_sqr()) * j.f1;
    if scale.norm() < 1e-14 {
        return Err(Error::CriticalPoint {
            at: z0,
            derivative_abs: j.f1.norm(),
        });
    }
    let inv = scale.inv();
    Ok(inner
        .prepend(Stage::Mobius(Mobius::disk_automorphism(z0)))
        .then(Stage::Mobius(Mobius::affine(inv, -j.f0 * inv))))
}

fn check_normalized(j: &Jet3) -> Result<()> {
    let one = Complex::new(1.0, 0.0);
    if j.f0.norm() > 1e-12 || (j.f1 - one).norm() > 1e-12 {
        return Err(Error::NotNormalized {
            value: j.f0,
            derivative: j.f1,
        });
    }
    Ok(())
}

fn bounded_hint(expr: &MapExpr, a2_of_inner: impl Fn(&MapExpr) -> Complex) -> Boundedness {
    use Boundedness::*;
    match expr {
        MapExpr::Identity | MapExpr::Disk { .. } => Bounded,
        MapExpr::Halfplane { .. }
        | MapExpr::SectorReal { .. }
        | MapExpr::SectorFromAutomorphism { .. }
        | MapExpr::Strip
        | MapExpr::StripShift { .. } => Unbounded,
        // Pole of L/(1+aL) sits at L = -1/a; it lies in the strip |Im| < π/4
        // exactly when |Im(1/a)| < π/4.
        MapExpr::MobiusOfStrip { a } => {
            if a.inv().im.abs() > FRAC_PI_4 {
                Bounded
            } else {
                Unbounded
            }
        }
        MapExpr::Koebe { inner, .. } | MapExpr::Affine { inner, .. } => {
            bounded_hint(inner, a2_of_inner)
        }
        MapExpr::MobiusShift { inner } => {
            if a2_of_inner(inner).norm() == 0.0 {
                bounded_hint(inner, a2_of_inner)
            } else if inner.strip_conjugate() {
                Unbounded
            } else {
                Bounded
            }
        }
    }
}

/// Validates `expr` and builds the spec: caches `a₂`, attempts the
/// convexity certificate and sets the boundedness hint.
pub fn build_map(expr: MapExpr) -> Result<MappingSpec> {
    build_map_with_cap(expr, MAX_DEPTH)
}

pub fn build_map_with_cap(expr: MapExpr, depth_cap: usize) -> Result<MappingSpec> {
    let depth = expr.depth();
    if depth > depth_cap {
        return Err(Error::DepthExceeded {
            depth,
            cap: depth_cap,
        });
    }
    let plan = compile(&expr)?;
    plan.check_branch_cuts(0.999, 4096)?;
    let zero = Complex::new(0.0, 0.0);
    let j0 = plan.jet(zero)?;
    let a2 = snap_a2(j0.half_log_derivative());
    let normalized = check_normalized(&j0).is_ok();
    let hint = bounded_hint(&expr, |inner| {
        compile(inner)
            .and_then(|p| p.jet(zero))
            .map(|j| snap_a2(j.half_log_derivative()))
            .unwrap_or(zero)
    });
    let mut spec = MappingSpec {
        expr,
        plan,
        a2,
        normalized,
        convexity_certified: false,
        convexity_min: f64::NAN,
        bounded_hint: hint,
    };
    let (certified, min) = validate_convexity(&spec, CONVEXITY_ANGLES);
    spec.convexity_certified = certified;
    spec.convexity_min = min;
    Ok(spec)
}

/// Grid minimum of `Re{1 + z f''/f'}` over the rings 0.9, 0.99, 0.999.
/// Certified when the minimum exceeds `-1e-9`; evaluation failures count
/// as `-∞`.
pub fn validate_convexity(map: &MappingSpec, angles: usize) -> (bool, f64) {
    let angles = angles.max(1);
    let min = CONVEXITY_RINGS
        .iter()
        .flat_map(|&r| (0..angles).map(move |k| (r, k)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(r, k)| {
            let z = Complex::from_polar(r, std::f64::consts::TAU * k as f64 / angles as f64);
            match map.plan.jet(z) {
                Ok(j) if j.f1.norm() > 0.0 => (1.0 + z * j.f2 / j.f1).re,
                _ => f64::NEG_INFINITY,
            }
        })
        .reduce(|| f64::INFINITY, f64::min);
    let min = if min.is_nan() { f64::NEG_INFINITY } else { min };
    (min > CONVEXITY_TOL, min)
}

/// `g(z) = (f(σ(z)) - f(z0)) / ((1 - |z0|²) f'(z0))` with
/// `σ(z) = (z + z0)/(1 + conj(z0) z)`.
pub fn koebe_transform(f: &MappingSpec, z0: Complex) -> Result<MappingSpec> {
    if !(z0.norm() < 1.0) {
        return Err(Error::DomainViolation { z: z0 });
    }
    build_map(MapExpr::koebe(f.expr.clone(), z0))
}

/// Second coefficient of the Koebe transform at `z0` from the jet at `z0`:
/// `(1 - |z0|²) f''(z0)/(2 f'(z0)) - conj(z0)`.
pub fn koebe_b2(jet: &Jet3) -> Complex {
    let z0 = jet.at;
    (1.0 - z0.norm_sqr()) * jet.half_log_derivative() - z0.conj()
}

#[derive(Debug, Clone)]
pub struct MobiusShiftOutcome {
    pub map: MappingSpec,
    /// `a₂ = 0`: the map is returned unchanged.
    pub a2_was_zero: bool,
}

/// `f* = f / (1 + a₂ f)`, the Möbius-equivalent map with vanishing second
/// coefficient. Requires `-1/a₂` to stay off the image, which holds for
/// Nehari maps whose image closure omits it; a Newton search for a zero of
/// `1 + a₂ f` rejects anything else.
pub fn mobius_shift(f: &MappingSpec) -> Result<MobiusShiftOutcome> {
    if !f.normalized {
        let j = jet_eval(f, Complex::new(0.0, 0.0))?;
        return Err(Error::NotNormalized {
            value: j.f0,
            derivative: j.f1,
        });
    }
    if f.a2.norm() == 0.0 {
        return Ok(MobiusShiftOutcome {
            map: f.clone(),
            a2_was_zero: true,
        });
    }
    let a2 = f.a2;
    let hit = interior_root(|z| {
        let j = f.plan.jet(z).ok()?;
        Some((1.0 + a2 * j.f0, a2 * j.f1))
    });
    if let Some(near) = hit {
        return Err(Error::PoleInDomain { near });
    }
    Ok(MobiusShiftOutcome {
        map: build_map(MapExpr::mobius_shift(f.expr.clone()))?,
        a2_was_zero: false,
    })
}

/// Looks for a zero of an analytic `φ` in the open disk: Newton iterations
/// (φ and φ' supplied by `eval`) started from the smallest values of `|φ|`
/// on a polar grid.
pub(crate) fn interior_root<F>(eval: F) -> Option<Complex>
where
    F: Fn(Complex) -> Option<(Complex, Complex)> + Sync,
{
    let rings = [0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999];
    let n = 256;
    let mut seeds: Vec<(f64, Complex)> = rings
        .iter()
        .flat_map(|&r| {
            (0..n).map(move |k| Complex::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64))
        })
        .collect::<Vec<_>>()
        .into_par_iter()
        .filter_map(|z| eval(z).map(|(v, _)| (v.norm(), z)))
        .collect();
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    seeds.iter().take(16).find_map(|&(_, mut z)| {
        for _ in 0..60 {
            let (v, d) = eval(z)?;
            if v.norm() < 1e-12 {
                return (z.norm() < 1.0).then_some(z);
            }
            if d.norm() == 0.0 {
                return None;
            }
            z -= v / d;
            if !(z.norm() < 1.0) {
                return None;
            }
        }
        None
    })
}

/// Builds `f(z) = -b[((1+z)/(1+cz))^β - 1]` and checks the cached `a₂`
/// against `-h(0) + b h'(0)/2`.
pub fn sector_from_automorphism(a: Complex) -> Result<(MappingSpec, SectorParams)> {
    let params = SectorParams::from_automorphism(a)?;
    let spec = build_map(MapExpr::SectorFromAutomorphism { a })?;
    let expected = params.a2_from_automorphism();
    if (spec.a2 - expected).norm() > 1e-10 {
        return Err(out_of_range(
            "a",
            format!("a2 mismatch: jet {} vs automorphism {}", spec.a2, expected),
        ));
    }
    Ok((spec, params))
}

/// Named fixtures used by the CLI catalog listing and the test suites.
pub fn fixtures() -> Vec<(&'static str, MapExpr)> {
    let re = |x: f64| Complex::new(x, 0.0);
    vec![
        ("identity", MapExpr::Identity),
        ("disk(0.5)", MapExpr::Disk { x: 0.5 }),
        ("halfplane(1)", MapExpr::Halfplane { c: re(1.0) }),
        ("halfplane(-1)", MapExpr::Halfplane { c: re(-1.0) }),
        ("sector(0.5)", MapExpr::SectorReal { a: 0.5 }),
        ("strip", MapExpr::Strip),
        ("strip-shift(0.7)", MapExpr::StripShift { x: 0.7 }),
        (
            "mobius-of-strip(0.25)",
            MapExpr::MobiusOfStrip { a: re(0.25) },
        ),
        (
            "sector-auto(0.3+0.4i)",
            MapExpr::SectorFromAutomorphism {
                a: Complex::new(0.3, 0.4),
            },
        ),
    ]
}
