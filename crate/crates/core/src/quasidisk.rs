//! Normalization bounds, the distance `δ_f` from the image to the omitted
//! point `-1/a₂`, and the two quasidisk criteria: the reflection-distance
//! ratio and the Koebe-transform omission neighbourhood.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::catalog::{jet_eval, koebe_b2, mobius_shift, MapExpr, MappingSpec, A2_ZERO_EPS};
use crate::complex::{Complex, ExtendedComplex};
use crate::error::{Error, Result};
use crate::grid::{refine_min, Extremum, GridMeta};
use crate::reflection::reflect;

pub const CLIP_RADIUS: f64 = 1e6;
pub const MIN_POLYLINE_POINTS: usize = 1024;
pub const RATIO_POLYLINE_POINTS: usize = 8192;

fn zero() -> Complex {
    Complex::new(0.0, 0.0)
}

/// Value of `f` on the closed disk; `|z| ≥ 1` is projected to the circle
/// and uses the boundary extension.
fn closed_value(map: &MappingSpec, z: Complex) -> ExtendedComplex {
    let n = z.norm();
    if n < 1.0 {
        match map.value(z) {
            Ok(w) => ExtendedComplex::Finite(w),
            Err(_) => ExtendedComplex::Infinity,
        }
    } else {
        map.boundary_value(z / n)
            .unwrap_or(ExtendedComplex::Infinity)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSup {
    /// Grid supremum of `|a₂ f*|`, `f* = f/(1 + a₂ f)`.
    pub sup: f64,
    pub arg: Complex,
    pub a2_zero: bool,
    pub failures: usize,
}

/// `|a₂ f*(z)| = |a₂ f / (1 + a₂ f)|`.
pub fn normalized_modulus(map: &MappingSpec, z: Complex) -> Result<f64> {
    let u = map.a2() * map.value(z)?;
    let den = 1.0 + u;
    if den.norm() < 1e-300 {
        return Err(Error::PoleInDomain { near: z });
    }
    Ok((u / den).norm())
}

pub fn normalized_sup(map: &MappingSpec, grid: &GridMeta) -> Result<NormalizedSup> {
    grid.validate()?;
    if map.a2().norm() == 0.0 {
        return Ok(NormalizedSup {
            sup: 0.0,
            arg: zero(),
            a2_zero: true,
            failures: 0,
        });
    }
    let points = grid.points();
    let vals: Vec<Result<f64>> = points
        .par_iter()
        .map(|p| normalized_modulus(map, p.z))
        .collect();
    let mut rep = NormalizedSup {
        sup: 0.0,
        arg: zero(),
        a2_zero: false,
        failures: 0,
    };
    for (p, v) in points.iter().zip(vals) {
        match v {
            Err(e @ Error::PoleInDomain { .. }) => return Err(e),
            Err(_) => rep.failures += 1,
            Ok(v) if v > rep.sup => {
                rep.sup = v;
                rep.arg = p.z;
            }
            Ok(_) => {}
        }
    }
    Ok(rep)
}

/// Angular runs on one ring where `|a₂ f*|` comes close to its peak.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterProfile {
    pub radius: f64,
    pub peak: f64,
    pub threshold: f64,
    /// `(start, end)` angles of each run, end inclusive.
    pub runs: Vec<(f64, f64)>,
    /// Every sample on the ring clears the threshold.
    pub whole_ring: bool,
}

impl ClusterProfile {
    pub fn count(&self) -> usize {
        self.runs.len()
    }
}

/// Peaks below this are not near 1 and yield no clusters.
pub const CLUSTER_PEAK_MIN: f64 = 0.9;

/// Counts circular runs with `|a₂ f*| ≥ 1 - 2(1 - peak)` on the ring.
pub fn near_one_clusters(map: &MappingSpec, radius: f64, angles: usize) -> Result<ClusterProfile> {
    let grid = GridMeta::new(vec![radius], angles)?;
    let pts = grid.points();
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|p| normalized_modulus(map, p.z).unwrap_or(0.0))
        .collect();
    let peak = vals.iter().copied().fold(0.0, f64::max);
    let threshold = 1.0 - 2.0 * (1.0 - peak);
    let mut prof = ClusterProfile {
        radius,
        peak,
        threshold,
        runs: Vec::new(),
        whole_ring: false,
    };
    if peak < CLUSTER_PEAK_MIN || map.a2().norm() == 0.0 {
        return Ok(prof);
    }
    let hit: Vec<bool> = vals.iter().map(|&v| v >= threshold).collect();
    let n = hit.len();
    if hit.iter().all(|&h| h) {
        prof.whole_ring = true;
        prof.runs.push((0.0, TAU));
        return Ok(prof);
    }
    // start scanning just after a miss so runs do not wrap
    let start = (0..n).find(|&k| !hit[k]).unwrap();
    let mut k = 1;
    while k <= n {
        let idx = (start + k) % n;
        if hit[idx] {
            let first = idx;
            let mut last = idx;
            while k < n && hit[(start + k + 1) % n] {
                k += 1;
                last = (start + k) % n;
            }
            prof.runs.push((pts[first].theta, pts[last].theta));
        }
        k += 1;
    }
    Ok(prof)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaMetric {
    Euclidean,
    Chordal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub value: f64,
    pub metric: DeltaMetric,
    pub arg_inf: Complex,
}

/// Infimum over the closed disk of the distance from `f(z)` to `-1/a₂`
/// (chordal distance to `∞` when `a₂ = 0`). The unit circle is scanned
/// alongside the grid rings, then `passes` rounds of ×8 local refinement
/// run around the argmin.
pub fn delta_f(map: &MappingSpec, grid: &GridMeta, passes: usize) -> Result<DeltaReport> {
    grid.validate()?;
    let a2 = map.a2();
    let metric = if a2.norm() == 0.0 {
        DeltaMetric::Chordal
    } else {
        DeltaMetric::Euclidean
    };
    let target = if metric == DeltaMetric::Euclidean {
        ExtendedComplex::Finite(-a2.inv())
    } else {
        ExtendedComplex::Infinity
    };
    let dist = |z: Complex| -> Option<f64> {
        let w = closed_value(map, z);
        let d = match (metric, w) {
            (DeltaMetric::Chordal, w) => w.chordal(ExtendedComplex::Infinity),
            (DeltaMetric::Euclidean, ExtendedComplex::Finite(w)) => {
                (w - target.finite().unwrap()).norm()
            }
            (DeltaMetric::Euclidean, ExtendedComplex::Infinity) => return None,
        };
        Some(d)
    };
    let mut pts = grid.points();
    pts.extend(grid.ring_points(1.0));
    let vals: Vec<Option<f64>> = pts.par_iter().map(|p| dist(p.z)).collect();
    let mut best: Option<Extremum> = None;
    for (p, v) in pts.iter().zip(vals) {
        if let Some(v) = v {
            if best.is_none_or(|b| v < b.value) {
                best = Some(Extremum {
                    value: v,
                    at: p.z,
                    radius: p.radius,
                    theta: p.theta,
                });
            }
        }
    }
    let Some(best) = best else {
        return Ok(DeltaReport {
            value: f64::INFINITY,
            metric,
            arg_inf: zero(),
        });
    };
    let dr = grid
        .rings
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(1.0 - grid.rings.last().unwrap(), f64::max);
    let refined = refine_min(dist, best, dr, grid.step(), passes, 1.0);
    Ok(DeltaReport {
        value: refined.value,
        metric,
        arg_inf: refined.at,
    })
}

/// Sampled image of the circle `|z| = r`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPolyline {
    pub points: Vec<ExtendedComplex>,
    pub radius_used: f64,
    pub clipped: bool,
    pub clip_radius: f64,
}

impl BoundaryPolyline {
    fn usable(&self, p: ExtendedComplex) -> Option<Complex> {
        p.finite().filter(|w| w.norm() <= self.clip_radius)
    }

    /// Segments between consecutive unclipped points.
    pub fn segments(&self) -> Vec<(Complex, Complex)> {
        let n = self.points.len();
        (0..n)
            .filter_map(|k| {
                let a = self.usable(self.points[k])?;
                let b = self.usable(self.points[(k + 1) % n])?;
                Some((a, b))
            })
            .collect()
    }

    pub fn finite_points(&self) -> Vec<Complex> {
        self.points.iter().filter_map(|&p| self.usable(p)).collect()
    }
}

fn segment_distance(p: Complex, a: Complex, b: Complex) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + t * d)).norm()
}

fn min_segment_distance(p: Complex, segs: &[(Complex, Complex)]) -> f64 {
    segs.iter()
        .map(|&(a, b)| segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// `f(r e^{iθ})` at `n` uniform angles. `r = 1` uses the boundary
/// extension. Consecutive repeats are dropped.
pub fn boundary_polyline(map: &MappingSpec, n: usize, r: f64) -> Result<BoundaryPolyline> {
    if n < MIN_POLYLINE_POINTS {
        return Err(Error::InvalidGrid(format!(
            "{n} polyline points, need at least {MIN_POLYLINE_POINTS}"
        )));
    }
    if !(0.99..=1.0).contains(&r) {
        return Err(Error::ParamOutOfRange {
            param: "r",
            reason: format!("{r} not in [0.99, 1]"),
        });
    }
    let raw: Vec<ExtendedComplex> = (0..n)
        .into_par_iter()
        .map(|k| {
            let z = Complex::from_polar(r, TAU * k as f64 / n as f64);
            if r < 1.0 {
                closed_value(map, z)
            } else {
                map.boundary_value(z).unwrap_or(ExtendedComplex::Infinity)
            }
        })
        .collect();
    let mut points: Vec<ExtendedComplex> = Vec::with_capacity(n);
    for p in raw {
        if points.last() != Some(&p) {
            points.push(p);
        }
    }
    if points.len() > 1 && points.first() == points.last() {
        points.pop();
    }
    let clipped = points
        .iter()
        .any(|p| p.finite().is_none_or(|w| w.norm() > CLIP_RADIUS));
    Ok(BoundaryPolyline {
        points,
        radius_used: r,
        clipped,
        clip_radius: CLIP_RADIUS,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioProfile {
    pub rings: Vec<f64>,
    pub inf_ratio_per_ring: Vec<f64>,
    pub arg_inf: Vec<Complex>,
    /// Min over rings.
    pub c_estimate: f64,
    /// Rings on which every reflection was `∞`.
    pub all_infinite: Vec<bool>,
}

/// Interior samples of `Ω` used for `d(R_w, Ω̄)`.
const INTERIOR_RINGS: usize = 32;
const INTERIOR_ANGLES: usize = 256;

/// Per ring, the infimum over angles of `d(R_w, Ω̄) / d(w, ∂Ω)`.
pub fn quasidisk_ratio_scan(
    map: &MappingSpec,
    rings: &[f64],
    angles: usize,
) -> Result<RatioProfile> {
    if matches!(map.expr(), MapExpr::Strip) {
        return Err(Error::ParamOutOfRange {
            param: "map",
            reason: "the strip map reflects to infinity on the real axis; use the omission scan"
                .into(),
        });
    }
    let grid = GridMeta::new(rings.to_vec(), angles)?;
    let poly = boundary_polyline(map, RATIO_POLYLINE_POINTS, 1.0)?;
    let segs = poly.segments();
    let total: f64 = segs.iter().map(|(a, b)| (b - a).norm()).sum();
    if segs.len() < 3 || !(total > 0.0) {
        return Err(Error::DegenerateDomain {
            reason: format!("{} usable segments, length {total}", segs.len()),
        });
    }
    let interior_grid = GridMeta::linear(0.0, 0.99, INTERIOR_RINGS, INTERIOR_ANGLES)?;
    let mut interior: Vec<Complex> = interior_grid
        .points()
        .par_iter()
        .filter_map(|p| map.value(p.z).ok())
        .collect();
    let points = grid.points();
    let probes: Vec<Option<(Complex, ExtendedComplex)>> = points
        .par_iter()
        .map(|p| reflect(map, p.z).ok().map(|s| (s.w, s.r)))
        .collect();
    interior.extend(probes.iter().flatten().map(|(w, _)| *w));

    let ratios: Vec<Option<f64>> = probes
        .par_iter()
        .map(|s| {
            let (w, r) = (*s)?;
            let dw = min_segment_distance(w, &segs);
            if !(dw > 0.0) {
                return None;
            }
            let r = match r {
                ExtendedComplex::Infinity => return Some(f64::INFINITY),
                ExtendedComplex::Finite(r) => r,
            };
            let dr = interior
                .iter()
                .map(|&q| (r - q).norm())
                .fold(min_segment_distance(r, &segs), f64::min);
            Some(dr / dw)
        })
        .collect();

    let mut prof = RatioProfile {
        rings: rings.to_vec(),
        inf_ratio_per_ring: vec![f64::INFINITY; rings.len()],
        arg_inf: vec![zero(); rings.len()],
        c_estimate: f64::INFINITY,
        all_infinite: vec![true; rings.len()],
    };
    for (p, v) in points.iter().zip(ratios) {
        let Some(v) = v else { continue };
        if v.is_finite() {
            prof.all_infinite[p.ring] = false;
        }
        if v < prof.inf_ratio_per_ring[p.ring] {
            prof.inf_ratio_per_ring[p.ring] = v;
            prof.arg_inf[p.ring] = p.z;
        }
    }
    prof.c_estimate = prof
        .inf_ratio_per_ring
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(prof)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmissionReport {
    /// Infimum over base points and probes of `|b₂ g(z) + 1|`.
    pub inf: f64,
    pub arg_base: Complex,
    pub arg_probe: Complex,
    /// Base points with `|b₂| < 1e-12`, which contribute exactly 1.
    pub vacuous_bases: usize,
}

/// Distance from `-1` of the normalized Koebe transforms `b₂ g`. Probes
/// include the unit circle through the boundary extension.
pub fn koebe_omission_scan(
    map: &MappingSpec,
    base_grid: &GridMeta,
    probe_grid: &GridMeta,
) -> Result<OmissionReport> {
    base_grid.validate()?;
    probe_grid.validate()?;
    let bases = base_grid.points();
    let mut probes = probe_grid.points();
    probes.extend(probe_grid.ring_points(1.0));
    let rows: Vec<Option<(f64, Complex, Complex, bool)>> = bases
        .par_iter()
        .map(|b| {
            let z0 = b.z;
            let j = jet_eval(map, z0).ok()?;
            let b2 = koebe_b2(&j);
            if b2.norm() < A2_ZERO_EPS {
                return Some((1.0, z0, zero(), true));
            }
            let scale = (1.0 - z0.norm_sqr()) * j.f1;
            let mut best = (f64::INFINITY, z0, zero(), false);
            for p in &probes {
                let s = (p.z + z0) / (1.0 + z0.conj() * p.z);
                let ExtendedComplex::Finite(fs) = closed_value(map, s) else {
                    continue;
                };
                let v = (b2 * (fs - j.f0) / scale + 1.0).norm();
                if v < best.0 {
                    best = (v, z0, p.z, false);
                }
            }
            Some(best)
        })
        .collect();
    let mut rep = OmissionReport {
        inf: f64::INFINITY,
        arg_base: zero(),
        arg_probe: zero(),
        vacuous_bases: 0,
    };
    for (v, z0, z, vacuous) in rows.into_iter().flatten() {
        if vacuous {
            rep.vacuous_bases += 1;
        }
        if v < rep.inf {
            rep.inf = v;
            rep.arg_base = z0;
            rep.arg_probe = z;
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRow {
    pub a: Complex,
    pub delta: DeltaReport,
    /// `sup |f_a* - L|` over the compact grid.
    pub sup_diff: f64,
}

/// Rings `0..=0.9` used for the `f_a* = L` comparison.
pub fn perturbation_grid() -> GridMeta {
    GridMeta::linear(0.0, 0.9, 19, 256).expect("static grid")
}

/// For each `a`, builds `f_a = L/(1 + aL)` and reports `δ_{f_a}` and how far
/// `f_a*` is from `L` on `|z| ≤ 0.9`.
pub fn strip_perturbation_demo(
    a_list: &[Complex],
    delta_grid: &GridMeta,
) -> Result<Vec<PerturbationRow>> {
    let strip = crate::catalog::build_map(MapExpr::Strip)?;
    let compact = perturbation_grid();
    a_list
        .iter()
        .map(|&a| {
            let f = crate::catalog::build_map(MapExpr::MobiusOfStrip { a })?;
            let star = mobius_shift(&f)?.map;
            let pts = compact.points();
            let sup_diff = pts
                .par_iter()
                .map(|p| match (star.value(p.z), strip.value(p.z)) {
                    (Ok(u), Ok(v)) => (u - v).norm(),
                    _ => f64::INFINITY,
                })
                .reduce(|| 0.0, f64::max);
            Ok(PerturbationRow {
                a,
                delta: delta_f(&f, delta_grid, 3)?,
                sup_diff,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_map;
    use crate::complex::c;

    fn default_grid() -> GridMeta {
        GridMeta::new(vec![0.5, 0.9, 0.99, 0.999], 1024).unwrap()
    }

    #[test]
    fn normalized_sup_examples() {
        let d = build_map(MapExpr::Disk { x: 0.5 }).unwrap();
        let g = GridMeta::new(vec![0.5, 0.9, 0.9999], 1024).unwrap();
        let rep = normalized_sup(&d, &g).unwrap();
        assert!((rep.sup - 0.49995).abs() < 1e-12, "{}", rep.sup);
        let h = build_map(MapExpr::Halfplane { c: c(0.0, -1.0) }).unwrap();
        let rep = normalized_sup(&h, &g).unwrap();
        assert!((rep.sup - 0.9999).abs() < 1e-9);
        let s = build_map(MapExpr::Strip).unwrap();
        let rep = normalized_sup(&s, &g).unwrap();
        assert!(rep.a2_zero && rep.sup == 0.0);
    }

    #[test]
    fn cluster_counts() {
        let h = build_map(MapExpr::Halfplane { c: c(1.0, 0.0) }).unwrap();
        assert!(near_one_clusters(&h, 0.9999, 1024).unwrap().whole_ring);
        let s = build_map(MapExpr::SectorReal { a: 0.5 }).unwrap();
        assert_eq!(near_one_clusters(&s, 0.9999, 1024).unwrap().count(), 2);
        let d = build_map(MapExpr::Disk { x: 0.5 }).unwrap();
        assert_eq!(near_one_clusters(&d, 0.9999, 1024).unwrap().count(), 0);
        // non-symmetric strip: Koebe transform of L off the real axis
        let ns = build_map(MapExpr::koebe(MapExpr::Strip, c(0.0, 0.7))).unwrap();
        assert!((ns.a2() - c(0.0, 1.4 / 1.49)).norm() < 1e-12);
        assert_eq!(near_one_clusters(&ns, 0.9999, 1024).unwrap().count(), 2);
    }

    #[test]
    fn delta_examples() {
        let g = default_grid();
        let h = build_map(MapExpr::Halfplane { c: c(-1.0, 0.0) }).unwrap();
        let rep = delta_f(&h, &g, 3).unwrap();
        assert_eq!(rep.metric, DeltaMetric::Euclidean);
        assert!((rep.value - 0.5).abs() < 1e-3, "{}", rep.value);
        let s = build_map(MapExpr::Strip).unwrap();
        let rep = delta_f(&s, &g, 3).unwrap();
        assert_eq!(rep.metric, DeltaMetric::Chordal);
        assert!(rep.value < 1e-3);
        let m = build_map(MapExpr::MobiusOfStrip { a: c(0.25, 0.0) }).unwrap();
        assert!(delta_f(&m, &g, 3).unwrap().value < 1e-3);
        let d = build_map(MapExpr::Disk { x: 0.5 }).unwrap();
        assert!((delta_f(&d, &g, 3).unwrap().value - 4.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn polyline_examples() {
        let id = build_map(MapExpr::Identity).unwrap();
        let p = boundary_polyline(&id, 1024, 0.9999).unwrap();
        assert_eq!(p.points.len(), 1024);
        assert!(p
            .points
            .iter()
            .all(|w| (w.finite().unwrap().norm() - 0.9999).abs() < 1e-12));
        assert!(!p.clipped);
        let d = build_map(MapExpr::Disk { x: 0.5 }).unwrap();
        let p = boundary_polyline(&d, 1024, 0.9999).unwrap();
        let r: f64 = 0.9999;
        assert!((p.points[0].finite().unwrap().re - r / (1.0 + 0.5 * r)).abs() < 1e-12);
        assert!((p.points[512].finite().unwrap().re + r / (1.0 - 0.5 * r)).abs() < 1e-12);
        let h = build_map(MapExpr::Halfplane { c: c(-1.0, 0.0) }).unwrap();
        assert!(boundary_polyline(&h, 1024, 1.0).unwrap().clipped);
        assert!(boundary_polyline(&h, 512, 0.999).is_err());
        assert!(boundary_polyline(&h, 1024, 0.9).is_err());
    }

    #[test]
    fn ratio_profile_of_identity() {
        let id = build_map(MapExpr::Identity).unwrap();
        let prof = quasidisk_ratio_scan(&id, &[0.99, 0.999], 256).unwrap();
        for (r, v) in prof.rings.iter().zip(&prof.inf_ratio_per_ring) {
            assert!((v - 1.0 / r).abs() < 1e-3, "{r}: {v}");
        }
        let s = build_map(MapExpr::Strip).unwrap();
        assert!(quasidisk_ratio_scan(&s, &[0.9], 64).is_err());
    }

    #[test]
    fn omission_of_identity() {
        let id = build_map(MapExpr::Identity).unwrap();
        let base = GridMeta::linear(0.0, 0.9, 4, 64).unwrap();
        let probe = GridMeta::new(vec![0.5, 0.9], 256).unwrap();
        let rep = koebe_omission_scan(&id, &base, &probe).unwrap();
        assert!((rep.inf - (1.0 - 0.9 / 1.9)).abs() < 1e-9, "{}", rep.inf);
        assert_eq!(rep.vacuous_bases, 1);
    }

    #[test]
    fn strip_perturbation_rows() {
        let rows =
            strip_perturbation_demo(&[c(0.25, 0.0), c(0.01, 0.0), c(0.0, 0.25)], &default_grid())
                .unwrap();
        for row in rows {
            assert!(row.sup_diff < 1e-10, "{}: {}", row.a, row.sup_diff);
            assert!(row.delta.value < 1e-2, "{}: {}", row.a, row.delta.value);
        }
    }
}
