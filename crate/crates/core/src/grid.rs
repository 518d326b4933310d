//! Polar sample grids and the extremum searches run over them.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::complex::Complex;
use crate::error::{Error, Result};

pub const MIN_ANGLES: usize = 64;

/// Rings × angles polar grid. A ring at radius 0 contributes the single point 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeta {
    pub rings: Vec<f64>,
    pub angles: usize,
    /// `0` keeps the uniform grid `θ_k = 2πk/n`; any other value jitters
    /// each probe by up to half a step, reproducibly.
    pub seed: u64,
}

/// One grid sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub ring: usize,
    pub radius: f64,
    pub theta: f64,
    pub z: Complex,
}

impl GridMeta {
    pub fn new(rings: Vec<f64>, angles: usize) -> Result<Self> {
        Self::with_seed(rings, angles, 0)
    }

    pub fn with_seed(rings: Vec<f64>, angles: usize, seed: u64) -> Result<Self> {
        let g = Self {
            rings,
            angles,
            seed,
        };
        g.validate()?;
        Ok(g)
    }

    /// `n` rings evenly spaced on `[lo, hi]`.
    pub fn linear(lo: f64, hi: f64, n: usize, angles: usize) -> Result<Self> {
        let rings = if n == 1 {
            vec![lo]
        } else {
            (0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()
        };
        Self::new(rings, angles)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rings.is_empty() {
            return Err(Error::InvalidGrid("no rings".into()));
        }
        if self.angles < MIN_ANGLES {
            return Err(Error::InvalidGrid(format!(
                "{} angles, need at least {MIN_ANGLES}",
                self.angles
            )));
        }
        if let Some(r) = self.rings.iter().find(|r| !(**r >= 0.0 && **r < 1.0)) {
            return Err(Error::InvalidGrid(format!("ring {r} outside [0, 1)")));
        }
        if self.rings.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(
                "rings must be strictly increasing".into(),
            ));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        TAU / self.angles as f64
    }

    fn jitter(&self) -> Vec<f64> {
        if self.seed == 0 {
            return Vec::new();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.rings.len() * self.angles)
            .map(|_| rng.random::<f64>() - 0.5)
            .collect()
    }

    /// All grid samples, ring-major, angles in increasing order.
    pub fn points(&self) -> Vec<GridPoint> {
        let jitter = self.jitter();
        let step = self.step();
        let mut out = Vec::with_capacity(self.rings.len() * self.angles);
        for (i, &r) in self.rings.iter().enumerate() {
            if r == 0.0 {
                out.push(GridPoint {
                    ring: i,
                    radius: 0.0,
                    theta: 0.0,
                    z: Complex::new(0.0, 0.0),
                });
                continue;
            }
            for k in 0..self.angles {
                let j = jitter.get(i * self.angles + k).copied().unwrap_or(0.0);
                let theta = (k as f64 + j) * step;
                out.push(GridPoint {
                    ring: i,
                    radius: r,
                    theta,
                    z: Complex::from_polar(r, theta),
                });
            }
        }
        out
    }

    /// Samples of a single ring (the ring need not belong to the grid).
    pub fn ring_points(&self, radius: f64) -> Vec<GridPoint> {
        let step = self.step();
        (0..self.angles)
            .map(|k| {
                let theta = k as f64 * step;
                GridPoint {
                    ring: 0,
                    radius,
                    theta,
                    z: Complex::from_polar(radius, theta),
                }
            })
            .collect()
    }
}

/// Location and value of a grid extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub at: Complex,
    pub radius: f64,
    pub theta: f64,
}

/// Parallel extremum over `points`. `None` values (evaluation failures) are
/// skipped and counted. Ties resolve to the earliest point so the result is
/// independent of scheduling.
pub fn extremum<F>(points: &[GridPoint], maximize: bool, f: F) -> (Option<Extremum>, usize)
where
    F: Fn(Complex) -> Option<f64> + Sync,
{
    let better = |a: (usize, f64), b: (usize, f64)| -> (usize, f64) {
        let a_wins = if maximize { a.1 > b.1 } else { a.1 < b.1 };
        if a_wins || (a.1 == b.1 && a.0 < b.0) {
            a
        } else {
            b
        }
    };
    let results: Vec<Option<f64>> = points
        .par_iter()
        .map(|p| f(p.z).filter(|v| !v.is_nan()))
        .collect();
    let failures = results.iter().filter(|r| r.is_none()).count();
    let best = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|v| (i, v)))
        .reduce(better);
    let ext = best.map(|(i, v)| Extremum {
        value: v,
        at: points[i].z,
        radius: points[i].radius,
        theta: points[i].theta,
    });
    (ext, failures)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Local polar refinement of a minimum: each pass lays an 8× denser
/// patch (in both r and θ) around the current best point and keeps the
/// smallest value. Radii are clamped to `[0, r_max]`.
pub fn refine_min<F>(
    f: F,
    start: Extremum,
    dr: f64,
    dtheta: f64,
    passes: usize,
    r_max: f64,
) -> Extremum
where
    F: Fn(Complex) -> Option<f64> + Sync,
{
    let mut best = start;
    let mut dr = dr;
    let mut dt = dtheta;
    for _ in 0..passes {
        let half = 8i32;
        let cand: Vec<(f64, f64)> = (-half..=half)
            .flat_map(|i| (-half..=half).map(move |k| (i, k)))
            .map(|(i, k)| {
                let r = (best.radius + dr * i as f64 / half as f64).clamp(0.0, r_max);
                let t = best.theta + dt * k as f64 / half as f64;
                (r, t)
            })
            .collect();
        let vals: Vec<Option<f64>> = cand
            .par_iter()
            .map(|&(r, t)| f(Complex::from_polar(r, t)).filter(|v| !v.is_nan()))
            .collect();
        for (&(r, t), v) in cand.iter().zip(vals) {
            if let Some(v) = v {
                if v < best.value {
                    best = Extremum {
                        value: v,
                        at: Complex::from_polar(r, t),
                        radius: r,
                        theta: t,
                    };
                }
            }
        }
        dr /= 8.0;
        dt /= 8.0;
    }
    best
}
