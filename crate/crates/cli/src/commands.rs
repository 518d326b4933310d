//! Command-line surface and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use awr_core::catalog::fixtures;
use awr_core::geometry::{coefficient_bound_samples, mediatrix};
use awr_core::nehari::default_cert_grid;
use awr_core::quasidisk::{normalized_modulus, perturbation_grid};
use awr_core::{
    build_map, certify_nehari, coefficient_bound_scan, delta_f, extend, koebe_omission_scan,
    mediatrix_scan, mobius_shift, near_one_clusters, nehari_functional, normalized_sup,
    proof_machinery_check, quasidisk, quasidisk_ratio_scan, reflect, strip_perturbation_demo,
    Complex, DeltaMetric, Error, ExtendedComplex, GridMeta, MapExpr, MappingSpec, ReflectionSample,
};
use clap::{Args, Parser, Subcommand};

use crate::grammar::{parse_complex, parse_map_expr, print_map_expr};
use crate::output::{extended_cells, num, Csv, Figure, Report};

pub const DEFAULT_RINGS: [f64; 4] = [0.5, 0.9, 0.99, 0.999];
pub const DEFAULT_ANGLES: usize = 1024;
pub const DEFAULT_PASSES: usize = 3;

/// Verdict thresholds: a ratio or omission infimum below this counts as
/// collapse towards 0.
pub const COLLAPSE_THRESHOLD: f64 = 0.05;

const SVG_POLYLINE_POINTS: usize = 2048;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "awr",
    version,
    about = "Schwarzian, reflection and quasidisk scans for conformal maps of the disk"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Comma list of radii, or `lin:LO:HI:N`.
    #[arg(long, value_parser = parse_rings)]
    pub rings: Option<Rings>,
    #[arg(long)]
    pub angles: Option<usize>,
    /// Nonzero seeds jitter the sample angles.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct TwoGridArgs {
    #[arg(long, value_parser = parse_rings)]
    pub base_rings: Option<Rings>,
    #[arg(long)]
    pub base_angles: Option<usize>,
    #[arg(long, value_parser = parse_rings)]
    pub probe_rings: Option<Rings>,
    #[arg(long)]
    pub probe_angles: Option<usize>,
    /// Jitter seed for the probe grid.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in fixture maps.
    Catalog {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Estimate sup (1-|z|^2)^2 |Sf| and compare with 2.
    Certify {
        #[arg(long, value_parser = parse_map)]
        map: MapExpr,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Reflected point R_w at one point, or over a grid with --csv.
    Reflect {
        #[arg(long, value_parser = parse_map)]
        map: MapExpr,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z: Complex,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Checks Re(b2 g) > -1/2 for the Koebe transforms g over a base grid.
    MediatrixScan {
        #[arg(long, value_parser = parse_map)]
        map: MapExpr,
        #[command(flatten)]
        grids: TwoGridArgs,
        /// Base point for the SVG overlay; defaults to the tightest base.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z0: Option<Complex>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Infimum of Re(a2 f) and the matching coefficient-bound residual.
    CoefficientBound {
        #[arg(long, value_parser = parse_map)]
        map: MapExpr,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Re G and |h| for the starlike quotient at zeta.
    ProofCheck {
        #[arg(long, value_parser = parse_map)]
        map: MapExpr,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        zeta: Complex,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Möbius shift f* = f/(1 + a2 f) and the sup of |a2 f*|.
    Normalize {
        #[arg(long, value_parser = parse_map)]
        map: MapExpr,
        #[command(flatten)]
        grid: GridArgs,
        /// Ring used for the near-1 cluster count.
        #[arg(long, default_value_t = 0.9999)]
        cluster_ring: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Distance from f(D) to -1/a2, or chordally to infinity when a2 = 0.
    Delta {
        #[arg(long, value_parser = parse_map)]
        map: MapExpr,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = DEFAULT_PASSES)]
        passes: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Per ring, the infimum of d(R_w, closure of f(D)) / d(w, boundary).
    Quasidisk {
        #[arg(long, value_parser = parse_map)]
        map: MapExpr,
        #[arg(long, value_parser = parse_rings)]
        rings: Option<Rings>,
        #[arg(long, default_value_t = DEFAULT_ANGLES)]
        angles: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Distance from -1 of the normalized Koebe transforms b2 g.
    OmissionScan {
        #[arg(long, value_parser = parse_map)]
        map: MapExpr,
        #[command(flatten)]
        grids: TwoGridArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// f_a = L/(1 + aL) against L for each a.
    StripPerturbation {
        #[arg(long = "a", value_parser = parse_point, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        a_list: Vec<Complex>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Boundary picture with w, R_w, [w, R_w] and the mediatrix per point.
    EmitSvg {
        #[arg(long, value_parser = parse_map)]
        map: MapExpr,
        #[arg(long = "z", value_parser = parse_point, allow_hyphen_values = true, value_delimiter = ',')]
        points: Vec<Complex>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        svg: PathBuf,
    },
}

fn parse_map(s: &str) -> Result<MapExpr, String> {
    parse_map_expr(s).map_err(|e| e.to_string())
}

fn parse_point(s: &str) -> Result<Complex, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

/// Ring radii as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Rings(pub Vec<f64>);

pub fn parse_rings(s: &str) -> Result<Rings, String> {
    parse_ring_list(s).map(Rings)
}

fn parse_ring_list(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("lin:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err("expected lin:LO:HI:N".into());
        };
        let lo: f64 = lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?;
        let hi: f64 = hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?;
        let n: usize = n.trim().parse().map_err(|e| format!("bad N: {e}"))?;
        return match n {
            0 => Err("N must be positive".into()),
            1 => Ok(vec![lo]),
            _ => Ok((0..n)
                .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
                .collect()),
        };
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad radius `{t}`: {e}"))
        })
        .collect()
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
struct Fail {
    code: i32,
    message: String,
}

fn usage(message: impl std::fmt::Display) -> Fail {
    Fail {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

/// Bad input maps to 2; anything a scan trips over is a failed invariant.
fn scan_err(e: Error) -> Fail {
    let code = match e {
        Error::ParamOutOfRange { .. }
        | Error::DomainViolation { .. }
        | Error::InvalidGrid(_)
        | Error::DepthExceeded { .. } => EXIT_USAGE,
        _ => EXIT_FAIL,
    };
    Fail {
        code,
        message: e.to_string(),
    }
}

impl GridArgs {
    fn resolve(&self, default: impl FnOnce() -> GridMeta) -> Result<GridMeta, Fail> {
        if self.rings.is_none() && self.angles.is_none() {
            let mut g = default();
            g.seed = self.seed;
            return Ok(g);
        }
        let rings = self
            .rings
            .clone()
            .map(|r| r.0)
            .unwrap_or_else(|| DEFAULT_RINGS.to_vec());
        GridMeta::with_seed(rings, self.angles.unwrap_or(DEFAULT_ANGLES), self.seed).map_err(usage)
    }

    fn resolve_default(&self) -> Result<GridMeta, Fail> {
        self.resolve(|| GridMeta::new(DEFAULT_RINGS.to_vec(), DEFAULT_ANGLES).unwrap())
    }
}

impl TwoGridArgs {
    fn resolve(&self, default_probe: GridMeta) -> Result<(GridMeta, GridMeta), Fail> {
        let base = match &self.base_rings {
            Some(r) => GridMeta::new(r.0.clone(), self.base_angles.unwrap_or(64)),
            None => GridMeta::linear(0.0, 0.9, 16, self.base_angles.unwrap_or(64)),
        }
        .map_err(usage)?;
        let probe = GridMeta::with_seed(
            self.probe_rings
                .clone()
                .map(|r| r.0)
                .unwrap_or(default_probe.rings),
            self.probe_angles.unwrap_or(default_probe.angles),
            self.seed,
        )
        .map_err(usage)?;
        Ok((base, probe))
    }
}

fn default_mediatrix_probe() -> GridMeta {
    GridMeta::linear(0.0, 0.9999, 64, 256).unwrap()
}

fn default_omission_probe() -> GridMeta {
    GridMeta::new(DEFAULT_RINGS.to_vec(), 256).unwrap()
}

struct Outcome {
    report: Report,
    pass: bool,
    csv: Option<Csv>,
    svg: Option<Figure>,
}

impl Outcome {
    fn new(report: Report, pass: bool) -> Self {
        Self {
            report,
            pass,
            csv: None,
            svg: None,
        }
    }
}

fn build(e: &MapExpr) -> Result<MappingSpec, Fail> {
    build_map(e.clone()).map_err(usage)
}

fn boundary_figure(map: &MappingSpec, radius: f64) -> Result<Figure, Fail> {
    let poly = quasidisk::boundary_polyline(map, SVG_POLYLINE_POINTS, radius).map_err(scan_err)?;
    let mut pts: Vec<Option<Complex>> = poly
        .points
        .iter()
        .map(|p| p.finite().filter(|w| w.norm() <= poly.clip_radius))
        .collect();
    if let Some(first) = pts.first().copied() {
        // close the curve
        pts.push(first);
    }
    let mut fig = Figure::new();
    fig.boundary(&pts);
    Ok(fig)
}

/// Adds `w`, `R_w`, the segment and its mediatrix for one sample.
fn draw_sample(fig: &mut Figure, s: &ReflectionSample) {
    fig.w(
        s.w,
        Some(format!("z = {}", awr_core::complex::DisplayComplex(s.z))),
    );
    let Some(r) = s.r.finite() else { return };
    fig.r(r, None);
    fig.segment(s.w, r);
    if let Ok(line) = mediatrix(s) {
        if !line.degenerate {
            fig.mediatrix(line.midpoint, line.normal);
        }
    }
}

fn execute(cmd: &Command) -> Result<Outcome, Fail> {
    match cmd {
        Command::Catalog { .. } => {
            let mut rep = Report::new();
            let mut csv = Csv::new(&["name", "expr", "a2_re", "a2_im", "convex", "convexity_min"]);
            for (name, e) in fixtures() {
                let f = build(&e)?;
                let text = print_map_expr(&e);
                rep.put(name, &text);
                csv.row(vec![
                    name.to_string(),
                    format!("\"{text}\""),
                    num(f.a2().re),
                    num(f.a2().im),
                    u8::from(f.convexity_certified()).to_string(),
                    num(f.convexity_min()),
                ]);
            }
            let mut o = Outcome::new(rep, true);
            o.csv = Some(csv);
            Ok(o)
        }

        Command::Certify { map, grid, .. } => {
            let f = build(map)?;
            let grid = grid.resolve(default_cert_grid)?;
            let cert = certify_nehari(&f, &grid).map_err(scan_err)?;
            let mut rep = Report::new();
            rep.put("map", print_map_expr(map))
                .put("sup", format!("{:.6}", cert.sup_estimate))
                .complex("arg_sup", cert.arg_sup)
                .put("t", format!("{:.6}", cert.t_parameter))
                .put("points", grid.points().len())
                .put("failures", cert.failures.len())
                .put("pass", cert.pass);
            let mut csv = Csv::new(&["z_re", "z_im", "value"]);
            for p in grid.points() {
                let v = nehari_functional(&f, p.z).map(num).unwrap_or_default();
                csv.row(vec![num(p.z.re), num(p.z.im), v]);
            }
            let mut o = Outcome::new(rep, cert.pass);
            o.csv = Some(csv);
            Ok(o)
        }

        Command::Reflect { map, z, grid, .. } => {
            let f = build(map)?;
            let mut rep = Report::new();
            rep.put("map", print_map_expr(map)).complex("z", *z);
            let mut fig = boundary_figure(&f, 1.0)?;
            if z.norm() > 1.0 {
                let r = extend(&f, *z).map_err(scan_err)?;
                rep.put("r", r_text(r));
                if let Some(r) = r.finite() {
                    fig.include(r);
                }
            } else {
                let s = reflect(&f, *z).map_err(scan_err)?;
                rep.complex("w", s.w)
                    .put("r", r_text(s.r))
                    .complex("b2", s.b2);
                draw_sample(&mut fig, &s);
            }
            let grid = grid.resolve_default()?;
            let mut csv = Csv::new(&[
                "z_re", "z_im", "w_re", "w_im", "r_re", "r_im", "r_is_inf", "b2_re", "b2_im",
            ]);
            for p in grid.points() {
                let Ok(s) = reflect(&f, p.z) else { continue };
                let [rr, ri, inf] = extended_cells(s.r);
                csv.row(vec![
                    num(s.z.re),
                    num(s.z.im),
                    num(s.w.re),
                    num(s.w.im),
                    rr,
                    ri,
                    inf,
                    num(s.b2.re),
                    num(s.b2.im),
                ]);
            }
            let mut o = Outcome::new(rep, true);
            o.csv = Some(csv);
            o.svg = Some(fig);
            Ok(o)
        }

        Command::MediatrixScan { map, grids, z0, .. } => {
            let f = build(map)?;
            let (base, probe) = grids.resolve(default_mediatrix_probe())?;
            let m = mediatrix_scan(&f, &base, &probe).map_err(scan_err)?;
            let mut rep = Report::new();
            rep.put("map", print_map_expr(map))
                .put("min_residual", num(m.min_residual))
                .complex("arg_base", m.arg_base)
                .complex("arg_probe", m.arg_probe)
                .put("contact_residual", num(m.contact_residual))
                .put("contact", m.contact)
                .put("max_signed_distance", num(m.max_signed_distance))
                .put("vacuous_bases", m.vacuous_bases)
                .put("failures", m.failures)
                .put("pass", m.pass);
            let mut csv = Csv::new(&[
                "z0_re",
                "z0_im",
                "b2_re",
                "b2_im",
                "min_residual",
                "probe_re",
                "probe_im",
                "outer_residual",
                "max_signed_distance",
                "vacuous",
            ]);
            for r in &m.rows {
                csv.row(vec![
                    num(r.z0.re),
                    num(r.z0.im),
                    num(r.b2.re),
                    num(r.b2.im),
                    num(r.min_residual),
                    num(r.arg_probe.re),
                    num(r.arg_probe.im),
                    num(r.outer_residual),
                    num(r.max_signed_distance),
                    u8::from(r.vacuous).to_string(),
                ]);
            }
            let mut fig = boundary_figure(&f, 1.0)?;
            if let Ok(s) = reflect(&f, z0.unwrap_or(m.arg_base)) {
                draw_sample(&mut fig, &s);
            }
            let mut o = Outcome::new(rep, m.pass);
            o.csv = Some(csv);
            o.svg = Some(fig);
            Ok(o)
        }

        Command::CoefficientBound { map, grid, .. } => {
            let f = build(map)?;
            let grid = grid.resolve_default()?;
            let b = coefficient_bound_scan(&f, &grid).map_err(scan_err)?;
            let mut rep = Report::new();
            rep.put("map", print_map_expr(map))
                .put("inf_lhs", num(b.inf_lhs))
                .complex("arg_inf", b.arg_inf)
                .put("min_residual", num(b.min_residual_24))
                .complex("arg_residual", b.arg_residual)
                .put("failures", b.failures)
                .put("pass", b.pass);
            let mut csv = Csv::new(&["z_re", "z_im", "on_circle", "lhs", "residual"]);
            for s in coefficient_bound_samples(&f, &grid).map_err(scan_err)? {
                let (l, r) = match s.values {
                    Some((l, r)) => (num(l), num(r)),
                    None => (String::new(), String::new()),
                };
                csv.row(vec![
                    num(s.z.re),
                    num(s.z.im),
                    u8::from(s.on_circle).to_string(),
                    l,
                    r,
                ]);
            }
            let mut o = Outcome::new(rep, b.pass);
            o.csv = Some(csv);
            Ok(o)
        }

        Command::ProofCheck {
            map, zeta, grid, ..
        } => {
            let f = build(map)?;
            let grid = grid.resolve_default()?;
            let p = proof_machinery_check(&f, *zeta, &grid).map_err(scan_err)?;
            let pass = p.min_re_g >= 0.5 - 1e-6
                && p.max_abs_h <= 1.0 + 1e-9
                && p.schwarz_pick_slack >= -1e-9;
            let mut rep = Report::new();
            rep.put("map", print_map_expr(map))
                .complex("zeta", p.zeta)
                .put("min_re_g", num(p.min_re_g))
                .complex("argmin", p.argmin)
                .put("max_abs_h", num(p.max_abs_h))
                .complex("arg_max_h", p.arg_max_h)
                .put("min_abs_h", num(p.min_abs_h))
                .complex("a1", p.a1g)
                .complex("a2", p.a2g)
                .put("schwarz_pick_slack", num(p.schwarz_pick_slack))
                .put("failures", p.failures)
                .put("pass", pass);
            Ok(Outcome::new(rep, pass))
        }

        Command::Normalize {
            map,
            grid,
            cluster_ring,
            ..
        } => {
            let f = build(map)?;
            let grid = grid.resolve_default()?;
            let shifted = mobius_shift(&f).map_err(scan_err)?;
            let ns = normalized_sup(&f, &grid).map_err(scan_err)?;
            let cl = near_one_clusters(&f, *cluster_ring, 16 * DEFAULT_ANGLES).map_err(scan_err)?;
            let pass = ns.sup < 1.0;
            let mut rep = Report::new();
            rep.put("map", print_map_expr(map))
                .complex("a2", f.a2())
                .put("a2_zero", shifted.a2_was_zero)
                .complex("a2_star", shifted.map.a2())
                .put("normalized_sup", num(ns.sup))
                .complex("arg_sup", ns.arg)
                .put("cluster_ring", num(*cluster_ring))
                .put("cluster_peak", num(cl.peak))
                .put("clusters", cl.count())
                .put("failures", ns.failures)
                .put("pass", pass);
            let mut csv = Csv::new(&["z_re", "z_im", "modulus"]);
            for p in grid.points() {
                let v = normalized_modulus(&f, p.z).map(num).unwrap_or_default();
                csv.row(vec![num(p.z.re), num(p.z.im), v]);
            }
            let mut o = Outcome::new(rep, pass);
            o.csv = Some(csv);
            Ok(o)
        }

        Command::Delta {
            map, grid, passes, ..
        } => {
            let f = build(map)?;
            let grid = grid.resolve_default()?;
            let d = delta_f(&f, &grid, *passes).map_err(scan_err)?;
            let mut rep = Report::new();
            rep.put("map", print_map_expr(map))
                .put("delta", num(d.value))
                .put(
                    "metric",
                    match d.metric {
                        DeltaMetric::Euclidean => "euclidean",
                        DeltaMetric::Chordal => "chordal",
                    },
                )
                .complex("arg_inf", d.arg_inf)
                .put("passes", passes);
            let mut csv = Csv::new(&["delta", "metric", "arg_re", "arg_im"]);
            csv.row(vec![
                num(d.value),
                rep.get("metric").unwrap().to_string(),
                num(d.arg_inf.re),
                num(d.arg_inf.im),
            ]);
            let mut o = Outcome::new(rep, true);
            o.csv = Some(csv);
            Ok(o)
        }

        Command::Quasidisk {
            map, rings, angles, ..
        } => {
            let f = build(map)?;
            let rings = rings
                .clone()
                .map(|r| r.0)
                .unwrap_or_else(|| DEFAULT_RINGS.to_vec());
            let prof = quasidisk_ratio_scan(&f, &rings, *angles).map_err(scan_err)?;
            let pass = prof.c_estimate >= COLLAPSE_THRESHOLD;
            let mut rep = Report::new();
            rep.put("map", print_map_expr(map));
            for (k, r) in prof.rings.iter().enumerate() {
                rep.put(&format!("ratio[{r}]"), num(prof.inf_ratio_per_ring[k]));
            }
            rep.put("c_estimate", num(prof.c_estimate))
                .put("verdict", if pass { "quasidisk" } else { "collapse" })
                .put("pass", pass);
            let mut csv = Csv::new(&["ring", "inf_ratio", "arg_re", "arg_im", "all_infinite"]);
            let mut fig = boundary_figure(&f, 1.0)?;
            for (k, r) in prof.rings.iter().enumerate() {
                let z = prof.arg_inf[k];
                csv.row(vec![
                    num(*r),
                    num(prof.inf_ratio_per_ring[k]),
                    num(z.re),
                    num(z.im),
                    u8::from(prof.all_infinite[k]).to_string(),
                ]);
                if let Ok(s) = reflect(&f, z) {
                    fig.w(s.w, Some(format!("ring {r}")));
                    if let Some(rw) = s.r.finite() {
                        fig.r(rw, Some(format!("ratio {}", prof.inf_ratio_per_ring[k])));
                        fig.segment(s.w, rw);
                    }
                }
            }
            let mut o = Outcome::new(rep, pass);
            o.csv = Some(csv);
            o.svg = Some(fig);
            Ok(o)
        }

        Command::OmissionScan { map, grids, .. } => {
            let f = build(map)?;
            let (base, probe) = grids.resolve(default_omission_probe())?;
            let om = koebe_omission_scan(&f, &base, &probe).map_err(scan_err)?;
            let pass = om.inf >= COLLAPSE_THRESHOLD;
            let mut rep = Report::new();
            rep.put("map", print_map_expr(map))
                .put("inf", num(om.inf))
                .complex("arg_base", om.arg_base)
                .complex("arg_probe", om.arg_probe)
                .put("vacuous_bases", om.vacuous_bases)
                .put("verdict", if pass { "bounded" } else { "collapse" })
                .put("pass", pass);
            Ok(Outcome::new(rep, pass))
        }

        Command::StripPerturbation { a_list, .. } => {
            let rows = strip_perturbation_demo(a_list, &perturbation_grid()).map_err(scan_err)?;
            let mut rep = Report::new();
            let mut csv = Csv::new(&["a_re", "a_im", "sup_diff", "delta"]);
            let mut pass = true;
            for row in &rows {
                let key = awr_core::complex::DisplayComplex(row.a).to_string();
                rep.put(&format!("sup_diff[{key}]"), num(row.sup_diff))
                    .put(&format!("delta[{key}]"), num(row.delta.value));
                pass &= row.sup_diff < 1e-10 && row.delta.value < 1e-2;
                csv.row(vec![
                    num(row.a.re),
                    num(row.a.im),
                    num(row.sup_diff),
                    num(row.delta.value),
                ]);
            }
            rep.put("pass", pass);
            let mut o = Outcome::new(rep, pass);
            o.csv = Some(csv);
            Ok(o)
        }

        Command::EmitSvg {
            map,
            points,
            radius,
            ..
        } => {
            let f = build(map)?;
            let mut fig = boundary_figure(&f, *radius)?;
            let mut rep = Report::new();
            rep.put("map", print_map_expr(map));
            for z in points {
                let s = reflect(&f, *z).map_err(scan_err)?;
                draw_sample(&mut fig, &s);
            }
            rep.put("points", points.len());
            let mut o = Outcome::new(rep, true);
            o.svg = Some(fig);
            Ok(o)
        }
    }
}

fn r_text(r: ExtendedComplex) -> String {
    match r.finite() {
        Some(z) => awr_core::complex::DisplayComplex(z).to_string(),
        None => "inf".into(),
    }
}

fn outputs(cmd: &Command) -> OutputArgs {
    match cmd {
        Command::Catalog { out }
        | Command::Certify { out, .. }
        | Command::Reflect { out, .. }
        | Command::MediatrixScan { out, .. }
        | Command::CoefficientBound { out, .. }
        | Command::ProofCheck { out, .. }
        | Command::Normalize { out, .. }
        | Command::Delta { out, .. }
        | Command::Quasidisk { out, .. }
        | Command::OmissionScan { out, .. }
        | Command::StripPerturbation { out, .. } => out.clone(),
        Command::EmitSvg { svg, .. } => OutputArgs {
            csv: None,
            svg: Some(svg.clone()),
        },
    }
}

fn write_file(path: &PathBuf, body: &str) -> Result<(), Fail> {
    std::fs::write(path, body).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

/// Parses `argv` (including the program name), runs the command and
/// returns the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = execute(&cli.command).and_then(|o| {
        let files = outputs(&cli.command);
        if let (Some(path), Some(csv)) = (&files.csv, &o.csv) {
            write_file(path, &csv.render())?;
        } else if files.csv.is_some() {
            return Err(usage("this command has no CSV output"));
        }
        if let (Some(path), Some(fig)) = (&files.svg, &o.svg) {
            write_file(path, &fig.render())?;
        } else if files.svg.is_some() {
            return Err(usage("this command has no SVG output"));
        }
        Ok(o)
    });
    match result {
        Ok(o) => {
            let _ = write!(out, "{}", o.report.render());
            if o.pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
