//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion,
//! followed by the failing sub-checks, and exits non-zero if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use awr_cli::{parse_map_expr, print_map_expr, run_with};
use awr_core::catalog::fixtures;
use awr_core::complex::c;
use awr_core::nehari::{default_cert_grid, schwarzian_of_jet};
use awr_core::quasidisk::perturbation_grid;
use awr_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Default)]
struct Checks {
    items: Vec<(String, bool)>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        self.items.push((what.into(), ok));
    }

    fn passed(&self) -> bool {
        self.items.iter().all(|(_, ok)| *ok)
    }
}

fn map(e: &MapExpr) -> MappingSpec {
    build_map(e.clone()).unwrap()
}

fn certified() -> Vec<(&'static str, MapExpr)> {
    fixtures()
        .into_iter()
        .filter(|(_, e)| map(e).convexity_certified())
        .collect()
}

fn interior_points() -> Vec<Complex> {
    let mut pts = vec![c(0.0, 0.0)];
    for r in [0.3, 0.6, 0.9] {
        for k in 0..12 {
            pts.push(Complex::from_polar(r, (2 * k + 1) as f64 * PI / 12.0));
        }
    }
    pts
}

fn random_mobius(rng: &mut ChaCha8Rng) -> Mobius {
    loop {
        let mut z = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if let Ok(m) = Mobius::new(z(), z(), z(), z()) {
            if m.det().norm() > 0.1 {
                return m;
            }
        }
    }
}

fn cli_grid() -> GridMeta {
    GridMeta::new(vec![0.5, 0.9, 0.99, 0.999], 1024).unwrap()
}

fn nehari_extremality(k: &mut Checks) {
    let rep = certify_nehari(&map(&MapExpr::Strip), &default_cert_grid()).unwrap();
    k.check(
        (rep.sup_estimate - 2.0).abs() <= 1e-6,
        format!("strip sup = {}", rep.sup_estimate),
    );
    k.check(
        rep.arg_sup.im.abs() < 1e-9,
        format!("strip sup attained at {}", rep.arg_sup),
    );
    for (name, e) in certified() {
        let rep = certify_nehari(&map(&e), &default_cert_grid()).unwrap();
        k.check(
            rep.pass && rep.sup_estimate <= 2.0 + 1e-9,
            format!("{name} sup = {}", rep.sup_estimate),
        );
    }
}

fn schwarzian_invariance(k: &mut Checks) {
    let primitives = [
        MapExpr::Identity,
        MapExpr::Disk { x: 0.5 },
        MapExpr::Disk { x: -0.8 },
        MapExpr::Halfplane { c: c(1.0, 0.0) },
        MapExpr::Halfplane { c: c(0.6, 0.8) },
        MapExpr::affine(MapExpr::Disk { x: 0.3 }, c(2.0, -1.0), c(0.5, 0.5)),
    ];
    for e in primitives {
        let f = map(&e);
        let worst = interior_points()
            .into_iter()
            .map(|z| schwarzian(&f, z).unwrap().norm())
            .fold(0.0, f64::max);
        k.check(
            worst < 1e-12,
            format!("|S| of {} = {worst:e}", print_map_expr(&e)),
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, e) in fixtures() {
        let f = map(&e);
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let m = random_mobius(&mut rng);
            for z in interior_points() {
                let j = f.jet(z).unwrap();
                let Ok(outer) = m.derivatives(j.f0) else {
                    continue;
                };
                let s = schwarzian_of_jet(&j).unwrap();
                worst = worst.max((schwarzian_of_jet(&j.chain(outer)).unwrap() - s).norm());
            }
        }
        k.check(
            worst < 1e-10,
            format!("{name} post-composition residual {worst:e}"),
        );

        let mut worst: f64 = 0.0;
        for z0 in [c(0.4, 0.0), c(-0.2, 0.7), c(0.0, -0.8)] {
            let g = koebe_transform(&f, z0).unwrap();
            for z in interior_points() {
                let s = (z + z0) / (1.0 + z0.conj() * z);
                if let (Ok(a), Ok(b)) = (nehari_functional(&g, z), nehari_functional(&f, s)) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        k.check(
            worst < 1e-10,
            format!("{name} Koebe cocycle residual {worst:e}"),
        );
    }
}

fn reflection_anchors(k: &mut Checks) {
    for (name, e) in fixtures() {
        let f = map(&e);
        if f.a2().norm() == 0.0 {
            continue;
        }
        let r = reflect(&f, c(0.0, 0.0)).unwrap().r.finite().unwrap();
        let want = -f.a2().inv();
        k.check(
            (r - want).norm() <= 1e-10 * want.norm().max(1.0),
            format!("{name} R(0) = {r}, -1/a2 = {want}"),
        );
    }
    let r = reflect(&map(&MapExpr::Identity), c(0.5, 0.0))
        .unwrap()
        .r
        .finite()
        .unwrap();
    k.check((r - 2.0).norm() < 1e-12, format!("identity R(0.5) = {r}"));
    let h = map(&MapExpr::Halfplane { c: c(-1.0, 0.0) });
    let r = reflect(&h, c(0.5, 0.0)).unwrap().r.finite().unwrap();
    k.check((r + 2.0).norm() < 1e-10, format!("z/(1-z) R(0.5) = {r}"));
    let worst = cli_grid()
        .points()
        .iter()
        .map(|p| {
            let s = reflect(&h, p.z).unwrap();
            let want = -1.0 - s.w.conj();
            (s.r.finite().unwrap() - want).norm() / want.norm().max(1.0)
        })
        .fold(0.0, f64::max);
    k.check(
        worst < 1e-10,
        format!("z/(1-z) line reflection residual {worst:e}"),
    );
}

fn coefficient_bound(k: &mut Checks) {
    let grid = cli_grid();
    for (name, e) in certified() {
        let rep = coefficient_bound_scan(&map(&e), &grid).unwrap();
        k.check(
            rep.inf_lhs > -0.5 - 1e-9,
            format!("{name} inf Re(a2 f) = {}", rep.inf_lhs),
        );
        k.check(
            rep.min_residual_24 >= -1e-9,
            format!("{name} residual {}", rep.min_residual_24),
        );
        if map(&e).bounded_hint() == Boundedness::Bounded {
            k.check(
                rep.inf_lhs > -0.45,
                format!("bounded {name} stays above -0.45: {}", rep.inf_lhs),
            );
        }
    }
    let disk = coefficient_bound_scan(&map(&MapExpr::Disk { x: 0.5 }), &grid).unwrap();
    k.check(
        (disk.inf_lhs + 1.0 / 3.0).abs() <= 1e-6,
        format!("disk(0.5) inf = {}", disk.inf_lhs),
    );

    let sector = map(&MapExpr::SectorReal { a: 0.5 });
    let ring = GridMeta::new(vec![0.9999], 1024).unwrap();
    let (lo, at) = ring
        .points()
        .iter()
        .map(|p| ((sector.a2() * sector.value(p.z).unwrap()).re, p.z))
        .fold(
            (f64::INFINITY, c(0.0, 0.0)),
            |a, b| if b.0 < a.0 { b } else { a },
        );
    k.check(
        lo <= -0.498 && (at + 1.0).norm() < 1e-2,
        format!("sector(0.5) min Re(a2 f) on r = 0.9999 is {lo} at {at}"),
    );
}

fn mediatrix_theorem(k: &mut Checks) {
    let base = GridMeta::linear(0.0, 0.9, 16, 64).unwrap();
    let probe = GridMeta::linear(0.0, 0.9999, 64, 256).unwrap();
    for (name, e) in certified() {
        let rep = mediatrix_scan(&map(&e), &base, &probe).unwrap();
        k.check(
            rep.pass && rep.min_residual >= -1e-9,
            format!("{name} min residual {}", rep.min_residual),
        );
        let family = matches!(
            e,
            MapExpr::Halfplane { .. }
                | MapExpr::SectorReal { .. }
                | MapExpr::SectorFromAutomorphism { .. }
        );
        if rep.contact {
            k.check(
                family,
                format!(
                    "{name} contact {} outside the extremal family",
                    rep.contact_residual
                ),
            );
        }
        if matches!(e, MapExpr::Halfplane { .. }) {
            k.check(
                rep.contact,
                format!("{name} contact residual {}", rep.contact_residual),
            );
        }
    }
}

fn proof_machinery(k: &mut Checks) {
    let maps = [
        MapExpr::Identity,
        MapExpr::Halfplane { c: c(1.0, 0.0) },
        MapExpr::Halfplane { c: c(-1.0, 0.0) },
        MapExpr::SectorReal { a: 0.5 },
        MapExpr::Disk { x: 0.5 },
        MapExpr::Strip,
    ];
    let zetas = [
        c(0.3, 0.0),
        c(-0.6, 0.0),
        c(0.0, 0.9),
        c(-0.99, 0.0),
        c(0.5, 0.5),
        c(-0.4, -0.7),
        Complex::from_polar(0.95, 2.0),
        c(0.1, -0.2),
    ];
    let grid = cli_grid();
    for e in maps {
        let f = map(&e);
        let name = print_map_expr(&e);
        for zeta in zetas {
            let rep = proof_machinery_check(&f, zeta, &grid).unwrap();
            k.check(
                rep.min_re_g >= 0.5 - 1e-6,
                format!("{name} zeta={zeta} min Re G = {}", rep.min_re_g),
            );
            k.check(
                rep.max_abs_h <= 1.0 + 1e-9,
                format!("{name} zeta={zeta} max |h| = {}", rep.max_abs_h),
            );
            k.check(
                rep.schwarz_pick_slack >= -1e-9,
                format!("{name} zeta={zeta} slack {}", rep.schwarz_pick_slack),
            );
            if matches!(e, MapExpr::Halfplane { .. }) {
                k.check(
                    (rep.min_abs_h - 1.0).abs() <= 1e-9 && (rep.max_abs_h - 1.0).abs() <= 1e-9,
                    format!(
                        "{name} zeta={zeta} |h| in [{}, {}]",
                        rep.min_abs_h, rep.max_abs_h
                    ),
                );
            }
        }
    }
}

fn normalization(k: &mut Checks) {
    let inner = GridMeta::linear(0.0, 0.9, 19, 256).unwrap();
    let cases = [
        (MapExpr::Halfplane { c: c(1.0, 0.0) }, MapExpr::Identity),
        (MapExpr::Halfplane { c: c(0.6, -0.8) }, MapExpr::Identity),
        (MapExpr::MobiusOfStrip { a: c(0.25, 0.0) }, MapExpr::Strip),
    ];
    for (e, target) in cases {
        let star = mobius_shift(&map(&e)).unwrap().map;
        let t = map(&target);
        let worst = inner
            .points()
            .iter()
            .map(|p| (star.value(p.z).unwrap() - t.value(p.z).unwrap()).norm())
            .fold(0.0, f64::max);
        k.check(
            worst < 1e-10,
            format!(
                "f* of {} vs {}: {worst:e}",
                print_map_expr(&e),
                print_map_expr(&target)
            ),
        );
    }
    for (name, e) in fixtures() {
        let ns = normalized_sup(&map(&e), &cli_grid()).unwrap();
        k.check(ns.sup < 1.0, format!("{name} normalized sup {}", ns.sup));
    }
    let disk = normalized_sup(&map(&MapExpr::Disk { x: 0.5 }), &cli_grid()).unwrap();
    k.check(
        disk.sup <= 0.5 + 1e-6,
        format!("disk(0.5) normalized sup {}", disk.sup),
    );
    let cl = near_one_clusters(&map(&MapExpr::StripShift { x: 0.7 }), 0.9999, 16384).unwrap();
    k.check(
        cl.count() == 2,
        format!(
            "strip-shift(0.7) clusters at r = 0.9999: {} (peak {})",
            cl.count(),
            cl.peak
        ),
    );
}

fn delta_detector(k: &mut Checks) {
    let grid = cli_grid();
    for (name, e) in fixtures() {
        let d = delta_f(&map(&e), &grid, 3).unwrap().value;
        match e {
            MapExpr::Halfplane { .. } | MapExpr::Disk { .. } | MapExpr::SectorReal { .. } => {
                k.check(d >= 0.1, format!("{name} delta {d}"))
            }
            MapExpr::Strip | MapExpr::StripShift { .. } | MapExpr::MobiusOfStrip { .. } => {
                k.check(d <= 1e-2, format!("{name} delta {d}"))
            }
            _ => {}
        }
    }
    let d = delta_f(&map(&MapExpr::Halfplane { c: c(-1.0, 0.0) }), &grid, 3)
        .unwrap()
        .value;
    k.check((d - 0.5).abs() <= 1e-3, format!("z/(1-z) delta {d}"));
}

fn quasidisk_dichotomy(k: &mut Checks) {
    let rings = [0.99, 0.999, 0.9995];
    let base = GridMeta::linear(0.0, 0.9, 16, 64).unwrap();
    let probe = GridMeta::new(vec![0.5, 0.9, 0.99, 0.999], 256).unwrap();
    for (name, e) in fixtures() {
        let f = map(&e);
        let om = koebe_omission_scan(&f, &base, &probe).unwrap();
        let prof = match quasidisk_ratio_scan(&f, &rings, 1024) {
            Ok(p) => p,
            Err(Error::ParamOutOfRange { .. }) => continue,
            Err(err) => {
                k.check(false, format!("{name} ratio scan: {err}"));
                continue;
            }
        };
        let ratios = &prof.inf_ratio_per_ring;
        match e {
            MapExpr::Identity | MapExpr::Halfplane { .. } => k.check(
                prof.c_estimate >= 0.9,
                format!("{name} c = {}", prof.c_estimate),
            ),
            MapExpr::SectorReal { .. } => {
                let (lo, hi) = ratios
                    .iter()
                    .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
                k.check(hi <= 1.1 * lo, format!("{name} ratios {ratios:?}"));
            }
            MapExpr::MobiusOfStrip { .. } => {
                let (first, last) = (ratios[0], *ratios.last().unwrap());
                k.check(last < 0.05, format!("{name} deepest ratio {last}"));
                k.check(
                    last < 0.5 * first,
                    format!("{name} deepest {last:e} vs half of shallowest {first:e}"),
                );
            }
            _ => {}
        }
        let ratio_ok = prof.c_estimate >= 0.05;
        let omission_ok = om.inf >= 0.05;
        k.check(
            ratio_ok == omission_ok,
            format!(
                "{name} verdicts: ratio c = {}, omission inf = {}",
                prof.c_estimate, om.inf
            ),
        );
    }
}

fn perturbation_demo(k: &mut Checks) {
    let rows = strip_perturbation_demo(
        &[c(0.25, 0.0), c(0.01, 0.0), c(0.0, 0.25)],
        &perturbation_grid(),
    )
    .unwrap();
    for row in rows {
        k.check(
            row.sup_diff < 1e-10,
            format!("a = {} sup|f* - L| = {:e}", row.a, row.sup_diff),
        );
        k.check(
            row.delta.value < 1e-2,
            format!("a = {} delta {}", row.a, row.delta.value),
        );
    }
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(
        std::iter::once("awr").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap())
}

fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> MapExpr {
    let mut z = |s: f64| c(rng.random_range(-s..s), rng.random_range(-s..s));
    let leaf = |rng: &mut ChaCha8Rng| match rng.random_range(0..8) {
        0 => MapExpr::Identity,
        1 => MapExpr::Disk {
            x: rng.random_range(-0.9..0.9),
        },
        2 => MapExpr::Halfplane {
            c: Complex::from_polar(1.0, rng.random_range(0.0..6.0)),
        },
        3 => MapExpr::SectorReal {
            a: rng.random_range(0.1..0.9),
        },
        4 => MapExpr::Strip,
        5 => MapExpr::StripShift {
            x: rng.random_range(0.1..0.9),
        },
        6 => MapExpr::MobiusOfStrip {
            a: c(rng.random_range(0.1..1.0), rng.random_range(-1.0..1.0)),
        },
        _ => MapExpr::SectorFromAutomorphism {
            a: c(rng.random_range(-0.6..0.6), rng.random_range(-0.6..0.6)),
        },
    };
    if depth == 0 {
        return leaf(rng);
    }
    let (a, b) = (z(0.9), z(3.0));
    match rng.random_range(0..4) {
        0 => leaf(rng),
        1 => MapExpr::koebe(random_expr(rng, depth - 1), a),
        2 => MapExpr::mobius_shift(random_expr(rng, depth - 1)),
        _ => MapExpr::affine(random_expr(rng, depth - 1), b + 0.5, a),
    }
}

fn cli_determinism(k: &mut Checks) {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &[
            "reflect",
            "--map",
            "sector(a=0.5)",
            "--z",
            "0.3+0.2i",
            "--angles",
            "128",
            "--seed",
            "42",
        ],
        &[
            "certify",
            "--map",
            "sector-auto(a=0.3+0.4i)",
            "--rings",
            "0.5,0.9",
            "--angles",
            "256",
            "--seed",
            "9",
        ],
        &[
            "quasidisk",
            "--map",
            "disk(x=0.5)",
            "--rings",
            "0.99,0.999",
            "--angles",
            "256",
        ],
    ];
    for (i, args) in runs.iter().enumerate() {
        let files: Vec<Vec<u8>> = (0..2)
            .map(|n| {
                let p = dir.path().join(format!("{i}-{n}.csv"));
                let mut argv = args.to_vec();
                let ps = p.to_str().unwrap().to_string();
                argv.extend(["--csv", &ps]);
                cli(&argv);
                std::fs::read(&p).unwrap_or_default()
            })
            .collect();
        k.check(
            !files[0].is_empty() && files[0] == files[1],
            format!("byte-identical CSV for `{}`", args.join(" ")),
        );
    }

    for (name, e) in fixtures() {
        let text = print_map_expr(&e);
        // every fixture, convex or not, is a Nehari map
        let want = 0;
        let (code, _) = cli(&[
            "certify",
            "--map",
            &text,
            "--rings",
            "0.5,0.9,0.99",
            "--angles",
            "256",
        ]);
        k.check(
            code == want,
            format!("certify {name} exit {code}, expected {want}"),
        );
        let want = match e {
            MapExpr::Strip => 2,
            MapExpr::MobiusOfStrip { .. } => 1,
            _ => 0,
        };
        let (code, _) = cli(&[
            "quasidisk",
            "--map",
            &text,
            "--rings",
            "0.99,0.999",
            "--angles",
            "256",
        ]);
        k.check(
            code == want,
            format!("quasidisk {name} exit {code}, expected {want}"),
        );
        let want = i32::from(!map(&e).convexity_certified());
        let (code, _) = cli(&[
            "coefficient-bound",
            "--map",
            &text,
            "--rings",
            "0.5,0.9",
            "--angles",
            "256",
        ]);
        k.check(
            code == want,
            format!("coefficient-bound {name} exit {code}, expected {want}"),
        );
    }
    for args in [
        &["certify", "--map", "disk(x=1.5)"][..],
        &["reflect", "--map", "strip"],
        &["bogus"],
    ] {
        let (code, _) = cli(args);
        k.check(code == 2, format!("`{}` exit {code}", args.join(" ")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut bad = 0;
    for _ in 0..50 {
        let e = random_expr(&mut rng, 3);
        let text = print_map_expr(&e);
        let back = parse_map_expr(&text);
        let noisy = parse_map_expr(&format!("  {} ", text.to_uppercase().replace(',', " ,  ")));
        if back.as_ref() != Ok(&e)
            || noisy.as_ref() != Ok(&e)
            || print_map_expr(back.as_ref().unwrap()) != text
        {
            bad += 1;
            k.check(false, format!("round trip of `{text}`"));
        }
    }
    k.check(
        bad == 0,
        format!("grammar round trip: {} of 50 cases", 50 - bad),
    );
}

type Criterion = (&'static str, fn(&mut Checks));

fn main() {
    let criteria: [Criterion; 11] = [
        ("Nehari extremality", nehari_extremality),
        ("Schwarzian invariance", schwarzian_invariance),
        ("reflection anchors", reflection_anchors),
        ("coefficient bound", coefficient_bound),
        ("mediatrix theorem", mediatrix_theorem),
        ("proof machinery", proof_machinery),
        ("normalization", normalization),
        ("delta detector", delta_detector),
        ("quasidisk dichotomy", quasidisk_dichotomy),
        ("strip perturbation", perturbation_demo),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut k = Checks::default();
        run(&mut k);
        let verdict = if k.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2} {verdict}  {title} ({} checks, {:.1}s)",
            i + 1,
            k.items.len(),
            start.elapsed().as_secs_f64()
        );
        for (what, _) in k.items.iter().filter(|(_, ok)| !ok) {
            println!("      failed: {what}");
        }
        failed += usize::from(!k.passed());
    }
    println!(
        "{} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
