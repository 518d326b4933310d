use awr_core::catalog::fixtures;
use awr_core::complex::c;
use awr_core::*;
use proptest::prelude::*;

/// Maps whose values on `|z| ≤ 0.3` stay inside `|w| < 0.75`, so any three of
/// them can be chained on that disk.
fn small_maps() -> Vec<MapExpr> {
    vec![
        MapExpr::Identity,
        MapExpr::Disk { x: 0.4 },
        MapExpr::Disk { x: -0.6 },
        MapExpr::Halfplane { c: c(0.6, 0.8) },
        MapExpr::SectorReal { a: 0.3 },
        MapExpr::Strip,
        MapExpr::MobiusOfStrip { a: c(0.0, 0.25) },
    ]
}

fn close(a: &Jet3, b: &Jet3) -> bool {
    [(a.f0, b.f0), (a.f1, b.f1), (a.f2, b.f2), (a.f3, b.f3)]
        .iter()
        .all(|(x, y)| (x - y).norm() <= 1e-12 * x.norm().max(1.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jet_composition_is_associative(
        i in 0usize..7, j in 0usize..7, k in 0usize..7,
        r in 0.0f64..0.3, t in 0.0f64..std::f64::consts::TAU,
    ) {
        let maps = small_maps();
        let (f, g, h) = (
            build_map(maps[i].clone()).unwrap(),
            build_map(maps[j].clone()).unwrap(),
            build_map(maps[k].clone()).unwrap(),
        );
        let z = Complex::from_polar(r, t);
        let jh = h.jet(z).unwrap();
        let jg = g.jet(jh.f0).unwrap();
        let jf = f.jet(jg.f0).unwrap();
        let left = Jet3::compose(&Jet3::compose(&jf, &jg).unwrap(), &jh).unwrap();
        let right = Jet3::compose(&jf, &Jet3::compose(&jg, &jh).unwrap()).unwrap();
        prop_assert!(close(&left, &right), "{left:?} vs {right:?}");
    }

    #[test]
    fn koebe_b2_is_the_cached_coefficient(idx in 0usize..9, r in 0.0f64..0.95, t in 0.0f64..std::f64::consts::TAU) {
        let (_, e) = fixtures().swap_remove(idx);
        let f = build_map(e).unwrap();
        let z0 = Complex::from_polar(r, t);
        // L/(1 + aL) has an interior pole on the real axis
        prop_assume!(f.jet(z0).is_ok());
        let g = koebe_transform(&f, z0).unwrap();
        let b2 = awr_core::catalog::koebe_b2(&f.jet(z0).unwrap());
        let expected = if b2.norm() < 1e-12 { c(0.0, 0.0) } else { b2 };
        prop_assert!((g.a2() - expected).norm() < 1e-10 * expected.norm().max(1.0));
    }

    #[test]
    fn sector_coefficient_identity(re in -0.95f64..0.95, im in -0.95f64..0.95) {
        let a = c(re, im);
        prop_assume!(a.norm() < 0.95);
        let (spec, p) = sector_from_automorphism(a).unwrap();
        prop_assert!((p.c.norm() - 1.0).abs() < 1e-12);
        prop_assert!((p.c - 1.0).norm() > 0.0);
        prop_assert!(p.beta > 0.0 && p.beta < 1.0);
        prop_assert!(((spec.a2() * p.b).re + 0.5).abs() < 1e-10);
        prop_assert!(spec.convexity_certified());
    }

    #[test]
    fn normalized_modulus_stays_below_one(idx in 0usize..9, r in 0.0f64..0.999, t in 0.0f64..std::f64::consts::TAU) {
        let (_, e) = fixtures().swap_remove(idx);
        let f = build_map(e).unwrap();
        let z = Complex::from_polar(r, t);
        if let Ok(v) = quasidisk::normalized_modulus(&f, z) {
            prop_assert!(v < 1.0, "{v}");
        }
    }
}

#[test]
fn mobius_shift_kills_the_second_coefficient() {
    for (name, e) in fixtures() {
        let f = build_map(e).unwrap();
        let out = mobius_shift(&f).unwrap();
        assert!(out.map.a2().norm() < 1e-10, "{name}");
        assert_eq!(out.a2_was_zero, f.a2().norm() == 0.0);
    }
}

#[test]
fn convexity_table() {
    for (name, e) in fixtures() {
        let certified = build_map(e.clone()).unwrap().convexity_certified();
        let expected = !matches!(e, MapExpr::MobiusOfStrip { .. });
        assert_eq!(certified, expected, "{name}");
    }
}
