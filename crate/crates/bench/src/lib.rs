//! Shared workloads for the criterion benches.

use awr_core::{
    build_map, certify_nehari, mediatrix_scan, quasidisk_ratio_scan, Complex, GridMeta, MapExpr,
    MappingSpec,
};

pub fn strip() -> MappingSpec {
    build_map(MapExpr::Strip).unwrap()
}

pub fn nested() -> MappingSpec {
    let e = MapExpr::affine(
        MapExpr::mobius_shift(MapExpr::koebe(
            MapExpr::SectorReal { a: 0.5 },
            Complex::new(0.2, -0.3),
        )),
        Complex::new(2.0, 1.0),
        Complex::new(0.0, 0.5),
    );
    build_map(e).unwrap()
}

/// Sum of jet values over `n` points on the radius-0.9 circle.
pub fn jet_sweep(map: &MappingSpec, n: usize) -> Complex {
    (0..n)
        .map(|k| {
            let z = Complex::from_polar(0.9, std::f64::consts::TAU * k as f64 / n as f64);
            let j = map.jet(z).unwrap();
            j.f0 + j.f1 + j.f2 + j.f3
        })
        .sum()
}

pub fn certify(map: &MappingSpec, angles: usize) -> f64 {
    let grid = GridMeta::new(vec![0.0, 0.5, 0.9, 0.99, 0.999], angles).unwrap();
    certify_nehari(map, &grid).unwrap().sup_estimate
}

pub fn ratio_scan(angles: usize) -> f64 {
    let f = build_map(MapExpr::SectorReal { a: 0.5 }).unwrap();
    quasidisk_ratio_scan(&f, &[0.99, 0.999], angles)
        .unwrap()
        .c_estimate
}

pub fn mediatrix(base_angles: usize, probe_angles: usize) -> f64 {
    let f = build_map(MapExpr::Halfplane {
        c: Complex::new(1.0, 0.0),
    })
    .unwrap();
    let base = GridMeta::linear(0.0, 0.9, 4, base_angles).unwrap();
    let probe = GridMeta::linear(0.0, 0.9999, 16, probe_angles).unwrap();
    mediatrix_scan(&f, &base, &probe).unwrap().min_residual
}
