//! Schwarzian/Nehari functional, quasiconformal reflection, Koebe transforms
//! and Möbius normalization on a catalog of closed-form unit-disk maps, with
//! grid scans that check the convex-map inequalities numerically.

// `!(x < 1.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod complex;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod jet;
pub mod nehari;
pub mod quasidisk;
pub mod reflection;

pub use catalog::{
    build_map, jet_eval, koebe_transform, mobius_shift, sector_from_automorphism,
    taylor_coefficients, validate_convexity, Boundedness, MapExpr, MappingSpec, SectorParams,
};
pub use complex::{Complex, ExtendedComplex, Mobius};
pub use error::{Error, Result};
pub use geometry::{
    coefficient_bound_scan, mediatrix, mediatrix_scan, proof_machinery_check, BoundScanReport,
    LineSpec, MediatrixReport, ProofMachineryReport,
};
pub use grid::GridMeta;
pub use jet::Jet3;
pub use nehari::{certify_nehari, nehari_functional, schwarzian, CertReport};
pub use quasidisk::{
    boundary_polyline, delta_f, koebe_omission_scan, near_one_clusters, normalized_sup,
    quasidisk_ratio_scan, strip_perturbation_demo, BoundaryPolyline, ClusterProfile, DeltaMetric,
    DeltaReport, OmissionReport, RatioProfile,
};
pub use reflection::{extend, mobius_equivariance_check, reflect, ReflectionSample};
