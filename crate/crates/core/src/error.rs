use crate::Complex;
use thiserror::Error;

/// Errors raised while building, evaluating or scanning catalog maps.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("evaluation point {z} is not inside the unit disk")]
    DomainViolation { z: Complex },

    #[error("pole of a Möbius stage at evaluation value {at}")]
    PoleAtPoint { at: Complex },

    #[error("jet base point {outer_at} does not match inner value {inner_value}")]
    BasePointMismatch {
        outer_at: Complex,
        inner_value: Complex,
    },

    #[error("critical point: |f'({at})| = {derivative_abs:e}")]
    CriticalPoint { at: Complex, derivative_abs: f64 },

    #[error("parameter `{param}` out of range: {reason}")]
    ParamOutOfRange { param: &'static str, reason: String },

    #[error("principal branch of the power stage is crossed near z = {near}")]
    BranchCutViolation { near: Complex },

    #[error("expression depth {depth} exceeds the cap of {cap}")]
    DepthExceeded { depth: usize, cap: usize },

    #[error("1 + a2 f vanishes inside the disk near z = {near}")]
    PoleInDomain { near: Complex },

    #[error("map is not normalized (f(0) = {value}, f'(0) = {derivative})")]
    NotNormalized { value: Complex, derivative: Complex },

    #[error("segment [w, R_w] is degenerate at w = {w}")]
    CoincidentPoints { w: Complex },

    #[error("boundary polyline collapsed: {reason}")]
    DegenerateDomain { reason: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
