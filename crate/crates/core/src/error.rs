use thiserror::Error;

use crate::units::Unit;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unit {unit:?} is not a unit of {kind}")]
    UnitMismatch { kind: &'static str, unit: Unit },

    #[error("basis built for N={basis} but ensemble has N={ensemble}")]
    BasisMismatch { basis: usize, ensemble: usize },

    #[error("basis has {basis} modes but mode set has {modes}")]
    ModeCountMismatch { basis: usize, modes: usize },

    #[error("state dimension {state} does not match basis dimension {basis}")]
    DimensionMismatch { state: usize, basis: usize },

    #[error("Hilbert-space dimension {dimension} exceeds cap {cap}")]
    DimensionCapExceeded { dimension: usize, cap: usize },

    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("no barrier: energy {energy:.6e} J is at or above the barrier maximum {max:.6e} J")]
    NoBarrier { energy: f64, max: f64 },

    #[error("multiple barrier intervals ({count}) above E; only single-barrier topologies are supported")]
    MultiBarrier { count: usize },

    #[error("classically forbidden region touches the domain edge at q = {edge:.6e} m")]
    BarrierAtDomainEdge { edge: f64 },

    #[error("inconsistent attempt frequency: omega_0 = {given:.6e} /s but hbar/(2 m dq^2) = {expected:.6e} /s")]
    InconsistentAttemptFrequency { given: f64, expected: f64 },

    #[error("quadrature failed to converge (last relative change {change:.3e})")]
    QuadratureNotConverged { change: f64 },

    #[error("grid too small: boundary amplitude {amplitude:.3e} exceeds {limit:.1e} for state {state}")]
    GridTooSmall { state: usize, amplitude: f64, limit: f64 },

    #[error("eigensolver did not converge: worst residual {residual:.3e} (tolerance {tolerance:.3e})")]
    EigenNotConverged { residual: f64, tolerance: f64 },

    #[error("banded factorisation failed: matrix is not positive definite at row {row}")]
    NotPositiveDefinite { row: usize },

    #[error("doublet pairing is ambiguous for transverse level {level}: {reason}")]
    PairingAmbiguity { level: usize, reason: String },

    #[error("tabulated potential: {0}")]
    Table(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
