use thiserror::Error;

use crate::root_system::RootFamily;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank {rank} is out of bounds for family {family}: {requirement}")]
    RankOutOfBounds {
        family: RootFamily,
        rank: usize,
        requirement: &'static str,
    },

    #[error("Weyl group of order {order} exceeds the enumeration guard of {guard}; lower the rank")]
    WeylOrderTooLarge { order: u64, guard: u64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("type A vectors must have coordinate sum 0 (|sum| <= 1e-9), got sum {sum:e}")]
    NotZeroSum { sum: f64 },

    #[error("point {coords:?} is not in the closed Weyl chamber")]
    NotInChamber { coords: Vec<f64> },

    #[error(
        "family {family} has no matrix realization; route C-family numerics through the B/C spherical identity"
    )]
    NoMatrixRealization { family: RootFamily },

    #[error("measure weights must be non-negative and sum to 1 (got total {total})")]
    NotNormalized { total: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error(
        "matrix condition number e^{log_condition:.1} is beyond double precision; use the QR accumulator for long products"
    )]
    IllConditioned { log_condition: f64 },

    #[error("matrix is not unimodular: |det - 1| = {deviation:e}")]
    NotUnimodular { deviation: f64 },

    #[error("matrix is not Hermitian traceless: {reason}")]
    NotHermitianTraceless { reason: String },

    #[error("R diagonal underflow in the QR accumulator at step {step}")]
    Underflow { step: usize },

    #[error("overflow in the walk product at step {step}: {detail}")]
    Overflow { step: usize, detail: String },

    #[error("at least {min} samples are required, got {n}")]
    TooFewSamples { n: usize, min: usize },

    #[error("rejection envelope exceeded by {excess:e}; the rho-dominance bound failed (this is a bug)")]
    EnvelopeExceeded { excess: f64 },

    #[error("<rho, x> = {value} exceeds the rejection-feasibility bound {bound}")]
    RejectionInfeasible { value: f64, bound: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
