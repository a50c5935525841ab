use thiserror::Error;

use crate::hilbert::BasisState;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation: mode a needs at least {min_a} levels and mode b at least {min_b} (got {na_dim}, {nb_dim})")]
    InvalidTruncation {
        na_dim: usize,
        nb_dim: usize,
        min_a: usize,
        min_b: usize,
    },

    #[error("basis state {0} lies outside the truncated space")]
    StateOutOfRange(BasisState),

    #[error("operator space mismatch: {0} vs {1}")]
    SpaceMismatch(String, String),

    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("steady-state system is singular (degenerate steady-state manifold)")]
    Singular,

    #[error("time evolution did not converge by t = {t} (last residual {residual:e})")]
    NotConverged { t: f64, residual: f64 },

    #[error("g2(0) undefined: mean photon number {mean:e} is below the floor {floor:e}")]
    UndefinedCorrelation { mean: f64, floor: f64 },

    #[error("need at least {needed} ok sweep points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
