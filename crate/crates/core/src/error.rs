use thiserror::Error;

/// Errors produced by plant construction, simulation and tuning.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate plant: leading denominator coefficient A3 is zero")]
    DegeneratePlant,

    #[error("improper transfer function: {0}")]
    ImproperTransferFunction(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("simulation diverged at step {step}: |z| = {magnitude:e} exceeds bound")]
    Divergence { step: usize, magnitude: f64 },

    #[error("step amplitude is zero; {0} is undefined")]
    ZeroAmplitude(&'static str),

    #[error("fitness baselines are not set")]
    UnsetBaseline,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
