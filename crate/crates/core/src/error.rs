use thiserror::Error;

/// Errors produced by simulation, evolution and statistics routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("price is not a finite number: {0}")]
    NonFinitePrice(f64),

    #[error("gene has length {got}, expected {expected}")]
    GeneLength { expected: usize, got: usize },

    #[error("invalid gene character {ch:?} at position {pos}")]
    GeneChar { pos: usize, ch: char },

    #[error("crossover segment [{i0}, {i1}] out of range for gene length {len}")]
    CrossoverRange { i0: usize, i1: usize, len: usize },

    #[error("population has no fitness values; evaluate it first")]
    Unevaluated,

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("volume bucket width must be positive")]
    ZeroBucket,
}

pub type Result<T> = std::result::Result<T, Error>;
