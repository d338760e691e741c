//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// PGM decoding failed; names the offending header field or payload.
    #[error("pgm decode error in {field}: {reason}")]
    PgmDecode { field: &'static str, reason: String },

    /// A synthetic-pattern or simulation parameter is out of range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// Two lattices that must share dimensions do not.
    #[error("dimension mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    DimensionMismatch {
        expected_w: usize,
        expected_h: usize,
        got_w: usize,
        got_h: usize,
    },

    /// Requested more ants than the lattice has cells.
    #[error("population {requested} exceeds cell count {cells}")]
    PopulationExceedsCells { requested: usize, cells: usize },

    /// Segmentation asked for a pheromone source without a matching field.
    #[error("segmentation source error: {0}")]
    SegmentSource(String),

    /// Experiment configuration violates an invariant.
    #[error("invalid experiment config: {0}")]
    Config(String),

    /// Manifest text could not be parsed back into a config.
    #[error("manifest parse error: {0}")]
    Manifest(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
