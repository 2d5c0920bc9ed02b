use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ring mismatch: {0} vs {1}")]
    SpecMismatch(String, String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(u32, u32),
    #[error("jet generator {0} has degree {1}, expected 0")]
    DegreeError(String, i64),
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("Casimir element Omega_{0} does not act by a scalar")]
    NotScalar(usize),
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("syzygy violation on relation {relation}: {witness}")]
    SyzygyViolation { relation: String, witness: String },
    #[error("carrier is not finitely generated free: {0}")]
    NotFree(String),
    #[error("differentiability order unknown up to N = {0}")]
    UnknownDifferentiability(u32),
    #[error("chart {0} and chart {1} do not overlap")]
    NoOverlap(usize, usize),
    #[error("{0} is not integrable")]
    NotIntegrable(String),
    #[error("degree window {window} too small: reached degree {reached}")]
    WindowTooSmall { window: i64, reached: i64 },
    #[error("requires a coordinate chart: {0}")]
    NotCoordinateChart(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
