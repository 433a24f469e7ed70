use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("lattice box too small: {0}")]
    BoxTooSmall(String),

    #[error("support touches the box boundary (margin {margin} required)")]
    SupportTouchesBoundary { margin: usize },

    #[error("frequency {0:?} is aliased on this grid")]
    AliasedFrequency(Vec<i64>),

    #[error("x-spectrum of the symbol is aliased (residual {0:e})")]
    AliasedSpectrum(f64),

    #[error("near-singular divisor: periodic distance {distance} below guard {guard}")]
    GuardViolated { distance: f64, guard: f64 },

    #[error("non-finite sample encountered")]
    NonFinite,

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("parameter `{name}` = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("empty test set: {0}")]
    EmptyTestSet(String),

    #[error("cube at depth {depth} index {index} contains no grid points")]
    EmptyCube { depth: usize, index: usize },

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("invalid record: {0}")]
    Record(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
