use thiserror::Error;

/// Errors raised by the spline kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported order {order} for {family} section: {reason}")]
    UnsupportedOrder {
        family: &'static str,
        order: usize,
        reason: String,
    },

    #[error("point {x} outside [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("index {index} out of range (valid: {valid})")]
    IndexOutOfRange { index: usize, valid: String },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("inconsistent space: {0}")]
    Inconsistent(String),

    #[error(
        "transition row {row}: system not numerically solvable \
         (relative residual {residual:e}, condition estimate {condition:e}); \
         the space is not numerically good for design"
    )]
    Singular {
        row: usize,
        residual: f64,
        condition: f64,
    },

    #[error("multiplicity overflow: knot {at} would reach multiplicity {multiplicity} (order {order})")]
    MultiplicityOverflow {
        at: f64,
        multiplicity: usize,
        order: usize,
    },

    #[error("split not supported: {0}")]
    UnsupportedSplit(String),

    #[error("invalid connection matrix at break-point {breakpoint}: {reason}")]
    InvalidConnection { breakpoint: usize, reason: String },

    #[error("target section does not contain the source section (residual {residual:e})")]
    NotContained { residual: f64 },

    #[error("knot {at} cannot be removed: residual {residual:e} exceeds tolerance {tolerance:e}")]
    RemovalFailed {
        at: f64,
        residual: f64,
        tolerance: f64,
    },

    #[error("no derivative above threshold up to order {max_order}: degenerate transition row {row}")]
    DegenerateRow { row: usize, max_order: usize },

    #[error("descriptor error: {0}")]
    Descriptor(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
