//! Error type shared across the engine.

use alloc::string::String;
use core::fmt;

/// Errors produced by tensor construction, kernels, graph execution,
/// quantization, training, and search.
#[derive(Clone, Debug, PartialEq)]
pub enum CoreError {
    /// A shape violated a structural precondition (rank, zero extent,
    /// element-count overflow).
    InvalidShape(String),
    /// Two operands had incompatible shapes for the requested operation.
    ShapeMismatch(String),
    /// An axis or index was out of range.
    IndexOutOfRange(String),
    /// A parameter value violated an operation's precondition.
    InvalidParameter(String),
    /// A graph failed validation; the message lists the diagnostics.
    InvalidGraph(String),
    /// A tensor produced by the engine contained NaN or Inf. The payload
    /// names the layer (or stage) whose output first became non-finite.
    NonFinite(String),
    /// A model's precision tag did not match the requested execution path.
    PrecisionMismatch(String),
    /// Input data (labels, sample dimensions) violated a dataset contract.
    InvalidData(String),
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::InvalidShape(m) => write!(f, "invalid shape: {m}"),
            CoreError::ShapeMismatch(m) => write!(f, "shape mismatch: {m}"),
            CoreError::IndexOutOfRange(m) => write!(f, "index out of range: {m}"),
            CoreError::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            CoreError::InvalidGraph(m) => write!(f, "invalid graph: {m}"),
            CoreError::NonFinite(m) => write!(f, "non-finite value in {m}"),
            CoreError::PrecisionMismatch(m) => write!(f, "precision mismatch: {m}"),
            CoreError::InvalidData(m) => write!(f, "invalid data: {m}"),
        }
    }
}

impl core::error::Error for CoreError {}

pub type Result<T> = core::result::Result<T, CoreError>;
