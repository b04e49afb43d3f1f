//! Crate-wide error type.

use thiserror::Error;

use crate::combinat::MultiIndex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no partitions of zero index")]
    ZeroIndexPartition,

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{parts} is not a partition of {target}")]
    NotAPartition { parts: String, target: MultiIndex },

    #[error("parts do not sum to the target index")]
    PartsDoNotSum,

    #[error("exp requires a delta series")]
    NotDelta,

    #[error("log requires a series with constant term 1")]
    ConstantTermNotOne,

    #[error("missing order {0} in univariate sequence")]
    MissingOrder(u32),

    #[error("missing entry at index {0}")]
    MissingIndex(MultiIndex),

    #[error("expected a {expected}-kind table, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
