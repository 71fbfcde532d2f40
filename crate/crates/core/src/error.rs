use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = AfaError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum AfaError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("column {column} sums to {sum}, expected 1")]
    NotAffine { column: usize, sum: String },

    #[error("state vector entries sum to {sum}, expected 1")]
    NotStateVector { sum: String },

    #[error("symbol {0:?} is not in the input alphabet")]
    UnknownSymbol(char),

    #[error("state index {index} out of range for {dim} states")]
    StateOutOfRange { index: usize, dim: usize },

    #[error("missing operator for {0}")]
    MissingOperator(String),

    #[error("weighting undefined: state vector has zero l1 norm")]
    ZeroNorm,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("float precision {bits} bits is below the minimum of {min}")]
    Precision { bits: u32, min: u32 },

    #[error("input exceeds configured n_max: {a_count} a-symbols, limit {limit}")]
    NMaxExceeded { a_count: u64, limit: u64 },

    #[error("member index {n} exceeds maximum {max}")]
    MemberIndexTooLarge { n: u32, max: u32 },

    #[error("cannot read oracle file {path}: {source}")]
    OracleRead {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("oracle file {path}: invalid character {found:?} at position {position}")]
    OracleFormat {
        path: PathBuf,
        position: usize,
        found: char,
    },

    #[error("oracle has no membership bit for a^{0}")]
    OracleOutOfRange(u64),

    #[error("unknown builtin oracle {0:?}")]
    UnknownOracle(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("input expands to {len} symbols, over the cap of {cap}")]
    InputTooLong { len: u64, cap: u64 },
}
