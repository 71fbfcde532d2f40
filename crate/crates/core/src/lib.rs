//! Simulator for affine finite automata (AfAs).
//!
//! An AfA evolves a real state vector whose entries sum to 1 under one affine
//! operator per tape symbol, and decides by the weighting operator: state `j`
//! is observed with probability `|v[j]| / |v|_1`.
//!
//! The crate builds two concrete machines on top of the generic core:
//!
//! - [`powereq`]: an exact-arithmetic recognizer for the language of
//!   geometrically growing `a`-blocks, with a closed-form acceptance oracle.
//! - [`encoding`]: the same recognizer tensored with a 5-state rotation
//!   machine whose angle encodes the membership sequence of an arbitrary
//!   unary language.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod affine;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod gadgets;
pub mod machine;
pub mod matrix;
pub mod powereq;
pub mod scalar;

pub use affine::{
    affinize, affinize_into_row, apply, block_diag, l1_norm, tensor_op, tensor_vec, weighting,
    AffineOperator, StateVector,
};
pub use error::{AfaError, Result};
pub use machine::{AfaMachine, RunOptions, RunResult, Symbol};
pub use matrix::Matrix;
pub use scalar::{Exact, ExactCtx, HpFloat, NumericField, Real, Scalar};
