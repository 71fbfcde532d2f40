//! Recognizer for `PowerEQ = { a^(7*8^0) b a^(7*8^1) b ... b a^(7*8^n) | n >= 0 }`.
//!
//! The machine keeps four parts in its state vector:
//!
//! ```text
//!  0..9   v' (x) v'    v'  = (1, 8*t_{j-1}, t_j)
//!  9..18  v''(x) v''   v'' = (1, 8*t_j, 0)
//!  18     T            running sum of squared block mismatches
//!  19     balance      keeps the entry sum at 1
//! ```
//!
//! On every `b` the squared mismatch `(t_j - 8*t_{j-1})^2` appears as the
//! middle entry of `v' (x) v'` and is added to `T`. At `$` the vector is
//! mapped to `(1, k*T, -k*T, 0, ..., 0)`, so members are accepted with
//! probability 1 and everything else with `1 / (1 + 2kT) <= 1 / (2k + 1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use rug::{Integer, Rational};

use crate::affine::{affinize, block_diag, tensor_op, AffineOperator};
use crate::error::{AfaError, Result};
use crate::gadgets::{count_by, scale_entry};
use crate::machine::{AfaMachine, RunResult, Symbol};
use crate::matrix::Matrix;
use crate::scalar::{ExactCtx, Scalar};

/// Largest `n` accepted by [`member_string`]; `n = 6` already has 2^21 - 1 a's.
pub const DEFAULT_MAX_MEMBER_INDEX: u32 = 6;

/// Smallest multiplier that still gives bounded error.
pub const MIN_K: i64 = 2;

/// Rejection on any non-member is at least `2k / (2k + 1) = 50/51` here.
pub const DEFAULT_K: i64 = 25;

/// Entry ranges of the 20-state vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub vprime_block: Range<usize>,
    pub vpp_block: Range<usize>,
    pub t_entry: usize,
    pub bar_entry: usize,
}

impl Layout {
    pub const STATES: usize = 20;

    pub fn standard() -> Self {
        Layout {
            vprime_block: 0..9,
            vpp_block: 9..18,
            t_entry: 18,
            bar_entry: 19,
        }
    }
}

/// Lengths `t_0, ..., t_n` of the `a`-blocks of `a^t0 b a^t1 b ... b a^tn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    counts: Vec<u64>,
}

impl BlockDecomposition {
    pub fn from_counts(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(AfaError::InvalidParameter(
                "a block decomposition has at least one block".into(),
            ));
        }
        Ok(BlockDecomposition { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of `b` separators.
    pub fn separators(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn a_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Total string length.
    pub fn len(&self) -> u64 {
        self.a_count() + self.separators() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Iterates the symbols of the string without materialising it.
    pub fn symbols(&self) -> impl Iterator<Item = char> + '_ {
        self.counts.iter().enumerate().flat_map(|(j, &t)| {
            let sep = (j > 0).then_some('b');
            sep.into_iter().chain(std::iter::repeat_n('a', t as usize))
        })
    }

    /// `(t_0 - 7)^2 + sum_{j>=1} (t_j - 8 t_{j-1})^2`.
    pub fn t_sum(&self) -> Integer {
        let mut prev_target = Integer::from(7);
        let mut total = Integer::new();
        for &t in &self.counts {
            let diff = Integer::from(t) - &prev_target;
            total += diff.square();
            prev_target = Integer::from(t) * 8u32;
        }
        total
    }

    pub fn is_member(&self) -> bool {
        self.t_sum() == 0
    }

    pub fn mutate(&self, mutation: Mutation) -> Result<BlockDecomposition> {
        let mut counts = self.counts.clone();
        let check = |block: usize, counts: &[u64]| {
            if block < counts.len() {
                Ok(())
            } else {
                Err(AfaError::InvalidParameter(format!(
                    "block {block} does not exist ({} blocks)",
                    counts.len()
                )))
            }
        };
        match mutation {
            Mutation::AddA { block, count } => {
                check(block, &counts)?;
                counts[block] += count;
            }
            Mutation::RemoveA { block, count } => {
                check(block, &counts)?;
                counts[block] = counts[block].checked_sub(count).ok_or_else(|| {
                    AfaError::InvalidParameter(format!(
                        "block {block} has only {} a's",
                        counts[block]
                    ))
                })?;
            }
            Mutation::SplitBlock { block, at } => {
                check(block, &counts)?;
                let t = counts[block];
                if at > t {
                    return Err(AfaError::InvalidParameter(format!(
                        "cannot split block {block} of length {t} at {at}"
                    )));
                }
                counts[block] = at;
                counts.insert(block + 1, t - at);
            }
            Mutation::JoinBlocks { block } => {
                check(block + 1, &counts)?;
                let next = counts.remove(block + 1);
                counts[block] += next;
            }
        }
        Ok(BlockDecomposition { counts })
    }
}

impl fmt::Display for BlockDecomposition {
    /// Run-length form, e.g. `a^7 b a^56`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (j, &t) in self.counts.iter().enumerate() {
            if j > 0 {
                parts.push("b".to_string());
            }
            match t {
                0 => {}
                1 => parts.push("a".to_string()),
                _ => parts.push(format!("a^{t}")),
            }
        }
        f.write_str(&parts.join(" "))
    }
}

/// Edits applied to a block decomposition to produce controlled non-members.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    AddA {
        block: usize,
        count: u64,
    },
    RemoveA {
        block: usize,
        count: u64,
    },
    /// Insert a `b` after the first `at` a's of the block.
    SplitBlock {
        block: usize,
        at: u64,
    },
    /// Delete the `b` that follows the block.
    JoinBlocks {
        block: usize,
    },
}

/// Splits a string over `{a, b}` at its `b`'s.
pub fn blocks(x: &str) -> Result<BlockDecomposition> {
    blocks_from_symbols(x.chars())
}

pub fn blocks_from_symbols(symbols: impl IntoIterator<Item = char>) -> Result<BlockDecomposition> {
    let mut counts = vec![0u64];
    for c in symbols {
        match c {
            'a' => *counts.last_mut().expect("never empty") += 1,
            'b' => counts.push(0),
            other => return Err(AfaError::UnknownSymbol(other)),
        }
    }
    Ok(BlockDecomposition { counts })
}

pub fn t_sum(d: &BlockDecomposition) -> Integer {
    d.t_sum()
}

pub fn is_member(x: &str) -> Result<bool> {
    Ok(blocks(x)?.is_member())
}

/// Blocks `7*8^0, ..., 7*8^n` of the unique member with `n` separators.
pub fn member_blocks(n: u32) -> Result<BlockDecomposition> {
    member_blocks_with_max(n, DEFAULT_MAX_MEMBER_INDEX)
}

pub fn member_blocks_with_max(n: u32, max: u32) -> Result<BlockDecomposition> {
    if n > max {
        return Err(AfaError::MemberIndexTooLarge { n, max });
    }
    let counts = (0..=n).map(|j| 7 * 8u64.pow(j)).collect();
    Ok(BlockDecomposition { counts })
}

pub fn member_string(n: u32) -> Result<String> {
    Ok(member_blocks(n)?.symbols().collect())
}

pub fn member_string_with_max(n: u32, max: u32) -> Result<String> {
    Ok(member_blocks_with_max(n, max)?.symbols().collect())
}

/// Closed form of the machine's acceptance probability: `1 / (1 + 2k T_x)`.
pub fn predicted_acceptance_powereq(x: &str, k: i64) -> Result<Rational> {
    Ok(predicted_from_blocks(&blocks(x)?, k))
}

pub fn predicted_from_blocks(d: &BlockDecomposition, k: i64) -> Rational {
    let denom = Integer::from(k) * 2u32 * d.t_sum() + 1u32;
    Rational::from((Integer::from(1), denom))
}

/// The 19x19 linear parts (everything but the balance entry) of the four
/// operators, over any backend.
pub(crate) struct LinearParts<S: Scalar> {
    pub left_end: Matrix<S>,
    pub a: Matrix<S>,
    pub b: Matrix<S>,
    pub right_end: Matrix<S>,
}

const LINEAR_DIM: usize = 19;

pub(crate) fn linear_parts<S: Scalar>(k: i64, ctx: S::Context) -> Result<LinearParts<S>> {
    let layout = Layout::standard();
    let vp = layout.vprime_block.start;
    let vpp = layout.vpp_block.start;
    let t = layout.t_entry;
    let one = || S::one(ctx);

    // ¢: v' = (1, 7, 0); v'' = (1, 0, 0) from the pinned entry; T = 0
    let seven = count_by::<S>(7, 0, 1, ctx)?.into_matrix();
    let mut left_end = block_diag(&[
        tensor_op(&seven, &seven),
        Matrix::zeros(9, 9, ctx),
        Matrix::zeros(1, 1, ctx),
    ])?;
    left_end.set(vpp, vp, one());

    // a: t_j into v'[2], 8 t_j into v''[1]
    let c1 = count_by::<S>(1, 0, 2, ctx)?.into_matrix();
    let c8 = count_by::<S>(8, 0, 1, ctx)?.into_matrix();
    let a = block_diag(&[
        tensor_op(&c1, &c1),
        tensor_op(&c8, &c8),
        Matrix::identity(1, ctx),
    ])?;

    let subtract = subtract_step::<S>(ctx)?;
    let accumulate = accumulate_step::<S>(ctx);

    // copy v'' (x) v'' over v' (x) v'
    let mut copy = Matrix::identity(LINEAR_DIM, ctx);
    for i in 0..9 {
        copy.set(vp + i, vp + i, S::zero(ctx));
        copy.set(vp + i, vpp + i, one());
    }

    // v'' back to (1, 0, 0)
    let pin = Matrix::from_i64_rows(&[[1, 0, 0], [0, 0, 0], [0, 0, 0]], ctx)?;
    let reset = block_diag(&[
        Matrix::identity(9, ctx),
        tensor_op(&pin, &pin),
        Matrix::identity(1, ctx),
    ])?;

    let b = reset.mul(&copy)?.mul(&accumulate)?.mul(&subtract)?;

    // $: (w[0], k T, -k T, 0, ..., 0)
    let scale = scale_entry(S::from_i64(k, ctx)).into_matrix();
    let mut finish = Matrix::zeros(LINEAR_DIM, LINEAR_DIM, ctx);
    finish.set(0, vp, scale.get(0, 0).clone());
    finish.set(1, t, scale.get(1, 1).clone());
    finish.set(2, t, scale.get(1, 1).neg());
    let right_end = finish.mul(&accumulate)?.mul(&subtract)?;

    Ok(LinearParts {
        left_end,
        a,
        b,
        right_end,
    })
}

/// `v' = (1, p, q)` becomes `(1, q - p, 0)`, on the tensor square.
fn subtract_step<S: Scalar>(ctx: S::Context) -> Result<Matrix<S>> {
    let diff = Matrix::from_i64_rows(&[[1, 0, 0], [0, -1, 1], [0, 0, 0]], ctx)?;
    block_diag(&[
        tensor_op(&diff, &diff),
        Matrix::identity(9, ctx),
        Matrix::identity(1, ctx),
    ])
}

/// `T += (v' (x) v')[4]`, the square of `v'[1]`.
fn accumulate_step<S: Scalar>(ctx: S::Context) -> Matrix<S> {
    let layout = Layout::standard();
    let mut m = Matrix::identity(LINEAR_DIM, ctx);
    m.set(layout.t_entry, layout.vprime_block.start + 4, S::one(ctx));
    m
}

/// The four affine operators of the recognizer over any backend.
pub(crate) fn operators<S: Scalar>(
    k: i64,
    ctx: S::Context,
) -> Result<BTreeMap<Symbol, AffineOperator<S>>> {
    let parts = linear_parts::<S>(k, ctx)?;
    Ok([
        (Symbol::LeftEnd, affinize(&parts.left_end)?),
        (Symbol::Letter('a'), affinize(&parts.a)?),
        (Symbol::Letter('b'), affinize(&parts.b)?),
        (Symbol::RightEnd, affinize(&parts.right_end)?),
    ]
    .into_iter()
    .collect())
}

pub(crate) fn check_k(k: i64) -> Result<()> {
    if k < MIN_K {
        return Err(AfaError::InvalidParameter(format!(
            "k must be at least {MIN_K}, got {k}"
        )));
    }
    // 2k must not overflow when forming 1 + 2kT
    if k > i64::MAX / 2 {
        return Err(AfaError::InvalidParameter(format!("k = {k} is too large")));
    }
    Ok(())
}

/// The bounded-error recognizer for PowerEQ on the exact backend.
#[derive(Clone, Debug)]
pub struct PowerEqMachine {
    machine: AfaMachine<Rational>,
    k: i64,
    layout: Layout,
}

pub fn build_powereq(k: i64) -> Result<PowerEqMachine> {
    check_k(k)?;
    let machine = AfaMachine::new(['a', 'b'], operators::<Rational>(k, ExactCtx)?, 0, [0])?;
    Ok(PowerEqMachine {
        machine,
        k,
        layout: Layout::standard(),
    })
}

impl PowerEqMachine {
    pub fn machine(&self) -> &AfaMachine<Rational> {
        &self.machine
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn run(&self, x: &str) -> Result<RunResult<Rational>> {
        self.machine.run(x)
    }

    pub fn run_blocks(&self, d: &BlockDecomposition) -> Result<RunResult<Rational>> {
        self.machine.run_with(d.symbols(), Default::default())
    }

    /// Rejection lower bound on non-members, `2k / (2k + 1)`.
    pub fn error_bound(&self) -> Rational {
        Rational::from((2 * self.k, 2 * self.k + 1))
    }
}
