//! Membership encoding of an arbitrary unary language into one rotation angle.
//!
//! For a language `L` over `{a}` let `F(i) = +1` if `a^i` is in `L` and `-1`
//! otherwise, and
//!
//! ```text
//! theta = 2*pi * sum_{i >= 0} F(i) / 8^(i+2)
//! ```
//!
//! Rotating `(1, 0)` by `theta` exactly `8^(j+1)` times and then by `pi/4`
//! lands at an angle `phi_j` within `2*pi/56` of `pi/2` when `a^j` is in `L`
//! and within `2*pi/56` of `0` otherwise. A 5-state machine tracks that
//! point as `u (x) u` and at the end exposes `(sin^2, cos^2, 0, 0, 0)`.
//! Tensoring it with the [`powereq`](crate::powereq) recognizer yields a
//! machine that accepts the `n`-th PowerEQ member exactly when `a^n` is in `L`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::affine::{affinize, affinize_into_row, tensor_op, AffineOperator};
use crate::error::{AfaError, Result};
use crate::gadgets::rotation;
use crate::machine::{AfaMachine, RunResult, Symbol};
use crate::matrix::Matrix;
use crate::powereq::{self, blocks, BlockDecomposition, Layout};
use crate::scalar::{check_precision, Real, Scalar, DEFAULT_PRECISION_BITS};

/// Acceptance/rejection level guaranteed on PowerEQ members.
pub const DECISION_BOUND: f64 = 0.98;

pub const DEFAULT_GUARD: u32 = 4;

/// Largest supported `n_max`; `8^(n_max+1)` must fit in a `u64`.
pub const MAX_N_MAX: u32 = 20;

pub const ROTATION_STATES: usize = 5;

/// What membership queries past the end of a finite bit list return.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BeyondEnd {
    #[default]
    NonMember,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Empty,
    All,
    EvenLengths,
}

impl Builtin {
    pub const NAMES: [&'static str; 3] = ["empty", "all", "even"];

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "empty" => Ok(Builtin::Empty),
            "all" => Ok(Builtin::All),
            "even" => Ok(Builtin::EvenLengths),
            other => Err(AfaError::UnknownOracle(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Empty => "empty",
            Builtin::All => "all",
            Builtin::EvenLengths => "even",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleSource {
    BitFile(PathBuf),
    Builtin(Builtin),
    Explicit,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Rule {
    Builtin(Builtin),
    Bits { bits: Vec<bool>, beyond: BeyondEnd },
}

/// Membership function `i -> (a^i in L)` of a unary language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageOracle {
    source: OracleSource,
    rule: Rule,
}

impl LanguageOracle {
    pub fn builtin(kind: Builtin) -> Self {
        LanguageOracle {
            source: OracleSource::Builtin(kind),
            rule: Rule::Builtin(kind),
        }
    }

    pub fn empty() -> Self {
        Self::builtin(Builtin::Empty)
    }

    pub fn all() -> Self {
        Self::builtin(Builtin::All)
    }

    pub fn even_lengths() -> Self {
        Self::builtin(Builtin::EvenLengths)
    }

    /// Bit `i` is the membership of `a^i`.
    pub fn from_bits(bits: Vec<bool>) -> Self {
        LanguageOracle {
            source: OracleSource::Explicit,
            rule: Rule::Bits {
                bits,
                beyond: BeyondEnd::NonMember,
            },
        }
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn from_bit_str(bits: &str) -> Result<Self> {
        Ok(Self::from_bits(parse_bits(bits, Path::new("<inline>"))?))
    }

    /// Reads a bit file: one line of ASCII `'0'`/`'1'`, character `i` being the
    /// membership of `a^i`. A trailing newline is allowed.
    pub fn from_bit_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| AfaError::OracleRead {
            path: path.to_path_buf(),
            source,
        })?;
        let line = text.strip_suffix('\n').unwrap_or(&text);
        let line = line.strip_suffix('\r').unwrap_or(line);
        let bits = parse_bits(line, path)?;
        Ok(LanguageOracle {
            source: OracleSource::BitFile(path.to_path_buf()),
            rule: Rule::Bits {
                bits,
                beyond: BeyondEnd::NonMember,
            },
        })
    }

    /// `builtin:NAME` selects a builtin, anything else is a bit-file path.
    pub fn from_spec(spec: &str) -> Result<Self> {
        match spec.strip_prefix("builtin:") {
            Some(name) => Ok(Self::builtin(Builtin::from_name(name)?)),
            None => Self::from_bit_file(spec),
        }
    }

    /// Changes how indices past the end of a bit list are answered.
    /// No effect on builtins.
    pub fn with_beyond_end(mut self, policy: BeyondEnd) -> Self {
        if let Rule::Bits { beyond, .. } = &mut self.rule {
            *beyond = policy;
        }
        self
    }

    pub fn source(&self) -> &OracleSource {
        &self.source
    }

    pub fn is_member(&self, i: u64) -> Result<bool> {
        match &self.rule {
            Rule::Builtin(Builtin::Empty) => Ok(false),
            Rule::Builtin(Builtin::All) => Ok(true),
            Rule::Builtin(Builtin::EvenLengths) => Ok(i.is_multiple_of(2)),
            Rule::Bits { bits, beyond } => {
                match usize::try_from(i).ok().and_then(|i| bits.get(i)) {
                    Some(&b) => Ok(b),
                    None => match beyond {
                        BeyondEnd::NonMember => Ok(false),
                        BeyondEnd::Error => Err(AfaError::OracleOutOfRange(i)),
                    },
                }
            }
        }
    }
}

impl fmt::Display for LanguageOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            OracleSource::BitFile(p) => write!(f, "file:{}", p.display()),
            OracleSource::Builtin(b) => write!(f, "builtin:{}", b.name()),
            OracleSource::Explicit => match &self.rule {
                Rule::Bits { bits, .. } => {
                    let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                    write!(f, "bits:{s}")
                }
                Rule::Builtin(b) => write!(f, "builtin:{}", b.name()),
            },
        }
    }
}

fn parse_bits(line: &str, path: &Path) -> Result<Vec<bool>> {
    line.chars()
        .enumerate()
        .map(|(position, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            found => Err(AfaError::OracleFormat {
                path: path.to_path_buf(),
                position,
                found,
            }),
        })
        .collect()
}

/// `+1` for members, `-1` for non-members.
pub fn f_sign(oracle: &LanguageOracle, i: u64) -> Result<i64> {
    Ok(if oracle.is_member(i)? { 1 } else { -1 })
}

/// The encoding angle truncated to its first `terms` series terms.
#[derive(Clone, Debug)]
pub struct TruncatedAngle {
    value: Float,
    terms: u32,
    guard: Option<u32>,
}

impl TruncatedAngle {
    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn terms(&self) -> u32 {
        self.terms
    }

    pub fn guard(&self) -> Option<u32> {
        self.guard
    }

    pub fn precision(&self) -> u32 {
        self.value.prec()
    }

    /// Distance to the untruncated angle is at most `2*pi / (7 * 8^(terms+1))`.
    pub fn truncation_bound(&self) -> f64 {
        2.0 * std::f64::consts::PI / (7.0 * 8f64.powi(self.terms as i32 + 1))
    }
}

/// `2*pi * sum_{i < terms} F(i) / 8^(i+2)`.
///
/// The partial sum is formed exactly as an integer over `8^(terms+1)` and
/// rounded once when multiplied by `2*pi`.
pub fn theta(oracle: &LanguageOracle, terms: u32, precision_bits: u32) -> Result<TruncatedAngle> {
    if terms == 0 {
        return Err(AfaError::InvalidParameter(
            "theta needs at least one term".into(),
        ));
    }
    check_precision(precision_bits)?;
    let mut numer = Integer::new();
    for i in 0..terms {
        // Horner in base 8
        numer *= 8u32;
        numer += f_sign(oracle, i as u64)?;
    }
    let denom = Integer::from(8u32).pow(terms + 1);
    let fraction = Rational::from((numer, denom));
    let two_pi = Float::with_val(precision_bits, Float::pi(precision_bits) * 2u32);
    let value = Float::with_val(
        precision_bits,
        &two_pi * &Float::with_val(precision_bits, &fraction),
    );
    Ok(TruncatedAngle {
        value,
        terms,
        guard: None,
    })
}

/// `phi_j = (pi/4)(F(j) + 1) + 2*pi * sum_{j < i < terms} F(i) / 8^(i-j+1)`:
/// the angle reached after `8^(j+1)` rotations by the encoding angle and one
/// by `pi/4`, reduced modulo `2*pi`. Evaluated directly from the series.
pub fn phi(oracle: &LanguageOracle, j: u64, terms: u32, precision_bits: u32) -> Result<Float> {
    if u64::from(terms) <= j {
        return Err(AfaError::InvalidParameter(format!(
            "phi_{j} needs more than {j} terms, got {terms}"
        )));
    }
    check_precision(precision_bits)?;
    let pi = Float::pi(precision_bits);
    let mut tail = Float::with_val(precision_bits, 0);
    for i in (j + 1)..u64::from(terms) {
        let weight = Float::with_val(precision_bits, 8u32).pow(i - j + 1);
        tail += Float::with_val(precision_bits, f_sign(oracle, i)? / weight);
    }
    let head = Float::with_val(precision_bits, &pi / 4u32) * (f_sign(oracle, j)? + 1);
    Ok(head + tail * 2u32 * pi)
}

/// Number of series terms kept for machines reading at most `8^(n_max+1)` a's.
pub fn required_terms(n_max: u32, guard: u32) -> Result<u32> {
    if guard == 0 {
        return Err(AfaError::InvalidParameter(
            "guard must be at least 1".into(),
        ));
    }
    if n_max > MAX_N_MAX {
        return Err(AfaError::InvalidParameter(format!(
            "n_max {n_max} exceeds the supported maximum {MAX_N_MAX}"
        )));
    }
    Ok(n_max + 1 + guard)
}

/// Bound on the final-angle error caused by truncation after `8^(n_max+1)`
/// rotations: `2*pi / (7 * 8^guard)`.
pub fn accumulated_error_bound(guard: u32) -> f64 {
    2.0 * std::f64::consts::PI / (7.0 * 8f64.powi(guard as i32))
}

/// Whether truncation with this guard keeps the worst case above
/// [`DECISION_BOUND`]: the tail of the series already uses `2*pi/56` of the
/// `acos(sqrt(0.98))` budget.
pub fn guard_is_sufficient(guard: u32) -> bool {
    let budget = DECISION_BOUND.sqrt().acos() - std::f64::consts::PI / 28.0;
    guard >= 1 && accumulated_error_bound(guard) <= budget
}

/// Float precision used by default for a given `n_max`.
pub fn required_float_bits(n_max: u32) -> u32 {
    64 + 3 * (n_max + 2) * 3
}

/// The 5x5 operator mapping `(c^2, cs, sc, s^2, -2cs)` to `(s^2, c^2, 0, 0, 0)`.
pub fn collection_matrix<S: Scalar>(ctx: S::Context) -> AffineOperator<S> {
    let m = Matrix::from_i64_rows(
        &[
            [0, 0, 0, 1, 0],
            [1, 0, 0, 0, 0],
            [0, 1, 1, 0, 1],
            [0, 1, 1, 0, 1],
            [0, -1, -1, 0, -1],
        ],
        ctx,
    )
    .expect("5x5 literal");
    AffineOperator::new(m).expect("columns sum to 1")
}

/// `affinize(R(angle) (x) R(angle))`: rotates `u` in the state `(u (x) u | balance)`.
fn tensor_rotation(angle: &Float) -> Result<AffineOperator<Float>> {
    let r = rotation(angle).into_matrix();
    affinize(&tensor_op(&r, &r))
}

fn rotation_operators(angle: &TruncatedAngle) -> Result<BTreeMap<Symbol, AffineOperator<Float>>> {
    let prec = angle.precision();
    let turn = tensor_rotation(angle.value())?;
    let quarter = Float::with_val(prec, Float::pi(prec) / 4u32);
    let right_end = collection_matrix::<Float>(prec).compose(&tensor_rotation(&quarter)?)?;
    Ok([
        // one extra rotation so member strings see exactly 8^(n+1) of them
        (Symbol::LeftEnd, turn.clone()),
        (Symbol::Letter('a'), turn),
        (
            Symbol::Letter('b'),
            AffineOperator::identity(ROTATION_STATES, prec),
        ),
        (Symbol::RightEnd, right_end),
    ]
    .into_iter()
    .collect())
}

/// The 5-state rotation machine: starts at `(1,0) (x) (1,0) | 0`, rotates by
/// the encoding angle at `¢` and on every `a`, ignores `b`, and at `$`
/// rotates by `pi/4` and collects into `(sin^2 alpha, cos^2 alpha, 0, 0, 0)`.
pub fn build_rotation_machine(angle: &TruncatedAngle) -> Result<AfaMachine<Float>> {
    AfaMachine::new(['a', 'b'], rotation_operators(angle)?, 0, [0])
}

/// Parameters of the combined machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CombinedConfig {
    pub k: i64,
    pub n_max: u32,
    pub guard: u32,
    /// `None` picks `max(128, required_float_bits(n_max))`.
    pub precision_bits: Option<u32>,
}

impl Default for CombinedConfig {
    fn default() -> Self {
        CombinedConfig {
            k: powereq::DEFAULT_K,
            n_max: 3,
            guard: DEFAULT_GUARD,
            precision_bits: None,
        }
    }
}

impl CombinedConfig {
    pub fn precision(&self) -> u32 {
        self.precision_bits
            .unwrap_or_else(|| DEFAULT_PRECISION_BITS.max(required_float_bits(self.n_max)))
    }
}

/// PowerEQ recognizer tensored with the rotation machine.
#[derive(Clone, Debug)]
pub struct CombinedMachine {
    machine: AfaMachine<Float>,
    k: i64,
    oracle: LanguageOracle,
    n_max: u32,
    angle: TruncatedAngle,
}

pub fn build_combined(
    oracle: LanguageOracle,
    k: i64,
    n_max: u32,
    guard: u32,
) -> Result<CombinedMachine> {
    build_combined_with(
        oracle,
        CombinedConfig {
            k,
            n_max,
            guard,
            precision_bits: None,
        },
    )
}

pub fn build_combined_with(
    oracle: LanguageOracle,
    config: CombinedConfig,
) -> Result<CombinedMachine> {
    powereq::check_k(config.k)?;
    let prec = config.precision();
    check_precision(prec)?;
    let terms = required_terms(config.n_max, config.guard)?;
    let mut angle = theta(&oracle, terms, prec)?;
    angle.guard = Some(config.guard);

    let outer = powereq::operators::<Float>(config.k, prec)?;
    let inner = rotation_operators(&angle)?;
    let combine = combine_step(prec)?;

    let mut ops = BTreeMap::new();
    for (symbol, a) in &outer {
        let mut op = a.tensor(&inner[symbol])?;
        if *symbol == Symbol::RightEnd {
            op = combine.compose(&op)?;
        }
        ops.insert(*symbol, op);
    }
    let machine = AfaMachine::new(['a', 'b'], ops, 0, [0])?;
    Ok(CombinedMachine {
        machine,
        k: config.k,
        oracle,
        n_max: config.n_max,
        angle,
    })
}

/// Maps `(1, kT, -kT, 0, ...) (x) (s^2, c^2, 0, 0, 0)` onto
/// `(s^2, c^2, kT(s^2 + c^2), -kT(s^2 + c^2), 0, ...)`. Columns are padded
/// into the last state, which is zero on every vector of that product form.
fn combine_step(prec: u32) -> Result<AffineOperator<Float>> {
    let n = Layout::STATES * ROTATION_STATES;
    let at = |outer: usize, inner: usize| outer * ROTATION_STATES + inner;
    let mut m = Matrix::<Float>::zeros(n, n, prec);
    let one = || Float::with_val(prec, 1);
    m.set(0, at(0, 0), one());
    m.set(1, at(0, 1), one());
    for (row, outer) in [(2, 1), (3, 2)] {
        m.set(row, at(outer, 0), one());
        m.set(row, at(outer, 1), one());
    }
    affinize_into_row(&m, n - 1)
}

impl CombinedMachine {
    pub fn machine(&self) -> &AfaMachine<Float> {
        &self.machine
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn oracle(&self) -> &LanguageOracle {
        &self.oracle
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn angle(&self) -> &TruncatedAngle {
        &self.angle
    }

    pub fn precision(&self) -> u32 {
        self.angle.precision()
    }

    /// Most `a`'s an input may contain: `8^(n_max+1)`.
    pub fn a_limit(&self) -> u64 {
        8u64.pow(self.n_max + 1)
    }

    fn check_a_count(&self, a_count: u64) -> Result<()> {
        if a_count > self.a_limit() {
            return Err(AfaError::NMaxExceeded {
                a_count,
                limit: self.a_limit(),
            });
        }
        Ok(())
    }

    pub fn run(&self, x: &str) -> Result<RunResult<Float>> {
        self.run_blocks(&blocks(x)?)
    }

    pub fn run_blocks(&self, d: &BlockDecomposition) -> Result<RunResult<Float>> {
        self.check_a_count(d.a_count())?;
        self.machine.run_with(d.symbols(), Default::default())
    }

    /// Same as [`run_blocks`](Self::run_blocks), with the state vector after
    /// every tape symbol passed to `observer`.
    pub fn run_blocks_observed<F>(
        &self,
        d: &BlockDecomposition,
        observer: F,
    ) -> Result<RunResult<Float>>
    where
        F: FnMut(Symbol, &[Float]),
    {
        self.check_a_count(d.a_count())?;
        self.machine.run_observed(d.symbols(), observer)
    }

    /// Closed-form prediction for this machine's angle and precision.
    pub fn predicted(&self, d: &BlockDecomposition) -> Float {
        predicted_from_blocks(d, &self.angle, self.k)
    }
}

/// `sin^2(alpha) / (1 + 2kT)` with `alpha = (#a + 1) * theta_N + pi/4`.
pub fn predicted_acceptance_combined(
    x: &str,
    oracle: &LanguageOracle,
    k: i64,
    terms: u32,
    precision_bits: u32,
) -> Result<Float> {
    let d = blocks(x)?;
    let angle = theta(oracle, terms, precision_bits)?;
    Ok(predicted_from_blocks(&d, &angle, k))
}

pub fn predicted_from_blocks(d: &BlockDecomposition, angle: &TruncatedAngle, k: i64) -> Float {
    let prec = angle.precision();
    let rotations = Integer::from(d.a_count()) + 1u32;
    let alpha = Float::with_val(prec, angle.value() * &rotations)
        + Float::with_val(prec, Float::pi(prec) / 4u32);
    let sin2 = alpha.sin().square();
    let denom = Integer::from(k) * 2u32 * d.t_sum() + 1u32;
    Float::with_val(prec, sin2 / &denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn pi() -> Float {
        Float::pi(P)
    }

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol
    }

    #[test]
    fn f_sign_examples() {
        assert_eq!(f_sign(&LanguageOracle::all(), 17).unwrap(), 1);
        assert_eq!(f_sign(&LanguageOracle::empty(), 0).unwrap(), -1);
        let o = LanguageOracle::from_bit_str("101").unwrap();
        assert_eq!(f_sign(&o, 0).unwrap(), 1);
        assert_eq!(f_sign(&o, 1).unwrap(), -1);
        assert_eq!(f_sign(&o, 2).unwrap(), 1);
        assert_eq!(f_sign(&o, 3).unwrap(), -1);
        let strict = o.with_beyond_end(BeyondEnd::Error);
        assert!(matches!(
            f_sign(&strict, 3),
            Err(AfaError::OracleOutOfRange(3))
        ));
        let even = LanguageOracle::even_lengths();
        assert_eq!(f_sign(&even, 4).unwrap(), 1);
        assert_eq!(f_sign(&even, 5).unwrap(), -1);
    }

    #[test]
    fn bit_parsing() {
        assert!(matches!(
            LanguageOracle::from_bit_str("10x1"),
            Err(AfaError::OracleFormat {
                position: 2,
                found: 'x',
                ..
            })
        ));
        assert!(LanguageOracle::from_spec("builtin:nope").is_err());
        assert_eq!(
            LanguageOracle::from_spec("builtin:all").unwrap(),
            LanguageOracle::all()
        );
        assert!(matches!(
            LanguageOracle::from_bit_file("/nonexistent/oracle.bits"),
            Err(AfaError::OracleRead { .. })
        ));
    }

    #[test]
    fn theta_limits() {
        // 40 terms: truncation far below f64 resolution
        let t = theta(&LanguageOracle::empty(), 40, P).unwrap();
        let expected = Float::with_val(P, -pi() / 28u32);
        assert!(Float::with_val(P, t.value() - &expected).abs().to_f64() <= t.truncation_bound());
        let t = theta(&LanguageOracle::all(), 40, P).unwrap();
        assert!(close(t.value(), std::f64::consts::PI / 28.0, 1e-15));
        for o in [LanguageOracle::all(), LanguageOracle::empty()] {
            let t = theta(&o, 1, P).unwrap();
            assert!(close(
                &t.value().clone().abs(),
                std::f64::consts::PI / 32.0,
                1e-15
            ));
        }
        assert!(theta(&LanguageOracle::all(), 0, P).is_err());
    }

    #[test]
    fn theta_stays_within_full_series_bound() {
        for bits in ["", "1", "0101", "111000111", "1011011101111"] {
            let o = LanguageOracle::from_bit_str(bits).unwrap();
            let t = theta(&o, 12, P).unwrap();
            assert!(t.value().to_f64().abs() <= 2.0 * std::f64::consts::PI / 56.0);
        }
    }

    #[test]
    fn phi_examples() {
        let member_then_none = LanguageOracle::from_bit_str("1").unwrap();
        let p = phi(&member_then_none, 0, 40, P).unwrap();
        let expected = std::f64::consts::PI / 2.0 - std::f64::consts::PI / 28.0;
        assert!(close(&p, expected, 1e-15));
        let s2 = p.sin().square().to_f64();
        assert!((s2 - 0.98746).abs() < 1e-5);
        assert!(s2 >= DECISION_BOUND);

        let none = LanguageOracle::empty();
        let p = phi(&none, 0, 40, P).unwrap();
        assert!(close(&p, -std::f64::consts::PI / 28.0, 1e-15));
        assert!((p.cos().square().to_f64() - 0.98746).abs() < 1e-5);

        // a single term: no tail at all
        let p = phi(&LanguageOracle::all(), 0, 1, P).unwrap();
        assert!(close(&p, std::f64::consts::PI / 2.0, 0.0));
        assert!(close(&p.sin().square(), 1.0, 1e-30));

        assert!(phi(&none, 3, 3, P).is_err());
    }

    #[test]
    fn required_terms_examples() {
        assert_eq!(required_terms(3, 4).unwrap(), 8);
        assert_eq!(required_terms(0, 4).unwrap(), 5);
        assert!(required_terms(3, 0).is_err());
        assert!(
            (accumulated_error_bound(4) - 2.0 * std::f64::consts::PI / (7.0 * 4096.0)).abs()
                < 1e-18
        );
        assert!((accumulated_error_bound(1) - 2.0 * std::f64::consts::PI / 56.0).abs() < 1e-15);
        assert!(!guard_is_sufficient(1));
        assert!(guard_is_sufficient(2));
        assert!(guard_is_sufficient(DEFAULT_GUARD));
    }

    #[test]
    fn precision_policy() {
        assert_eq!(required_float_bits(3), 109);
        assert_eq!(CombinedConfig::default().precision(), 128);
        let wide = CombinedConfig {
            n_max: 6,
            ..Default::default()
        };
        assert_eq!(wide.precision(), 136);
    }

    #[test]
    fn collection_examples() {
        let c = collection_matrix::<Float>(P);
        let f = |xs: &[f64]| -> Vec<Float> { xs.iter().map(|&x| Float::with_val(P, x)).collect() };
        let out = c.matrix().mul_vec(&f(&[1.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(out, f(&[0.0, 1.0, 0.0, 0.0, 0.0]));
        let out = c.matrix().mul_vec(&f(&[0.0, 0.0, 0.0, 1.0, 0.0])).unwrap();
        assert_eq!(out, f(&[1.0, 0.0, 0.0, 0.0, 0.0]));
        let out = c.matrix().mul_vec(&f(&[0.5, 0.5, 0.5, 0.5, -1.0])).unwrap();
        assert_eq!(out, f(&[0.5, 0.5, 0.0, 0.0, 0.0]));
        assert_eq!(c.max_column_deviation(), 0.0);
    }

    #[test]
    fn rotation_machine_on_zero_angle() {
        let angle = TruncatedAngle {
            value: Float::with_val(P, 0),
            terms: 1,
            guard: None,
        };
        let m = build_rotation_machine(&angle).unwrap();
        let r = m.run("").unwrap();
        let v: Vec<f64> = r
            .final_vector
            .entries()
            .iter()
            .map(|x| x.to_f64())
            .collect();
        for (got, want) in v.iter().zip([0.5, 0.5, 0.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-60);
        }
    }

    #[test]
    fn rotation_machine_reaches_phi() {
        let o = LanguageOracle::from_bit_str("0110100").unwrap();
        let angle = theta(&o, 12, P).unwrap();
        let m = build_rotation_machine(&angle).unwrap();
        for n in 0..3u32 {
            let x = powereq::member_string(n).unwrap();
            let r = m.run(&x).unwrap();
            let p = phi(&o, n as u64, 12, P).unwrap();
            let want = p.sin().square();
            let got = &r.final_vector.entries()[0];
            assert!(Float::with_val(P, got - &want).abs().to_f64() < 1e-40);
            let e = r.final_vector.entries();
            assert!(e[2..].iter().all(|x| x.to_f64().abs() < 1e-40));
            assert!(r.final_vector.satisfies_sum_invariant());
        }
    }

    #[test]
    fn combined_machine_small() {
        let m = build_combined(LanguageOracle::from_bit_str("10").unwrap(), 25, 1, 4).unwrap();
        assert_eq!(m.machine().dim(), 100);
        for (_, op) in m.machine().operators() {
            assert!(op.max_column_deviation() <= m.machine().field().tolerance());
        }
        // a^0 in L, a^1 not
        let member0 = powereq::member_blocks(0).unwrap();
        let r = m.run_blocks(&member0).unwrap();
        assert!(r.accept_probability.to_f64() >= DECISION_BOUND);
        let member1 = powereq::member_blocks(1).unwrap();
        let r = m.run_blocks(&member1).unwrap();
        assert!(r.reject_probability().to_f64() >= DECISION_BOUND);

        let x = "aaaaaaaa";
        let r = m.run(x).unwrap();
        let want = m.predicted(&blocks(x).unwrap());
        assert!(
            Float::with_val(m.precision(), &r.accept_probability - &want)
                .abs()
                .to_f64()
                < 1e-30
        );
        assert!(r.reject_probability().to_f64() >= 50.0 / 51.0);
    }

    #[test]
    fn combined_refuses_long_inputs() {
        let m = build_combined(LanguageOracle::all(), 2, 0, 4).unwrap();
        assert_eq!(m.a_limit(), 8);
        assert!(m.run(&"a".repeat(8)).is_ok());
        assert!(matches!(
            m.run(&"a".repeat(9)),
            Err(AfaError::NMaxExceeded {
                a_count: 9,
                limit: 8
            })
        ));
    }

    #[test]
    fn combined_parameter_checks() {
        assert!(build_combined(LanguageOracle::all(), 1, 0, 4).is_err());
        assert!(build_combined(LanguageOracle::all(), 2, 0, 0).is_err());
        assert!(build_combined(LanguageOracle::all(), 2, 21, 4).is_err());
        let low = CombinedConfig {
            precision_bits: Some(32),
            ..Default::default()
        };
        assert!(matches!(
            build_combined_with(LanguageOracle::all(), low),
            Err(AfaError::Precision { .. })
        ));
    }

    #[test]
    fn closed_form_examples() {
        // alpha = pi/4 exactly when theta = 0 is impossible, so check the
        // formula through a zero-angle stand-in
        let angle = TruncatedAngle {
            value: Float::with_val(P, 0),
            terms: 1,
            guard: None,
        };
        let d = blocks("aaaaaaaa").unwrap();
        let p = predicted_from_blocks(&d, &angle, 25);
        assert!(close(&p, 0.5 / 51.0, 1e-15));
        let member = powereq::member_blocks(1).unwrap();
        let p = predicted_from_blocks(&member, &angle, 25);
        assert!(close(&p, 0.5, 1e-15));
    }
}
