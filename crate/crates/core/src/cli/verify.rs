//! Suites behind `afa verify`: simulator output against the closed forms,
//! and the affine invariants of every constructed machine.

use std::io::Write;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rug::{Float, Rational};

use crate::encoding::{build_combined_with, CombinedConfig, LanguageOracle, DECISION_BOUND};
use crate::error::Result;
use crate::machine::AfaMachine;
use crate::powereq::{
    build_powereq, member_blocks, predicted_from_blocks, BlockDecomposition, Mutation,
};
use crate::scalar::{float_tolerance, Scalar};

/// Outcome of one suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteSummary {
    pub suite: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub max_delta: f64,
}

impl SuiteSummary {
    fn new(suite: &'static str) -> Self {
        SuiteSummary {
            suite,
            cases: 0,
            failures: 0,
            max_delta: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, ok: bool, delta: f64) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
        }
        self.max_delta = self.max_delta.max(delta);
    }
}

impl std::fmt::Display for SuiteSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} ({} cases, {} failures, max delta {:e})",
            self.suite,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases,
            self.failures,
            self.max_delta
        )
    }
}

#[derive(Clone, Debug)]
pub struct PowerEqBudget {
    pub ks: Vec<i64>,
    /// Every string over `{a, b}` up to this length.
    pub exhaustive_len: u32,
    pub random: usize,
    pub max_len: usize,
    pub seed: u64,
    pub verbose: bool,
}

impl Default for PowerEqBudget {
    fn default() -> Self {
        PowerEqBudget {
            ks: vec![2, 10, 25],
            exhaustive_len: 14,
            random: 500,
            max_len: 600,
            seed: 1,
            verbose: false,
        }
    }
}

/// All strings over `{a, b}` of length `0..=max_len`, shortest first.
pub fn exhaustive_strings(max_len: u32) -> impl Iterator<Item = String> {
    (0..=max_len).flat_map(|len| {
        (0u64..1 << len).map(move |bits| {
            (0..len)
                .map(|i| if bits >> i & 1 == 1 { 'b' } else { 'a' })
                .collect()
        })
    })
}

/// A string of uniform length in `0..=max_len`; each symbol is `b` with
/// probability 1/8, which keeps blocks near member-like lengths.
pub fn random_string(rng: &mut impl Rng, max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| if rng.gen_ratio(1, 8) { 'b' } else { 'a' })
        .collect()
}

/// Exact equality of `build_powereq(k)` with `1/(1 + 2k T_x)`.
pub fn verify_powereq(budget: &PowerEqBudget, out: &mut dyn Write) -> Result<SuiteSummary> {
    let mut summary = SuiteSummary::new("powereq");
    for &k in &budget.ks {
        let m = build_powereq(k)?;
        let mut rng = StdRng::seed_from_u64(budget.seed);
        let random = (0..budget.random).map(|_| random_string(&mut rng, budget.max_len));
        let mut mismatches = 0;
        let mut cases = 0;
        for x in exhaustive_strings(budget.exhaustive_len).chain(random) {
            let simulated = m.run(&x)?.accept_probability;
            let predicted = predicted_from_blocks(&crate::powereq::blocks(&x)?, k);
            let ok = simulated == predicted;
            let delta = Rational::from(&simulated - &predicted).abs().to_f64();
            summary.record(ok, delta);
            cases += 1;
            if !ok {
                mismatches += 1;
            }
            if budget.verbose || !ok {
                let shown = super::shorthand::render(&x)?;
                let tag = if ok { "ok" } else { "MISMATCH" };
                writeln_io(
                    out,
                    format_args!("k={k}\t{shown}\t{simulated}\t{predicted}\t{delta:e}\t{tag}"),
                );
            }
        }
        writeln_io(
            out,
            format_args!("k={k}: {cases} strings, {mismatches} mismatches"),
        );
    }
    Ok(summary)
}

#[derive(Clone, Debug)]
pub struct CombinedBudget {
    pub oracles: usize,
    pub bits: usize,
    pub k: i64,
    pub n_max: u32,
    pub guard: u32,
    pub precision_bits: Option<u32>,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for CombinedBudget {
    fn default() -> Self {
        CombinedBudget {
            oracles: 200,
            bits: 12,
            k: 25,
            n_max: 3,
            guard: 4,
            precision_bits: Some(128),
            tolerance: 1e-9,
            seed: 1,
        }
    }
}

pub fn random_oracle(rng: &mut impl Rng, bits: usize) -> LanguageOracle {
    LanguageOracle::from_bits((0..bits).map(|_| rng.gen()).collect())
}

/// A random single edit of `d` that leaves PowerEQ and keeps at most
/// `a_limit` a's.
pub fn random_mutation(
    rng: &mut impl Rng,
    d: &BlockDecomposition,
    a_limit: u64,
) -> Result<(Mutation, BlockDecomposition)> {
    loop {
        let blocks = d.counts().len();
        let block = rng.gen_range(0..blocks);
        let t = d.counts()[block];
        let headroom = a_limit.saturating_sub(d.a_count());
        let mutation = match rng.gen_range(0..4) {
            0 if headroom > 0 => Mutation::AddA {
                block,
                count: rng.gen_range(1..=headroom.min(3)),
            },
            1 if t > 0 => Mutation::RemoveA {
                block,
                count: rng.gen_range(1..=t.min(3)),
            },
            2 => Mutation::SplitBlock {
                block,
                at: rng.gen_range(0..=t),
            },
            3 if block + 1 < blocks => Mutation::JoinBlocks { block },
            _ => continue,
        };
        let mutant = d.mutate(mutation)?;
        if !mutant.is_member() {
            return Ok((mutation, mutant));
        }
    }
}

/// Random bit oracles through the combined machine: members of PowerEQ are
/// decided by the oracle bit with margin [`DECISION_BOUND`], mutated
/// non-members are rejected with at least `2k/(2k+1)`, and every run agrees
/// with the closed form within `tolerance`.
pub fn verify_combined(budget: &CombinedBudget, out: &mut dyn Write) -> Result<SuiteSummary> {
    let mut summary = SuiteSummary::new("combined");
    let mut rng = StdRng::seed_from_u64(budget.seed);
    let k = budget.k;
    let mutant_ceiling = 1.0 / (2 * k + 1) as f64;
    writeln_io(
        out,
        format_args!("oracle\tinput\tbit\taccept\tpredicted\tdelta\tstatus"),
    );
    for o in 0..budget.oracles {
        let oracle = random_oracle(&mut rng, budget.bits);
        let config = CombinedConfig {
            k,
            n_max: budget.n_max,
            guard: budget.guard,
            precision_bits: budget.precision_bits,
        };
        let m = build_combined_with(oracle.clone(), config)?;
        for n in 0..=budget.n_max {
            let member = member_blocks(n)?;
            let (_, mutant) = random_mutation(&mut rng, &member, m.a_limit())?;
            for (d, is_member) in [(member, true), (mutant, false)] {
                let p = m.run_blocks(&d)?.accept_probability;
                let predicted = m.predicted(&d);
                let delta = Float::with_val(p.prec(), &p - &predicted).abs().to_f64();
                let p64 = p.to_f64();
                let bit = oracle.is_member(n as u64)?;
                let bound_ok = match (is_member, bit) {
                    (true, true) => p64 >= DECISION_BOUND,
                    (true, false) => 1.0 - p64 >= DECISION_BOUND,
                    (false, _) => p64 <= mutant_ceiling,
                };
                let ok = bound_ok && delta <= budget.tolerance;
                summary.record(ok, delta);
                let bit_col = if is_member {
                    u8::from(bit).to_string()
                } else {
                    "-".into()
                };
                let status = if ok { "ok" } else { "FAIL" };
                writeln_io(
                    out,
                    format_args!(
                        "{o}\t{d}\t{bit_col}\t{p64:.12}\t{:.12}\t{delta:e}\t{status}",
                        predicted.to_f64()
                    ),
                );
            }
        }
    }
    Ok(summary)
}

#[derive(Clone, Debug)]
pub struct InvariantBudget {
    pub ks: Vec<i64>,
    pub n_max: u32,
    pub guard: u32,
    pub precision_bits: Option<u32>,
    pub oracles: usize,
    pub seed: u64,
}

impl Default for InvariantBudget {
    fn default() -> Self {
        InvariantBudget {
            ks: vec![2, 10, 25],
            n_max: 2,
            guard: 4,
            precision_bits: None,
            oracles: 3,
            seed: 1,
        }
    }
}

/// Largest column-sum deviation over the machine's operators.
pub fn max_operator_deviation<S: Scalar>(m: &AfaMachine<S>) -> f64 {
    m.operators()
        .map(|(_, op)| op.max_column_deviation())
        .fold(0.0, f64::max)
}

/// Runs `symbols` and returns the largest entry-sum deviation seen after any
/// tape symbol.
pub fn max_trace_deviation<S: Scalar>(
    m: &AfaMachine<S>,
    symbols: impl IntoIterator<Item = char>,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    m.run_observed(symbols, |_, v| {
        let ctx = v[0].context();
        let mut sum = S::zero(ctx);
        for x in v {
            sum.add_assign_ref(x);
        }
        let dev = sum.sub(&S::one(ctx)).abs().to_f64();
        worst = worst.max(dev);
    })?;
    Ok(worst)
}

/// Column sums of every operator and entry sums along traced runs, exact for
/// PowerEQ and within `2^(-precision/2)` for the combined machine.
pub fn verify_invariants(budget: &InvariantBudget, out: &mut dyn Write) -> Result<SuiteSummary> {
    let mut summary = SuiteSummary::new("invariants");
    let mut rng = StdRng::seed_from_u64(budget.seed);
    let inputs = |rng: &mut StdRng, a_limit: u64| -> Result<Vec<BlockDecomposition>> {
        let mut v = Vec::new();
        for n in 0..=budget.n_max {
            let member = member_blocks(n)?;
            v.push(random_mutation(rng, &member, a_limit)?.1);
            v.push(member);
        }
        Ok(v)
    };

    for &k in &budget.ks {
        let m = build_powereq(k)?;
        let dev = max_operator_deviation(m.machine());
        summary.record(dev == 0.0, dev);
        writeln_io(out, format_args!("powereq k={k}\toperators\t{dev:e}"));
        for d in inputs(&mut rng, u64::MAX)? {
            let dev = max_trace_deviation(m.machine(), d.symbols())?;
            summary.record(dev == 0.0, dev);
            writeln_io(out, format_args!("powereq k={k}\t{d}\t{dev:e}"));
        }
    }

    let k = budget
        .ks
        .last()
        .copied()
        .unwrap_or(crate::powereq::DEFAULT_K);
    for _ in 0..budget.oracles {
        let oracle = random_oracle(&mut rng, 12);
        let config = CombinedConfig {
            k,
            n_max: budget.n_max,
            guard: budget.guard,
            precision_bits: budget.precision_bits,
        };
        let m = build_combined_with(oracle.clone(), config)?;
        let tol = float_tolerance(m.precision()).to_f64();
        let dev = max_operator_deviation(m.machine());
        summary.record(dev <= tol, dev);
        writeln_io(out, format_args!("combined {oracle}\toperators\t{dev:e}"));
        for d in inputs(&mut rng, m.a_limit())? {
            let dev = max_trace_deviation(m.machine(), d.symbols())?;
            summary.record(dev <= tol, dev);
            writeln_io(out, format_args!("combined {oracle}\t{d}\t{dev:e}"));
        }
    }
    Ok(summary)
}

// Report lines are best effort; a closed stdout must not abort a suite.
fn writeln_io(out: &mut dyn Write, args: std::fmt::Arguments<'_>) {
    let _ = out.write_fmt(args);
    let _ = out.write_all(b"\n");
}
