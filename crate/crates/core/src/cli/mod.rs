//! Command-line front end: `gen`, `run`, `verify` and `sweep`.
//!
//! Reports go to stdout (JSON for `run`, TSV for `sweep`), diagnostics to
//! stderr. Exit status is 0 on success, 1 when a verification fails and 2 on
//! usage or input errors.

pub mod report;
pub mod shorthand;
pub mod verify;

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rug::{Float, Rational};

use crate::encoding::{
    build_combined_with, predicted_from_blocks as combined_prediction, required_terms, theta,
    CombinedConfig, CombinedMachine, LanguageOracle, DEFAULT_GUARD,
};
use crate::error::{AfaError, Result};
use crate::powereq::{
    build_powereq, member_blocks_with_max, BlockDecomposition, Mutation, DEFAULT_K,
    DEFAULT_MAX_MEMBER_INDEX,
};
use crate::scalar::check_precision;

pub use report::{Decision, InputSummary, Probability, RunReport};
pub use shorthand::{RunLength, MAX_EXPANSION};

/// Overrides the float precision of combined machines when no flag is given.
pub const PRECISION_ENV: &str = "AFA_PRECISION_BITS";

#[derive(Debug, Parser)]
#[command(
    name = "afa",
    version,
    about = "Build, run and verify affine finite automata"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the PowerEQ member with N separators, optionally mutated.
    Gen(GenArgs),
    /// Run one input and print a JSON report.
    Run {
        #[command(subcommand)]
        machine: MachineSpec,
    },
    /// Check simulator output against the closed forms.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Vary one parameter and print a TSV table.
    Sweep {
        #[command(subcommand)]
        param: SweepParam,
    },
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub n: u32,
    /// Edit to apply: blockI+C, blockI-C, splitI@P (insert a b) or joinI
    /// (delete the b after block I). Repeatable.
    #[arg(long)]
    pub mutate: Vec<String>,
    /// Largest accepted N.
    #[arg(long, default_value_t = DEFAULT_MAX_MEMBER_INDEX)]
    pub max: u32,
    /// Print run-length shorthand instead of the raw string.
    #[arg(long)]
    pub shorthand: bool,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input string, raw or shorthand such as "a^7 b a^56".
    pub input: Option<String>,
    /// Read the input from a file instead.
    #[arg(long, conflicts_with = "input")]
    pub file: Option<PathBuf>,
}

impl InputArgs {
    fn read(&self) -> Result<RunLength> {
        let text = match (&self.input, &self.file) {
            (Some(s), None) => s.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)
                .map_err(|e| AfaError::Parse(format!("{}: {e}", path.display())))?,
            _ => return Err(AfaError::Parse("give an input string or --file".into())),
        };
        RunLength::parse(&text)
    }
}

#[derive(Debug, Clone, Args)]
pub struct CombinedArgs {
    /// Bit file path, or builtin:empty, builtin:all, builtin:even.
    #[arg(long)]
    pub oracle: String,
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: i64,
    #[arg(long = "n-max", default_value_t = 3)]
    pub n_max: u32,
    #[arg(long, default_value_t = DEFAULT_GUARD)]
    pub guard: u32,
    /// Float precision in bits; falls back to AFA_PRECISION_BITS.
    #[arg(long)]
    pub precision: Option<u32>,
}

impl CombinedArgs {
    fn build(&self) -> Result<CombinedMachine> {
        let oracle = LanguageOracle::from_spec(&self.oracle)?;
        let config = CombinedConfig {
            k: self.k,
            n_max: self.n_max,
            guard: self.guard,
            precision_bits: resolve_precision(self.precision)?,
        };
        build_combined_with(oracle, config)
    }
}

#[derive(Debug, Subcommand)]
pub enum MachineSpec {
    Powereq {
        #[arg(long, default_value_t = DEFAULT_K)]
        k: i64,
        #[command(flatten)]
        input: InputArgs,
    },
    Combined {
        #[command(flatten)]
        machine: CombinedArgs,
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// Exact equality with 1/(1+2kT) on exhaustive short and random long strings.
    Powereq {
        #[arg(long, value_delimiter = ',', default_values_t = [2, 10, 25])]
        k: Vec<i64>,
        #[arg(long, default_value_t = 14)]
        exhaustive_len: u32,
        #[arg(long, default_value_t = 500)]
        random: usize,
        #[arg(long, default_value_t = 600)]
        max_len: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Print every case, not only mismatches.
        #[arg(long)]
        verbose: bool,
    },
    /// Random bit oracles: decision margins and agreement with the closed form.
    Combined {
        #[arg(long, default_value_t = 200)]
        oracles: usize,
        #[arg(long, default_value_t = 12)]
        bits: usize,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: i64,
        #[arg(long = "n-max", default_value_t = 3)]
        n_max: u32,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u32,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Column sums of every operator and entry sums along traced runs.
    Invariants {
        #[arg(long, value_delimiter = ',', default_values_t = [2, 10, 25])]
        k: Vec<i64>,
        #[arg(long = "n-max", default_value_t = 2)]
        n_max: u32,
        #[arg(long, default_value_t = 3)]
        oracles: usize,
        #[arg(long)]
        precision: Option<u32>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum SweepParam {
    /// PowerEQ rejection probability against 1 - 1/(1+2kT).
    K {
        #[arg(long, default_value = "2..50")]
        range: IntRange,
        #[arg(long, default_value = "a^8")]
        input: String,
    },
    /// Agreement delta of the combined machine as the guard grows.
    Guard {
        #[arg(long, default_value = "1..6")]
        range: IntRange,
        #[arg(long, default_value = "builtin:even")]
        oracle: String,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: i64,
        #[arg(long = "n-max", default_value_t = 2)]
        n_max: u32,
        #[arg(long)]
        precision: Option<u32>,
        /// Defaults to the member with n-max separators.
        #[arg(long)]
        input: Option<String>,
    },
    /// Agreement delta of the combined machine as the precision grows.
    Precision {
        #[arg(long, default_value = "64..256")]
        range: IntRange,
        #[arg(long, default_value_t = 32)]
        step: usize,
        #[arg(long, default_value = "builtin:even")]
        oracle: String,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: i64,
        #[arg(long = "n-max", default_value_t = 2)]
        n_max: u32,
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: u32,
        #[arg(long)]
        input: Option<String>,
    },
}

/// Inclusive integer range written `A..B` or `A..=B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntRange(pub RangeInclusive<i64>);

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("`{s}` is not a range like 2..50"))?;
        let b = b.strip_prefix('=').unwrap_or(b);
        let parse = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("`{x}`: {e}"));
        let (a, b) = (parse(a)?, parse(b)?);
        if a > b {
            return Err(format!("empty range {a}..{b}"));
        }
        Ok(IntRange(a..=b))
    }
}

/// Result of a command that completed without input errors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    VerificationFailed,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::VerificationFailed => 1,
        }
    }
}

pub const USAGE_EXIT: u8 = 2;

/// Parses the process arguments and runs the command.
pub fn main() -> ExitCode {
    main_with(std::env::args_os())
}

pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE_EXIT } else { 0 });
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match execute(&cli.command, &mut out) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_EXIT)
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<Outcome> {
    match command {
        Command::Gen(args) => {
            let d = cmd_gen(args.n, &args.mutate, args.max)?;
            eprintln!("T_x = {}", d.t_sum());
            let text = if args.shorthand {
                d.to_string()
            } else {
                RunLength::from_blocks(&d).expand()?
            };
            emit(out, &text)?;
            Ok(Outcome::Success)
        }
        Command::Run { machine } => {
            let report = cmd_run(machine)?;
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| AfaError::Parse(e.to_string()))?;
            emit(out, &json)?;
            Ok(Outcome::Success)
        }
        Command::Verify { suite } => {
            let summary = cmd_verify(suite, out)?;
            emit(out, &summary.to_string())?;
            Ok(if summary.passed() {
                Outcome::Success
            } else {
                Outcome::VerificationFailed
            })
        }
        Command::Sweep { param } => cmd_sweep(param, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| AfaError::Parse(format!("writing output: {e}")))
}

/// Flag, then `AFA_PRECISION_BITS`, then the machine's default.
pub fn resolve_precision(flag: Option<u32>) -> Result<Option<u32>> {
    let bits =
        match flag {
            Some(b) => Some(b),
            None => match std::env::var(PRECISION_ENV) {
                Ok(v) => Some(v.trim().parse().map_err(|_| {
                    AfaError::Parse(format!("{PRECISION_ENV}={v} is not a bit count"))
                })?),
                Err(_) => None,
            },
        };
    if let Some(b) = bits {
        check_precision(b)?;
    }
    Ok(bits)
}

/// Parses `blockI+C`, `blockI-C`, `splitI@P` or `joinI`.
pub fn parse_mutation(spec: &str) -> Result<Mutation> {
    let bad = || AfaError::Parse(format!("bad mutation `{spec}`"));
    let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
    let index = |s: &str| s.parse::<usize>().map_err(|_| bad());
    if let Some(rest) = spec.strip_prefix("block") {
        if let Some((b, c)) = rest.split_once('+') {
            return Ok(Mutation::AddA {
                block: index(b)?,
                count: num(c)?,
            });
        }
        if let Some((b, c)) = rest.split_once('-') {
            return Ok(Mutation::RemoveA {
                block: index(b)?,
                count: num(c)?,
            });
        }
    } else if let Some(rest) = spec.strip_prefix("split") {
        let (b, at) = rest.split_once('@').ok_or_else(bad)?;
        return Ok(Mutation::SplitBlock {
            block: index(b)?,
            at: num(at)?,
        });
    } else if let Some(rest) = spec.strip_prefix("join") {
        return Ok(Mutation::JoinBlocks {
            block: index(rest)?,
        });
    }
    Err(bad())
}

/// The member with `n` separators after applying `mutations` in order.
pub fn cmd_gen(n: u32, mutations: &[String], max: u32) -> Result<BlockDecomposition> {
    let mut d = member_blocks_with_max(n, max)?;
    for spec in mutations {
        d = d.mutate(parse_mutation(spec)?)?;
    }
    RunLength::from_blocks(&d).check_len()?;
    Ok(d)
}

pub fn cmd_run(spec: &MachineSpec) -> Result<RunReport> {
    match spec {
        MachineSpec::Powereq { k, input } => run_powereq(*k, &input.read()?),
        MachineSpec::Combined { machine, input } => run_combined(&machine.build()?, &input.read()?),
    }
}

pub fn run_powereq(k: i64, input: &RunLength) -> Result<RunReport> {
    let d = input.to_blocks()?;
    let m = build_powereq(k)?;
    let p = m.run_blocks(&d)?.accept_probability;
    let predicted = crate::powereq::predicted_from_blocks(&d, k);
    let delta = Rational::from(&p - &predicted).abs().to_f64();
    Ok(RunReport {
        input_summary: InputSummary::from_blocks(&d),
        machine_id: "powereq".into(),
        k,
        decision: Decision::from_exact(&p),
        accept_probability: Probability::exact(&p),
        oracle_prediction: Probability::exact(&predicted),
        agreement_delta: delta,
    })
}

pub fn run_combined(m: &CombinedMachine, input: &RunLength) -> Result<RunReport> {
    let d = input.to_blocks()?;
    let p = m.run_blocks(&d)?.accept_probability;
    let predicted = m.predicted(&d);
    let delta = Float::with_val(p.prec(), &p - &predicted).abs().to_f64();
    Ok(RunReport {
        input_summary: InputSummary::from_blocks(&d),
        machine_id: combined_id(m),
        k: m.k(),
        decision: Decision::from_float(&p),
        accept_probability: Probability::float(&p),
        oracle_prediction: Probability::float(&predicted),
        agreement_delta: delta,
    })
}

fn combined_id(m: &CombinedMachine) -> String {
    let guard = m
        .angle()
        .guard()
        .map_or(String::from("-"), |g| g.to_string());
    format!(
        "combined(oracle={}, n_max={}, guard={guard}, precision={})",
        m.oracle(),
        m.n_max(),
        m.precision()
    )
}

pub fn cmd_verify(suite: &Suite, out: &mut dyn Write) -> Result<verify::SuiteSummary> {
    match suite {
        Suite::Powereq {
            k,
            exhaustive_len,
            random,
            max_len,
            seed,
            verbose,
        } => verify::verify_powereq(
            &verify::PowerEqBudget {
                ks: k.clone(),
                exhaustive_len: *exhaustive_len,
                random: *random,
                max_len: *max_len,
                seed: *seed,
                verbose: *verbose,
            },
            out,
        ),
        Suite::Combined {
            oracles,
            bits,
            k,
            n_max,
            guard,
            precision,
            tolerance,
            seed,
        } => verify::verify_combined(
            &verify::CombinedBudget {
                oracles: *oracles,
                bits: *bits,
                k: *k,
                n_max: *n_max,
                guard: *guard,
                precision_bits: resolve_precision(*precision)?,
                tolerance: *tolerance,
                seed: *seed,
            },
            out,
        ),
        Suite::Invariants {
            k,
            n_max,
            oracles,
            precision,
            seed,
        } => verify::verify_invariants(
            &verify::InvariantBudget {
                ks: k.clone(),
                n_max: *n_max,
                guard: DEFAULT_GUARD,
                precision_bits: resolve_precision(*precision)?,
                oracles: *oracles,
                seed: *seed,
            },
            out,
        ),
    }
}

fn sweep_input(input: &Option<String>, n_max: u32) -> Result<BlockDecomposition> {
    match input {
        Some(text) => RunLength::parse(text)?.to_blocks(),
        None => member_blocks_with_max(n_max, n_max),
    }
}

fn float_delta(a: &Float, b: &Float) -> f64 {
    Float::with_val(a.prec().max(b.prec()), a - b)
        .abs()
        .to_f64()
}

pub fn cmd_sweep(param: &SweepParam, out: &mut dyn Write) -> Result<Outcome> {
    let mut outcome = Outcome::Success;
    let line = |out: &mut dyn Write, text: String| emit(out, &text);
    match param {
        SweepParam::K { range, input } => {
            let d = RunLength::parse(input)?.to_blocks()?;
            line(out, "k\treject\tclosed_form\terror_bound\tmatch".into())?;
            for k in range.0.clone() {
                let p = build_powereq(k)?.run_blocks(&d)?.accept_probability;
                let reject = Rational::from(1 - &p);
                let closed = 1 - crate::powereq::predicted_from_blocks(&d, k);
                let bound = Rational::from((2 * k, 2 * k + 1));
                let ok = reject == closed;
                if !ok {
                    outcome = Outcome::VerificationFailed;
                }
                line(
                    out,
                    format!(
                        "{k}\t{reject}\t{closed}\t{bound}\t{}",
                        if ok { "yes" } else { "NO" }
                    ),
                )?;
            }
        }
        SweepParam::Guard {
            range,
            oracle,
            k,
            n_max,
            precision,
            input,
        } => {
            let oracle = LanguageOracle::from_spec(oracle)?;
            let d = sweep_input(input, *n_max)?;
            let precision = resolve_precision(*precision)?;
            let top = u32::try_from(*range.0.end()).map_err(|_| bad_range())?;
            let mut reference = None;
            line(
                out,
                "guard\tterms\ttheta_delta\taccept\tagreement_delta".into(),
            )?;
            for g in range.0.clone() {
                let g = u32::try_from(g).map_err(|_| bad_range())?;
                let config = CombinedConfig {
                    k: *k,
                    n_max: *n_max,
                    guard: g,
                    precision_bits: precision,
                };
                let m = build_combined_with(oracle.clone(), config)?;
                let reference = match &reference {
                    Some(r) => r,
                    None => {
                        let terms = required_terms(*n_max, top)? + 8;
                        reference.insert(theta(&oracle, terms, m.precision())?)
                    }
                };
                let p = m.run_blocks(&d)?.accept_probability;
                let exact = combined_prediction(&d, reference, *k);
                let theta_delta = float_delta(m.angle().value(), reference.value());
                line(
                    out,
                    format!(
                        "{g}\t{}\t{theta_delta:e}\t{:.15}\t{:e}",
                        m.angle().terms(),
                        p.to_f64(),
                        float_delta(&p, &exact)
                    ),
                )?;
            }
        }
        SweepParam::Precision {
            range,
            step,
            oracle,
            k,
            n_max,
            guard,
            input,
        } => {
            let oracle = LanguageOracle::from_spec(oracle)?;
            let d = sweep_input(input, *n_max)?;
            let terms = required_terms(*n_max, *guard)?;
            let reference_bits = 4 * u32::try_from(*range.0.end()).map_err(|_| bad_range())?;
            let reference = combined_prediction(&d, &theta(&oracle, terms, reference_bits)?, *k);
            line(out, "precision\taccept\tagreement_delta".into())?;
            for bits in range.0.clone().step_by((*step).max(1)) {
                let bits = u32::try_from(bits).map_err(|_| bad_range())?;
                let config = CombinedConfig {
                    k: *k,
                    n_max: *n_max,
                    guard: *guard,
                    precision_bits: Some(bits),
                };
                let m = build_combined_with(oracle.clone(), config)?;
                let p = m.run_blocks(&d)?.accept_probability;
                line(
                    out,
                    format!(
                        "{bits}\t{:.15}\t{:e}",
                        p.to_f64(),
                        float_delta(&p, &reference)
                    ),
                )?;
            }
        }
    }
    Ok(outcome)
}

fn bad_range() -> AfaError {
    AfaError::InvalidParameter("range bounds must be non-negative".into())
}
