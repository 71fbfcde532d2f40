//! The automaton itself and its run loop.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::affine::{weighting, AffineOperator, StateVector};
use crate::error::{AfaError, Result};
use crate::scalar::{NumericField, Scalar};

/// A tape symbol: an input letter or one of the two end-markers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    LeftEnd,
    Letter(char),
    RightEnd,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::LeftEnd => f.write_str("¢"),
            Symbol::Letter(c) => write!(f, "{c}"),
            Symbol::RightEnd => f.write_str("$"),
        }
    }
}

/// An affine finite automaton: alphabet, one affine operator per tape
/// symbol, an initial state and a set of accepting states.
///
/// States are numbered from 0.
#[derive(Clone, Debug)]
pub struct AfaMachine<S: Scalar> {
    alphabet: BTreeSet<char>,
    operators: BTreeMap<Symbol, AffineOperator<S>>,
    initial_state: usize,
    accepting: BTreeSet<usize>,
    field: NumericField,
    dim: usize,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Keep a copy of the state vector after every tape symbol.
    pub record_trace: bool,
}

#[derive(Clone, Debug)]
pub struct RunResult<S: Scalar> {
    pub final_vector: StateVector<S>,
    pub accept_probability: S,
    /// State vectors after `¢`, each letter, and `$`, when requested.
    pub trace: Option<Vec<StateVector<S>>>,
}

impl<S: Scalar> RunResult<S> {
    pub fn reject_probability(&self) -> S {
        S::one(self.accept_probability.context()).sub(&self.accept_probability)
    }
}

impl<S: Scalar> AfaMachine<S> {
    /// Assembles a machine. Every letter of `alphabet` and both end-markers
    /// need an operator, and all operators must share one dimension.
    pub fn new(
        alphabet: impl IntoIterator<Item = char>,
        operators: BTreeMap<Symbol, AffineOperator<S>>,
        initial_state: usize,
        accepting: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let alphabet: BTreeSet<char> = alphabet.into_iter().collect();
        let accepting: BTreeSet<usize> = accepting.into_iter().collect();

        let required = alphabet
            .iter()
            .map(|&c| Symbol::Letter(c))
            .chain([Symbol::LeftEnd, Symbol::RightEnd]);
        let mut dim = None;
        for sym in required {
            let op = operators
                .get(&sym)
                .ok_or_else(|| AfaError::MissingOperator(sym.to_string()))?;
            match dim {
                None => dim = Some(op.dim()),
                Some(d) if d != op.dim() => {
                    return Err(AfaError::DimensionMismatch {
                        expected: d,
                        found: op.dim(),
                    })
                }
                _ => {}
            }
        }
        if let Some(Symbol::Letter(c)) = operators
            .keys()
            .find(|s| matches!(s, Symbol::Letter(c) if !alphabet.contains(c)))
        {
            return Err(AfaError::UnknownSymbol(*c));
        }
        let dim = dim.expect("end-markers are always required");
        for &index in accepting.iter().chain([&initial_state]) {
            if index >= dim {
                return Err(AfaError::StateOutOfRange { index, dim });
            }
        }
        let ctx = operators[&Symbol::LeftEnd].matrix().context();
        Ok(AfaMachine {
            alphabet,
            operators,
            initial_state,
            accepting,
            field: S::field(ctx),
            dim,
        })
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn field(&self) -> NumericField {
        self.field
    }

    pub fn context(&self) -> S::Context {
        self.operators[&Symbol::LeftEnd].matrix().context()
    }

    pub fn operator(&self, symbol: Symbol) -> Option<&AffineOperator<S>> {
        self.operators.get(&symbol)
    }

    pub fn operators(&self) -> impl Iterator<Item = (Symbol, &AffineOperator<S>)> {
        self.operators.iter().map(|(s, op)| (*s, op))
    }

    pub fn initial_vector(&self) -> StateVector<S> {
        StateVector::basis(self.dim, self.initial_state, self.context())
            .expect("initial state validated at construction")
    }

    /// Runs `¢ input $` and applies the weighting operator.
    pub fn run(&self, input: &str) -> Result<RunResult<S>> {
        self.run_with(input.chars(), RunOptions::default())
    }

    pub fn run_with(
        &self,
        input: impl IntoIterator<Item = char>,
        options: RunOptions,
    ) -> Result<RunResult<S>> {
        let mut trace = options.record_trace.then(Vec::new);
        let mut result = self.run_observed(input, |_, v| {
            if let Some(t) = trace.as_mut() {
                t.push(StateVector::new_unchecked(v.to_vec()));
            }
        })?;
        result.trace = trace;
        Ok(result)
    }

    /// Runs the machine, handing the state vector after every tape symbol to
    /// `observer`. Fails on the first letter outside the alphabet.
    pub fn run_observed<F>(
        &self,
        input: impl IntoIterator<Item = char>,
        mut observer: F,
    ) -> Result<RunResult<S>>
    where
        F: FnMut(Symbol, &[S]),
    {
        let mut current = self.initial_vector().into_entries();
        let mut next = current.clone();
        let mut scratch = Vec::new();
        let tape = std::iter::once(Ok(Symbol::LeftEnd))
            .chain(input.into_iter().map(|c| {
                if self.alphabet.contains(&c) {
                    Ok(Symbol::Letter(c))
                } else {
                    Err(AfaError::UnknownSymbol(c))
                }
            }))
            .chain(std::iter::once(Ok(Symbol::RightEnd)));
        for symbol in tape {
            let symbol = symbol?;
            self.operators[&symbol].apply_into(&current, &mut next, &mut scratch);
            std::mem::swap(&mut current, &mut next);
            observer(symbol, &current);
        }
        let final_vector = StateVector::new_unchecked(current);
        let accept_probability = weighting(&final_vector, &self.accepting)?;
        Ok(RunResult {
            final_vector,
            accept_probability,
            trace: None,
        })
    }
}

#[cfg(test)]
mod tests {
    use rug::Rational;

    use super::*;
    use crate::affine::affinize;
    use crate::matrix::Matrix;
    use crate::scalar::ExactCtx;

    fn identity_machine() -> AfaMachine<Rational> {
        let id = AffineOperator::identity(3, ExactCtx);
        let ops = [Symbol::LeftEnd, Symbol::Letter('a'), Symbol::RightEnd]
            .into_iter()
            .map(|s| (s, id.clone()))
            .collect();
        AfaMachine::new(['a'], ops, 0, [0]).unwrap()
    }

    #[test]
    fn identity_machine_accepts_everything() {
        let m = identity_machine();
        for input in ["", "a", "aaaaaaa"] {
            let r = m.run(input).unwrap();
            assert_eq!(r.accept_probability, 1);
            assert_eq!(r.reject_probability(), 0);
        }
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        let m = identity_machine();
        assert!(matches!(m.run("ab"), Err(AfaError::UnknownSymbol('b'))));
        assert!(matches!(m.run("$"), Err(AfaError::UnknownSymbol('$'))));
    }

    #[test]
    fn construction_checks() {
        let id3 = AffineOperator::<Rational>::identity(3, ExactCtx);
        let id2 = AffineOperator::<Rational>::identity(2, ExactCtx);
        let mut ops: BTreeMap<_, _> = [
            (Symbol::LeftEnd, id3.clone()),
            (Symbol::RightEnd, id3.clone()),
        ]
        .into_iter()
        .collect();
        assert!(matches!(
            AfaMachine::new(['a'], ops.clone(), 0, [0]),
            Err(AfaError::MissingOperator(_))
        ));
        ops.insert(Symbol::Letter('a'), id2);
        assert!(matches!(
            AfaMachine::new(['a'], ops.clone(), 0, [0]),
            Err(AfaError::DimensionMismatch { .. })
        ));
        ops.insert(Symbol::Letter('a'), id3.clone());
        assert!(AfaMachine::new(['a'], ops.clone(), 3, [0]).is_err());
        assert!(AfaMachine::new(['a'], ops.clone(), 0, [5]).is_err());
        ops.insert(Symbol::Letter('z'), id3);
        assert!(matches!(
            AfaMachine::new(['a'], ops, 0, [0]),
            Err(AfaError::UnknownSymbol('z'))
        ));
    }

    #[test]
    fn counting_machine_trace() {
        // state 1 counts a's, state 2 balances
        let count =
            affinize(&Matrix::<Rational>::from_i64_rows(&[[1, 0], [1, 1]], ExactCtx).unwrap())
                .unwrap();
        let id = AffineOperator::identity(3, ExactCtx);
        let ops = [
            (Symbol::LeftEnd, id.clone()),
            (Symbol::Letter('a'), count),
            (Symbol::RightEnd, id),
        ]
        .into_iter()
        .collect();
        let m = AfaMachine::new(['a'], ops, 0, [0]).unwrap();
        let r = m
            .run_with("aaa".chars(), RunOptions { record_trace: true })
            .unwrap();
        let trace = r.trace.unwrap();
        assert_eq!(trace.len(), 5);
        assert!(trace.iter().all(|v| v.satisfies_sum_invariant()));
        let q = |x: i64| Rational::from(x);
        assert_eq!(r.final_vector.entries(), &[q(1), q(3), q(-3)]);
        assert_eq!(r.accept_probability, Rational::from((1, 7)));
    }
}
