//! JSON run report.

use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::powereq::BlockDecomposition;

/// Fractional digits in decimal probability strings.
pub const DECIMAL_DIGITS: u32 = 30;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub input_summary: InputSummary,
    pub machine_id: String,
    pub k: i64,
    pub accept_probability: Probability,
    pub decision: Decision,
    pub oracle_prediction: Probability,
    /// `|simulated - predicted|`; 0 under the exact backend.
    pub agreement_delta: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSummary {
    pub length: u64,
    pub block_counts: Vec<u64>,
}

impl InputSummary {
    pub fn from_blocks(d: &BlockDecomposition) -> Self {
        InputSummary {
            length: d.len(),
            block_counts: d.counts().to_vec(),
        }
    }
}

/// A probability as a decimal string, plus the exact fraction when known.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probability {
    pub decimal: String,
    pub rational: Option<String>,
}

impl Probability {
    pub fn exact(q: &Rational) -> Self {
        Probability {
            decimal: decimal_string(q, DECIMAL_DIGITS),
            rational: Some(q.to_string()),
        }
    }

    pub fn float(x: &Float) -> Self {
        let q = x.to_rational().expect("probabilities are finite");
        Probability {
            decimal: decimal_string(&q, DECIMAL_DIGITS),
            rational: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Accept,
    Reject,
}

impl Decision {
    /// Accept on a strict majority.
    pub fn from_exact(p: &Rational) -> Self {
        if *p > (1, 2) {
            Decision::Accept
        } else {
            Decision::Reject
        }
    }

    pub fn from_float(p: &Float) -> Self {
        if *p > 0.5 {
            Decision::Accept
        } else {
            Decision::Reject
        }
    }
}

/// Positional decimal rounded to `digits` fractional digits, trailing zeros
/// dropped: `1/51` gives `0.0196078...`, `1` gives `1`.
pub fn decimal_string(q: &Rational, digits: u32) -> String {
    let scale = Integer::from(Integer::u_pow_u(10, digits));
    let scaled = Rational::from(q * &scale).round();
    let negative = scaled < 0;
    let s = scaled.abs().to_string();
    let width = digits as usize + 1;
    let s = format!("{s:0>width$}");
    let (int, frac) = s.split_at(s.len() - digits as usize);
    let frac = frac.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if frac.is_empty() {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}
