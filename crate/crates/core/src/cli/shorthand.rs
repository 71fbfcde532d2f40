//! Run-length input notation. Whitespace separates tokens; a token is either
//! a literal run of symbols (`aab`) or one symbol with a repeat count (`a^56`).
//! `a^7 b a^56` and `aaaaaaab a^56` denote the same string.

use std::fmt;

use crate::error::{AfaError, Result};
use crate::powereq::BlockDecomposition;

/// Longest input that is ever expanded or run.
pub const MAX_EXPANSION: u64 = 10_000_000;

/// A string stored as maximal runs `(symbol, count)`, counts nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunLength {
    runs: Vec<(char, u64)>,
    len: u64,
}

impl RunLength {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = RunLength::default();
        for token in text.split_whitespace() {
            match token.split_once('^') {
                Some((symbol, count)) => {
                    let mut chars = symbol.chars();
                    let (Some(c), None) = (chars.next(), chars.next()) else {
                        return Err(AfaError::Parse(format!(
                            "`{token}`: a repeat count applies to exactly one symbol"
                        )));
                    };
                    let count: u64 = count.parse().map_err(|_| {
                        AfaError::Parse(format!("`{token}`: bad repeat count `{count}`"))
                    })?;
                    out.push(c, count)?;
                }
                None => {
                    for c in token.chars() {
                        out.push(c, 1)?;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn from_symbols(symbols: impl IntoIterator<Item = char>) -> Result<Self> {
        let mut out = RunLength::default();
        for c in symbols {
            out.push(c, 1)?;
        }
        Ok(out)
    }

    pub fn from_blocks(d: &BlockDecomposition) -> Self {
        let mut out = RunLength::default();
        for (j, &t) in d.counts().iter().enumerate() {
            if j > 0 {
                out.push('b', 1).expect("block lengths fit in u64");
            }
            out.push('a', t).expect("block lengths fit in u64");
        }
        out
    }

    fn push(&mut self, c: char, count: u64) -> Result<()> {
        if c.is_whitespace() || c == '^' {
            return Err(AfaError::Parse(format!("`{c}` cannot be an input symbol")));
        }
        if count == 0 {
            return Ok(());
        }
        self.len = self
            .len
            .checked_add(count)
            .ok_or_else(|| AfaError::Parse("input length overflows".into()))?;
        match self.runs.last_mut() {
            Some((last, n)) if *last == c => *n += count,
            _ => self.runs.push((c, count)),
        }
        Ok(())
    }

    pub fn runs(&self) -> &[(char, u64)] {
        &self.runs
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Errors with [`AfaError::InputTooLong`] past [`MAX_EXPANSION`] symbols.
    pub fn check_len(&self) -> Result<()> {
        if self.len > MAX_EXPANSION {
            return Err(AfaError::InputTooLong {
                len: self.len,
                cap: MAX_EXPANSION,
            });
        }
        Ok(())
    }

    pub fn symbols(&self) -> impl Iterator<Item = char> + '_ {
        self.runs
            .iter()
            .flat_map(|&(c, n)| std::iter::repeat_n(c, n as usize))
    }

    pub fn expand(&self) -> Result<String> {
        self.check_len()?;
        Ok(self.symbols().collect())
    }

    /// Block decomposition over `{a, b}`, without expanding the string.
    pub fn to_blocks(&self) -> Result<BlockDecomposition> {
        self.check_len()?;
        let mut counts = vec![0u64];
        for &(c, n) in &self.runs {
            match c {
                'a' => *counts.last_mut().expect("never empty") += n,
                'b' => counts.extend(std::iter::repeat_n(0, n as usize)),
                other => return Err(AfaError::UnknownSymbol(other)),
            }
        }
        BlockDecomposition::from_counts(counts)
    }
}

impl fmt::Display for RunLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(c, n)) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match n {
                1 => write!(f, "{c}")?,
                _ => write!(f, "{c}^{n}")?,
            }
        }
        Ok(())
    }
}

pub fn parse(text: &str) -> Result<RunLength> {
    RunLength::parse(text)
}

/// Shorthand form of a raw string.
pub fn render(x: &str) -> Result<String> {
    Ok(RunLength::from_symbols(x.chars())?.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powereq::member_blocks;

    #[test]
    fn parses_mixed_tokens() {
        let r = parse("a^7 b a^56").unwrap();
        assert_eq!(r.runs(), &[('a', 7), ('b', 1), ('a', 56)]);
        assert_eq!(r.len(), 64);
        assert_eq!(parse("aaaaaaab a^56").unwrap(), r);
        assert_eq!(parse("  a^3\ta a^0 ").unwrap().runs(), &[('a', 4)]);
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn rejects_malformed_tokens() {
        for bad in ["ab^3", "^3", "a^", "a^x", "a^-1", "a^3^4"] {
            assert!(matches!(parse(bad), Err(AfaError::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn render_merges_runs() {
        assert_eq!(render("aaaaaaabaa").unwrap(), "a^7 b a^2");
        assert_eq!(render("ab").unwrap(), "a b");
        assert_eq!(render("").unwrap(), "");
    }

    #[test]
    fn blocks_without_expansion() {
        let d = parse("a^7 b a^56 b a^448").unwrap().to_blocks().unwrap();
        assert_eq!(d, member_blocks(2).unwrap());
        let d = parse("b^2 a").unwrap().to_blocks().unwrap();
        assert_eq!(d.counts(), &[0, 0, 1]);
        assert!(matches!(
            parse("a c").unwrap().to_blocks(),
            Err(AfaError::UnknownSymbol('c'))
        ));
        assert_eq!(RunLength::from_blocks(&d), parse("b b a").unwrap());
    }

    #[test]
    fn expansion_is_capped() {
        let r = parse("a^10000001").unwrap();
        assert!(matches!(r.expand(), Err(AfaError::InputTooLong { .. })));
        assert!(r.to_blocks().is_err());
        assert_eq!(parse("a^10000000").unwrap().check_len().ok(), Some(()));
    }
}
