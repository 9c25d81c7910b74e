//! Finite words and eventually periodic symbol streams.

use crate::error::{Error, Result};
use num::Integer;
use std::cmp::Ordering;
use std::fmt;

/// A finite word over `{0, …, alphabet_size-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<u8>,
    alphabet_size: usize,
}

fn check_symbols(symbols: &[u8], alphabet_size: usize) -> Result<()> {
    if alphabet_size < 2 || alphabet_size > 10 {
        return Err(Error::InvalidArgument(format!(
            "alphabet size {alphabet_size} outside 2..=10"
        )));
    }
    match symbols.iter().find(|&&s| s as usize >= alphabet_size) {
        Some(&symbol) => Err(Error::InvalidSymbol {
            symbol,
            alphabet: alphabet_size,
        }),
        None => Ok(()),
    }
}

impl Word {
    pub fn new(symbols: Vec<u8>, alphabet_size: usize) -> Result<Self> {
        check_symbols(&symbols, alphabet_size)?;
        Ok(Word {
            symbols,
            alphabet_size,
        })
    }

    pub(crate) fn new_unchecked(symbols: Vec<u8>, alphabet_size: usize) -> Self {
        Word {
            symbols,
            alphabet_size,
        }
    }

    pub fn parse(s: &str, alphabet_size: usize) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad symbol {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(symbols, alphabet_size)
    }

    /// Decodes a base-`alphabet_size` integer into a word of length `len`
    /// (first symbol most significant).
    pub fn from_index(mut index: u64, len: usize, alphabet_size: usize) -> Self {
        let mut symbols = vec![0u8; len];
        for slot in symbols.iter_mut().rev() {
            *slot = (index % alphabet_size as u64) as u8;
            index /= alphabet_size as u64;
        }
        Word::new_unchecked(symbols, alphabet_size)
    }

    pub fn index(&self) -> u64 {
        self.symbols
            .iter()
            .fold(0u64, |acc, &s| acc * self.alphabet_size as u64 + s as u64)
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// True iff `other` occurs as a contiguous factor of `self`.
    pub fn contains_factor(&self, other: &Word) -> bool {
        other.is_empty()
            || self
                .symbols
                .windows(other.len())
                .any(|w| w == other.symbols.as_slice())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// An eventually periodic stream `preperiod · period^∞`, kept in canonical
/// form (shortest period, shortest preperiod).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Code {
    preperiod: Vec<u8>,
    period: Vec<u8>,
    alphabet_size: usize,
}

impl Code {
    pub fn new(preperiod: Vec<u8>, period: Vec<u8>, alphabet_size: usize) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidArgument("empty period".into()));
        }
        check_symbols(&preperiod, alphabet_size)?;
        check_symbols(&period, alphabet_size)?;
        let mut code = Code {
            preperiod,
            period,
            alphabet_size,
        };
        code.canonicalize();
        Ok(code)
    }

    /// `word · 0^∞`
    pub fn terminating(word: &[u8], alphabet_size: usize) -> Result<Self> {
        Code::new(word.to_vec(), vec![0], alphabet_size)
    }

    fn canonicalize(&mut self) {
        let p = self.period.len();
        for d in 1..=p {
            if p % d == 0 && (d..p).all(|i| self.period[i] == self.period[i - d]) {
                self.period.truncate(d);
                break;
            }
        }
        while let Some(&last) = self.preperiod.last() {
            if last != *self.period.last().unwrap() {
                break;
            }
            self.preperiod.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn preperiod(&self) -> &[u8] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u8] {
        &self.period
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn symbol_at(&self, i: usize) -> u8 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word::new_unchecked((0..len).map(|i| self.symbol_at(i)).collect(), self.alphabet_size)
    }

    /// `σ^k`
    pub fn shift(&self, k: usize) -> Code {
        let pre = self.preperiod.len();
        let mut out = if k <= pre {
            Code {
                preperiod: self.preperiod[k..].to_vec(),
                period: self.period.clone(),
                alphabet_size: self.alphabet_size,
            }
        } else {
            let mut period = self.period.clone();
            period.rotate_left((k - pre) % self.period.len());
            Code {
                preperiod: Vec::new(),
                period,
                alphabet_size: self.alphabet_size,
            }
        };
        out.canonicalize();
        out
    }

    /// Lexicographic comparison; decided within `max preperiod + lcm(periods)` symbols.
    pub fn compare(&self, other: &Code) -> Result<Ordering> {
        if self.alphabet_size != other.alphabet_size {
            return Err(Error::AlphabetMismatch(
                self.alphabet_size,
                other.alphabet_size,
            ));
        }
        let horizon = self.preperiod.len().max(other.preperiod.len())
            + self.period.len().lcm(&other.period.len());
        for i in 0..horizon {
            match self.symbol_at(i).cmp(&other.symbol_at(i)) {
                Ordering::Equal => continue,
                ord => return Ok(ord),
            }
        }
        Ok(Ordering::Equal)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.preperiod {
            write!(f, "{s}")?;
        }
        write!(f, "(")?;
        for s in &self.period {
            write!(f, "{s}")?;
        }
        write!(f, ")^∞")
    }
}

/// `a < b`: the first differing symbol of `a` is smaller.
pub fn lt_order(a: &Code, b: &Code) -> Result<bool> {
    Ok(a.compare(b)? == Ordering::Less)
}
