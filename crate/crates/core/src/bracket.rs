//! Markov-hole brackets and the brute-force oracle.
//!
//! At depth `k` the inner Sft forbids every depth-`k` cylinder that meets the
//! open hole, and the outer Sft forbids every cylinder whose interior lies in
//! the closed hole. On the Baker map a cylinder is a two-sided word of `k`
//! past and `k` future symbols (window `2k`).

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::hole::Hole;
use crate::rational::Rational;
use crate::region::survivor_regions;
use crate::sft::{word_space, Sft};
use crate::system::{Interval, SystemKind, SystemSpec};
use crate::word::Word;
use num::{BigInt, ToPrimitive};
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    /// cylinder meets the open set
    Inner,
    /// cylinder interior lies in the closed set
    Outer,
}

fn scaled(r: &Rational, scale: u64, ceil: bool) -> usize {
    let v = r * Rational::from_integer(BigInt::from(scale));
    let v = if ceil { v.ceil() } else { v.floor() };
    v.to_integer().to_usize().unwrap_or(0).min(scale as usize)
}

/// Indices `i` of the cylinders `[i/N, (i+1)/N]` selected by `rule` for the
/// closed piece `iv`.
fn index_range(iv: &Interval, scale: u64, rule: Rule) -> (usize, usize) {
    match rule {
        Rule::Inner => (scaled(&iv.lo, scale, false), scaled(&iv.hi, scale, true)),
        Rule::Outer => (scaled(&iv.lo, scale, true), scaled(&iv.hi, scale, false)),
    }
}

/// `reversed[p]` = the `y`-cylinder index of the past word with index `p`.
fn reversed_indices(n: usize, len: usize) -> Vec<usize> {
    let size = n.pow(len as u32);
    (0..size)
        .map(|mut p| {
            let mut r = 0;
            for _ in 0..len {
                r = r * n + p % n;
                p /= n;
            }
            r
        })
        .collect()
}

fn bracket_sft(sys: &SystemSpec, hole: &Hole, depth: usize, rule: Rule) -> Result<Sft> {
    if depth == 0 {
        return Err(Error::InvalidArgument("bracket depth must be at least 1".into()));
    }
    hole.check_system(sys)?;
    let n = sys.branches;
    match sys.kind {
        SystemKind::Circle => {
            let size = word_space(n, depth)?;
            let mut allowed = BitSet::full(size);
            for piece in hole.intervals()?.closure_pieces() {
                let (a, b) = index_range(&piece, size as u64, rule);
                allowed.clear_range(a, b);
            }
            Ok(Sft::from_parts(n, depth, sys.sided(), allowed))
        }
        SystemKind::Baker => {
            let size = word_space(n, 2 * depth)?;
            let side = n.pow(depth as u32);
            let rects = hole.rects();
            let ranges: Vec<((usize, usize), (usize, usize))> = rects
                .rects()
                .iter()
                .map(|r| {
                    let y = if r.full_height {
                        (0, side)
                    } else {
                        index_range(&r.y, side as u64, rule)
                    };
                    (index_range(&r.x, side as u64, rule), y)
                })
                .collect();
            let rev = reversed_indices(n, depth);
            let mut allowed = BitSet::full(size);
            for (p, &j) in rev.iter().enumerate() {
                for &((a, b), (c, d)) in &ranges {
                    if c <= j && j < d && a < b {
                        allowed.clear_range(p * side + a, p * side + b);
                    }
                }
            }
            Ok(Sft::from_parts(n, 2 * depth, sys.sided(), allowed))
        }
    }
}

/// Inner bracket `Σ^(k)`: forbids the depth-`k` cylinders meeting the open hole.
pub fn inner_sft(sys: &SystemSpec, hole: &Hole, depth: usize) -> Result<Sft> {
    bracket_sft(sys, hole, depth, Rule::Inner)
}

/// Outer bracket: forbids the depth-`k` cylinders whose interior lies in `H̄`.
pub fn outer_sft(sys: &SystemSpec, hole: &Hole, depth: usize) -> Result<Sft> {
    bracket_sft(sys, hole, depth, Rule::Outer)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketPair {
    pub depth: usize,
    pub inner: Sft,
    pub outer: Sft,
    pub inner_entropy: Option<f64>,
    pub outer_entropy: Option<f64>,
}

pub fn bracket_report(sys: &SystemSpec, hole: &Hole, depth: usize) -> Result<BracketPair> {
    let inner = inner_sft(sys, hole, depth)?;
    let outer = outer_sft(sys, hole, depth)?;
    // equal windows: vertex inclusion gives language inclusion at every length
    if !inner.allowed_bits().is_subset(outer.allowed_bits()) {
        return Err(Error::Invariant(format!(
            "inner bracket not contained in outer bracket at depth {depth}"
        )));
    }
    let inner_entropy = inner.entropy()?;
    let outer_entropy = outer.entropy()?;
    if let (Some(a), Some(b)) = (inner_entropy, outer_entropy) {
        if a > b + 2e-10 {
            return Err(Error::Invariant(format!(
                "inner entropy {a} exceeds outer entropy {b}"
            )));
        }
    }
    Ok(BracketPair {
        depth,
        inner,
        outer,
        inner_entropy,
        outer_entropy,
    })
}

/// Sorted indices of the length-`len` oracle words.
pub fn oracle_indices(sys: &SystemSpec, hole: &Hole, len: usize) -> Result<Vec<u64>> {
    oracle_indices_at(sys, hole, len, len)
}

/// Oracle words of length `len` read off the survivors of depth `horizon`.
pub fn oracle_indices_at(sys: &SystemSpec, hole: &Hole, len: usize, horizon: usize) -> Result<Vec<u64>> {
    let size = word_space(sys.branches, len)?;
    let survivors = survivor_regions(sys, hole, horizon)?;
    let mut hit = BitSet::new(size);
    for cell in survivors.cells() {
        let (a, b) = index_range(&cell.x, size as u64, Rule::Inner);
        hit.set_range(a, b);
    }
    Ok(hit.iter().map(|i| i as u64).collect())
}

/// Words `w` of length `len` whose cylinder meets the depth-`len` survivor
/// set in a set with nonempty interior. On the Baker map `w` is read on the
/// future coordinate.
pub fn oracle_language(sys: &SystemSpec, hole: &Hole, len: usize) -> Result<BTreeSet<Word>> {
    Ok(oracle_indices(sys, hole, len)?
        .into_iter()
        .map(|i| Word::from_index(i, len, sys.branches))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hole::{hole1d, Hole1D, Hole2D, HoleRect};
    use crate::rational::parse;
    use crate::sft::{sft_build, sft_equivalent, Sided};

    fn c2() -> SystemSpec {
        SystemSpec::circle(2)
    }

    fn words(list: &[&str]) -> BTreeSet<Word> {
        list.iter().map(|s| Word::parse(s, 2).unwrap()).collect()
    }

    fn forbidden(s: &Sft) -> BTreeSet<Word> {
        s.forbidden_words().into_iter().collect()
    }

    #[test]
    fn inner_examples() {
        let h = hole1d(&[("3/4", "1")]).unwrap();
        assert_eq!(forbidden(&inner_sft(&c2(), &h, 2).unwrap()), words(&["11"]));
        let h = hole1d(&[("1/4", "3/4")]).unwrap();
        let s = inner_sft(&c2(), &h, 2).unwrap();
        assert_eq!(forbidden(&s), words(&["01", "10"]));
        assert_eq!(s.edges().len(), 2);
        assert_eq!(s.components().len(), 2);
        let e = Hole::Intervals(Hole1D::empty());
        assert_eq!(inner_sft(&c2(), &e, 3).unwrap().vertex_count(), 8);
    }

    #[test]
    fn outer_examples() {
        let h = hole1d(&[("3/4", "1")]).unwrap();
        assert_eq!(forbidden(&outer_sft(&c2(), &h, 2).unwrap()), words(&["11"]));
        let h = hole1d(&[("1/4", "3/4")]).unwrap();
        assert_eq!(forbidden(&outer_sft(&c2(), &h, 2).unwrap()), words(&["01", "10"]));
        let h = hole1d(&[("5/16", "11/16")]).unwrap();
        assert!(forbidden(&outer_sft(&c2(), &h, 1).unwrap()).is_empty());
        assert_eq!(forbidden(&inner_sft(&c2(), &h, 1).unwrap()), words(&["0", "1"]));
    }

    #[test]
    fn wrapping_hole_brackets() {
        let h = hole1d(&[("7/8", "1/8")]).unwrap();
        let inner = inner_sft(&c2(), &h, 3).unwrap();
        assert_eq!(forbidden(&inner), words(&["000", "111"]));
        let outer = outer_sft(&c2(), &h, 3).unwrap();
        assert_eq!(forbidden(&outer), words(&["000", "111"]));
    }

    #[test]
    fn reports() {
        let h = hole1d(&[("3/4", "1")]).unwrap();
        let r = bracket_report(&c2(), &h, 2).unwrap();
        assert!((r.inner_entropy.unwrap() - 0.481212).abs() < 1e-6);
        assert!((r.outer_entropy.unwrap() - 0.481212).abs() < 1e-6);
        let h = hole1d(&[("1/4", "3/4")]).unwrap();
        let r = bracket_report(&c2(), &h, 2).unwrap();
        assert_eq!(r.inner_entropy, Some(0.0));
        assert_eq!(r.outer_entropy, Some(0.0));
        let e = Hole::Intervals(Hole1D::empty());
        let r = bracket_report(&c2(), &e, 3).unwrap();
        assert!((r.inner_entropy.unwrap() - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn oracle_examples() {
        let h = hole1d(&[("3/4", "1")]).unwrap();
        assert_eq!(
            oracle_language(&c2(), &h, 3).unwrap(),
            words(&["000", "001", "010", "100", "101"])
        );
        let e = Hole::Intervals(Hole1D::empty());
        assert_eq!(oracle_language(&c2(), &e, 2).unwrap().len(), 4);
        let all = hole1d(&[("0", "1")]).unwrap();
        assert!(oracle_language(&c2(), &all, 1).unwrap().is_empty());
    }

    #[test]
    fn baker_strip_brackets() {
        let sys = SystemSpec::baker(2);
        let h = Hole::Rects(Hole2D::new(vec![HoleRect::strip(parse("3/4").unwrap(), parse("1").unwrap())]).unwrap());
        let inner = inner_sft(&sys, &h, 2).unwrap();
        let outer = outer_sft(&sys, &h, 2).unwrap();
        assert_eq!(inner.window(), 4);
        assert!(sft_equivalent(&inner, &outer).unwrap());
        let golden = sft_build(2, 2, &[Word::parse("11", 2).unwrap()], Sided::TwoSided).unwrap();
        assert!(sft_equivalent(&inner, &golden).unwrap());
    }

    #[test]
    fn baker_rect_brackets_respect_past() {
        let sys = SystemSpec::baker(2);
        let q = |s: &str| parse(s).unwrap();
        // the quarter square x in (1/2,1), y in (1/2,1): future 1, past 1 forbidden
        let h = Hole::Rects(
            Hole2D::new(vec![HoleRect::new(
                Interval::new(q("1/2"), q("1")),
                Interval::new(q("1/2"), q("1")),
            )])
            .unwrap(),
        );
        let inner = inner_sft(&sys, &h, 1).unwrap();
        assert_eq!(forbidden(&inner), words(&["11"]));
        let outer = outer_sft(&sys, &h, 1).unwrap();
        assert_eq!(forbidden(&outer), words(&["11"]));
    }

    #[test]
    fn reversed_past_indices() {
        assert_eq!(reversed_indices(2, 2), vec![0, 2, 1, 3]);
        assert_eq!(reversed_indices(3, 1), vec![0, 1, 2]);
    }
}
