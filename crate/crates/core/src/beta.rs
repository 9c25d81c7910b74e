//! Beta-numbers as thresholds of `g(x) = n·x mod 1`, the beta-shift languages
//! they define, and their realization as strip holes of the Baker map.

use crate::bracket::oracle_language;
use crate::error::{Error, Result};
use crate::hole::{Hole, Hole2D, HoleRect};
use crate::rational::{self, Rational};
use crate::system::{orbit_summary, Point, SystemSpec};
use crate::word::{lt_order, Code, Word};
use num::{One, Zero};
use serde::Serialize;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BetaThreshold {
    #[serde(with = "rational::serde_str")]
    pub t: Rational,
    pub branches: usize,
}

impl BetaThreshold {
    pub fn new(t: Rational, branches: usize) -> Result<BetaThreshold> {
        SystemSpec::circle(branches).validate()?;
        if t <= Rational::zero() || t >= Rational::one() {
            return Err(Error::InvalidArgument(format!(
                "threshold {} must lie in (0,1)",
                rational::format(&t)
            )));
        }
        Ok(BetaThreshold { t, branches })
    }

    pub fn parse(t: &str, branches: usize) -> Result<BetaThreshold> {
        BetaThreshold::new(rational::parse(t)?, branches)
    }

    fn label(&self) -> String {
        rational::format(&self.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BetaCheck {
    pub is_beta: bool,
    /// Least `k ≥ 1` with `g^k(t) ≥ t`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure_index: Option<usize>,
}

/// `g^k(t) < t` for every `k ≥ 1`, decided on the exact orbit.
pub fn is_beta_number(bt: &BetaThreshold) -> Result<BetaCheck> {
    let orbit = orbit_summary(&SystemSpec::circle(bt.branches), &Point::circle(bt.t.clone()))?;
    let horizon = orbit.preperiod + orbit.period;
    let failure_index = (1..=horizon).find(|&k| orbit.state(k).x >= bt.t);
    Ok(BetaCheck {
        is_beta: failure_index.is_none(),
        failure_index,
    })
}

fn require_beta(bt: &BetaThreshold) -> Result<()> {
    match is_beta_number(bt)?.failure_index {
        None => Ok(()),
        Some(k) => Err(Error::NotBetaNumber(bt.label(), k)),
    }
}

/// Greedy `n`-ary expansion of `t`: the itinerary with `x ∈ [j/n, (j+1)/n)`
/// coded `j`.
pub fn expansion(bt: &BetaThreshold) -> Result<Code> {
    let orbit = orbit_summary(&SystemSpec::circle(bt.branches), &Point::circle(bt.t.clone()))?;
    let n = rational::int(bt.branches as i64);
    let digit = |k: usize| rational::floor_usize(&(&orbit.state(k).x * &n)) as u8;
    let pre = (0..orbit.preperiod).map(digit).collect();
    let per = (orbit.preperiod..orbit.preperiod + orbit.period).map(digit).collect();
    Code::new(pre, per, bt.branches)
}

/// `β̂`, checked against `σ^k β̂ < β̂` on the decidable range.
pub fn beta_code_stream(bt: &BetaThreshold) -> Result<Code> {
    require_beta(bt)?;
    let code = expansion(bt)?;
    for k in 1..=code.preperiod().len() + code.period().len() {
        if !lt_order(&code.shift(k), &code)? {
            return Err(Error::Invariant(format!(
                "shift {k} of the code of {} is not below it",
                bt.label()
            )));
        }
    }
    Ok(code)
}

/// First `len` symbols of `β̂`.
pub fn beta_code(bt: &BetaThreshold, len: usize) -> Result<Word> {
    Ok(beta_code_stream(bt)?.prefix(len))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "tag")]
pub enum BetaClass {
    FiniteType { digits: String },
    Sofic { preperiod: String, period: String },
    /// No eventual period was seen in the first `horizon` digits of a stream.
    /// Not a proof of anything.
    NotSoficWithinHorizon { horizon: usize },
}

fn digits(d: &[u8]) -> String {
    d.iter().map(|s| char::from(b'0' + s)).collect()
}

pub fn classify_beta_threshold(bt: &BetaThreshold) -> Result<BetaClass> {
    let code = beta_code_stream(bt)?;
    if rational::is_terminating(&bt.t, bt.branches) {
        Ok(BetaClass::FiniteType {
            digits: digits(code.preperiod()),
        })
    } else {
        Ok(BetaClass::Sofic {
            preperiod: digits(code.preperiod()),
            period: digits(code.period()),
        })
    }
}

/// Classifies an externally supplied digit stream by looking for a repeated
/// tail in its first `horizon` digits. A found repeat is only evidence, so the
/// stream is reported `Sofic` or `FiniteType` with the observed pattern.
pub fn classify_digit_stream(stream: impl IntoIterator<Item = u8>, horizon: usize) -> BetaClass {
    let d: Vec<u8> = stream.into_iter().take(horizon).collect();
    let len = d.len();
    // a period holding over the whole second half of the horizon
    for per in 1..=len / 4 {
        let start = len / 2;
        if (start..len).all(|i| d[i] == d[i - per]) {
            let mut pre = start - per;
            while pre > 0 && d[pre - 1] == d[pre - 1 + per] {
                pre -= 1;
            }
            let period = &d[pre..pre + per];
            if period.iter().all(|&s| s == 0) {
                return BetaClass::FiniteType { digits: digits(&d[..pre]) };
            }
            return BetaClass::Sofic {
                preperiod: digits(&d[..pre]),
                period: digits(period),
            };
        }
    }
    BetaClass::NotSoficWithinHorizon { horizon }
}

/// The quasi-greedy expansion `β*`: equal to `β̂` unless `β̂` terminates as
/// `d_1…d_k 0^∞`, in which case it is `(d_1…d_{k-1}(d_k−1))^∞`.
fn quasi_greedy(code: &Code) -> Result<Code> {
    let terminating = code.period() == [0];
    if !terminating {
        return Ok(code.clone());
    }
    let mut block = code.preperiod().to_vec();
    let last = block.last_mut().expect("nonzero threshold");
    *last -= 1;
    Code::new(Vec::new(), block, code.alphabet_size())
}

/// Follower automaton of the beta-shift: state `k` means the last `k` symbols
/// match the first `k` of `β*`, folded onto the eventually periodic tail.
#[derive(Debug, Clone)]
pub struct BetaAutomaton {
    star: Code,
    states: usize,
}

impl BetaAutomaton {
    pub fn new(bt: &BetaThreshold) -> Result<BetaAutomaton> {
        let star = quasi_greedy(&beta_code_stream(bt)?)?;
        let states = star.preperiod().len() + star.period().len();
        Ok(BetaAutomaton { star, states })
    }

    fn fold(&self, k: usize) -> usize {
        let pre = self.star.preperiod().len();
        if k < self.states {
            k
        } else {
            pre + (k - pre) % self.star.period().len()
        }
    }

    /// Next state, or `None` when `symbol` exceeds `β*` at this position.
    pub fn step(&self, state: usize, symbol: u8) -> Option<usize> {
        let b = self.star.symbol_at(state);
        match symbol.cmp(&b) {
            std::cmp::Ordering::Less => Some(0),
            std::cmp::Ordering::Equal => Some(self.fold(state + 1)),
            std::cmp::Ordering::Greater => None,
        }
    }

    pub fn accepts(&self, w: &Word) -> bool {
        w.symbols()
            .iter()
            .try_fold(0, |s, &a| self.step(s, a))
            .is_some()
    }
}

/// Length-`len` words of the one-sided beta-shift.
pub fn beta_language(bt: &BetaThreshold, len: usize) -> Result<BTreeSet<Word>> {
    let auto = BetaAutomaton::new(bt)?;
    let n = bt.branches;
    let mut out = BTreeSet::new();
    let mut stack: Vec<(Vec<u8>, usize)> = vec![(Vec::new(), 0)];
    while let Some((w, s)) = stack.pop() {
        if w.len() == len {
            out.insert(Word::new_unchecked(w, n));
            continue;
        }
        for a in 0..n as u8 {
            if let Some(next) = auto.step(s, a) {
                let mut v = w.clone();
                v.push(a);
                stack.push((v, next));
            }
        }
    }
    Ok(out)
}

/// The full-height strip `(t,1) × [0,1]` in the `n`-branch Baker map.
pub fn beta_res_hole(bt: &BetaThreshold) -> Result<(SystemSpec, Hole)> {
    require_beta(bt)?;
    let strip = HoleRect::strip(bt.t.clone(), Rational::one());
    Ok((SystemSpec::baker(bt.branches), Hole::Rects(Hole2D::new(vec![strip])?)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub len: usize,
    pub word: String,
    /// Present in the oracle language but not the beta language, or the reverse.
    pub in_oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub equal: bool,
    pub max_len: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

/// Compares the future-coordinate oracle language of the strip hole with the
/// beta language at every length `1..=max_len`.
pub fn verify_beta_res(bt: &BetaThreshold, max_len: usize) -> Result<VerificationReport> {
    let (sys, hole) = beta_res_hole(bt)?;
    for len in 1..=max_len {
        let oracle = oracle_language(&sys, &hole, len)?;
        let beta = beta_language(bt, len)?;
        let diff = oracle
            .symmetric_difference(&beta)
            .next()
            .map(|w| Counterexample {
                len,
                word: w.to_string(),
                in_oracle: oracle.contains(w),
            });
        if let Some(c) = diff {
            return Ok(VerificationReport {
                equal: false,
                max_len,
                counterexample: Some(c),
            });
        }
    }
    Ok(VerificationReport {
        equal: true,
        max_len,
        counterexample: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bt(t: &str) -> BetaThreshold {
        BetaThreshold::parse(t, 2).unwrap()
    }

    fn words(list: &[&str]) -> BTreeSet<Word> {
        list.iter().map(|s| Word::parse(s, 2).unwrap()).collect()
    }

    /// Every suffix of `w` is at most the prefix of `β*` of the same length.
    fn brute_admissible(star: &Code, w: &[u8]) -> bool {
        (0..w.len()).all(|i| {
            let s = &w[i..];
            s <= star.prefix(s.len()).symbols()
        })
    }

    #[test]
    fn beta_number_examples() {
        assert!(is_beta_number(&bt("3/4")).unwrap().is_beta);
        assert!(is_beta_number(&bt("5/6")).unwrap().is_beta);
        let c = is_beta_number(&bt("2/3")).unwrap();
        assert_eq!((c.is_beta, c.failure_index), (false, Some(2)));
        assert_eq!(
            classify_beta_threshold(&bt("2/3")),
            Err(Error::NotBetaNumber("2/3".into(), 2))
        );
        assert!(BetaThreshold::parse("1", 2).is_err());
    }

    #[test]
    fn classes() {
        assert_eq!(
            classify_beta_threshold(&bt("3/4")).unwrap(),
            BetaClass::FiniteType { digits: "11".into() }
        );
        assert_eq!(
            classify_beta_threshold(&bt("5/6")).unwrap(),
            BetaClass::Sofic {
                preperiod: "1".into(),
                period: "10".into()
            }
        );
        assert_eq!(
            classify_beta_threshold(&bt("13/16")).unwrap(),
            BetaClass::FiniteType { digits: "1101".into() }
        );
    }

    #[test]
    fn digit_streams() {
        assert_eq!(
            classify_digit_stream([1, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0], 11),
            BetaClass::Sofic {
                preperiod: "1".into(),
                period: "10".into()
            }
        );
        // ones at square positions never settle
        let squares = (0..200usize).map(|i| u8::from((1..20).any(|k| k * k == i + 1)));
        assert_eq!(
            classify_digit_stream(squares, 200),
            BetaClass::NotSoficWithinHorizon { horizon: 200 }
        );
    }

    #[test]
    fn codes() {
        assert_eq!(beta_code(&bt("3/4"), 4).unwrap().to_string(), "1100");
        assert_eq!(beta_code(&bt("5/6"), 5).unwrap().to_string(), "11010");
        assert_eq!(beta_code(&bt("1/2"), 3).unwrap().to_string(), "100");
    }

    #[test]
    fn languages() {
        assert_eq!(
            beta_language(&bt("3/4"), 3).unwrap(),
            words(&["000", "001", "010", "100", "101"])
        );
        assert_eq!(beta_language(&bt("1/2"), 4).unwrap(), words(&["0000"]));
        // brute force over all 8 words against β* = 1(10)^∞
        let star = quasi_greedy(&expansion(&bt("5/6")).unwrap()).unwrap();
        let expected: BTreeSet<Word> = (0..8)
            .map(|i| Word::from_index(i, 3, 2))
            .filter(|w| brute_admissible(&star, w.symbols()))
            .collect();
        assert_eq!(beta_language(&bt("5/6"), 3).unwrap(), expected);
        assert_eq!(expected, words(&["000", "001", "010", "011", "100", "101", "110"]));
    }

    #[test]
    fn strip_holes() {
        let (sys, hole) = beta_res_hole(&bt("3/4")).unwrap();
        assert!(sys.is_baker());
        assert!(hole.rects().rects()[0].full_height);
        assert!(beta_res_hole(&bt("2/3")).is_err());
    }

    #[test]
    fn res_verification() {
        for t in ["3/4", "5/6", "1/2"] {
            let r = verify_beta_res(&bt(t), 6).unwrap();
            assert!(r.equal, "{t}: {:?}", r.counterexample);
        }
    }

    fn small_beta() -> impl Strategy<Value = BetaThreshold> {
        (1i64..40, 2i64..41)
            .prop_filter("proper fraction", |(p, q)| p < q)
            .prop_filter_map("beta number", |(p, q)| {
                let b = BetaThreshold::new(rational::ratio(p, q), 2).ok()?;
                is_beta_number(&b).ok()?.is_beta.then_some(b)
            })
    }

    proptest! {
        #[test]
        fn automaton_matches_suffix_rule(b in small_beta(), len in 1usize..9) {
            let star = quasi_greedy(&expansion(&b).unwrap()).unwrap();
            let expected: BTreeSet<Word> = (0..1u64 << len)
                .map(|i| Word::from_index(i, len, 2))
                .filter(|w| brute_admissible(&star, w.symbols()))
                .collect();
            prop_assert_eq!(beta_language(&b, len).unwrap(), expected);
        }

        #[test]
        fn languages_grow_with_threshold(a in small_beta(), b in small_beta(), len in 1usize..8) {
            let (lo, hi) = if a.t <= b.t { (a, b) } else { (b, a) };
            let small = beta_language(&lo, len).unwrap();
            let big = beta_language(&hi, len).unwrap();
            prop_assert!(small.is_subset(&big));
        }

        #[test]
        fn code_dominates_its_shifts(b in small_beta()) {
            let code = beta_code_stream(&b).unwrap();
            for k in 1..=code.preperiod().len() + code.period().len() {
                prop_assert!(lt_order(&code.shift(k), &code).unwrap());
            }
        }
    }
}
