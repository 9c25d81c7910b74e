//! The even shift and explicit witnesses that no interval hole of the doubling
//! map, and no rectangle hole of the Baker map, excludes exactly it.
//!
//! Membership of the hole uses its closure for the Baker map, matching the
//! survivor semantics used everywhere else; on the circle the witnesses follow
//! the open-hole scan of `x_n = .01^{2n+1}` and `y_n = .01^{2n}`.

use crate::error::{Error, Result};
use crate::hole::{Hole1D, Hole2D};
use crate::rational::{self, Rational};
use crate::system::{Point, SystemKind, SystemSpec};
use crate::word::{Code, Word};
use num::{One, Zero};
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};

/// Approximant search range and how far the Baker orbit is followed past the
/// block of ones.
const REACH: i64 = 64;

/// Length-`len` factors of the even shift, read off its two-state follower
/// graph (`a -0-> a`, `a -1-> b`, `b -1-> a`) from either state.
pub fn even_language(len: usize) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    let mut stack: Vec<(Vec<u8>, bool)> = vec![(Vec::new(), false), (Vec::new(), true)];
    while let Some((w, odd)) = stack.pop() {
        if w.len() == len {
            out.insert(Word::new_unchecked(w, 2));
            continue;
        }
        if !odd {
            let mut v = w.clone();
            v.push(0);
            stack.push((v, false));
        }
        let mut v = w;
        v.push(1);
        stack.push((v, !odd));
    }
    out
}

/// Every run of ones with a zero on both sides has even length. A leading run
/// is free.
fn runs_even(symbols: &[u8]) -> bool {
    let mut run: Option<usize> = None;
    for &s in symbols {
        match (s, run.as_mut()) {
            (1, Some(r)) => *r += 1,
            (0, Some(r)) => {
                if *r % 2 == 1 {
                    return false;
                }
                *r = 0;
            }
            (0, None) => run = Some(0),
            _ => {}
        }
    }
    true
}

/// A one-sided eventually periodic binary code lies in the even shift.
pub fn code_in_even_shift(code: &Code) -> bool {
    let mut s = code.preperiod().to_vec();
    for _ in 0..3 {
        s.extend_from_slice(code.period());
    }
    code.alphabet_size() == 2 && runs_even(&s)
}

/// Value of an eventually periodic code in base `n`.
pub fn code_value(code: &Code) -> Rational {
    let n = code.alphabet_size();
    let pre = code.preperiod();
    let per = code.period();
    let head = digits_value(pre, n);
    let cycle = digits_value(per, n) / (Rational::one() - rational::inv_pow(n, per.len()));
    head + cycle * rational::inv_pow(n, pre.len())
}

fn digits_value(d: &[u8], n: usize) -> Rational {
    d.iter()
        .enumerate()
        .map(|(i, &s)| rational::int(s as i64) * rational::inv_pow(n, i + 1))
        .sum()
}

/// A binary bi-infinite sequence with finitely many ones, and a dot position.
/// The point has future `s_d s_{d+1}…` as `x` and past `s_{d-1} s_{d-2}…` as `y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSequence {
    ones: BTreeSet<i64>,
    dot: i64,
}

impl FiniteSequence {
    fn block(start: i64, len: i64, dot: i64) -> FiniteSequence {
        FiniteSequence {
            ones: (start..start + len).collect(),
            dot,
        }
    }

    pub fn point(&self) -> Point {
        let half = |k: i64| rational::inv_pow(2, k as usize);
        let x = self.ones.range(self.dot..).map(|&j| half(j - self.dot + 1)).sum();
        let y = self.ones.range(..self.dot).map(|&j| half(self.dot - j)).sum();
        Point::square(x, y)
    }

    pub fn in_even_shift(&self) -> bool {
        let (Some(&lo), Some(&hi)) = (self.ones.first(), self.ones.last()) else {
            return true;
        };
        let s: Vec<u8> = (lo - 1..=hi + 1).map(|j| u8::from(self.ones.contains(&j))).collect();
        runs_even(&s)
    }
}

impl std::fmt::Display for FiniteSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lo = self.ones.first().copied().unwrap_or(self.dot).min(self.dot);
        let hi = self.ones.last().copied().unwrap_or(self.dot).max(self.dot);
        write!(f, "0^∞")?;
        for j in lo..=hi {
            if j == self.dot {
                write!(f, ".")?;
            }
            write!(f, "{}", u8::from(self.ones.contains(&j)))?;
        }
        write!(f, "0^∞")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    MustBeInHole,
    MustBeOutsideHole,
    CornerPigeonhole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Code outside the even shift; its orbit has to meet the hole.
    MustMeetHole,
    /// Code in the even shift; its orbit has to avoid the hole.
    MustAvoidHole,
    /// A hole corner already taken by a smaller candidate.
    UsedCorner,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointCode {
    OneSided(Code),
    TwoSided(FiniteSequence),
}

impl Serialize for PointCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PointCode::OneSided(c) => s.collect_str(c),
            PointCode::TwoSided(q) => s.collect_str(q),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessPoint {
    pub role: Role,
    pub point: Point,
    pub code: PointCode,
    pub in_hole: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub candidate_index: usize,
    pub points: Vec<WitnessPoint>,
    pub facts: Vec<String>,
}

fn x_code(n: usize) -> Code {
    let mut w = vec![0];
    w.extend(std::iter::repeat(1).take(2 * n + 1));
    Code::terminating(&w, 2).expect("binary")
}

fn y_code(n: usize) -> Code {
    let mut w = vec![0];
    w.extend(std::iter::repeat(1).take(2 * n));
    Code::terminating(&w, 2).expect("binary")
}

/// The orbit `σ^k c`, `k ≥ start`, up to its fixed point `0^∞`.
fn tail_orbit(c: &Code, start: usize) -> Vec<Code> {
    let mut out = Vec::new();
    let mut cur = c.shift(start);
    loop {
        let done = cur.preperiod().is_empty();
        out.push(cur.clone());
        if done {
            return out;
        }
        cur = cur.shift(1);
    }
}

fn circle_point(role: Role, code: Code, hole: &Hole1D) -> WitnessPoint {
    let x = code_value(&code);
    WitnessPoint {
        role,
        in_hole: hole.contains_open(&x),
        point: Point::circle(x),
        code: PointCode::OneSided(code),
    }
}

/// Scans `n = 0, 1, …`: the orbit of `y_n` and the strict tail of `x_n` lie in
/// the even shift and must avoid the hole, while `x_n` itself must lie in it.
/// Since `x_{n-1} < y_n < x_n` and `0` must be avoided, an interval holds at
/// most one `x_n`, so the scan stops by `n = p`.
pub fn ies_even_witness(hole: &Hole1D) -> Result<Witness> {
    let p = hole.len();
    for n in 0..=p + 1 {
        for c in tail_orbit(&y_code(n), 0).into_iter().chain(tail_orbit(&x_code(n), 1)) {
            let wp = circle_point(Role::MustAvoidHole, c, hole);
            if wp.in_hole {
                let fact = format!("{} has an even-shift code and lies in the hole", wp.point);
                return Ok(Witness {
                    kind: WitnessKind::MustBeOutsideHole,
                    candidate_index: n,
                    points: vec![wp],
                    facts: vec![fact],
                });
            }
        }
        let wp = circle_point(Role::MustMeetHole, x_code(n), hole);
        if !wp.in_hole {
            let facts = vec![
                format!("{} has a code outside the even shift", wp.point),
                "every later point of its orbit has an even-shift code".to_string(),
                format!("{} is not in the hole", wp.point),
            ];
            return Ok(Witness {
                kind: WitnessKind::MustBeInHole,
                candidate_index: n,
                points: vec![wp],
                facts,
            });
        }
    }
    Err(Error::Invariant(format!(
        "no even-shift witness within {} candidates",
        p + 2
    )))
}

fn square_point(role: Role, seq: FiniteSequence, hole: &Hole2D) -> WitnessPoint {
    let point = seq.point();
    WitnessPoint {
        role,
        in_hole: hole.contains_closed(&point),
        point,
        code: PointCode::TwoSided(seq),
    }
}

/// Even-shift points converging to the orbit point `seq` from the left
/// (same `y`) and from below (same `x`), where the block `[0, len)` allows it.
fn approximants(seq: &FiniteSequence, len: i64, i: i64) -> Vec<FiniteSequence> {
    let mut out = Vec::new();
    let last = len - 1;
    if seq.dot <= last {
        let mut ones = seq.ones.clone();
        ones.remove(&last);
        ones.extend(len..len + 2 * i);
        out.push(FiniteSequence { ones, dot: seq.dot });
    }
    if seq.dot >= 1 {
        let mut ones = seq.ones.clone();
        ones.remove(&0);
        ones.extend(-2 * i..0);
        out.push(FiniteSequence { ones, dot: seq.dot });
    }
    out
}

/// Lower-left corners of the closed hole.
fn lower_left_corners(hole: &Hole2D) -> BTreeSet<(Rational, Rational)> {
    hole.rects()
        .iter()
        .map(|r| {
            let y = if r.full_height { Rational::zero() } else { r.y.lo.clone() };
            (r.x.lo.clone(), y)
        })
        .collect()
}

/// Scans the orbits of `0^∞ 1^{2n+1} 0^∞`. Each such orbit must meet the
/// closed hole, yet approximants from the left and from below lie in the even
/// shift, so the orbit can only touch the hole at a lower-left corner, and
/// distinct `n` need distinct corners. The witness is the first orbit that
/// breaks this: it misses the hole, or an approximant falls in.
pub fn res_even_witness(sys: &SystemSpec, hole: &Hole2D) -> Result<Witness> {
    sys.validate()?;
    if sys.kind != SystemKind::Baker || sys.branches != 2 {
        return Err(Error::WrongSystem {
            expected: "two-branch baker",
        });
    }
    let corners = lower_left_corners(hole);
    let mut used: BTreeMap<(Rational, Rational), (usize, FiniteSequence)> = BTreeMap::new();
    let c = hole.corner_count();
    for n in 0..=c {
        let len = 2 * n as i64 + 1;
        let mut corner = None;
        let mut touched = false;
        for dot in -REACH..=len + REACH {
            let seq = FiniteSequence::block(0, len, dot);
            let point = seq.point();
            if !hole.contains_closed(&point) {
                continue;
            }
            touched = true;
            for i in 1..=REACH {
                for a in approximants(&seq, len, i) {
                    let wp = square_point(Role::MustAvoidHole, a, hole);
                    if wp.in_hole {
                        let orbit = square_point(Role::MustMeetHole, seq, hole);
                        let facts = vec![
                            format!("{} has an even-shift code and lies in the closed hole", wp.point),
                            format!("it approximates {}, whose orbit must meet the hole", orbit.point),
                        ];
                        return Ok(Witness {
                            kind: WitnessKind::MustBeOutsideHole,
                            candidate_index: n,
                            points: vec![wp, orbit],
                            facts,
                        });
                    }
                }
            }
            let key = (point.x.clone(), point.y.clone().expect("square point"));
            if corners.contains(&key) && !used.contains_key(&key) {
                corner = Some((key, seq));
            }
        }
        match corner {
            Some((key, seq)) => {
                used.insert(key, (n, seq));
            }
            None => {
                let seq = FiniteSequence::block(0, len, 0);
                let wp = square_point(Role::MustMeetHole, seq, hole);
                let exhausted = !used.is_empty() && used.len() == corners.len();
                let mut points = vec![wp];
                let mut facts = vec![format!(
                    "the orbit of {} has a code outside the even shift",
                    points[0].point
                )];
                let kind = if exhausted {
                    for (k, s) in used.values() {
                        let u = square_point(Role::UsedCorner, s.clone(), hole);
                        facts.push(format!("corner {} is taken by candidate {k}", u.point));
                        points.push(u);
                    }
                    facts.push("no lower-left corner of the hole is left for this orbit".into());
                    WitnessKind::CornerPigeonhole
                } else if touched {
                    facts.push("the orbit touches the hole only away from free lower-left corners".into());
                    WitnessKind::MustBeInHole
                } else {
                    facts.push("the orbit never meets the closed hole".into());
                    WitnessKind::MustBeInHole
                };
                return Ok(Witness {
                    kind,
                    candidate_index: n,
                    points,
                    facts,
                });
            }
        }
    }
    Err(Error::Invariant(format!(
        "{} candidates found distinct corners among {} corners",
        c + 1,
        c
    )))
}

/// Re-checks every recorded fact of a witness from its codes alone.
pub fn verify_witness(sys: &SystemSpec, hole: &crate::hole::Hole, w: &Witness) -> Result<bool> {
    for p in &w.points {
        let (value_ok, member, in_hole) = match (&p.code, sys.kind) {
            (PointCode::OneSided(c), SystemKind::Circle) => {
                let x = code_value(c);
                let h = hole.intervals()?;
                let member = match p.role {
                    // the strict tail is what lies in the shift
                    Role::MustMeetHole => code_in_even_shift(c) || !code_in_even_shift(&c.shift(1)),
                    _ => code_in_even_shift(c),
                };
                (Point::circle(x.clone()) == p.point, member, h.contains_open(&x))
            }
            (PointCode::TwoSided(s), SystemKind::Baker) => {
                let pt = s.point();
                let h = hole.rects();
                let inside = h.contains_closed(&pt);
                (pt == p.point, s.in_even_shift(), inside)
            }
            _ => return Ok(false),
        };
        if !value_ok || in_hole != p.in_hole {
            return Ok(false);
        }
        let role_ok = match p.role {
            Role::MustAvoidHole => member,
            Role::MustMeetHole | Role::UsedCorner => !member,
        };
        if !role_ok {
            return Ok(false);
        }
    }
    let first = match w.points.first() {
        Some(p) => p,
        None => return Ok(false),
    };
    Ok(match w.kind {
        WitnessKind::MustBeOutsideHole => first.role == Role::MustAvoidHole && first.in_hole,
        WitnessKind::MustBeInHole => {
            first.role == Role::MustMeetHole && (sys.kind == SystemKind::Baker || !first.in_hole)
        }
        WitnessKind::CornerPigeonhole => {
            w.points[1..].iter().all(|p| p.role == Role::UsedCorner && p.in_hole)
        }
    })
}
