//! The two model systems: `x ↦ n·x mod 1` on the circle and the `n`-branch
//! Baker map on the unit square, both coded by the standard partition into
//! `n` vertical strips.

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::sft::Sided;
use crate::word::Word;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Circle,
    Baker,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: SystemKind,
    pub branches: usize,
}

impl SystemSpec {
    pub fn circle(branches: usize) -> SystemSpec {
        SystemSpec {
            kind: SystemKind::Circle,
            branches,
        }
    }

    pub fn baker(branches: usize) -> SystemSpec {
        SystemSpec {
            kind: SystemKind::Baker,
            branches,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=10).contains(&self.branches) {
            return Err(Error::InvalidArgument(format!(
                "branches must be in 2..=10, got {}",
                self.branches
            )));
        }
        Ok(())
    }

    pub fn is_baker(&self) -> bool {
        self.kind == SystemKind::Baker
    }

    pub fn sided(&self) -> Sided {
        match self.kind {
            SystemKind::Circle => Sided::OneSided,
            SystemKind::Baker => Sided::TwoSided,
        }
    }

    fn n(&self) -> Rational {
        rational::int(self.branches as i64)
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SystemKind::Circle => write!(f, "circle({})", self.branches),
            SystemKind::Baker => write!(f, "baker({})", self.branches),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "rational::serde_str")]
    pub x: Rational,
    #[serde(
        with = "rational::serde_opt",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub y: Option<Rational>,
}

impl Point {
    pub fn circle(x: Rational) -> Point {
        Point { x, y: None }
    }

    pub fn square(x: Rational, y: Rational) -> Point {
        Point { x, y: Some(y) }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.y {
            None => write!(f, "{}", rational::format(&self.x)),
            Some(y) => write!(f, "({}, {})", rational::format(&self.x), rational::format(y)),
        }
    }
}

fn in_unit(v: &Rational) -> bool {
    !v.is_negative() && v < &Rational::one()
}

pub fn check_point(sys: &SystemSpec, p: &Point) -> Result<()> {
    let ok = in_unit(&p.x)
        && match (sys.kind, &p.y) {
            (SystemKind::Circle, None) => true,
            (SystemKind::Baker, Some(y)) => in_unit(y),
            _ => false,
        };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("point {p} is not valid for {sys}")))
    }
}

/// One application of the map. On the Baker map the right branch is used at
/// `x = s/n`.
pub fn map_step(sys: &SystemSpec, p: &Point) -> Result<Point> {
    check_point(sys, p)?;
    Ok(step_unchecked(sys, p))
}

pub(crate) fn step_unchecked(sys: &SystemSpec, p: &Point) -> Point {
    let nx = &p.x * sys.n();
    let s = nx.floor();
    let x = &nx - &s;
    let y = p.y.as_ref().map(|y| (y + &s) / sys.n());
    Point { x, y }
}

/// Preimage through the inverse branch `past_symbol` (Baker only).
pub fn map_step_inverse(sys: &SystemSpec, p: &Point, past_symbol: usize) -> Result<Point> {
    if sys.kind != SystemKind::Baker {
        return Err(Error::WrongSystem { expected: "baker" });
    }
    check_point(sys, p)?;
    if past_symbol >= sys.branches {
        return Err(Error::InvalidSymbol {
            symbol: past_symbol.min(255) as u8,
            alphabet: sys.branches,
        });
    }
    let s = rational::int(past_symbol as i64);
    let y = p.y.as_ref().expect("checked");
    let ny = y * sys.n() - &s;
    if !in_unit(&ny) {
        return Err(Error::InvalidArgument(format!(
            "y = {} is not in the image of branch {past_symbol}",
            rational::format(y)
        )));
    }
    Ok(Point {
        x: (&p.x + s) / sys.n(),
        y: Some(ny),
    })
}

/// The past symbol of a Baker point: the branch its y-coordinate came from.
#[cfg(test)]
pub(crate) fn past_symbol(sys: &SystemSpec, p: &Point) -> usize {
    rational::floor_usize(&(p.y.as_ref().expect("baker point") * sys.n()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSummary {
    pub preperiod: usize,
    pub period: usize,
    pub states: Vec<Point>,
}

impl OrbitSummary {
    /// State at time `k ≥ 0`.
    pub fn state(&self, k: usize) -> &Point {
        if k < self.states.len() {
            &self.states[k]
        } else {
            &self.states[self.preperiod + (k - self.preperiod) % self.period]
        }
    }
}

/// Exact orbit with its preperiod and period.
///
/// Circle orbits of rationals always close up. The Baker map is invertible,
/// so a Baker orbit is eventually periodic only when the point is periodic;
/// any other point is reported as [`Error::Aperiodic`].
pub fn orbit_summary(sys: &SystemSpec, p: &Point) -> Result<OrbitSummary> {
    check_point(sys, p)?;
    if sys.is_baker() {
        let x_orbit = orbit_summary(&SystemSpec::circle(sys.branches), &Point::circle(p.x.clone()))?;
        let mut cur = p.clone();
        let mut states = Vec::with_capacity(x_orbit.period);
        for _ in 0..x_orbit.period {
            let next = step_unchecked(sys, &cur);
            states.push(cur);
            cur = next;
        }
        if x_orbit.preperiod > 0 || &cur != p {
            return Err(Error::Aperiodic(p.to_string()));
        }
        return Ok(OrbitSummary {
            preperiod: 0,
            period: x_orbit.period,
            states,
        });
    }
    let mut seen: HashMap<Point, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut cur = p.clone();
    loop {
        if let Some(&first) = seen.get(&cur) {
            return Ok(OrbitSummary {
                preperiod: first,
                period: states.len() - first,
                states,
            });
        }
        seen.insert(cur.clone(), states.len());
        let next = step_unchecked(sys, &cur);
        states.push(cur);
        cur = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rational::serde_str")]
    pub lo: Rational,
    #[serde(with = "rational::serde_str")]
    pub hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Interval {
        Interval { lo, hi }
    }

    pub fn unit() -> Interval {
        Interval::new(Rational::zero(), Rational::one())
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Intersection when it has positive length.
    pub fn meet(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo);
        let hi = (&self.hi).min(&other.hi);
        (lo < hi).then(|| Interval::new(lo.clone(), hi.clone()))
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn covers(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rational::format(&self.lo), rational::format(&self.hi))
    }
}

/// A closed box; `y` is absent on the circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: Interval,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Interval>,
}

impl Cell {
    pub fn meet(&self, other: &Cell) -> Option<Cell> {
        let x = self.x.meet(&other.x)?;
        let y = match (&self.y, &other.y) {
            (Some(a), Some(b)) => Some(a.meet(b)?),
            (None, None) => None,
            _ => return None,
        };
        Some(Cell { x, y })
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.x.contains(&p.x)
            && match (&self.y, &p.y) {
                (Some(iy), Some(y)) => iy.contains(y),
                (None, None) => true,
                _ => false,
            }
    }

    pub fn area(&self) -> Rational {
        let w = self.x.length();
        match &self.y {
            Some(y) => w * y.length(),
            None => w,
        }
    }
}

/// `Σ s_i n^{-i-1}` over the given digits.
pub(crate) fn digits_value(digits: impl IntoIterator<Item = u8>, n: usize) -> Rational {
    let mut v = Rational::zero();
    let mut scale = Rational::one();
    let nr = rational::int(n as i64);
    for d in digits {
        scale /= &nr;
        v += &scale * rational::int(d as i64);
    }
    v
}

/// Cylinder of a one-sided word (`past` empty) or of the two-sided word
/// `past . future`, where `past` lists `s_{-j} … s_{-1}`.
pub fn cylinder_box(sys: &SystemSpec, past: &[u8], future: &[u8]) -> Result<Cell> {
    let n = sys.branches;
    if let Some(&s) = past.iter().chain(future).find(|&&s| s as usize >= n) {
        return Err(Error::InvalidSymbol { symbol: s, alphabet: n });
    }
    let x0 = digits_value(future.iter().copied(), n);
    let x = Interval::new(x0.clone(), x0 + rational::inv_pow(n, future.len()));
    let y = match sys.kind {
        SystemKind::Circle if !past.is_empty() => {
            return Err(Error::WrongSystem { expected: "baker" })
        }
        SystemKind::Circle => None,
        SystemKind::Baker => {
            let y0 = digits_value(past.iter().rev().copied(), n);
            Some(Interval::new(y0.clone(), y0 + rational::inv_pow(n, past.len())))
        }
    };
    Ok(Cell { x, y })
}

/// All length-`len` digit strings of `v ∈ [0,1]` compatible with closed
/// cylinders: an interior `n`-adic point has two.
fn digit_codes(v: &Rational, n: usize, len: usize) -> Vec<Vec<u8>> {
    let nr = rational::int(n as i64);
    let mut out = Vec::new();
    let mut stack = vec![(v.clone(), Vec::with_capacity(len))];
    while let Some((v, code)) = stack.pop() {
        if code.len() == len {
            out.push(code);
            continue;
        }
        let nv = &v * &nr;
        for s in 0..n {
            let sr = rational::int(s as i64);
            let next = &nv - &sr;
            if !next.is_negative() && next <= Rational::one() {
                let mut c = code.clone();
                c.push(s as u8);
                stack.push((next, c));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Itineraries of `p` of length `len`. On the Baker map each word has length
/// `2·len`: `len` past symbols (oldest first) then `len` future symbols.
pub fn codes_of_point(sys: &SystemSpec, p: &Point, len: usize) -> Result<BTreeSet<Word>> {
    check_point(sys, p)?;
    let n = sys.branches;
    let xs = digit_codes(&p.x, n, len);
    let mut out = BTreeSet::new();
    match &p.y {
        None => {
            for c in xs {
                out.insert(Word::new(c, n)?);
            }
        }
        Some(y) => {
            for mut past in digit_codes(y, n, len) {
                past.reverse();
                for fut in &xs {
                    let mut w = past.clone();
                    w.extend_from_slice(fut);
                    out.insert(Word::new(w, n)?);
                }
            }
        }
    }
    Ok(out)
}
