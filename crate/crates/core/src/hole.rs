//! Open holes: finite unions of arcs on the circle or of axis-aligned
//! rectangles in the square.
//!
//! Holes are normalized on construction so that the closures of their pieces
//! are pairwise disjoint. Pieces whose closures meet are merged into the
//! interior of the union of closures (a warning is recorded).

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::system::{Interval, Point, SystemKind, SystemSpec};
use num::{One, Zero};
use serde::{Deserialize, Serialize};

/// An open arc of the circle `[0,1)` with `0 ≡ 1`. When `lo > hi` the arc
/// wraps through 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub lo: Rational,
    pub hi: Rational,
}

impl Arc {
    pub fn wraps(&self) -> bool {
        self.lo > self.hi
    }

    /// Linear pieces `[lo, hi] ⊆ [0,1]` of the closure.
    pub fn pieces(&self) -> Vec<Interval> {
        if self.wraps() {
            vec![
                Interval::new(Rational::zero(), self.hi.clone()),
                Interval::new(self.lo.clone(), Rational::one()),
            ]
        } else {
            vec![Interval::new(self.lo.clone(), self.hi.clone())]
        }
    }

    pub fn contains_open(&self, x: &Rational) -> bool {
        if self.wraps() {
            x > &self.lo || x < &self.hi
        } else {
            &self.lo < x && x < &self.hi
        }
    }

    pub fn contains_closed(&self, x: &Rational) -> bool {
        let one = Rational::one();
        let alias = if x.is_zero() { Some(&one) } else { None };
        self.pieces()
            .iter()
            .any(|p| p.contains(x) || alias.is_some_and(|a| p.contains(a)))
    }

    pub fn length(&self) -> Rational {
        self.pieces().iter().map(Interval::length).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Hole1D {
    arcs: Vec<Arc>,
}

fn check_unit(v: &Rational, what: &str) -> Result<()> {
    if v < &Rational::zero() || v > &Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "{what} {} lies outside [0,1]",
            rational::format(v)
        )));
    }
    Ok(())
}

impl Hole1D {
    pub fn empty() -> Hole1D {
        Hole1D::default()
    }

    pub fn new(intervals: Vec<(Rational, Rational)>) -> Result<Hole1D> {
        Ok(Hole1D::with_warnings(intervals)?.0)
    }

    /// Normalizes and reports every merge it performed.
    pub fn with_warnings(intervals: Vec<(Rational, Rational)>) -> Result<(Hole1D, Vec<String>)> {
        let mut pieces: Vec<(Interval, usize)> = Vec::new();
        for (i, (lo, hi)) in intervals.iter().enumerate() {
            check_unit(lo, "endpoint")?;
            check_unit(hi, "endpoint")?;
            let lo = if lo.is_one() { Rational::zero() } else { lo.clone() };
            let hi = if hi.is_zero() { Rational::one() } else { hi.clone() };
            if lo == hi {
                return Err(Error::InvalidArgument(format!(
                    "interval {i} is empty or a full circle"
                )));
            }
            for p in (Arc { lo, hi }).pieces() {
                pieces.push((p, i));
            }
        }
        pieces.sort();
        let mut merged: Vec<(Interval, Vec<usize>)> = Vec::new();
        for (p, i) in pieces {
            match merged.last_mut() {
                Some((last, ids)) if p.lo <= last.hi => {
                    if p.hi > last.hi {
                        last.hi = p.hi;
                    }
                    ids.push(i);
                }
                _ => merged.push((p, vec![i])),
            }
        }
        // pieces meeting at 0 ≡ 1 join into one wrapping arc
        if merged.len() > 1
            && merged[0].0.lo.is_zero()
            && merged.last().unwrap().0.hi.is_one()
        {
            let (first, ids) = merged.remove(0);
            let last = merged.last_mut().unwrap();
            last.0 = Interval::new(last.0.lo.clone(), first.hi);
            last.1.extend(ids);
        }
        let mut warnings = Vec::new();
        let mut arcs = Vec::new();
        for (p, mut ids) in merged {
            ids.sort_unstable();
            ids.dedup();
            if ids.len() > 1 {
                warnings.push(format!(
                    "intervals {ids:?} have touching or overlapping closures; merged"
                ));
            }
            arcs.push(Arc { lo: p.lo, hi: p.hi });
        }
        arcs.sort();
        Ok((Hole1D { arcs }, warnings))
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Number of intervals `p`.
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn contains_open(&self, x: &Rational) -> bool {
        self.arcs.iter().any(|a| a.contains_open(x))
    }

    pub fn contains_closed(&self, x: &Rational) -> bool {
        self.arcs.iter().any(|a| a.contains_closed(x))
    }

    /// Linear pieces of the closure, sorted.
    pub fn closure_pieces(&self) -> Vec<Interval> {
        let mut v: Vec<Interval> = self.arcs.iter().flat_map(Arc::pieces).collect();
        v.sort();
        v
    }

    /// `(a,b) ∩ H ≠ ∅` for a linear interval `[a,b]`.
    pub fn meets_open(&self, iv: &Interval) -> bool {
        self.closure_pieces()
            .iter()
            .any(|p| iv.lo < p.hi && p.lo < iv.hi)
    }

    /// `(a,b) ⊆ H̄` for a linear interval `[a,b]` with `a < b`.
    pub fn closure_covers(&self, iv: &Interval) -> bool {
        self.arcs.iter().any(|a| {
            if a.wraps() {
                iv.hi <= a.hi || iv.lo >= a.lo
            } else {
                a.lo <= iv.lo && iv.hi <= a.hi
            }
        })
    }

    /// Closed complement of `H̄` as linear intervals with nonempty interior.
    pub fn complement(&self) -> Vec<Interval> {
        let mut out = Vec::new();
        let mut cur = Rational::zero();
        for p in self.closure_pieces() {
            if p.lo > cur {
                out.push(Interval::new(cur.clone(), p.lo.clone()));
            }
            if p.hi > cur {
                cur = p.hi;
            }
        }
        if cur < Rational::one() {
            out.push(Interval::new(cur, Rational::one()));
        }
        out
    }

    /// Full-height strips over the arcs, for use on the square.
    pub fn to_strips(&self) -> Hole2D {
        let rects = self
            .closure_pieces()
            .into_iter()
            .map(|p| HoleRect::strip(p.lo, p.hi))
            .collect();
        Hole2D { rects }
    }
}

/// An open rectangle `(x1,x2) × (y1,y2)`; a full-height rectangle includes
/// the whole closed `y`-range `[0,1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HoleRect {
    pub x: Interval,
    pub y: Interval,
    pub full_height: bool,
}

impl HoleRect {
    pub fn new(x: Interval, y: Interval) -> HoleRect {
        HoleRect {
            x,
            y,
            full_height: false,
        }
    }

    pub fn strip(lo: Rational, hi: Rational) -> HoleRect {
        HoleRect {
            x: Interval::new(lo, hi),
            y: Interval::unit(),
            full_height: true,
        }
    }

    pub fn contains_open(&self, p: &Point) -> bool {
        let y = p.y.as_ref().expect("square point");
        self.x.lo < p.x && p.x < self.x.hi && (self.full_height || (&self.y.lo < y && y < &self.y.hi))
    }

    pub fn contains_closed(&self, p: &Point) -> bool {
        let y = p.y.as_ref().expect("square point");
        self.x.contains(&p.x) && self.y.contains(y)
    }

    /// Open `y`-range test for a closed `y`-interval with nonempty interior.
    pub fn y_meets_open(&self, iv: &Interval) -> bool {
        self.full_height || (iv.lo < self.y.hi && self.y.lo < iv.hi)
    }

    pub fn corners(&self) -> [Point; 4] {
        let (x, y) = (&self.x, &self.y);
        [
            Point::square(x.lo.clone(), y.lo.clone()),
            Point::square(x.hi.clone(), y.lo.clone()),
            Point::square(x.lo.clone(), y.hi.clone()),
            Point::square(x.hi.clone(), y.hi.clone()),
        ]
    }

    fn closures_meet(&self, o: &HoleRect) -> bool {
        self.x.lo <= o.x.hi && o.x.lo <= self.x.hi && self.y.lo <= o.y.hi && o.y.lo <= self.y.hi
    }

    fn covers(&self, o: &HoleRect) -> bool {
        self.x.covers(&o.x) && self.y.covers(&o.y) && (self.full_height || !o.full_height)
    }

    /// The bounding box when the union of the two closures is itself a rectangle.
    fn rectangular_union(&self, o: &HoleRect) -> Option<HoleRect> {
        let same_x = self.x == o.x;
        let same_y = self.y == o.y && self.full_height == o.full_height;
        if !(same_x || same_y) {
            return None;
        }
        Some(HoleRect {
            x: Interval::new((&self.x.lo).min(&o.x.lo).clone(), (&self.x.hi).max(&o.x.hi).clone()),
            y: Interval::new((&self.y.lo).min(&o.y.lo).clone(), (&self.y.hi).max(&o.y.hi).clone()),
            full_height: self.full_height && o.full_height,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Hole2D {
    rects: Vec<HoleRect>,
}

impl Hole2D {
    pub fn empty() -> Hole2D {
        Hole2D::default()
    }

    pub fn new(rects: Vec<HoleRect>) -> Result<Hole2D> {
        Ok(Hole2D::with_warnings(rects)?.0)
    }

    /// Validates and normalizes. Rectangles whose closures meet are merged
    /// when one contains the other or their union is a rectangle; any other
    /// overlap is rejected, since the result would not be rectangle-like.
    pub fn with_warnings(rects: Vec<HoleRect>) -> Result<(Hole2D, Vec<String>)> {
        let mut rs = Vec::with_capacity(rects.len());
        for mut r in rects {
            for v in [&r.x.lo, &r.x.hi, &r.y.lo, &r.y.hi] {
                check_unit(v, "corner coordinate")?;
            }
            if r.full_height {
                r.y = Interval::unit();
            }
            if r.x.lo >= r.x.hi || r.y.lo >= r.y.hi {
                return Err(Error::InvalidArgument(format!(
                    "degenerate rectangle {} x {}",
                    r.x, r.y
                )));
            }
            rs.push(r);
        }
        let mut warnings = Vec::new();
        'outer: loop {
            for i in 0..rs.len() {
                for j in i + 1..rs.len() {
                    if !rs[i].closures_meet(&rs[j]) {
                        continue;
                    }
                    let merged = if rs[i].covers(&rs[j]) {
                        rs[i].clone()
                    } else if rs[j].covers(&rs[i]) {
                        rs[j].clone()
                    } else if let Some(u) = rs[i].rectangular_union(&rs[j]) {
                        u
                    } else {
                        return Err(Error::InvalidArgument(format!(
                            "rectangles {} x {} and {} x {} have meeting closures and cannot be merged",
                            rs[i].x, rs[i].y, rs[j].x, rs[j].y
                        )));
                    };
                    warnings.push(format!(
                        "rectangles {} x {} and {} x {} merged",
                        rs[i].x, rs[i].y, rs[j].x, rs[j].y
                    ));
                    rs.swap_remove(j);
                    rs[i] = merged;
                    continue 'outer;
                }
            }
            break;
        }
        rs.sort();
        Ok((Hole2D { rects: rs }, warnings))
    }

    pub fn rects(&self) -> &[HoleRect] {
        &self.rects
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn into_hole(self) -> Hole {
        Hole::Rects(self)
    }

    pub fn corner_count(&self) -> usize {
        4 * self.rects.len()
    }

    pub fn contains_open(&self, p: &Point) -> bool {
        self.rects.iter().any(|r| r.contains_open(p))
    }

    pub fn contains_closed(&self, p: &Point) -> bool {
        self.rects.iter().any(|r| r.contains_closed(p))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Hole {
    Intervals(Hole1D),
    Rects(Hole2D),
}

impl Hole {
    pub fn is_empty(&self) -> bool {
        match self {
            Hole::Intervals(h) => h.is_empty(),
            Hole::Rects(h) => h.is_empty(),
        }
    }

    /// The interval form, required on the circle.
    pub fn intervals(&self) -> Result<&Hole1D> {
        match self {
            Hole::Intervals(h) => Ok(h),
            Hole::Rects(h) if h.is_empty() => {
                static EMPTY: Hole1D = Hole1D { arcs: Vec::new() };
                Ok(&EMPTY)
            }
            Hole::Rects(_) => Err(Error::WrongSystem { expected: "baker" }),
        }
    }

    /// The rectangle form; an interval hole becomes full-height strips.
    pub fn rects(&self) -> Hole2D {
        match self {
            Hole::Intervals(h) => h.to_strips(),
            Hole::Rects(h) => h.clone(),
        }
    }

    pub fn check_system(&self, sys: &SystemSpec) -> Result<()> {
        sys.validate()?;
        if sys.kind == SystemKind::Circle {
            self.intervals()?;
        }
        Ok(())
    }

    pub fn contains_open(&self, sys: &SystemSpec, p: &Point) -> bool {
        match (sys.kind, self) {
            (SystemKind::Circle, Hole::Intervals(h)) => h.contains_open(&p.x),
            (SystemKind::Baker, Hole::Rects(h)) => h.contains_open(p),
            (SystemKind::Baker, Hole::Intervals(h)) => h.to_strips().contains_open(p),
            (SystemKind::Circle, Hole::Rects(_)) => false,
        }
    }

    pub fn from_json(json: &HoleJson) -> Result<(Hole, Vec<String>)> {
        match json {
            HoleJson::Intervals { intervals } => {
                let (h, w) = Hole1D::with_warnings(intervals.clone())?;
                Ok((Hole::Intervals(h), w))
            }
            HoleJson::Rects { rects } => {
                let rs = rects
                    .iter()
                    .map(|r| HoleRect {
                        x: Interval::new(r.x.0.clone(), r.x.1.clone()),
                        y: match &r.y {
                            Some(y) => Interval::new(y.0.clone(), y.1.clone()),
                            None => Interval::unit(),
                        },
                        full_height: r.full_height || r.y.is_none(),
                    })
                    .collect();
                let (h, w) = Hole2D::with_warnings(rs)?;
                Ok((Hole::Rects(h), w))
            }
        }
    }

    pub fn to_json(&self) -> HoleJson {
        match self {
            Hole::Intervals(h) => HoleJson::Intervals {
                intervals: h.arcs.iter().map(|a| (a.lo.clone(), a.hi.clone())).collect(),
            },
            Hole::Rects(h) => HoleJson::Rects {
                rects: h
                    .rects
                    .iter()
                    .map(|r| RectJson {
                        x: (r.x.lo.clone(), r.x.hi.clone()),
                        y: Some((r.y.lo.clone(), r.y.hi.clone())),
                        full_height: r.full_height,
                    })
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HoleJson {
    Intervals {
        #[serde(with = "pairs")]
        intervals: Vec<(Rational, Rational)>,
    },
    Rects {
        rects: Vec<RectJson>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectJson {
    #[serde(with = "rational::serde_pair")]
    pub x: (Rational, Rational),
    #[serde(default, with = "opt_pair", skip_serializing_if = "Option::is_none")]
    pub y: Option<(Rational, Rational)>,
    #[serde(default)]
    pub full_height: bool,
}

mod pairs {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct P(#[serde(with = "rational::serde_pair")] (Rational, Rational));

    pub fn serialize<S: Serializer>(
        v: &[(Rational, Rational)],
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|p| P(p.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<(Rational, Rational)>, D::Error> {
        Ok(Vec::<P>::deserialize(d)?.into_iter().map(|p| p.0).collect())
    }
}

mod opt_pair {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct P(#[serde(with = "rational::serde_pair")] (Rational, Rational));

    pub fn serialize<S: Serializer>(
        v: &Option<(Rational, Rational)>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref().map(|p| P(p.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<(Rational, Rational)>, D::Error> {
        Ok(Option::<P>::deserialize(d)?.map(|p| p.0))
    }
}

impl Serialize for Hole {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hole {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = HoleJson::deserialize(d)?;
        Hole::from_json(&json)
            .map(|(h, _)| h)
            .map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and examples: a hole from `"p/q"` endpoint pairs.
pub fn hole1d(intervals: &[(&str, &str)]) -> Result<Hole> {
    let iv = intervals
        .iter()
        .map(|(a, b)| Ok((rational::parse(a)?, rational::parse(b)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Hole::Intervals(Hole1D::new(iv)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse;

    fn q(s: &str) -> Rational {
        parse(s).unwrap()
    }

    fn iv(a: &str, b: &str) -> Interval {
        Interval::new(q(a), q(b))
    }

    #[test]
    fn merging_intervals() {
        let (h, w) = Hole1D::with_warnings(vec![
            (q("1/4"), q("1/2")),
            (q("1/2"), q("5/8")),
            (q("3/4"), q("7/8")),
        ])
        .unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.arcs()[0], Arc { lo: q("1/4"), hi: q("5/8") });
        assert_eq!(w.len(), 1);
        // meeting at 0 ≡ 1
        let (h, w) = Hole1D::with_warnings(vec![(q("3/4"), q("1")), (q("0"), q("1/8"))]).unwrap();
        assert_eq!(h.arcs(), &[Arc { lo: q("3/4"), hi: q("1/8") }]);
        assert_eq!(w.len(), 1);
        assert!(h.contains_open(&q("0")));
        // the whole circle minus 0 stays as is
        let h = Hole1D::new(vec![(q("0"), q("1"))]).unwrap();
        assert!(!h.contains_open(&q("0")));
        assert!(h.contains_closed(&q("0")));
        assert!(Hole1D::new(vec![(q("1/2"), q("1/2"))]).is_err());
        assert!(Hole1D::new(vec![(q("1/2"), q("3/2"))]).is_err());
    }

    #[test]
    fn wrapping_geometry() {
        let h = Hole1D::new(vec![(q("7/8"), q("1/8"))]).unwrap();
        assert!(h.contains_open(&q("0")));
        assert!(!h.contains_open(&q("1/8")));
        assert!(h.contains_closed(&q("1/8")));
        assert!(h.meets_open(&iv("0", "1/16")));
        assert!(!h.meets_open(&iv("1/8", "7/8")));
        assert!(h.closure_covers(&iv("15/16", "1")));
        assert!(!h.closure_covers(&iv("3/4", "1")));
        assert_eq!(h.complement(), vec![iv("1/8", "7/8")]);
        let e = Hole1D::empty();
        assert_eq!(e.complement(), vec![iv("0", "1")]);
        let h = Hole1D::new(vec![(q("3/4"), q("1"))]).unwrap();
        assert!(h.contains_closed(&q("0")));
        assert!(!h.contains_open(&q("0")));
        assert_eq!(h.complement(), vec![iv("0", "3/4")]);
    }

    #[test]
    fn rectangles() {
        let r = HoleRect::new(iv("1/4", "1/2"), iv("1/4", "1/2"));
        let h = Hole2D::new(vec![r.clone()]).unwrap();
        assert!(h.contains_open(&Point::square(q("1/3"), q("1/3"))));
        assert!(!h.contains_open(&Point::square(q("1/4"), q("1/3"))));
        assert!(h.contains_closed(&Point::square(q("1/4"), q("1/3"))));
        let strip = HoleRect::strip(q("3/4"), q("1"));
        assert!(strip.contains_open(&Point::square(q("7/8"), q("0"))));
        // contained rectangle dropped, rectangular union merged
        let (h, w) = Hole2D::with_warnings(vec![
            r.clone(),
            HoleRect::new(iv("1/4", "3/8"), iv("1/4", "3/8")),
            HoleRect::new(iv("1/2", "3/4"), iv("1/4", "1/2")),
        ])
        .unwrap();
        assert_eq!(h.rects(), &[HoleRect::new(iv("1/4", "3/4"), iv("1/4", "1/2"))]);
        assert_eq!(w.len(), 2);
        assert!(Hole2D::new(vec![r, HoleRect::new(iv("3/8", "5/8"), iv("3/8", "5/8"))]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let h: Hole = serde_json::from_str(r#"{"intervals":[["3/4","1"],["1/8","1/4"]]}"#).unwrap();
        assert_eq!(h, hole1d(&[("1/8", "1/4"), ("3/4", "1")]).unwrap());
        let text = serde_json::to_string(&h).unwrap();
        assert_eq!(text, r#"{"intervals":[["1/8","1/4"],["3/4","1"]]}"#);
        let r: Hole = serde_json::from_str(
            r#"{"rects":[{"x":["3/4","1"],"y":["0","1"],"full_height":true}]}"#,
        )
        .unwrap();
        assert_eq!(r, Hole::Rects(Hole2D::new(vec![HoleRect::strip(q("3/4"), q("1"))]).unwrap()));
        assert_eq!(r, Hole::Intervals(Hole1D::new(vec![(q("3/4"), q("1"))]).unwrap()).rects().into_hole());
        let back: Hole = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<Hole>(r#"{"intervals":[["3/4","x"]]}"#).is_err());
    }
}
