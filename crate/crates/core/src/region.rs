//! Survivor sets: points whose orbit avoids the closed hole for a bounded
//! number of steps, as finite unions of closed boxes.
//!
//! Every set here is the closure of an open set, so boxes are kept only when
//! they have nonempty interior; touching points are dropped.

use crate::error::{Error, Result};
use crate::hole::{Hole, Hole2D};
use crate::rational::{self, Rational};
use crate::system::{Cell, Interval, SystemKind, SystemSpec};
use num::{One, Zero};
use serde::{Deserialize, Serialize};

/// Largest number of boxes a survivor computation may hold.
pub const REGION_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionSet {
    cells: Vec<Cell>,
}

impl RegionSet {
    pub fn from_cells(mut cells: Vec<Cell>) -> RegionSet {
        cells.sort();
        RegionSet { cells }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn area(&self) -> Rational {
        self.cells.iter().map(Cell::area).sum()
    }

    pub fn intersect(&self, other: &RegionSet) -> RegionSet {
        RegionSet::from_cells(intersect_cells(&self.cells, &other.cells))
    }

    /// Exact containment, up to sets without interior.
    pub fn is_subset(&self, other: &RegionSet) -> bool {
        self.intersect(other).area() == self.area()
    }
}

fn cap_check(len: usize) -> Result<()> {
    if len > REGION_CAP {
        return Err(Error::ResourceCap {
            what: "survivor region boxes",
            requested: len as u128,
            cap: REGION_CAP as u128,
        });
    }
    Ok(())
}

/// Intersection of two sorted lists of closed intervals.
fn intersect_intervals(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        if let Some(m) = a[i].meet(&b[j]) {
            out.push(m);
        }
        if a[i].hi < b[j].hi {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Merges touching or overlapping sorted intervals.
fn merge_intervals(v: Vec<Interval>) -> Vec<Interval> {
    let mut out: Vec<Interval> = Vec::with_capacity(v.len());
    for iv in v {
        match out.last_mut() {
            Some(last) if iv.lo <= last.hi => {
                if iv.hi > last.hi {
                    last.hi = iv.hi;
                }
            }
            _ => out.push(iv),
        }
    }
    out
}

fn pullback_intervals(n: usize, s: &[Interval]) -> Vec<Interval> {
    let nr = rational::int(n as i64);
    let mut out = Vec::with_capacity(s.len() * n);
    for b in 0..n {
        let br = rational::int(b as i64);
        for iv in s {
            out.push(Interval::new((&iv.lo + &br) / &nr, (&iv.hi + &br) / &nr));
        }
    }
    out
}

/// Surviving intervals of the circle map for steps `0..=depth`.
pub(crate) fn circle_survivors(n: usize, complement: &[Interval], depth: usize) -> Result<Vec<Interval>> {
    let mut s = complement.to_vec();
    for _ in 0..depth {
        let pulled = pullback_intervals(n, &s);
        cap_check(pulled.len())?;
        s = merge_intervals(intersect_intervals(complement, &pulled));
        if s.is_empty() {
            break;
        }
    }
    Ok(s)
}

/// Closed complement of the closed hole in the square, as column-merged
/// grid cells.
pub(crate) fn square_complement(hole: &Hole2D) -> Vec<Cell> {
    let mut xs: Vec<Rational> = vec![Rational::zero(), Rational::one()];
    let mut ys = xs.clone();
    for r in hole.rects() {
        xs.extend([r.x.lo.clone(), r.x.hi.clone()]);
        ys.extend([r.y.lo.clone(), r.y.hi.clone()]);
    }
    xs.sort();
    xs.dedup();
    ys.sort();
    ys.dedup();
    let mut out = Vec::new();
    for xw in xs.windows(2) {
        let x = Interval::new(xw[0].clone(), xw[1].clone());
        let mut run: Option<Interval> = None;
        for yw in ys.windows(2) {
            let y = Interval::new(yw[0].clone(), yw[1].clone());
            let covered = hole.rects().iter().any(|r| r.x.covers(&x) && r.y.covers(&y));
            if covered {
                if let Some(y) = run.take() {
                    out.push(Cell { x: x.clone(), y: Some(y) });
                }
            } else {
                run = Some(match run {
                    Some(r) => Interval::new(r.lo, y.hi),
                    None => y,
                });
            }
        }
        if let Some(y) = run {
            out.push(Cell { x: x.clone(), y: Some(y) });
        }
    }
    out
}

fn yv(c: &Cell) -> &Interval {
    c.y.as_ref().expect("square cell")
}

/// `f^{-1}` of a set of square cells.
fn pullback_cells(n: usize, s: &[Cell]) -> Vec<Cell> {
    let nr = rational::int(n as i64);
    let unit = Interval::unit();
    let mut out = Vec::new();
    for b in 0..n {
        let br = rational::int(b as i64);
        for c in s {
            let y = yv(c);
            let y = Interval::new(&y.lo * &nr - &br, &y.hi * &nr - &br);
            if let Some(y) = y.meet(&unit) {
                out.push(Cell {
                    x: Interval::new((&c.x.lo + &br) / &nr, (&c.x.hi + &br) / &nr),
                    y: Some(y),
                });
            }
        }
    }
    out
}

/// `f` of a set of square cells, split along the partition.
fn push_cells(n: usize, s: &[Cell]) -> Vec<Cell> {
    let nr = rational::int(n as i64);
    let mut out = Vec::new();
    for b in 0..n {
        let br = rational::int(b as i64);
        let strip = Interval::new(&br / &nr, (&br + Rational::one()) / &nr);
        for c in s {
            if let Some(x) = c.x.meet(&strip) {
                let y = yv(c);
                out.push(Cell {
                    x: Interval::new(&x.lo * &nr - &br, &x.hi * &nr - &br),
                    y: Some(Interval::new((&y.lo + &br) / &nr, (&y.hi + &br) / &nr)),
                });
            }
        }
    }
    out
}

/// Pairwise intersections with positive area. Candidates are found through a
/// float prefilter on `x` and confirmed exactly.
fn intersect_cells(a: &[Cell], b: &[Cell]) -> Vec<Cell> {
    const PAD: f64 = 1e-9;
    let mut idx: Vec<(f64, f64, usize)> = b
        .iter()
        .enumerate()
        .map(|(i, c)| (rational::to_f64(&c.x.lo) - PAD, rational::to_f64(&c.x.hi) + PAD, i))
        .collect();
    idx.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut out = Vec::new();
    for c in a {
        let lo = rational::to_f64(&c.x.lo);
        let hi = rational::to_f64(&c.x.hi);
        let end = idx.partition_point(|p| p.0 < hi);
        for &(_, bhi, i) in &idx[..end] {
            if bhi > lo {
                if let Some(m) = c.meet(&b[i]) {
                    out.push(m);
                }
            }
        }
    }
    out
}

pub(crate) fn square_survivors(n: usize, hole: &Hole2D, depth: usize) -> Result<Vec<Cell>> {
    let comp = square_complement(hole);
    let mut forward = comp.clone();
    for _ in 0..depth {
        let pulled = pullback_cells(n, &forward);
        cap_check(pulled.len())?;
        forward = intersect_cells(&comp, &pulled);
        cap_check(forward.len())?;
    }
    if depth == 0 {
        return Ok(forward);
    }
    // points whose preimages at times 1..=depth avoid the hole
    let mut backward = push_cells(n, &comp);
    for _ in 1..depth {
        let kept = intersect_cells(&comp, &backward);
        backward = push_cells(n, &kept);
        cap_check(backward.len())?;
    }
    let out = intersect_cells(&forward, &backward);
    cap_check(out.len())?;
    Ok(out)
}

/// `{p : f^k(p) ∉ H̄}` for `0 ≤ k ≤ depth` on the circle, and for
/// `-depth ≤ k ≤ depth` on the Baker map.
pub fn survivor_regions(sys: &SystemSpec, hole: &Hole, depth: usize) -> Result<RegionSet> {
    hole.check_system(sys)?;
    match sys.kind {
        SystemKind::Circle => {
            let comp = hole.intervals()?.complement();
            let s = circle_survivors(sys.branches, &comp, depth)?;
            Ok(RegionSet::from_cells(s.into_iter().map(|x| Cell { x, y: None }).collect()))
        }
        SystemKind::Baker => Ok(RegionSet::from_cells(square_survivors(
            sys.branches,
            &hole.rects(),
            depth,
        )?)),
    }
}
