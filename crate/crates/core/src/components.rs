//! Transitive components across the inner-bracket filtration, certified gap
//! amalgamation for interval holes, and the component-count bound.

use crate::bracket::inner_sft;
use crate::certify::certify_stabilization;
use crate::error::{Error, Result};
use crate::hole::{Hole, Hole1D};
use crate::rational::{self, Rational};
use crate::sft::Sft;
use crate::system::{Interval, SystemKind, SystemSpec};
use num::{One, Zero};
use serde::Serialize;
use std::fmt::Write as _;

/// Pieces alive at once while iterating a gap.
const PIECE_CAP: usize = 4096;

pub(crate) fn format_entropy(h: Option<f64>) -> Option<String> {
    h.map(|v| format!("{v:.10}"))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentNode {
    pub index: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    /// Natural-log entropy, 10 decimals.
    pub entropy: Option<String>,
    /// A single periodic orbit.
    pub countable: bool,
    #[serde(skip)]
    pub sft: Sft,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForestLevel {
    pub depth: usize,
    pub components: Vec<ComponentNode>,
}

/// `child` at `depth` lies in `parent` at `depth + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ForestEdge {
    pub depth: usize,
    pub child: usize,
    pub parent: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentForest {
    pub levels: Vec<ForestLevel>,
    pub edges: Vec<ForestEdge>,
}

impl ComponentForest {
    pub fn parent(&self, depth: usize, child: usize) -> Option<usize> {
        self.edges
            .iter()
            .find(|e| e.depth == depth && e.child == child)
            .map(|e| e.parent)
    }

    pub fn to_dot(&self) -> String {
        let id = |d: usize, i: usize| format!("\"d{d}c{i}\"");
        let mut out = String::from("digraph forest {\n  rankdir=BT;\n");
        for level in &self.levels {
            let _ = write!(out, "  {{ rank=same;");
            for c in &level.components {
                let _ = write!(out, " {};", id(level.depth, c.index));
            }
            out.push_str(" }\n");
            for c in &level.components {
                let h = c.entropy.as_deref().unwrap_or("none");
                let _ = writeln!(
                    out,
                    "  {} [label=\"n={} #{} v={} h={}\"];",
                    id(level.depth, c.index),
                    level.depth,
                    c.index,
                    c.vertex_count,
                    h
                );
            }
        }
        for e in &self.edges {
            let _ = writeln!(out, "  {} -> {};", id(e.depth, e.child), id(e.depth + 1, e.parent));
        }
        out.push_str("}\n");
        out
    }
}

fn node(index: usize, sft: Sft) -> Result<ComponentNode> {
    Ok(ComponentNode {
        index,
        vertex_count: sft.vertex_count(),
        edge_count: sft.edge_count(),
        entropy: format_entropy(sft.entropy()?),
        countable: sft.is_single_cycle(),
        sft,
    })
}

/// Index of the unique component of `upper` that contains the lift of `child`.
fn find_parent(child: &Sft, upper: &[ComponentNode]) -> Result<usize> {
    let window = upper
        .first()
        .map(|c| c.sft.window())
        .ok_or_else(|| Error::Invariant("component vanished at the next depth".into()))?;
    let lifted = child.higher_block(window)?.trimmed();
    let mut parent = None;
    for v in lifted.vertex_indices() {
        let hit = upper
            .iter()
            .position(|c| c.sft.allowed_bits().get(v as usize))
            .ok_or_else(|| Error::Invariant("lifted component leaves the next depth".into()))?;
        match parent {
            None => parent = Some(hit),
            Some(p) if p != hit => {
                return Err(Error::Invariant("component splits across two parents".into()))
            }
            _ => {}
        }
    }
    let p = parent.ok_or_else(|| Error::Invariant("empty lifted component".into()))?;
    let len = child.window().min(window);
    let inner = child.language_indices(len);
    let outer = upper[p].sft.language_indices(len);
    if !inner.iter().all(|w| outer.binary_search(w).is_ok()) {
        return Err(Error::Invariant("parent language misses a child word".into()));
    }
    Ok(p)
}

/// Components of the inner brackets at depths `1..=n_max` with parent links
/// between consecutive depths.
pub fn transitive_filtration(sys: &SystemSpec, hole: &Hole, n_max: usize) -> Result<ComponentForest> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut levels = Vec::with_capacity(n_max);
    for depth in 1..=n_max {
        let components = inner_sft(sys, hole, depth)?
            .components()
            .into_iter()
            .enumerate()
            .map(|(i, s)| node(i, s))
            .collect::<Result<Vec<_>>>()?;
        levels.push(ForestLevel { depth, components });
    }
    let mut edges = Vec::new();
    for pair in levels.windows(2) {
        for c in &pair[0].components {
            edges.push(ForestEdge {
                depth: pair[0].depth,
                child: c.index,
                parent: find_parent(&c.sft, &pair[1].components)?,
            });
        }
    }
    Ok(ComponentForest { levels, edges })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmalgamationReport {
    pub r_hat: usize,
    /// Groups of hole-interval indices (in increasing left endpoint) joined by
    /// certified gaps.
    pub merged_groups: Vec<Vec<usize>>,
    /// Per gap `i` (after interval `i`), the step by which every point of the
    /// closed gap has entered the hole.
    pub certified_gap_times: Vec<Option<usize>>,
}

/// Open pieces of the hole on `[0,1]`; a side touching `0 ≡ 1` from inside the
/// hole is pushed outside the unit interval.
fn open_pieces(h: &Hole1D) -> Vec<(Rational, Rational)> {
    let below = -Rational::one();
    let above = rational::int(2);
    let mut out = Vec::new();
    for arc in h.arcs() {
        if arc.wraps() {
            out.push((below.clone(), arc.hi.clone()));
            out.push((arc.lo.clone(), above.clone()));
        } else {
            out.push((arc.lo.clone(), arc.hi.clone()));
        }
    }
    out
}

/// The closed piece with the open hole removed.
fn subtract(piece: Interval, holes: &[(Rational, Rational)]) -> Vec<Interval> {
    let mut parts = vec![piece];
    for (l, h) in holes {
        let mut next = Vec::with_capacity(parts.len() + 1);
        for p in parts {
            if &p.hi <= l || &p.lo >= h {
                next.push(p);
                continue;
            }
            if &p.lo <= l {
                next.push(Interval::new(p.lo.clone(), l.clone()));
            }
            if h <= &p.hi {
                next.push(Interval::new(h.clone(), p.hi.clone()));
            }
        }
        parts = next;
    }
    parts
}

/// Image of a closed piece under `x ↦ n·x mod 1`, split at branch boundaries.
fn image(piece: &Interval, n: usize) -> Vec<Interval> {
    let nn = rational::int(n as i64);
    let (a, b) = (&piece.lo * &nn, &piece.hi * &nn);
    if a == b {
        return vec![Interval::new(
            rational::frac(&a),
            rational::frac(&a),
        )];
    }
    let first = rational::floor_usize(&a);
    let mut out = Vec::new();
    let mut j = first;
    loop {
        let jr = rational::int(j as i64);
        if jr >= b {
            break;
        }
        let lo = a.clone().max(jr.clone()) - &jr;
        let hi = b.clone().min(&jr + Rational::one()) - &jr;
        out.push(Interval::new(lo, hi));
        j += 1;
    }
    out
}

fn merge(mut pieces: Vec<Interval>) -> Vec<Interval> {
    pieces.sort_by(|p, q| p.lo.cmp(&q.lo).then(p.hi.cmp(&q.hi)));
    let mut out: Vec<Interval> = Vec::with_capacity(pieces.len());
    for p in pieces {
        match out.last_mut() {
            Some(last) if p.lo <= last.hi => {
                if p.hi > last.hi {
                    last.hi = p.hi;
                }
            }
            _ => out.push(p),
        }
    }
    out
}

/// Step by which every point of `gap` lies in the open hole, within `budget`.
fn gap_entry_time(gap: Vec<Interval>, holes: &[(Rational, Rational)], n: usize, budget: usize) -> Option<usize> {
    let mut pieces = merge(gap);
    for t in 1..=budget {
        let mapped: Vec<Interval> = pieces.iter().flat_map(|p| image(p, n)).collect();
        pieces = merge(mapped.into_iter().flat_map(|p| subtract(p, holes)).collect());
        if pieces.is_empty() {
            return Some(t);
        }
        if pieces.len() > PIECE_CAP {
            return None;
        }
    }
    None
}

/// Certifies, by exact forward iteration for at most `n_max` steps, which gaps
/// between consecutive hole intervals fall into the hole, and merges the
/// intervals across those gaps. Uncertified gaps are never merged.
pub fn amalgamate_gaps(sys: &SystemSpec, hole: &Hole1D, n_max: usize) -> Result<AmalgamationReport> {
    sys.validate()?;
    if sys.kind != SystemKind::Circle {
        return Err(Error::WrongSystem { expected: "circle" });
    }
    let mut arcs = hole.arcs().to_vec();
    arcs.sort();
    let p = arcs.len();
    if p == 0 {
        return Ok(AmalgamationReport {
            r_hat: 0,
            merged_groups: Vec::new(),
            certified_gap_times: Vec::new(),
        });
    }
    let holes = open_pieces(hole);
    let times: Vec<Option<usize>> = (0..p)
        .map(|i| {
            let b = arcs[i].hi.clone();
            let a = arcs[(i + 1) % p].lo.clone();
            let gap = if b <= a {
                vec![Interval::new(b, a)]
            } else {
                vec![Interval::new(b, Rational::one()), Interval::new(Rational::zero(), a)]
            };
            gap_entry_time(gap, &holes, sys.branches, n_max)
        })
        .collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    if p > 1 && times.iter().all(Option::is_some) {
        groups.push((0..p).collect());
    } else if p == 1 {
        groups.push(vec![0]);
    } else {
        // start right after an uncertified gap so no group wraps past the end
        let start = (0..p).find(|&i| times[i].is_none()).expect("an open gap") + 1;
        let mut current = Vec::new();
        for k in 0..p {
            let i = (start + k) % p;
            current.push(i);
            if times[i].is_none() {
                current.sort_unstable();
                groups.push(std::mem::take(&mut current));
            }
        }
        groups.sort();
    }
    Ok(AmalgamationReport {
        r_hat: groups.len(),
        merged_groups: groups,
        certified_gap_times: times,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub component_count: usize,
    pub countable_count: usize,
    pub uncountable_count: usize,
    pub r_used: usize,
    /// Hole interval count before amalgamation.
    pub p: usize,
    pub partition_boundary_count: usize,
    pub bound: usize,
    pub satisfied: bool,
    /// `2·p + partition_boundary_count`.
    pub bound_p: usize,
    pub satisfied_p: bool,
    pub depth: usize,
    /// Set when stabilization failed and the deepest inner bracket was used.
    pub provisional: bool,
}

/// Counts the components of the certified shift (or of the inner bracket at
/// `n_max` when certification fails) and checks
/// `#countable + 2·#uncountable ≤ 2·r̂ + n`.
pub fn check_component_bound(sys: &SystemSpec, hole: &Hole1D, n_max: usize) -> Result<BoundReport> {
    let wrapped = Hole::Intervals(hole.clone());
    let amalgamation = amalgamate_gaps(sys, hole, n_max)?;
    let (sft, depth, provisional) = match certify_stabilization(sys, &wrapped, n_max)? {
        crate::certify::Certification::Certified(c) => {
            let d = c.depth();
            (c.sft, d, false)
        }
        crate::certify::Certification::Unknown { .. } => (inner_sft(sys, &wrapped, n_max)?, n_max, true),
    };
    let comps = sft.components();
    let countable_count = comps.iter().filter(|c| c.is_single_cycle()).count();
    let uncountable_count = comps.len() - countable_count;
    let weight = countable_count + 2 * uncountable_count;
    let boundary = sys.branches;
    let bound = 2 * amalgamation.r_hat + boundary;
    let bound_p = 2 * hole.len() + boundary;
    Ok(BoundReport {
        component_count: comps.len(),
        countable_count,
        uncountable_count,
        r_used: amalgamation.r_hat,
        p: hole.len(),
        partition_boundary_count: boundary,
        bound,
        satisfied: weight <= bound,
        bound_p,
        satisfied_p: weight <= bound_p,
        depth,
        provisional,
    })
}
