//! Certificates that an exclusion shift is of finite type.

use crate::bracket::{inner_sft, outer_sft};
use crate::error::{Error, Result};
use crate::hole::{Hole, Hole1D, Hole2D};
use crate::rational::{self, Rational};
use crate::sft::{sft_equivalent, Sft, Sided};
use crate::system::{
    cylinder_box, orbit_summary, Cell, Interval, Point, SystemKind, SystemSpec,
};
use num::{One, Zero};
use serde::Serialize;

/// A boundary point (1D) or boundary segment (2D) and a time at which its
/// image lies in the open hole. Negative times are backward iterates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EscapeWitness {
    pub boundary: Cell,
    pub time: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Method {
    Stabilization {
        depth: usize,
    },
    Escape {
        depth: usize,
        witnesses: Vec<EscapeWitness>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub method: Method,
    pub sft: Sft,
}

impl Certificate {
    /// Depth at which the brackets agree.
    pub fn depth(&self) -> usize {
        match self.method {
            Method::Stabilization { depth } | Method::Escape { depth, .. } => depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certification {
    Certified(Certificate),
    Unknown { reason: String },
}

impl Certification {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Certification::Certified(c) => Some(c),
            Certification::Unknown { .. } => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.certificate().is_some()
    }
}

/// Least depth `k ≤ n_max` at which the inner and outer brackets agree.
pub fn certify_stabilization(sys: &SystemSpec, hole: &Hole, n_max: usize) -> Result<Certification> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    for depth in 1..=n_max {
        let inner = inner_sft(sys, hole, depth)?;
        let outer = outer_sft(sys, hole, depth)?;
        if sft_equivalent(&inner, &outer)? {
            return Ok(Certification::Certified(Certificate {
                method: Method::Stabilization { depth },
                sft: inner,
            }));
        }
    }
    Ok(Certification::Unknown {
        reason: format!("brackets differ at every depth up to {n_max}"),
    })
}

fn point_cell(x: &Rational) -> Cell {
    Cell {
        x: Interval::new(x.clone(), x.clone()),
        y: None,
    }
}

/// Least `k ≥ 1` with `f^k(x)` in the open hole, or `None` if the orbit
/// never enters it.
fn circle_entry_time(sys: &SystemSpec, hole: &Hole1D, x: &Rational) -> Result<Option<usize>> {
    let x = if x.is_one() { Rational::zero() } else { x.clone() };
    let orbit = orbit_summary(sys, &Point::circle(x))?;
    Ok((1..=orbit.states.len()).find(|&k| hole.contains_open(&orbit.state(k).x)))
}

/// Closed images of a closed square cell under `f` (`forward`) or `f^{-1}`,
/// taking every branch whose closed strip the cell touches.
fn cell_images(n: usize, c: &Cell, forward: bool) -> Vec<Cell> {
    let nr = rational::int(n as i64);
    let y = c.y.as_ref().expect("square cell");
    let mut out = Vec::new();
    for b in 0..n {
        let br = rational::int(b as i64);
        let strip = Interval::new(&br / &nr, (&br + Rational::one()) / &nr);
        let part = if forward { &c.x } else { y };
        let lo = (&part.lo).max(&strip.lo);
        let hi = (&part.hi).min(&strip.hi);
        if lo > hi {
            continue;
        }
        out.push(if forward {
            Cell {
                x: Interval::new(lo * &nr - &br, hi * &nr - &br),
                y: Some(Interval::new((&y.lo + &br) / &nr, (&y.hi + &br) / &nr)),
            }
        } else {
            Cell {
                x: Interval::new((&c.x.lo + &br) / &nr, (&c.x.hi + &br) / &nr),
                y: Some(Interval::new(lo * &nr - &br, hi * &nr - &br)),
            }
        });
    }
    out
}

/// A closed cell inside the open hole.
fn cell_in_open(hole: &Hole2D, c: &Cell) -> bool {
    let y = c.y.as_ref().expect("square cell");
    hole.rects().iter().any(|r| {
        r.x.lo < c.x.lo
            && c.x.hi < r.x.hi
            && (r.full_height || (r.y.lo < y.lo && y.hi < r.y.hi))
    })
}

const PIECE_CAP: usize = 64;

/// Least `|k| ≤ n_max` with `f^k(cell) ⊆ H`, forward times preferred on ties.
fn square_entry_time(n: usize, hole: &Hole2D, cell: &Cell, n_max: usize) -> Option<i64> {
    let mut fwd = Some(vec![cell.clone()]);
    let mut bwd = Some(vec![cell.clone()]);
    for k in 1..=n_max {
        for (dir, set) in [(true, &mut fwd), (false, &mut bwd)] {
            if let Some(cells) = set.take() {
                let next: Vec<Cell> = cells.iter().flat_map(|c| cell_images(n, c, dir)).collect();
                if next.iter().all(|c| cell_in_open(hole, c)) {
                    return Some(if dir { k as i64 } else { -(k as i64) });
                }
                if next.len() <= PIECE_CAP {
                    *set = Some(next);
                }
            }
        }
    }
    None
}

fn bisect(c: &Cell) -> (Cell, Cell) {
    let y = c.y.as_ref().expect("square cell");
    let two = rational::int(2);
    if c.x.lo == c.x.hi {
        let mid = (&y.lo + &y.hi) / &two;
        (
            Cell { x: c.x.clone(), y: Some(Interval::new(y.lo.clone(), mid.clone())) },
            Cell { x: c.x.clone(), y: Some(Interval::new(mid, y.hi.clone())) },
        )
    } else {
        let mid = (&c.x.lo + &c.x.hi) / &two;
        (
            Cell { x: Interval::new(c.x.lo.clone(), mid.clone()), y: c.y.clone() },
            Cell { x: Interval::new(mid, c.x.hi.clone()), y: c.y.clone() },
        )
    }
}

/// Discharges `seg` by recursive bisection; `Err` carries an undischarged piece.
fn discharge(
    n: usize,
    hole: &Hole2D,
    seg: Cell,
    level: usize,
    n_max: usize,
    out: &mut Vec<EscapeWitness>,
) -> std::result::Result<(), Cell> {
    if let Some(time) = square_entry_time(n, hole, &seg, n_max) {
        out.push(EscapeWitness { boundary: seg, time });
        return Ok(());
    }
    if level >= n_max {
        return Err(seg);
    }
    let (a, b) = bisect(&seg);
    discharge(n, hole, a, level + 1, n_max, out)?;
    discharge(n, hole, b, level + 1, n_max, out)
}

fn boundary_segments(hole: &Hole2D) -> Vec<Cell> {
    let mut out = Vec::new();
    for r in hole.rects() {
        for x in [&r.x.lo, &r.x.hi] {
            out.push(Cell {
                x: Interval::new(x.clone(), x.clone()),
                y: Some(r.y.clone()),
            });
        }
        if !r.full_height {
            for y in [&r.y.lo, &r.y.hi] {
                out.push(Cell {
                    x: r.x.clone(),
                    y: Some(Interval::new(y.clone(), y.clone())),
                });
            }
        }
    }
    out
}

/// The boundary-escape criterion: every boundary point eventually falls into
/// the open hole. On the circle each endpoint is decided exactly from its
/// orbit. On the square, boundary segments are bisected up to `n_max` times
/// and each piece must map into the hole within `|k| ≤ n_max` steps. A
/// successful check is followed by [`certify_stabilization`], which supplies
/// the Sft.
pub fn certify_escape(sys: &SystemSpec, hole: &Hole, n_max: usize) -> Result<Certification> {
    let witnesses = match escape_witnesses(sys, hole, n_max)? {
        Ok(w) => w,
        Err(reason) => return Ok(Certification::Unknown { reason }),
    };
    match certify_stabilization(sys, hole, n_max)? {
        Certification::Certified(c) => Ok(Certification::Certified(Certificate {
            method: Method::Escape {
                depth: c.depth(),
                witnesses,
            },
            sft: c.sft,
        })),
        Certification::Unknown { .. } => Ok(Certification::Unknown {
            reason: format!("boundary escapes but brackets did not agree by depth {n_max}"),
        }),
    }
}

/// The boundary half of [`certify_escape`]: witnesses for the whole boundary,
/// or the reason one could not be found.
pub fn escape_witnesses(
    sys: &SystemSpec,
    hole: &Hole,
    n_max: usize,
) -> Result<std::result::Result<Vec<EscapeWitness>, String>> {
    hole.check_system(sys)?;
    let mut w = Vec::new();
    match sys.kind {
        SystemKind::Circle => {
            let h = hole.intervals()?;
            for arc in h.arcs() {
                for e in [&arc.lo, &arc.hi] {
                    match circle_entry_time(sys, h, e)? {
                        Some(k) => w.push(EscapeWitness {
                            boundary: point_cell(e),
                            time: k as i64,
                        }),
                        None => {
                            return Ok(Err(format!(
                                "orbit of boundary point {} never enters the hole",
                                rational::format(e)
                            )))
                        }
                    }
                }
            }
        }
        SystemKind::Baker => {
            let h = hole.rects();
            for seg in boundary_segments(&h) {
                if let Err(piece) = discharge(sys.branches, &h, seg, 0, n_max, &mut w) {
                    return Ok(Err(format!(
                        "boundary piece {} x {} not shown to enter the hole within {n_max} steps",
                        piece.x,
                        piece.y.as_ref().expect("square cell")
                    )));
                }
            }
        }
    }
    Ok(Ok(w))
}

/// Re-checks a witness by exact iteration.
pub fn verify_escape_witness(sys: &SystemSpec, hole: &Hole, w: &EscapeWitness) -> Result<bool> {
    match sys.kind {
        SystemKind::Circle => {
            let h = hole.intervals()?;
            if w.time < 1 || w.boundary.x.lo != w.boundary.x.hi {
                return Ok(false);
            }
            let mut x = w.boundary.x.lo.clone();
            if x.is_one() {
                x = Rational::zero();
            }
            let nr = rational::int(sys.branches as i64);
            for _ in 0..w.time {
                x = rational::frac(&(x * &nr));
            }
            Ok(h.contains_open(&x))
        }
        SystemKind::Baker => {
            let h = hole.rects();
            let mut cells = vec![w.boundary.clone()];
            for _ in 0..w.time.unsigned_abs() {
                cells = cells
                    .iter()
                    .flat_map(|c| cell_images(sys.branches, c, w.time > 0))
                    .collect();
            }
            Ok(w.time != 0 && cells.iter().all(|c| cell_in_open(&h, c)))
        }
    }
}

/// Re-validates a certificate from scratch.
pub fn verify_certificate(sys: &SystemSpec, hole: &Hole, cert: &Certificate) -> Result<bool> {
    if let Method::Escape { witnesses, .. } = &cert.method {
        for w in witnesses {
            if !verify_escape_witness(sys, hole, w)? {
                return Ok(false);
            }
        }
    }
    let depth = cert.depth();
    let inner = inner_sft(sys, hole, depth)?;
    let outer = outer_sft(sys, hole, depth)?;
    Ok(sft_equivalent(&inner, &outer)? && sft_equivalent(&inner, &cert.sft)?)
}

/// An exclusion system realizing `s`: the hole is the interior of the union
/// of the cylinders of the forbidden window words. One-sided shifts use the
/// circle map, two-sided ones the Baker map with full-height strips.
pub fn hole_from_sft(s: &Sft) -> Result<(SystemSpec, Hole)> {
    let n = s.alphabet_size();
    let circle = SystemSpec::circle(n);
    circle.validate()?;
    let mut pieces = Vec::new();
    for w in s.forbidden_words() {
        let c = cylinder_box(&circle, &[], w.symbols())?;
        pieces.push((c.x.lo, c.x.hi));
    }
    let h = Hole1D::new(pieces)?;
    Ok(match s.sided() {
        Sided::OneSided => (circle, Hole::Intervals(h)),
        Sided::TwoSided => (SystemSpec::baker(n), Hole::Rects(h.to_strips())),
    })
}
