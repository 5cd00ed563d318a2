//! Exact straight-line tracing in a fixed direction.
//!
//! Positions are developed into the plane relative to the start point, so
//! every step is a sign test `cross(dir, P)` on sums of edge vectors and no
//! divisions accumulate along the ray.

use crate::geom::{in_sector, Vec2};
use crate::scalar::Scalar;
use crate::surface::{HalfEdge, Label, Surface};

/// Default crossing budget for separatrix traces.
pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("no singularity reached within {0} crossings")]
    BudgetExceeded(usize),
    #[error("direction is not in the sector of the start corner")]
    NotInSector,
}

pub type Result<T> = std::result::Result<T, TraceError>;

/// A traced straight segment from a vertex to a singular vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment<K> {
    /// Corner at the start whose half-open sector contains the direction.
    pub start: HalfEdge,
    /// Corner at the end whose sector contains the reversed direction.
    pub end: HalfEdge,
    pub holonomy: Vec2<K>,
    pub start_label: Label,
    pub end_label: Label,
    /// Triangle edges crossed transversally.
    pub crossings: usize,
}

/// Corners at singular vertices whose half-open sector contains `dir`:
/// one per outgoing separatrix in that direction.
pub fn prongs<K: Scalar>(s: &Surface<K>, dir: &Vec2<K>) -> Vec<HalfEdge> {
    let mut out: Vec<HalfEdge> = s
        .half_edges()
        .filter(|&c| s.corner_label(c) != Label::Regular)
        .filter(|&c| {
            let (d1, d2) = s.corner_sector(c);
            in_sector(&d1, &d2, dir)
        })
        .collect();
    out.sort();
    out
}

fn corner_containing<K: Scalar>(s: &Surface<K>, start: HalfEdge, dir: &Vec2<K>) -> Option<HalfEdge> {
    let mut c = start;
    loop {
        let (d1, d2) = s.corner_sector(c);
        if in_sector(&d1, &d2, dir) {
            return Some(c);
        }
        c = s.next_ccw(c);
        if c == start {
            return None;
        }
    }
}

/// Where a ray stops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step<K> {
    /// Crossing `h`, which runs from the right of the ray to its left, was
    /// refused; `pa` is the developed start of `h`.
    Edge { h: HalfEdge, pa: Vec2<K> },
    /// The ray reached the vertex of corner `c`, a corner of the triangle
    /// the ray arrives through, at developed position `pos`.
    Vertex { c: HalfEdge, pos: Vec2<K> },
}

/// Leave the vertex at `origin` through corner `c`, whose sector contains
/// `dir`, and stop at the next vertex or refused edge.
pub fn leave_vertex<K: Scalar>(
    s: &Surface<K>,
    c: HalfEdge,
    origin: &Vec2<K>,
    dir: &Vec2<K>,
    block: &dyn Fn(HalfEdge) -> bool,
    crossings: &mut usize,
    budget: usize,
) -> Result<Step<K>> {
    let a = origin.add(s.vec(c));
    if s.vec(c).same_direction(dir) {
        return Ok(Step::Vertex { c: s.partner(c), pos: a });
    }
    march(s, c.next(), a, dir, block, crossings, budget)
}

/// Cross `h` (right of the ray to left, starting at developed `pa`) and
/// the edges after it until a vertex lies on the ray or `block` refuses.
pub fn march<K: Scalar>(
    s: &Surface<K>,
    mut h: HalfEdge,
    mut pa: Vec2<K>,
    dir: &Vec2<K>,
    block: &dyn Fn(HalfEdge) -> bool,
    crossings: &mut usize,
    budget: usize,
) -> Result<Step<K>> {
    loop {
        if block(h) {
            return Ok(Step::Edge { h, pa });
        }
        if *crossings >= budget {
            return Err(TraceError::BudgetExceeded(budget));
        }
        *crossings += 1;
        let p = s.partner(h);
        let pc = pa.add(s.vec(p.next()));
        match dir.cross(&pc).sign() {
            0 => return Ok(Step::Vertex { c: p.prev(), pos: pc }),
            x if x < 0 => {
                pa = pc;
                h = p.prev();
            }
            _ => h = p.next(),
        }
    }
}

/// The corner at the vertex of `c` whose half-open sector contains `dir`.
pub fn corner_toward<K: Scalar>(s: &Surface<K>, c: HalfEdge, dir: &Vec2<K>) -> Result<HalfEdge> {
    corner_containing(s, c, dir).ok_or(TraceError::NotInSector)
}

/// Follow the ray from the vertex of `corner` in direction `dir`, passing
/// straight through regular vertices, until a singular vertex is hit.
pub fn trace_from_corner<K: Scalar>(s: &Surface<K>, corner: HalfEdge, dir: &Vec2<K>, budget: usize) -> Result<Segment<K>> {
    let (d1, d2) = s.corner_sector(corner);
    if !in_sector(&d1, &d2, dir) {
        return Err(TraceError::NotInSector);
    }
    let mut c = corner;
    let mut origin = Vec2::zero();
    let mut crossings = 0;
    loop {
        let Step::Vertex { c: arrive, pos } = leave_vertex(s, c, &origin, dir, &|_| false, &mut crossings, budget)? else {
            unreachable!("no edge is refused")
        };
        if s.corner_label(arrive) != Label::Regular {
            return Ok(Segment {
                start: corner,
                end: arrive,
                holonomy: pos,
                start_label: s.corner_label(corner),
                end_label: s.corner_label(arrive),
                crossings,
            });
        }
        c = corner_toward(s, arrive, dir)?;
        origin = pos;
    }
}

/// Every separatrix leaving a singularity in direction `dir`.
pub fn separatrices<K: Scalar>(s: &Surface<K>, dir: &Vec2<K>, budget: usize) -> Vec<Result<Segment<K>>> {
    prongs(s, dir).into_iter().map(|c| trace_from_corner(s, c, dir, budget)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{CylinderSpec, Diagram, SaddleSpec};
    use crate::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn torus(twist: Q) -> Surface<Q> {
        let d = Diagram {
            saddles: vec![SaddleSpec { length: q(1, 1), start: Label::Black, end: Label::Black }],
            cylinders: vec![CylinderSpec { width: q(3, 2), left: vec![0], right: vec![0], twist }],
        };
        d.build().unwrap().surface
    }

    #[test]
    fn vertical_closes_on_torus() {
        let s = torus(q(1, 3));
        let up = Vec2::new(q(0, 1), q(1, 1));
        let segs = separatrices(&s, &up, 10);
        assert_eq!(segs.len(), 1);
        let seg = segs[0].as_ref().unwrap();
        assert_eq!(seg.holonomy, up);
        assert!(seg.crossings <= 1);
    }

    #[test]
    fn slope_direction_closes_after_crossings() {
        let s = torus(q(0, 1));
        // Direction (3/2, 2) closes up after wrapping twice.
        let d = Vec2::new(q(3, 2), q(2, 1));
        let seg = trace_from_corner(&s, prongs(&s, &d)[0], &d, 100).unwrap();
        assert_eq!(seg.holonomy, d);
    }

    #[test]
    fn irrational_direction_exhausts_budget() {
        let s = torus(q(0, 1));
        let d = Vec2::new(q(1, 1), q(1000, 997));
        let e = trace_from_corner(&s, prongs(&s, &d)[0], &d, 50).unwrap_err();
        assert_eq!(e, TraceError::BudgetExceeded(50));
    }
}
