//! Real and imaginary rel as exact surgery.
//!
//! Moving the White singularity by `τ·v` changes every half-edge by
//! `τ·bc(h)·v`, so each triangle's signed area is affine in `τ`. The flow
//! advances to the first time a triangle degenerates, flips the long edge of
//! every flattened triangle, and continues. A zero-length edge is a
//! collision of the two singularities.

use std::collections::HashSet;

use crate::frame::Frame;
use crate::geom::Vec2;
use crate::refine::{insert_segment, reduce_regular_vertices, split_edge, RefineError};
use crate::scalar::Scalar;
use crate::surface::{EdgeRef, HalfEdge, Label, Surface, SurfaceError};
use crate::trace::prongs;

/// Rel deformation vector: the change of holonomy of any Black→White path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelVector<K> {
    pub dx: K,
    pub dy: K,
}

impl<K: Scalar> RelVector<K> {
    pub fn new(dx: K, dy: K) -> Self {
        RelVector { dx, dy }
    }

    pub fn horizontal(r: K) -> Self {
        RelVector { dx: r, dy: K::zero() }
    }

    pub fn vertical(r: K) -> Self {
        RelVector { dx: K::zero(), dy: r }
    }

    pub fn vec(&self) -> Vec2<K> {
        Vec2::new(self.dx.clone(), self.dy.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelError {
    #[error("the singularities collide at time {0} along the deformation")]
    Collision(String),
    #[error("more than {0} retriangulation events")]
    GuardExceeded(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("a leftward separatrix of length {0} meets a singularity")]
    SeparatrixHitsSingularity(String),
    #[error("slits overlap")]
    SlitsOverlap,
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Refine(#[from] RefineError),
}

pub type Result<T> = std::result::Result<T, RelError>;

/// Upper bound on flips during one deformation.
pub const MAX_EVENTS: usize = 200_000;

/// Area coefficients `(a0, a1)`, twice the signed area being `a0 + τ·a1`.
fn area_poly<K: Scalar>(s: &Surface<K>, t: usize, v: &Vec2<K>) -> (K, K) {
    let e0 = s.vec(HalfEdge::new(t, 0));
    let e1 = s.vec(HalfEdge::new(t, 1));
    let b0 = K::from_i64(s.he_bc(HalfEdge::new(t, 0)));
    let b1 = K::from_i64(s.he_bc(HalfEdge::new(t, 1)));
    let a1 = b1 * e0.cross(v) + b0 * v.cross(e1);
    (e0.cross(e1), a1)
}

fn advance<K: Scalar>(s: &mut Surface<K>, v: &Vec2<K>, tau: &K) {
    let step = v.scale(tau);
    for t in 0..s.num_triangles() {
        for e in 0..3 {
            let b = s.he_bc(HalfEdge::new(t, e));
            if b != 0 {
                let d = step.scale(&K::from_i64(b));
                s.tri[t][e] = s.tri[t][e].add(&d);
            }
        }
    }
}

/// Earliest time in `(0, limit]` at which some triangle flattens.
fn next_event<K: Scalar>(s: &Surface<K>, v: &Vec2<K>, limit: &K) -> Option<K> {
    let mut best: Option<K> = None;
    for t in 0..s.num_triangles() {
        let (a0, a1) = area_poly(s, t, v);
        if a1.sign() >= 0 {
            continue;
        }
        let tau = -(a0 / a1);
        if tau.cmp_exact(limit).is_le() && best.as_ref().is_none_or(|b| tau.cmp_exact(b).is_lt()) {
            best = Some(tau);
        }
    }
    best
}

/// Long edge of a flat triangle: the one opposite its middle vertex.
fn long_edge<K: Scalar>(s: &Surface<K>, t: usize) -> Option<HalfEdge> {
    (0..3)
        .find(|&k| s.vec(HalfEdge::new(t, k)).dot(s.vec(HalfEdge::new(t, (k + 2) % 3))).sign() > 0)
        .map(|k| HalfEdge::new(t, (k + 1) % 3))
}

/// Flip away flattened triangles; `Err` on a zero-length edge.
///
/// A flat triangle whose long edge borders a fat one is fixed by one flip.
/// When every flat triangle borders another flat one across its long edge
/// (a whole cylinder collapsing), the globally longest such edge is
/// flipped: it is the long edge on both sides, so the flip shortens it and
/// the process terminates.
fn resolve<K: Scalar>(s: &mut Surface<K>, events: &mut usize, at: &K) -> Result<()> {
    let is_flat = |s: &Surface<K>, t: usize| s.triangle(t)[0].cross(&s.triangle(t)[1]).sign() == 0;
    loop {
        let flat: Vec<usize> = (0..s.num_triangles()).filter(|&t| is_flat(s, t)).collect();
        if flat.is_empty() {
            return Ok(());
        }
        if *events > MAX_EVENTS {
            return Err(RelError::GuardExceeded(MAX_EVENTS));
        }
        let mut longest: Option<(K, HalfEdge)> = None;
        let mut easy = None;
        for &t in &flat {
            if s.triangle(t).iter().any(Vec2::is_zero) {
                return Err(RelError::Collision(at.to_f64().to_string()));
            }
            let Some(h) = long_edge(s, t) else { continue };
            let p = s.partner(h);
            if p.t == t {
                continue;
            }
            if !is_flat(s, p.t) {
                easy = Some(h);
                break;
            }
            let n = s.vec(h).norm2();
            if longest.as_ref().is_none_or(|(m, _)| n.cmp_exact(m).is_gt()) {
                longest = Some((n, h));
            }
        }
        let Some(h) = easy.or(longest.map(|(_, h)| h)) else {
            return Err(RelError::PreconditionViolated("flat triangle glued to itself".into()));
        };
        s.flip_unchecked(h);
        *events += 1;
    }
}

/// Move White by `v` relative to Black, retriangulating as needed.
pub fn flow<K: Scalar>(s: &Surface<K>, v: &Vec2<K>) -> Result<Surface<K>> {
    let mut s = s.clone();
    if v.is_zero() {
        return Ok(s);
    }
    let mut left = K::one();
    let mut events = 0;
    let mut elapsed = K::zero();
    while left.sign() > 0 {
        match next_event(&s, v, &left) {
            None => {
                advance(&mut s, v, &left);
                left = K::zero();
            }
            Some(tau) => {
                advance(&mut s, v, &tau);
                left = left - &tau;
                elapsed = elapsed + &tau;
                resolve(&mut s, &mut events, &elapsed)?;
            }
        }
    }
    Ok(s)
}

/// Rel along `v`: horizontal part, then vertical part, then Delaunay.
pub fn rel_apply<K: Scalar>(s: &Surface<K>, v: &RelVector<K>) -> Result<Surface<K>> {
    let mut out = flow(s, &Vec2::new(v.dx.clone(), K::zero()))?;
    out = flow(&out, &Vec2::new(K::zero(), v.dy.clone()))?;
    crate::iso::make_delaunay(&mut out);
    Ok(out)
}

/// Horizontal rel by resizing edges only: no triangle may flatten.
pub fn rel_h_edgeshift<K: Scalar>(s: &Surface<K>, r: &K) -> Result<Surface<K>> {
    let v = Vec2::new(r.clone(), K::zero());
    if next_event(s, &v, &K::one()).is_some() {
        return Err(RelError::PreconditionViolated("an edge collapses before the shift completes".into()));
    }
    let mut out = s.clone();
    advance(&mut out, &v, &K::one());
    Ok(out)
}

/// Horizontal rel by slit surgery: cut the surface along the separatrices
/// leaving Black in direction `-sign(L)·(1,0)` for length `|L|` and reglue
/// each slit's far side to the next slit's near side, so the slit ends fuse
/// into the new Black point and the old one splits into regular points.
///
/// Classes are re-solved from holonomy and boundary coefficient, which
/// requires that pair to determine the class.
pub fn rel_h_slit<K: Scalar>(s: &Surface<K>, l: &K) -> Result<Surface<K>> {
    if l.sign() == 0 {
        return Ok(s.clone());
    }
    let dir = Vec2::new(K::from_i64(-(l.sign() as i64)), K::zero());
    let len = l.abs_exact();
    let seg = dir.scale(&len);
    let mut out = s.clone();
    let saved: Vec<(String, Vec2<K>, i64)> = s
        .classes
        .iter()
        .map(|(n, c)| Ok((n.clone(), s.chain_holonomy(c)?, s.chain_bc(c)?)))
        .collect::<std::result::Result<_, SurfaceError>>()?;
    out.classes.clear();

    // Insert every slit as an edge chain.
    let mut slits: Vec<Vec<EdgeRef>> = Vec::new();
    loop {
        let first: HashSet<u32> = slits.iter().map(|c| c[0].id).collect();
        let next = prongs(&out, &dir)
            .into_iter()
            .find(|&c| out.corner_label(c) == Label::Black && !(first.contains(&out.edge_ref(c).id) && out.vec(c).same_direction(&dir)));
        let Some(c) = next else { break };
        let chain = insert_segment(&mut out, c, &seg).map_err(|e| match e {
            RefineError::SegmentHitsSingularity => RelError::SeparatrixHitsSingularity(l.to_string()),
            RefineError::SegmentNotEmbedded => RelError::SlitsOverlap,
            e => e.into(),
        })?;
        let end = along(&out, *chain.last().expect("nonempty slit")).next();
        if out.corner_label(end) != Label::Regular {
            return Err(RelError::SeparatrixHitsSingularity(l.to_string()));
        }
        slits.push(chain);
    }
    if slits.is_empty() {
        return Err(RelError::PreconditionViolated("no Black vertex".into()));
    }

    // Subdivide so all slits break at the same distances from Black.
    let offsets = |s: &Surface<K>, c: &[EdgeRef]| -> Vec<K> {
        let mut acc = K::zero();
        c.iter().map(|&e| {
            acc = acc.clone() + s.vec(along(s, e)).x.abs_exact();
            acc.clone()
        }).collect()
    };
    let mut cuts: Vec<K> = Vec::new();
    for c in &slits {
        for u in offsets(&out, c) {
            if !cuts.iter().any(|v| v.cmp_exact(&u).is_eq()) {
                cuts.push(u);
            }
        }
    }
    for i in 0..slits.len() {
        for u in &cuts {
            let offs = offsets(&out, &slits[i]);
            if offs.iter().any(|v| v.cmp_exact(u).is_eq()) {
                continue;
            }
            let k = offs.iter().position(|v| v.cmp_exact(u).is_gt()).expect("cut inside the slit");
            let h = along(&out, slits[i][k]);
            let before = if k == 0 { K::zero() } else { offs[k - 1].clone() };
            let lambda = (u.clone() - &before) / out.vec(h).x.abs_exact();
            let sp = split_edge(&mut out, h, &lambda)?;
            let (a, b) = (out.edge_ref(sp.first), out.edge_ref(sp.second));
            slits[i].splice(k..=k, [a, b]);
        }
    }

    // Order the slits counterclockwise around Black.
    let verts = out.vertices();
    let black = out.corner_label(along(&out, slits[0][0]));
    debug_assert_eq!(black, Label::Black);
    let v = verts.class_of(along(&out, slits[0][0]));
    let ring: Vec<usize> = verts.corners[v]
        .iter()
        .filter_map(|&c| slits.iter().position(|sl| out.edge_ref(c) == sl[0]))
        .collect();
    let slits: Vec<Vec<EdgeRef>> = ring.iter().map(|&i| slits[i].clone()).collect();
    let n = slits.len();
    let away: Vec<Vec<HalfEdge>> = slits.iter().map(|c| c.iter().map(|&e| along(&out, e)).collect()).collect();
    let toward: Vec<Vec<HalfEdge>> = away.iter().map(|c| c.iter().map(|&h| out.partner(h)).collect()).collect();
    let old_black: Vec<HalfEdge> = verts.corners[v].clone();
    let ends: Vec<HalfEdge> = away.iter().map(|c| c.last().expect("nonempty").next()).collect();

    // The sector after slit i ends at slit i+1; closing it glues them.
    for i in 0..n {
        let j = (i + 1) % n;
        for k in 0..away[i].len() {
            let (a, t) = (away[i][k], toward[j][k]);
            out.glue[a.t][a.e] = t;
            out.glue[t.t][t.e] = a;
            let r = out.edge_ref(a);
            out.eref[t.t][t.e] = EdgeRef { id: r.id, fwd: !r.fwd };
        }
    }
    for &c in &old_black {
        out.label[c.t][c.e] = Label::Regular;
    }
    let verts = out.vertices();
    for &c in &verts.corners[verts.class_of(ends[0])] {
        out.label[c.t][c.e] = Label::Black;
    }
    if ends.iter().any(|&e| verts.class_of(e) != verts.class_of(ends[0])) {
        return Err(RelError::SlitsOverlap);
    }
    out.validate()?;
    let sorted = |x: &Surface<K>| {
        let st = x.stratum();
        let mut o = st.orders;
        o.sort();
        (st.genus, o)
    };
    crate::iso::make_delaunay(&mut out);
    clear_marked_points(&mut out)?;
    crate::iso::make_delaunay(&mut out);
    if sorted(&out) != sorted(s) {
        return Err(RelError::PreconditionViolated("stratum changed under slit surgery".into()));
    }
    let frame = Frame::new(&out);
    for (name, hol, bc) in saved {
        let moved = hol.add(&Vec2::new(K::from_i64(bc) * l, K::zero()));
        let chain = frame
            .solve_class(&out, &moved, bc)
            .ok_or_else(|| RelError::PreconditionViolated(format!("class {name} is not determined by its holonomy")))?;
        out.classes.insert(name, chain);
    }
    Ok(out)
}

/// Remove every regular marked point. A point whose star cannot be
/// simplified by flips (it sits on a short closed loop) is first slid most of
/// the way along a spoke to a different vertex, which shrinks its star.
pub(crate) fn clear_marked_points<K: Scalar>(s: &mut Surface<K>) -> Result<()> {
    const SLIDES: usize = 64;
    for _ in 0..SLIDES {
        if reduce_regular_vertices(s) {
            return Ok(());
        }
        let v = s.vertices();
        let spoke = (0..v.count())
            .filter(|&i| v.labels[i] == Label::Regular)
            .flat_map(|i| v.corners[i].iter().copied().map(move |c| (i, c)))
            .filter(|&(_, c)| v.labels[v.class_of(c.next())] != Label::Regular)
            .min_by(|a, b| s.vec(a.1).norm2().cmp_exact(&s.vec(b.1).norm2()))
            .ok_or(RefineError::NotRemovable("regular point with no singular neighbour".into()))?;
        *s = slide(s, &v, spoke.0, &s.vec(spoke.1).scale(&(K::from_i64(63) / K::from_i64(64))))?;
        crate::iso::make_delaunay(s);
    }
    Err(RefineError::NotRemovable("marked points survive sliding".into()).into())
}

/// Move the regular vertex class `i` by `d` with the flow engine, using the
/// White label to mark the moving point.
fn slide<K: Scalar>(s: &Surface<K>, v: &crate::surface::Vertices, i: usize, d: &Vec2<K>) -> Result<Surface<K>> {
    let mut t = s.clone();
    for (j, cs) in v.corners.iter().enumerate() {
        let lab = match v.labels[j] {
            Label::White => Label::Regular,
            _ if j == i => Label::White,
            l => l,
        };
        for &c in cs {
            t.label[c.t][c.e] = lab;
        }
    }
    let mut t = flow(&t, d)?;
    let w = t.vertices();
    for j in 0..w.count() {
        let lab = match w.labels[j] {
            Label::White => Label::Regular,
            Label::Regular if t.cone_angle(&w, j) > 2 => Label::White,
            l => l,
        };
        for &c in &w.corners[j] {
            t.label[c.t][c.e] = lab;
        }
    }
    Ok(t)
}

/// The half-edge of `e` in its reference orientation.
fn along<K: Scalar>(s: &Surface<K>, e: EdgeRef) -> HalfEdge {
    let h = s.edge_index()[&e.id];
    if e.fwd {
        h
    } else {
        s.partner(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{CylinderSpec, Diagram, SaddleSpec};
    use crate::iso::is_isomorphic;
    use crate::surface::{Chain, Label};
    use crate::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    /// Two tori glued along a vertical slit of length 1: Black at the
    /// bottom of the slit, White at the top.
    fn slit_tori(twist: Q) -> Surface<Q> {
        let sad = |start, end, len: Q| SaddleSpec { length: len, start, end };
        let d = Diagram {
            saddles: vec![
                sad(Label::Black, Label::White, q(1, 1)),
                sad(Label::White, Label::Black, q(2, 1)),
                sad(Label::Black, Label::White, q(1, 1)),
                sad(Label::White, Label::Black, q(3, 1)),
            ],
            cylinders: vec![
                CylinderSpec { width: q(2, 1), left: vec![0, 1], right: vec![2, 1], twist: twist.clone() },
                CylinderSpec { width: q(3, 1), left: vec![2, 3], right: vec![0, 3], twist },
            ],
        };
        let mut b = d.build().unwrap();
        let mut c = Chain::new();
        c.add_ref(b.saddle[0], 1);
        b.surface.classes.insert("slit".into(), c);
        b.surface
    }

    #[test]
    fn zero_is_identity() {
        let s = slit_tori(q(1, 2));
        let t = rel_apply(&s, &RelVector::horizontal(q(0, 1))).unwrap();
        assert!(is_isomorphic(&s, &t));
    }

    #[test]
    fn slit_holonomy_moves_by_rel_vector() {
        let s = slit_tori(q(1, 3));
        let t = rel_apply(&s, &RelVector::new(q(7, 2), q(1, 5))).unwrap();
        let h = t.class_holonomy("slit").unwrap();
        assert_eq!(h, Vec2::new(q(7, 2), q(6, 5)));
        assert_eq!(t.area(), s.area());
        assert_eq!(t.stratum(), s.stratum());
    }

    #[test]
    fn there_and_back() {
        let s = slit_tori(q(1, 3));
        let t = rel_apply(&s, &RelVector::horizontal(q(9, 4))).unwrap();
        let u = rel_apply(&t, &RelVector::horizontal(q(-9, 4))).unwrap();
        assert!(is_isomorphic(&s, &u));
    }

    #[test]
    fn shrinking_the_slit_collides() {
        let s = slit_tori(q(1, 3));
        let e = rel_apply(&s, &RelVector::vertical(q(-1, 1))).unwrap_err();
        assert!(matches!(e, RelError::Collision(_)));
    }

    #[test]
    fn edgeshift_refuses_collapse() {
        let s = slit_tori(q(1, 3));
        assert!(rel_h_edgeshift(&s, &q(1, 1000)).is_ok());
        assert!(rel_h_edgeshift(&s, &q(100, 1)).is_err());
    }

    #[test]
    fn slit_surgery_agrees_with_the_flow() {
        // Rational holonomy cannot pin down classes, so compare bare surfaces.
        let mut s = slit_tori(q(1, 3));
        s.classes.clear();
        for l in [q(1, 7), q(-2, 5), q(3, 2)] {
            let a = rel_h_slit(&s, &l).unwrap();
            let b = rel_apply(&s, &RelVector::horizontal(l.clone())).unwrap();
            assert!(is_isomorphic(&a, &b), "L = {l}");
        }
    }

    #[test]
    fn long_slit_meets_a_singularity() {
        let mut s = slit_tori(q(0, 1));
        s.classes.clear();
        let e = rel_h_slit(&s, &q(100, 1)).unwrap_err();
        assert!(matches!(e, RelError::SeparatrixHitsSingularity(_)), "{e:?}");
    }
}
