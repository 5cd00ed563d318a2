//! Local retriangulation: marked points on edges and in faces, removal of
//! regular marked points, and straight segments turned into edge chains.
//!
//! Every operation keeps the translation structure and rewrites tracked
//! chains, so class holonomies are unchanged.

use std::collections::{HashMap, HashSet};

use crate::geom::{in_sector, Vec2};
use crate::scalar::Scalar;
use crate::surface::{ear_clip, Chain, EdgeRef, HalfEdge, Label, Surface, SurfaceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RefineError {
    #[error("segment passes through a singularity")]
    SegmentHitsSingularity,
    #[error("segment is not embedded")]
    SegmentNotEmbedded,
    #[error("point is not inside triangle {0}")]
    OutsideTriangle(usize),
    #[error("vertex cannot be removed: {0}")]
    NotRemovable(String),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

pub type Result<T> = std::result::Result<T, RefineError>;

/// A point of the surface: triangle plus barycentric coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfacePoint<K> {
    pub t: usize,
    pub bary: [K; 3],
}

impl<K: Scalar> SurfacePoint<K> {
    /// Point at `pos` relative to vertex 0 of triangle `t`.
    pub fn from_position(s: &Surface<K>, t: usize, pos: &Vec2<K>) -> Self {
        let [_, p1, p2] = s.positions(t);
        let det = p1.cross(&p2);
        let b1 = pos.cross(&p2) / &det;
        let b2 = p1.cross(pos) / &det;
        let b0 = K::one() - &b1 - &b2;
        SurfacePoint { t, bary: [b0, b1, b2] }
    }

    pub fn position(&self, s: &Surface<K>) -> Vec2<K> {
        let [_, p1, p2] = s.positions(self.t);
        p1.scale(&self.bary[1]).add(&p2.scale(&self.bary[2]))
    }
}

pub(crate) enum Side {
    /// Takes over the gluing and edge id of an old half-edge.
    Outer(HalfEdge),
    /// Paired with the other side carrying the same key; fresh edge id.
    Inner(usize),
}

pub(crate) struct NewTri<K> {
    pub v: [Vec2<K>; 3],
    pub lab: [Label; 3],
    pub side: [Side; 3],
}

impl<K: Scalar> Surface<K> {
    /// Replace triangles `old` by `new`, returning the slots of the new
    /// triangles. Unused old slots are compacted away.
    pub(crate) fn replace(&mut self, old: &[usize], new: Vec<NewTri<K>>) -> Vec<usize> {
        let old_set: HashSet<usize> = old.iter().copied().collect();
        let mut slots = Vec::with_capacity(new.len());
        for k in 0..new.len() {
            if k < old.len() {
                slots.push(old[k]);
            } else {
                self.tri.push(new[k].v.clone());
                self.glue.push([HalfEdge::new(0, 0); 3]);
                self.eref.push([EdgeRef { id: u32::MAX, fwd: true }; 3]);
                self.label.push(new[k].lab);
                slots.push(self.tri.len() - 1);
            }
        }
        let mut map = HashMap::new();
        let mut snapshot = HashMap::new();
        for (k, nt) in new.iter().enumerate() {
            for e in 0..3 {
                if let Side::Outer(o) = nt.side[e] {
                    map.insert(o, HalfEdge::new(slots[k], e));
                    snapshot.insert(o, (self.glue[o.t][o.e], self.eref[o.t][o.e]));
                }
            }
        }
        let mut inner: HashMap<usize, HalfEdge> = HashMap::new();
        for (k, nt) in new.into_iter().enumerate() {
            let t = slots[k];
            self.tri[t] = nt.v;
            self.label[t] = nt.lab;
            for e in 0..3 {
                let here = HalfEdge::new(t, e);
                match nt.side[e] {
                    Side::Outer(o) => {
                        let (p_old, r) = snapshot[&o];
                        self.eref[t][e] = r;
                        if old_set.contains(&p_old.t) {
                            let p = *map.get(&p_old).expect("partner of a replaced side must be replaced");
                            self.glue[t][e] = p;
                        } else {
                            self.glue[t][e] = p_old;
                            self.glue[p_old.t][p_old.e] = here;
                        }
                    }
                    Side::Inner(key) => {
                        if let Some(&other) = inner.get(&key) {
                            let id = self.eref[other.t][other.e].id;
                            self.eref[t][e] = EdgeRef { id, fwd: false };
                            self.glue[t][e] = other;
                            self.glue[other.t][other.e] = here;
                        } else {
                            let id = self.fresh_id();
                            self.eref[t][e] = EdgeRef { id, fwd: true };
                            inner.insert(key, here);
                        }
                    }
                }
            }
        }
        let mut unused: Vec<usize> = old.iter().skip(slots.len()).copied().collect();
        unused.sort_unstable_by(|a, b| b.cmp(a));
        for x in unused {
            let last = self.tri.len() - 1;
            self.tri.swap_remove(x);
            self.glue.swap_remove(x);
            self.eref.swap_remove(x);
            self.label.swap_remove(x);
            if x == last {
                continue;
            }
            for e in 0..3 {
                let mut p = self.glue[x][e];
                if p.t == last {
                    p.t = x;
                    self.glue[x][e] = p;
                }
                self.glue[p.t][p.e] = HalfEdge::new(x, e);
            }
            for s in slots.iter_mut() {
                if *s == last {
                    *s = x;
                }
            }
        }
        slots
    }
}

/// Result of splitting an edge at a new marked point `X`.
#[derive(Debug, Clone, Copy)]
pub struct Split {
    /// Corner at `X`.
    pub corner: HalfEdge,
    /// Half-edge from the vertex opposite the split edge (in its triangle) to `X`.
    pub from_opposite: HalfEdge,
    /// The two halves, in the direction of the split half-edge.
    pub first: HalfEdge,
    pub second: HalfEdge,
}

/// Insert a regular marked point on the edge of `h` at `start + λ·vec(h)`.
pub fn split_edge<K: Scalar>(s: &mut Surface<K>, h: HalfEdge, lambda: &K) -> Result<Split> {
    if lambda.sign() <= 0 || (K::one() - lambda).sign() <= 0 {
        return Err(RefineError::OutsideTriangle(h.t));
    }
    let p = s.partner(h);
    if p.t == h.t {
        return Err(RefineError::NotRemovable("edge glued to its own triangle".into()));
    }
    let (t, i, u, j) = (h.t, h.e, p.t, p.e);
    let he = HalfEdge::new;
    let e = s.vec(h).clone();
    let a = e.scale(lambda);
    let b = e.sub(&a);
    let f = s.tri[t][(i + 1) % 3].clone();
    let g = s.tri[t][(i + 2) % 3].clone();
    let fu = s.tri[u][(j + 1) % 3].clone();
    let gu = s.tri[u][(j + 2) % 3].clone();
    let (l, lu) = (s.label[t], s.label[u]);
    let (i1, i2, j1, j2) = ((i + 1) % 3, (i + 2) % 3, (j + 1) % 3, (j + 2) % 3);
    let ra = s.eref[t][i];
    let bf = b.add(&f);
    let fa = fu.sub(&a);
    let reg = Label::Regular;
    let new = vec![
        NewTri { v: [a.clone(), bf.clone(), g], lab: [l[i], reg, l[i2]], side: [Side::Inner(0), Side::Inner(1), Side::Outer(he(t, i2))] },
        NewTri { v: [b.clone(), f, bf.neg()], lab: [reg, l[i1], l[i2]], side: [Side::Inner(2), Side::Outer(he(t, i1)), Side::Inner(1)] },
        NewTri { v: [b.neg(), fa.clone(), gu], lab: [lu[j], reg, lu[j2]], side: [Side::Inner(2), Side::Inner(3), Side::Outer(he(u, j2))] },
        NewTri { v: [a.neg(), fu, fa.neg()], lab: [reg, lu[j1], lu[j2]], side: [Side::Inner(0), Side::Outer(he(u, j1)), Side::Inner(3)] },
    ];
    let slots = s.replace(&[t, u], new);
    let first = he(slots[0], 0);
    let second = he(slots[1], 0);
    let mut with = Chain::new();
    with.add_ref(s.edge_ref(first), ra.sign());
    with.add_ref(s.edge_ref(second), ra.sign());
    s.substitute_edge(ra.id, &with);
    Ok(Split { corner: second, from_opposite: he(slots[1], 2), first, second })
}

/// Insert a regular marked point strictly inside triangle `t`, at `pos`
/// relative to its vertex 0. Returns the half-edge from vertex `k` to the
/// new point for `k = 0, 1, 2`.
pub fn insert_in_face<K: Scalar>(s: &mut Surface<K>, t: usize, pos: &Vec2<K>) -> Result<[HalfEdge; 3]> {
    let p = s.positions(t);
    let l = s.label[t];
    let mut new = Vec::with_capacity(3);
    for k in 0..3 {
        let k1 = (k + 1) % 3;
        let to_x = pos.sub(&p[k1]);
        let from_x = p[k].sub(pos);
        if s.tri[t][k].cross(&to_x).sign() <= 0 {
            return Err(RefineError::OutsideTriangle(t));
        }
        new.push(NewTri {
            v: [s.tri[t][k].clone(), to_x, from_x],
            lab: [l[k], l[k1], Label::Regular],
            side: [Side::Outer(HalfEdge::new(t, k)), Side::Inner(k1), Side::Inner(k)],
        });
    }
    let slots = s.replace(&[t], new);
    Ok([0, 1, 2].map(|k| HalfEdge::new(slots[(k + 2) % 3], 1)))
}

/// Insert a marked point; returns a corner at it. Vertices are returned as
/// the corner of `p.t`.
pub fn insert_point<K: Scalar>(s: &mut Surface<K>, p: &SurfacePoint<K>) -> Result<HalfEdge> {
    if p.bary.iter().any(|b| b.sign() < 0) || p.t >= s.num_triangles() {
        return Err(RefineError::OutsideTriangle(p.t));
    }
    let zeros: Vec<usize> = (0..3).filter(|&k| p.bary[k].is_zero()).collect();
    match zeros.len() {
        0 => {
            let pos = p.position(s);
            let spokes = insert_in_face(s, p.t, &pos)?;
            Ok(spokes[0].next())
        }
        1 => {
            let k = zeros[0];
            let h = HalfEdge::new(p.t, (k + 1) % 3);
            Ok(split_edge(s, h, &p.bary[(k + 2) % 3])?.corner)
        }
        _ => {
            let k = (0..3).find(|k| !zeros.contains(k)).unwrap();
            Ok(HalfEdge::new(p.t, k))
        }
    }
}

/// Remove the regular marked point at corner `c`, retriangulating its star.
pub fn remove_vertex<K: Scalar>(s: &mut Surface<K>, c: HalfEdge) -> Result<()> {
    if s.corner_label(c) != Label::Regular {
        return Err(RefineError::NotRemovable("vertex is singular".into()));
    }
    let mut corners = vec![c];
    let mut cur = s.next_ccw(c);
    while cur != c {
        corners.push(cur);
        cur = s.next_ccw(cur);
    }
    let tris: HashSet<usize> = corners.iter().map(|c| c.t).collect();
    if tris.len() != corners.len() {
        return Err(RefineError::NotRemovable("triangle meets the vertex twice".into()));
    }
    let m = corners.len();
    let mut w = vec![s.vec(corners[0]).clone()];
    for k in 0..m - 1 {
        let next = w[k].add(s.vec(corners[k].next()));
        w.push(next);
    }
    let ears = ear_clip(&w).map_err(RefineError::NotRemovable)?;
    let links: Vec<HalfEdge> = corners.iter().map(|c| c.next()).collect();
    // Spoke k equals spoke 0 plus the link path from W_0 to W_k.
    let spokes: Vec<EdgeRef> = corners.iter().map(|&c| s.edge_ref(c)).collect();
    let link_refs: Vec<EdgeRef> = links.iter().map(|&h| s.edge_ref(h)).collect();
    let mut rewritten = Vec::new();
    for (name, ch) in &s.classes {
        let coeff: Vec<i64> = spokes.iter().map(|r| ch.0.get(&r.id).copied().unwrap_or(0) * r.sign()).collect();
        if coeff.iter().all(|&x| x == 0) {
            continue;
        }
        if coeff.iter().sum::<i64>() != 0 {
            return Err(RefineError::NotRemovable(format!("class {name} has boundary at the vertex")));
        }
        let mut out = ch.clone();
        for r in &spokes {
            out.0.remove(&r.id);
        }
        let mut path = Chain::new();
        for k in 0..m {
            if k > 0 {
                path.add_ref(link_refs[k - 1], 1);
            }
            out.add_chain(&path, coeff[k]);
        }
        rewritten.push((name.clone(), out));
    }
    let mut new = Vec::with_capacity(m - 2);
    for &[a, b, cc] in &ears {
        let vs = [a, b, cc];
        let mut v = Vec::with_capacity(3);
        let mut side = Vec::with_capacity(3);
        let mut lab = [Label::Regular; 3];
        for e in 0..3 {
            let (x, y) = (vs[e], vs[(e + 1) % 3]);
            v.push(w[y].sub(&w[x]));
            lab[e] = s.corner_label(links[x]);
            if y == (x + 1) % m {
                side.push(Side::Outer(links[x]));
            } else {
                side.push(Side::Inner(x.min(y) * m + x.max(y)));
            }
        }
        let v: [Vec2<K>; 3] = v.try_into().unwrap_or_else(|_| unreachable!());
        let mut it = side.into_iter();
        let side = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
        new.push(NewTri { v, lab, side });
    }
    let old: Vec<usize> = corners.iter().map(|c| c.t).collect();
    s.replace(&old, new);
    for (name, ch) in rewritten {
        s.classes.insert(name, ch);
    }
    Ok(())
}

/// Remove regular marked points, keeping at least one vertex.
pub fn remove_regular_vertices<K: Scalar>(s: &Surface<K>) -> Result<Surface<K>> {
    let mut s = s.clone();
    if reduce_regular_vertices(&mut s) {
        Ok(s)
    } else {
        Err(RefineError::NotRemovable("no removable star found".into()))
    }
}

/// Remove as many regular marked points as possible; `true` when none is
/// left. A vertex whose star is not a disc of distinct triangles is first
/// reduced by flipping spokes; each accepted flip lowers the total degree of
/// the regular vertices, so the loop terminates.
pub(crate) fn reduce_regular_vertices<K: Scalar>(s: &mut Surface<K>) -> bool {
    let load = |x: &Surface<K>| {
        let v = x.vertices();
        (0..v.count()).filter(|&i| v.labels[i] == Label::Regular).map(|i| v.corners[i].len()).sum::<usize>()
    };
    let mut attempts = 0;
    loop {
        let v = s.vertices();
        let regular: Vec<usize> = (0..v.count()).filter(|&i| v.labels[i] == Label::Regular).collect();
        if v.count() <= 1 || regular.is_empty() {
            return true;
        }
        if regular.iter().any(|&j| v.corners[j].iter().any(|&c| remove_vertex(s, c).is_ok())) {
            attempts = 0;
            continue;
        }
        let before = load(s);
        let flipped = regular.iter().flat_map(|&j| v.corners[j].iter().copied()).filter(|&c| s.flippable(c)).find_map(|c| {
            let mut t = s.clone();
            t.flip_unchecked(c);
            (load(&t) < before).then_some(t)
        });
        match flipped {
            Some(t) => *s = t,
            None => {
                // No flip lowers the load (every vertex may be regular, as on
                // a torus): rotate through spokes of one vertex a few times.
                attempts += 1;
                let star = &v.corners[regular[0]];
                match star.iter().copied().filter(|&c| s.flippable(c)).nth(attempts % star.len()) {
                    Some(c) if attempts < 64 => s.flip_unchecked(c),
                    _ => return false,
                }
            }
        }
    }
}

fn corner_for<K: Scalar>(s: &Surface<K>, start: HalfEdge, d: &Vec2<K>) -> Option<HalfEdge> {
    let mut c = start;
    loop {
        let (d1, d2) = s.corner_sector(c);
        if in_sector(&d1, &d2, d) {
            return Some(c);
        }
        c = s.next_ccw(c);
        if c == start {
            return None;
        }
    }
}

/// Make the straight segment from the vertex at corner `start` with
/// holonomy `d` into a chain of edges, inserting regular marked points where
/// it crosses edges and at its far end. The segment leaves through the first
/// sector counterclockwise from `start` that contains `d`.
pub fn insert_segment<K: Scalar>(s: &mut Surface<K>, start: HalfEdge, d: &Vec2<K>) -> Result<Vec<EdgeRef>> {
    let mut chain: Vec<EdgeRef> = Vec::new();
    let mut r = d.clone();
    let mut at = start;
    let push = |s: &Surface<K>, h: HalfEdge, chain: &mut Vec<EdgeRef>| chain.push(s.edge_ref(h));
    loop {
        let c = corner_for(s, at, &r).ok_or(RefineError::SegmentNotEmbedded)?;
        let ek = s.vec(c).clone();
        if ek.same_direction(&r) {
            if chain.iter().any(|e| e.id == s.edge_ref(c).id) {
                return Err(RefineError::SegmentNotEmbedded);
            }
            let mu = r.dot(&ek) / ek.norm2();
            match (mu.clone() - K::one()).sign() {
                0 => {
                    push(s, c, &mut chain);
                    return Ok(chain);
                }
                1 => {
                    push(s, c, &mut chain);
                    let end = c.next();
                    if s.corner_label(end) != Label::Regular {
                        return Err(RefineError::SegmentHitsSingularity);
                    }
                    r = r.sub(&ek);
                    at = end;
                    if touches(s, at, &chain) {
                        return Err(RefineError::SegmentNotEmbedded);
                    }
                    continue;
                }
                _ => {
                    let sp = split_edge(s, c, &mu)?;
                    push(s, sp.first, &mut chain);
                    return Ok(chain);
                }
            }
        }
        let pos = s.positions(c.t);
        let v = pos[c.e].clone();
        let o = c.next();
        let p = pos[o.e].clone();
        let e = s.vec(o).clone();
        if chain.iter().any(|x| x.id == s.edge_ref(o).id) {
            return Err(RefineError::SegmentNotEmbedded);
        }
        let den = r.cross(&e);
        let t_hit = p.sub(&v).cross(&e) / &den;
        let lambda = v.sub(&p).cross(&r) / e.cross(&r);
        match (t_hit.clone() - K::one()).sign() {
            1 => {
                let spokes = insert_in_face(s, c.t, &v.add(&r))?;
                push(s, spokes[c.e], &mut chain);
                return Ok(chain);
            }
            0 => {
                let sp = split_edge(s, o, &lambda)?;
                push(s, sp.from_opposite, &mut chain);
                return Ok(chain);
            }
            _ => {
                let sp = split_edge(s, o, &lambda)?;
                push(s, sp.from_opposite, &mut chain);
                r = r.sub(&r.scale(&t_hit));
                at = sp.corner;
            }
        }
    }
}

fn touches<K: Scalar>(s: &Surface<K>, corner: HalfEdge, chain: &[EdgeRef]) -> bool {
    let ids: HashSet<u32> = chain.iter().map(|e| e.id).collect();
    let last = chain.last().map(|e| e.id);
    let mut c = corner;
    loop {
        let id = s.edge_ref(c).id;
        if ids.contains(&id) && Some(id) != last {
            return true;
        }
        c = s.next_ccw(c);
        if c == corner {
            return false;
        }
    }
}

/// Re-present `s` so the segment from `p` with holonomy `d` is an edge
/// chain. Returns the new surface and the chain.
pub fn cut_paste<K: Scalar>(s: &Surface<K>, p: &SurfacePoint<K>, d: &Vec2<K>) -> Result<(Surface<K>, Vec<EdgeRef>)> {
    let mut out = s.clone();
    let c = insert_point(&mut out, p)?;
    let chain = insert_segment(&mut out, c, d)?;
    out.validate()?;
    Ok((out, chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::is_isomorphic;
    use crate::Q;
    use std::collections::BTreeMap;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn torus() -> Surface<Q> {
        let v = |x: i64, y: i64| Vec2::new(q(x, 1), q(y, 1));
        let sq = vec![v(0, 0), v(3, 0), v(3, 2), v(0, 2)];
        let mut s =
            Surface::from_polygons(&[sq], &[((0, 0), (0, 2)), ((0, 1), (0, 3))], &[], &BTreeMap::new()).unwrap();
        let a = s.he_chain(HalfEdge::new(0, 0));
        s.classes.insert("a".into(), a);
        s
    }

    #[test]
    fn split_and_remove_round_trip() {
        let mut s = torus();
        let hol = s.class_holonomy("a").unwrap();
        let sp = split_edge(&mut s, HalfEdge::new(0, 0), &q(1, 3)).unwrap();
        s.validate().unwrap();
        assert_eq!(s.class_holonomy("a").unwrap(), hol);
        assert_eq!(s.vertices().count(), 2);
        remove_vertex(&mut s, sp.corner).unwrap();
        s.validate().unwrap();
        assert_eq!(s.vertices().count(), 1);
        assert_eq!(s.class_holonomy("a").unwrap(), hol);
        assert!(is_isomorphic(&s, &torus()));
    }

    #[test]
    fn face_insertion_keeps_area() {
        let mut s = torus();
        let p = SurfacePoint { t: 0, bary: [q(1, 3), q(1, 3), q(1, 3)] };
        insert_point(&mut s, &p).unwrap();
        s.validate().unwrap();
        assert_eq!(s.num_triangles(), 4);
        assert_eq!(s.area(), q(6, 1));
        let r = remove_regular_vertices(&s).unwrap();
        assert_eq!(r.num_triangles(), 2);
    }

    #[test]
    fn segment_becomes_chain() {
        let s = torus();
        let p = SurfacePoint { t: 0, bary: [q(1, 2), q(1, 4), q(1, 4)] };
        let d = Vec2::new(q(5, 2), q(1, 3));
        let (out, chain) = cut_paste(&s, &p, &d).unwrap();
        let idx = out.edge_index();
        let mut sum = Vec2::zero();
        for e in &chain {
            let v = out.vec(idx[&e.id]);
            sum = if e.fwd { sum.add(v) } else { sum.sub(v) };
        }
        assert_eq!(sum, d);
        assert!(is_isomorphic(&out, &s));
    }

    #[test]
    fn overlapping_segment_is_rejected() {
        let s = torus();
        let p = SurfacePoint { t: 0, bary: [q(1, 2), q(1, 4), q(1, 4)] };
        let d = Vec2::new(q(13, 2), q(0, 1));
        assert_eq!(cut_paste(&s, &p, &d).unwrap_err(), RefineError::SegmentNotEmbedded);
    }
}
