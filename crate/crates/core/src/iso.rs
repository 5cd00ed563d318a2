//! Delaunay retriangulation and translation isomorphism.
//!
//! The Delaunay cell decomposition (triangles merged across cocircular
//! edges) is canonical, so isomorphism is decided by matching cells rather
//! than by searching over tie-breaks inside cocircular polygons.

use std::collections::{HashMap, VecDeque};

use crate::geom::Vec2;
use crate::scalar::Scalar;
use crate::surface::{Chain, HalfEdge, Surface};

/// Sign of the incircle determinant for the quadrilateral around `h`:
/// positive when the far vertex of the neighbour lies strictly inside the
/// circumcircle of `h`'s triangle.
pub fn incircle<K: Scalar>(s: &Surface<K>, h: HalfEdge) -> i8 {
    let p = s.partner(h);
    let pos = s.positions(h.t);
    let a = pos[h.e].clone();
    let b = pos[(h.e + 1) % 3].clone();
    let c = pos[(h.e + 2) % 3].clone();
    // a is the neighbour's vertex p.e + 1; its far vertex follows it.
    let d = a.add(s.vec(HalfEdge::new(p.t, (p.e + 1) % 3)));
    incircle_points(&a, &b, &c, &d)
}

pub fn incircle_points<K: Scalar>(a: &Vec2<K>, b: &Vec2<K>, c: &Vec2<K>, d: &Vec2<K>) -> i8 {
    let (a, b, c) = (a.sub(d), b.sub(d), c.sub(d));
    let (la, lb, lc) = (a.norm2(), b.norm2(), c.norm2());
    let det = la * b.cross(&c) + lb * c.cross(&a) + lc * a.cross(&b);
    det.sign()
}

/// Lawson flips until every flippable edge is locally Delaunay. Edges glued
/// to their own triangle cannot be flipped and are left as they are.
pub fn delaunay<K: Scalar>(s: &Surface<K>) -> Surface<K> {
    let mut s = s.clone();
    make_delaunay(&mut s);
    s
}

pub fn make_delaunay<K: Scalar>(s: &mut Surface<K>) -> usize {
    let mut flips = 0;
    let mut queue: VecDeque<HalfEdge> = s.half_edges().filter(|&h| s.edge_ref(h).fwd).collect();
    while let Some(h) = queue.pop_front() {
        if s.partner(h).t == h.t || incircle(s, h) <= 0 {
            continue;
        }
        let p = s.partner(h);
        s.flip_unchecked(h);
        flips += 1;
        for t in [h.t, p.t] {
            for e in 0..3 {
                queue.push_back(HalfEdge::new(t, e));
            }
        }
    }
    flips
}

pub fn is_delaunay<K: Scalar>(s: &Surface<K>) -> bool {
    s.half_edges().all(|h| s.partner(h).t == h.t || incircle(s, h) <= 0)
}

/// Delaunay cells: unions of triangles across cocircular edges.
#[derive(Debug, Clone)]
pub struct Cells {
    /// Boundary half-edges of each cell, counterclockwise.
    pub sides: Vec<Vec<HalfEdge>>,
    /// Cell and side index of every boundary half-edge.
    pub side_of: HashMap<HalfEdge, (usize, usize)>,
    /// Polygon vertex index of every triangle corner.
    pub corner_vertex: HashMap<HalfEdge, (usize, usize)>,
    /// Edges interior to cells.
    pub interior: Vec<HalfEdge>,
}

pub fn cells<K: Scalar>(s: &Surface<K>) -> Cells {
    let inner = |h: HalfEdge| s.partner(h).t != h.t && incircle(s, h) == 0;
    let mut sides = Vec::new();
    let mut side_of = HashMap::new();
    let mut corner_vertex = HashMap::new();
    let mut interior = Vec::new();
    for h in s.half_edges() {
        if inner(h) {
            if s.edge_ref(h).fwd {
                interior.push(h);
            }
            continue;
        }
        if side_of.contains_key(&h) {
            continue;
        }
        let cell = sides.len();
        let mut list = Vec::new();
        let mut corners = Vec::new();
        let mut cur = h;
        loop {
            side_of.insert(cur, (cell, list.len()));
            list.push(cur);
            let k = list.len();
            // Rotate around the end vertex through interior edges.
            let mut n = cur.next();
            corners.push((n, k));
            while inner(n) {
                n = s.partner(n).next();
                corners.push((n, k));
            }
            cur = n;
            if cur == h {
                break;
            }
        }
        let m = list.len();
        for (c, k) in corners {
            corner_vertex.insert(c, (cell, k % m));
        }
        sides.push(list);
    }
    Cells { sides, side_of, corner_vertex, interior }
}

impl Cells {
    /// Chain along the cell boundary homologous to interior half-edge `h`.
    fn boundary_path<K: Scalar>(&self, s: &Surface<K>, h: HalfEdge) -> Chain {
        let (cell, a) = self.corner_vertex[&h];
        let (_, b) = self.corner_vertex[&h.next()];
        let sides = &self.sides[cell];
        let m = sides.len();
        let mut c = Chain::new();
        let mut k = a;
        while k != b {
            c.add_ref(s.edge_ref(sides[k]), 1);
            k = (k + 1) % m;
        }
        c
    }

    /// Rewrite tracked chains so they use only cell sides.
    pub fn reduce_classes<K: Scalar>(&self, s: &mut Surface<K>) {
        for &h in &self.interior {
            let with = self.boundary_path(s, h);
            let id = s.edge_ref(h).id;
            s.substitute_edge(id, &with);
        }
    }

    pub fn reduce_chain<K: Scalar>(&self, s: &Surface<K>, c: &Chain) -> Chain {
        let mut c = c.clone();
        for &h in &self.interior {
            let with = self.boundary_path(s, h);
            c.substitute(s.edge_ref(h).id, &with);
        }
        c
    }
}

/// A translation isomorphism between Delaunay-normalized surfaces.
#[derive(Debug, Clone)]
pub struct IsoMap<K> {
    /// Normalized source and target with tracked classes carried along.
    pub source: Surface<K>,
    pub target: Surface<K>,
    pub source_cells: Cells,
    pub target_cells: Cells,
    /// Image of each source cell side.
    pub sides: HashMap<HalfEdge, HalfEdge>,
}

impl<K: Scalar> IsoMap<K> {
    /// Image in the target of a chain on the normalized source.
    pub fn transport(&self, c: &Chain) -> Chain {
        let c = self.source_cells.reduce_chain(&self.source, c);
        let idx = self.source.edge_index();
        let mut out = Chain::new();
        for (&id, &k) in &c.0 {
            let h = idx[&id];
            let g = self.sides[&h];
            out.add_ref(self.target.edge_ref(g), k);
        }
        out
    }

    /// Source classes carried to the target, by name.
    pub fn transported_classes(&self) -> Vec<(String, Chain)> {
        self.source.classes.iter().map(|(n, c)| (n.clone(), self.transport(c))).collect()
    }
}

/// Remove regular marked points and Delaunay-flip; classes ride along.
pub fn normalize<K: Scalar>(s: &Surface<K>) -> Surface<K> {
    let mut out = s.clone();
    if crate::rel::clear_marked_points(&mut out).is_err() {
        out = s.clone();
    }
    make_delaunay(&mut out);
    out
}

/// Translation isomorphism preserving singularity labels, if one exists.
/// The returned map is the one found from the lowest-index target side.
pub fn iso_check<K: Scalar>(a: &Surface<K>, b: &Surface<K>) -> Option<IsoMap<K>> {
    if a.area() != b.area() || a.stratum() != b.stratum() {
        return None;
    }
    let sa = normalize(a);
    let sb = normalize(b);
    let ca = cells(&sa);
    let cb = cells(&sb);
    if ca.sides.is_empty() || ca.sides.len() != cb.sides.len() || ca.side_of.len() != cb.side_of.len() {
        return None;
    }
    let seed = ca.sides[0][0];
    let mut candidates: Vec<HalfEdge> = cb.side_of.keys().copied().collect();
    candidates.sort();
    for g in candidates {
        if let Some(map) = propagate(&sa, &sb, &ca, &cb, seed, g) {
            return Some(IsoMap { source: sa, target: sb, source_cells: ca, target_cells: cb, sides: map });
        }
    }
    None
}

pub fn is_isomorphic<K: Scalar>(a: &Surface<K>, b: &Surface<K>) -> bool {
    iso_check(a, b).is_some()
}

fn propagate<K: Scalar>(
    sa: &Surface<K>,
    sb: &Surface<K>,
    ca: &Cells,
    cb: &Cells,
    seed: HalfEdge,
    image: HalfEdge,
) -> Option<HashMap<HalfEdge, HalfEdge>> {
    let mut map: HashMap<HalfEdge, HalfEdge> = HashMap::new();
    let mut used: HashMap<HalfEdge, HalfEdge> = HashMap::new();
    let mut queue = VecDeque::from([(seed, image)]);
    while let Some((h, g)) = queue.pop_front() {
        if let Some(&old) = map.get(&h) {
            if old != g {
                return None;
            }
            continue;
        }
        if used.contains_key(&g) {
            return None;
        }
        if sa.vec(h) != sb.vec(g) || sa.corner_label(h) != sb.corner_label(g) {
            return None;
        }
        map.insert(h, g);
        used.insert(g, h);
        let (cell_a, ka) = ca.side_of[&h];
        let (cell_b, kb) = cb.side_of[&g];
        let (na, nb) = (ca.sides[cell_a].len(), cb.sides[cell_b].len());
        if na != nb {
            return None;
        }
        queue.push_back((ca.sides[cell_a][(ka + 1) % na], cb.sides[cell_b][(kb + 1) % nb]));
        let (pa, pb) = (sa.partner(h), sb.partner(g));
        if !ca.side_of.contains_key(&pa) || !cb.side_of.contains_key(&pb) {
            return None;
        }
        queue.push_back((pa, pb));
    }
    (map.len() == ca.side_of.len()).then_some(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Mat2;
    use crate::Q;
    use std::collections::BTreeMap;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn torus() -> Surface<Q> {
        let v = |x: i64, y: i64| Vec2::new(q(x), q(y));
        let sq = vec![v(0, 0), v(1, 0), v(1, 1), v(0, 1)];
        Surface::from_polygons(&[sq], &[((0, 0), (0, 2)), ((0, 1), (0, 3))], &[], &BTreeMap::new()).unwrap()
    }

    #[test]
    fn sheared_torus_flips_back() {
        let s = torus();
        let sh = s.linear_apply(&Mat2::shear(q(5))).unwrap();
        let d = delaunay(&sh);
        assert!(is_delaunay(&d));
        assert!(is_isomorphic(&sh, &s));
    }

    #[test]
    fn delaunay_torus_unchanged() {
        let s = torus();
        let mut d = s.clone();
        assert_eq!(make_delaunay(&mut d), 0);
    }

    #[test]
    fn different_tori_are_not_isomorphic() {
        let s = torus();
        let t = s.linear_apply(&Mat2::diag(q(2), Q::new(1.into(), 2.into()))).unwrap();
        assert!(!is_isomorphic(&s, &t));
    }
}
