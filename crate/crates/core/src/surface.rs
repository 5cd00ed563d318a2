//! Triangulated translation surfaces.
//!
//! A surface is a list of counterclockwise triangles, each stored as its
//! three edge vectors (edge `i` runs from vertex `i` to vertex `i+1`), an
//! involution gluing half-edges with opposite vectors, and a label on every
//! corner. Edges carry persistent integer ids so that edge chains (relative
//! homology representatives) survive flips and other retriangulations; the
//! named chains in [`Surface::classes`] are transported by every operation
//! that changes the triangulation.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value};

use crate::geom::{in_sector, Mat2, Vec2};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Black,
    White,
    Regular,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Black => "black",
            Label::White => "white",
            Label::Regular => "regular",
        }
    }
}

/// Half-edge `e` of triangle `t`; also used to name the corner at vertex `e`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfEdge {
    pub t: usize,
    pub e: usize,
}

impl HalfEdge {
    pub fn new(t: usize, e: usize) -> Self {
        HalfEdge { t, e }
    }
    pub fn next(self) -> Self {
        HalfEdge { t: self.t, e: (self.e + 1) % 3 }
    }
    pub fn prev(self) -> Self {
        HalfEdge { t: self.t, e: (self.e + 2) % 3 }
    }
}

/// Persistent edge id plus whether this half-edge runs along the edge's
/// reference orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeRef {
    pub id: u32,
    pub fwd: bool,
}

impl EdgeRef {
    pub fn sign(self) -> i64 {
        if self.fwd {
            1
        } else {
            -1
        }
    }
}

/// Integer combination of oriented edges, keyed by edge id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Chain(pub BTreeMap<u32, i64>);

impl Chain {
    pub fn new() -> Self {
        Chain(BTreeMap::new())
    }
    pub fn add_term(&mut self, id: u32, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.0.entry(id).or_insert(0);
        *v += c;
        if *v == 0 {
            self.0.remove(&id);
        }
    }
    pub fn add_ref(&mut self, r: EdgeRef, c: i64) {
        self.add_term(r.id, c * r.sign());
    }
    pub fn add_chain(&mut self, other: &Chain, k: i64) {
        for (&id, &c) in &other.0 {
            self.add_term(id, k * c);
        }
    }
    pub fn scaled(&self, k: i64) -> Chain {
        let mut c = Chain::new();
        c.add_chain(self, k);
        c
    }
    pub fn plus(&self, other: &Chain) -> Chain {
        let mut c = self.clone();
        c.add_chain(other, 1);
        c
    }
    pub fn minus(&self, other: &Chain) -> Chain {
        let mut c = self.clone();
        c.add_chain(other, -1);
        c
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    /// Replace every occurrence of edge `id` by `with` (a chain homologous to
    /// the edge's reference orientation).
    pub fn substitute(&mut self, id: u32, with: &Chain) {
        if let Some(k) = self.0.remove(&id) {
            self.add_chain(with, k);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurfaceError {
    #[error("paired edges {0:?} and {1:?} are not opposite")]
    GluingMismatch(HalfEdge, HalfEdge),
    #[error("edge {0:?} is not paired")]
    NonClosed(HalfEdge),
    #[error("triangle {0} is degenerate or clockwise")]
    DegenerateTriangle(usize),
    #[error("triangle {0} does not close up")]
    OpenTriangle(usize),
    #[error("invalid polygon {0}: {1}")]
    InvalidPolygon(usize, String),
    #[error("conflicting labels on vertex class {0}")]
    LabelConflict(usize),
    #[error("vertex class {0} has cone angle {1}π but no singular label")]
    UnlabeledSingularity(usize, u32),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("path is not connected at step {0}")]
    DisconnectedPath(usize),
    #[error("edge id {0} does not exist")]
    UnknownEdge(u32),
    #[error("cannot flip {0:?}")]
    CannotFlip(HalfEdge),
    #[error("malformed surface description: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, SurfaceError>;

#[derive(Debug, Clone)]
pub struct Surface<K> {
    pub(crate) tri: Vec<[Vec2<K>; 3]>,
    pub(crate) glue: Vec<[HalfEdge; 3]>,
    pub(crate) eref: Vec<[EdgeRef; 3]>,
    pub(crate) label: Vec<[Label; 3]>,
    pub(crate) next_id: u32,
    /// Named edge chains carried through every retriangulation.
    pub classes: BTreeMap<String, Chain>,
}

/// Vertex classes: `of[t][i]` is the class of corner `(t, i)`; `corners[v]`
/// lists the corners of class `v` in counterclockwise order starting from the
/// smallest corner.
#[derive(Debug, Clone)]
pub struct Vertices {
    pub of: Vec<[usize; 3]>,
    pub corners: Vec<Vec<HalfEdge>>,
    pub labels: Vec<Label>,
}

impl Vertices {
    pub fn class_of(&self, c: HalfEdge) -> usize {
        self.of[c.t][c.e]
    }
    pub fn count(&self) -> usize {
        self.corners.len()
    }
    pub fn find(&self, l: Label) -> Option<usize> {
        self.labels.iter().position(|&x| x == l)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub genus: i64,
    /// Orders `a` of the singular vertices (cone angle `2π(a+1)`), in vertex
    /// class order.
    pub orders: Vec<u32>,
}

impl<K: Scalar> Surface<K> {
    /// Build from raw triangles; edge ids are assigned in half-edge order.
    pub fn from_parts(
        tri: Vec<[Vec2<K>; 3]>,
        glue: Vec<[HalfEdge; 3]>,
        label: Vec<[Label; 3]>,
    ) -> Result<Self> {
        let n = tri.len();
        let placeholder = EdgeRef { id: u32::MAX, fwd: true };
        let mut eref = vec![[placeholder; 3]; n];
        let mut next_id = 0;
        for t in 0..n {
            for e in 0..3 {
                if eref[t][e].id != u32::MAX {
                    continue;
                }
                let p = glue[t][e];
                if p.t >= n || p.e >= 3 {
                    return Err(SurfaceError::NonClosed(HalfEdge::new(t, e)));
                }
                eref[t][e] = EdgeRef { id: next_id, fwd: true };
                if p != HalfEdge::new(t, e) {
                    eref[p.t][p.e] = EdgeRef { id: next_id, fwd: false };
                }
                next_id += 1;
            }
        }
        let s = Surface { tri, glue, eref, label, next_id, classes: BTreeMap::new() };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for t in 0..self.tri.len() {
            let [a, b, c] = &self.tri[t];
            if !a.add(b).add(c).is_zero() {
                return Err(SurfaceError::OpenTriangle(t));
            }
            if a.cross(b).sign() <= 0 {
                return Err(SurfaceError::DegenerateTriangle(t));
            }
            for e in 0..3 {
                let h = HalfEdge::new(t, e);
                let p = self.glue[t][e];
                if p.t >= self.tri.len() || p == h || self.glue[p.t][p.e] != h {
                    return Err(SurfaceError::NonClosed(h));
                }
                if !self.vec(h).add(self.vec(p)).is_zero() {
                    return Err(SurfaceError::GluingMismatch(h, p));
                }
                let (r, q) = (self.eref[t][e], self.eref[p.t][p.e]);
                if r.id != q.id || r.fwd == q.fwd {
                    return Err(SurfaceError::GluingMismatch(h, p));
                }
            }
        }
        let v = self.vertices();
        for (i, corners) in v.corners.iter().enumerate() {
            let l = self.label[corners[0].t][corners[0].e];
            if corners.iter().any(|c| self.label[c.t][c.e] != l) {
                return Err(SurfaceError::LabelConflict(i));
            }
            let ang = self.cone_angle(&v, i);
            if l == Label::Regular && ang != 2 {
                return Err(SurfaceError::UnlabeledSingularity(i, ang));
            }
        }
        Ok(())
    }

    pub fn num_triangles(&self) -> usize {
        self.tri.len()
    }

    pub fn num_edges(&self) -> usize {
        self.tri.len() * 3 / 2
    }

    pub fn half_edges(&self) -> impl Iterator<Item = HalfEdge> + '_ {
        (0..self.tri.len()).flat_map(|t| (0..3).map(move |e| HalfEdge::new(t, e)))
    }

    pub fn vec(&self, h: HalfEdge) -> &Vec2<K> {
        &self.tri[h.t][h.e]
    }

    pub fn triangle(&self, t: usize) -> &[Vec2<K>; 3] {
        &self.tri[t]
    }

    pub fn partner(&self, h: HalfEdge) -> HalfEdge {
        self.glue[h.t][h.e]
    }

    pub fn edge_ref(&self, h: HalfEdge) -> EdgeRef {
        self.eref[h.t][h.e]
    }

    pub fn corner_label(&self, c: HalfEdge) -> Label {
        self.label[c.t][c.e]
    }

    /// Vertex positions of triangle `t` relative to its vertex 0.
    pub fn positions(&self, t: usize) -> [Vec2<K>; 3] {
        let p1 = self.tri[t][0].clone();
        let p2 = p1.add(&self.tri[t][1]);
        [Vec2::zero(), p1, p2]
    }

    /// Next corner counterclockwise around the same vertex.
    pub fn next_ccw(&self, c: HalfEdge) -> HalfEdge {
        self.partner(c.prev())
    }

    pub fn vertices(&self) -> Vertices {
        let n = self.tri.len();
        let mut of = vec![[usize::MAX; 3]; n];
        let mut corners = Vec::new();
        let mut labels = Vec::new();
        for t in 0..n {
            for e in 0..3 {
                if of[t][e] != usize::MAX {
                    continue;
                }
                let id = corners.len();
                let start = HalfEdge::new(t, e);
                let mut list = Vec::new();
                let mut c = start;
                loop {
                    of[c.t][c.e] = id;
                    list.push(c);
                    c = self.next_ccw(c);
                    if c == start {
                        break;
                    }
                }
                labels.push(self.label[t][e]);
                corners.push(list);
            }
        }
        Vertices { of, corners, labels }
    }

    /// Outgoing and closing directions `(d1, d2)` of the sector at corner `c`.
    pub fn corner_sector(&self, c: HalfEdge) -> (Vec2<K>, Vec2<K>) {
        (self.vec(c).clone(), self.vec(c.prev()).neg())
    }

    /// Cone angle of vertex class `v` in units of π.
    pub fn cone_angle(&self, verts: &Vertices, v: usize) -> u32 {
        let reference = Vec2::new(K::one(), K::zero());
        let turns = verts.corners[v]
            .iter()
            .filter(|&&c| {
                let (d1, d2) = self.corner_sector(c);
                in_sector(&d1, &d2, &reference)
            })
            .count();
        2 * turns as u32
    }

    pub fn stratum(&self) -> Stratum {
        let v = self.vertices();
        let chi = v.count() as i64 - self.num_edges() as i64 + self.num_triangles() as i64;
        let orders = (0..v.count())
            .map(|i| self.cone_angle(&v, i) / 2 - 1)
            .filter(|&a| a > 0)
            .collect();
        Stratum { genus: (2 - chi) / 2, orders }
    }

    pub fn area(&self) -> K {
        let mut a = K::zero();
        for t in &self.tri {
            a = a + t[0].cross(&t[1]);
        }
        a.half()
    }

    /// Chain term of half-edge `h`: its edge id and orientation sign.
    pub fn he_term(&self, h: HalfEdge) -> (u32, i64) {
        let r = self.edge_ref(h);
        (r.id, r.sign())
    }

    pub fn he_chain(&self, h: HalfEdge) -> Chain {
        let mut c = Chain::new();
        c.add_ref(self.edge_ref(h), 1);
        c
    }

    /// Map from edge id to its reference-oriented half-edge.
    pub fn edge_index(&self) -> HashMap<u32, HalfEdge> {
        let mut m = HashMap::with_capacity(self.num_edges());
        for h in self.half_edges() {
            let r = self.edge_ref(h);
            if r.fwd {
                m.insert(r.id, h);
            }
        }
        m
    }

    pub fn chain_holonomy(&self, c: &Chain) -> Result<Vec2<K>> {
        let idx = self.edge_index();
        self.chain_holonomy_with(&idx, c)
    }

    pub fn chain_holonomy_with(&self, idx: &HashMap<u32, HalfEdge>, c: &Chain) -> Result<Vec2<K>> {
        let mut x = K::zero();
        let mut y = K::zero();
        for (&id, &k) in &c.0 {
            let h = idx.get(&id).ok_or(SurfaceError::UnknownEdge(id))?;
            let v = self.vec(*h);
            let k = K::from_i64(k);
            x = x + v.x.clone() * &k;
            y = y + v.y.clone() * &k;
        }
        Ok(Vec2::new(x, y))
    }

    /// Holonomy of a connected edge path.
    pub fn path_holonomy(&self, path: &[HalfEdge]) -> Result<Vec2<K>> {
        let v = self.vertices();
        let mut acc = Vec2::zero();
        for (i, &h) in path.iter().enumerate() {
            if i > 0 && v.class_of(path[i - 1].next()) != v.class_of(h) {
                return Err(SurfaceError::DisconnectedPath(i));
            }
            acc = acc.add(self.vec(h));
        }
        Ok(acc)
    }

    pub fn path_chain(&self, path: &[HalfEdge]) -> Chain {
        let mut c = Chain::new();
        for &h in path {
            c.add_ref(self.edge_ref(h), 1);
        }
        c
    }

    /// Net boundary multiplicity of a chain at each vertex class.
    pub fn chain_boundary(&self, c: &Chain) -> Result<BTreeMap<usize, i64>> {
        let idx = self.edge_index();
        let v = self.vertices();
        let mut b = BTreeMap::new();
        for (&id, &k) in &c.0 {
            let h = *idx.get(&id).ok_or(SurfaceError::UnknownEdge(id))?;
            *b.entry(v.class_of(h.next())).or_insert(0) += k;
            *b.entry(v.class_of(h)).or_insert(0) -= k;
        }
        b.retain(|_, k| *k != 0);
        Ok(b)
    }

    /// Boundary coefficient of a chain: net multiplicity at White minus the
    /// multiplicity at Black, halved orientation-wise so a Black→White path
    /// counts +1.
    pub fn chain_bc(&self, c: &Chain) -> Result<i64> {
        let v = self.vertices();
        let b = self.chain_boundary(c)?;
        Ok(b.iter().filter(|(&i, _)| v.labels[i] == Label::White).map(|(_, &k)| k).sum())
    }

    /// `[end is White] − [start is White]` for half-edge `h`.
    pub fn he_bc(&self, h: HalfEdge) -> i64 {
        let w = |c: HalfEdge| (self.corner_label(c) == Label::White) as i64;
        w(h.next()) - w(h)
    }

    pub fn class(&self, name: &str) -> Option<&Chain> {
        self.classes.get(name)
    }

    pub fn class_holonomy(&self, name: &str) -> Option<Vec2<K>> {
        self.classes.get(name).map(|c| self.chain_holonomy(c).expect("tracked chain is valid"))
    }

    /// Exchange the Black and White labels.
    pub fn swap_labels(&self) -> Self {
        let mut s = self.clone();
        for l in s.label.iter_mut().flatten() {
            *l = match *l {
                Label::Black => Label::White,
                Label::White => Label::Black,
                other => other,
            };
        }
        s
    }

    /// `m · s`; a reflection reverses every triangle to keep orientation.
    pub fn linear_apply(&self, m: &Mat2<K>) -> Result<Self> {
        let det = m.det();
        if det.is_zero() {
            return Err(SurfaceError::SingularMatrix);
        }
        let mut s = self.clone();
        for t in s.tri.iter_mut() {
            for v in t.iter_mut() {
                *v = m.apply(v);
            }
        }
        if det.sign() < 0 {
            // Vertex order (0, 2, 1): edges (−e2, −e1, −e0).
            let perm = [2usize, 1, 0];
            let old_glue = s.glue.clone();
            for t in 0..s.tri.len() {
                let [a, b, c] = s.tri[t].clone();
                s.tri[t] = [c.neg(), b.neg(), a.neg()];
                let [ga, gb, gc] = old_glue[t];
                let remap = |h: HalfEdge| HalfEdge::new(h.t, perm[h.e]);
                s.glue[t] = [remap(gc), remap(gb), remap(ga)];
                let [ra, rb, rc] = s.eref[t];
                let flip = |r: EdgeRef| EdgeRef { id: r.id, fwd: !r.fwd };
                s.eref[t] = [flip(rc), flip(rb), flip(ra)];
                let [la, lb, lc] = s.label[t];
                s.label[t] = [la, lc, lb];
            }
            for c in s.classes.values_mut() {
                *c = c.scaled(-1);
            }
        }
        s.validate()?;
        Ok(s)
    }

    /// Whether flipping the edge of `h` yields two positive triangles.
    pub fn flippable(&self, h: HalfEdge) -> bool {
        let p = self.partner(h);
        if p.t == h.t {
            return false;
        }
        let b = self.vec(h.next());
        let f = self.vec(p.prev());
        let d = self.vec(p.next());
        let n = b.add(f);
        d.cross(&n).sign() > 0 && f.cross(b).sign() > 0
    }

    /// Replace the diagonal of the quadrilateral around `h` by the other
    /// diagonal. Triangle ids `h.t` and its neighbour are reused; tracked
    /// chains are rewritten around the removed edge.
    pub fn flip(&mut self, h: HalfEdge) -> Result<()> {
        if !self.flippable(h) {
            return Err(SurfaceError::CannotFlip(h));
        }
        self.flip_unchecked(h);
        Ok(())
    }

    pub(crate) fn flip_unchecked(&mut self, h: HalfEdge) {
        let (t, i) = (h.t, h.e);
        let p = self.partner(h);
        let (u, j) = (p.t, p.e);
        let he = HalfEdge::new;
        let (od, of, ob, oc) = (he(u, (j + 1) % 3), he(u, (j + 2) % 3), he(t, (i + 1) % 3), he(t, (i + 2) % 3));
        let b = self.vec(ob).clone();
        let c = self.vec(oc).clone();
        let d = self.vec(od).clone();
        let f = self.vec(of).clone();
        let n = b.add(&f);
        let (la, lb, lv, lw) = (self.label[t][i], self.label[t][(i + 1) % 3], self.label[t][(i + 2) % 3], self.label[u][(j + 2) % 3]);
        let (pd, pf, pb, pc) = (self.partner(od), self.partner(of), self.partner(ob), self.partner(oc));
        let (rd, rf, rb, rc) = (self.edge_ref(od), self.edge_ref(of), self.edge_ref(ob), self.edge_ref(oc));
        let ra = self.eref[t][i];
        let nid = self.next_id;
        self.next_id += 1;

        let map = |x: HalfEdge| -> HalfEdge {
            if x == od {
                he(t, 0)
            } else if x == oc {
                he(t, 2)
            } else if x == of {
                he(u, 0)
            } else if x == ob {
                he(u, 1)
            } else {
                x
            }
        };
        self.tri[t] = [d, n.clone(), c];
        self.tri[u] = [f, b, n.neg()];
        self.label[t] = [la, lw, lv];
        self.label[u] = [lw, lb, lv];
        self.eref[t] = [rd, EdgeRef { id: nid, fwd: true }, rc];
        self.eref[u] = [rf, rb, EdgeRef { id: nid, fwd: false }];
        let outer = [(he(t, 0), map(pd)), (he(t, 2), map(pc)), (he(u, 0), map(pf)), (he(u, 1), map(pb))];
        for (q, pq) in outer {
            self.glue[q.t][q.e] = pq;
            self.glue[pq.t][pq.e] = q;
        }
        self.glue[t][1] = he(u, 2);
        self.glue[u][2] = he(t, 1);

        // a = −b − c, in the removed edge's reference orientation.
        let mut with = Chain::new();
        with.add_ref(rb, -ra.sign());
        with.add_ref(rc, -ra.sign());
        for ch in self.classes.values_mut() {
            ch.substitute(ra.id, &with);
        }
    }

    /// Rewrite tracked chains: replace edge `id` by `with`.
    pub fn substitute_edge(&mut self, id: u32, with: &Chain) {
        for ch in self.classes.values_mut() {
            ch.substitute(id, with);
        }
    }

    pub(crate) fn fresh_id(&mut self) -> u32 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    // -----------------------------------------------------------------------
    // Polygon input and JSON

    /// Ear-clip simple counterclockwise polygons and glue them.
    ///
    /// `gluings` pairs polygon edges `(p, k)` (from vertex `k` to `k+1`);
    /// `labels` names corners `(p, v)` whose vertex class is Black/White;
    /// `classes` are chains of signed polygon edges.
    pub fn from_polygons(
        polys: &[Vec<Vec2<K>>],
        gluings: &[((usize, usize), (usize, usize))],
        labels: &[((usize, usize), Label)],
        classes: &BTreeMap<String, Vec<((usize, usize), i64)>>,
    ) -> Result<Self> {
        let mut tri = Vec::new();
        let mut corner_src = Vec::new();
        // polygon edge (p, k) -> half-edge
        let mut pedge: HashMap<(usize, usize), HalfEdge> = HashMap::new();
        let mut diag_glue = Vec::new();
        for (pi, poly) in polys.iter().enumerate() {
            if poly.len() < 3 {
                return Err(SurfaceError::InvalidPolygon(pi, "fewer than three vertices".into()));
            }
            let base = tri.len();
            let ears = ear_clip(poly).map_err(|m| SurfaceError::InvalidPolygon(pi, m))?;
            let n = poly.len();
            let mut diag: HashMap<(usize, usize), HalfEdge> = HashMap::new();
            for (k, &[a, b, c]) in ears.iter().enumerate() {
                let t = base + k;
                let vs = [a, b, c];
                tri.push([poly[b].sub(&poly[a]), poly[c].sub(&poly[b]), poly[a].sub(&poly[c])]);
                corner_src.push([(pi, a), (pi, b), (pi, c)]);
                for e in 0..3 {
                    let (x, y) = (vs[e], vs[(e + 1) % 3]);
                    if y == (x + 1) % n {
                        pedge.insert((pi, x), HalfEdge::new(t, e));
                    } else if let Some(o) = diag.remove(&(y, x)) {
                        diag_glue.push((HalfEdge::new(t, e), o));
                    } else {
                        diag.insert((x, y), HalfEdge::new(t, e));
                    }
                }
            }
            debug_assert!(diag.is_empty());
        }
        let dummy = HalfEdge::new(usize::MAX, 0);
        let mut glue = vec![[dummy; 3]; tri.len()];
        for &(a, b) in &diag_glue {
            glue[a.t][a.e] = b;
            glue[b.t][b.e] = a;
        }
        for &(x, y) in gluings {
            let a = *pedge.get(&x).ok_or_else(|| SurfaceError::Json(format!("no polygon edge {x:?}")))?;
            let b = *pedge.get(&y).ok_or_else(|| SurfaceError::Json(format!("no polygon edge {y:?}")))?;
            if glue[a.t][a.e] != dummy || glue[b.t][b.e] != dummy || a == b {
                return Err(SurfaceError::Json(format!("edge glued twice: {x:?} {y:?}")));
            }
            glue[a.t][a.e] = b;
            glue[b.t][b.e] = a;
        }
        for t in 0..tri.len() {
            for e in 0..3 {
                if glue[t][e] == dummy {
                    return Err(SurfaceError::NonClosed(HalfEdge::new(t, e)));
                }
                let p = glue[t][e];
                if !tri[t][e].add(&tri[p.t][p.e]).is_zero() {
                    return Err(SurfaceError::GluingMismatch(HalfEdge::new(t, e), p));
                }
            }
        }
        // Provisional labels, then propagate the given labels over classes.
        let label = vec![[Label::Regular; 3]; tri.len()];
        let mut s = Surface {
            tri,
            glue,
            eref: Vec::new(),
            label,
            next_id: 0,
            classes: BTreeMap::new(),
        };
        s.assign_ids();
        let v = s.vertices();
        let mut class_label = vec![None; v.count()];
        let mut corner_of: HashMap<(usize, usize), HalfEdge> = HashMap::new();
        for (t, src) in corner_src.iter().enumerate() {
            for e in 0..3 {
                corner_of.entry(src[e]).or_insert(HalfEdge::new(t, e));
            }
        }
        for &(pv, l) in labels {
            let c = *corner_of.get(&pv).ok_or_else(|| SurfaceError::Json(format!("no polygon vertex {pv:?}")))?;
            let cls = v.class_of(c);
            match class_label[cls] {
                Some(old) if old != l => return Err(SurfaceError::LabelConflict(cls)),
                _ => class_label[cls] = Some(l),
            }
        }
        for t in 0..s.tri.len() {
            for e in 0..3 {
                s.label[t][e] = class_label[v.of[t][e]].unwrap_or(Label::Regular);
            }
        }
        for (name, terms) in classes {
            let mut ch = Chain::new();
            for &(pe, k) in terms {
                let h = *pedge.get(&pe).ok_or_else(|| SurfaceError::Json(format!("no polygon edge {pe:?}")))?;
                ch.add_ref(s.edge_ref(h), k);
            }
            s.classes.insert(name.clone(), ch);
        }
        s.validate()?;
        Ok(s)
    }

    fn assign_ids(&mut self) {
        let n = self.tri.len();
        let placeholder = EdgeRef { id: u32::MAX, fwd: true };
        self.eref = vec![[placeholder; 3]; n];
        let mut next = 0;
        for t in 0..n {
            for e in 0..3 {
                if self.eref[t][e].id != u32::MAX {
                    continue;
                }
                let p = self.glue[t][e];
                self.eref[t][e] = EdgeRef { id: next, fwd: true };
                self.eref[p.t][p.e] = EdgeRef { id: next, fwd: false };
                next += 1;
            }
        }
        self.next_id = next;
    }

    /// Renumber edge ids to `0..E` in half-edge order, rewriting classes.
    pub fn canonicalize_ids(&mut self) {
        let mut map = HashMap::new();
        for h in self.half_edges().collect::<Vec<_>>() {
            let r = self.edge_ref(h);
            if r.fwd {
                let next = map.len() as u32;
                map.entry(r.id).or_insert(next);
            }
        }
        for t in 0..self.tri.len() {
            for e in 0..3 {
                let r = &mut self.eref[t][e];
                r.id = map[&r.id];
            }
        }
        for ch in self.classes.values_mut() {
            *ch = Chain(ch.0.iter().map(|(id, &k)| (map[id], k)).collect());
        }
        self.next_id = map.len() as u32;
    }

    /// JSON description: one polygon per triangle (vertex 0 at the origin),
    /// half-edge gluings, one labelled corner per singular class, and classes
    /// as signed triangle edges.
    pub fn to_json(&self) -> Value {
        let polygons: Vec<Value> = (0..self.tri.len())
            .map(|t| {
                let pts: Vec<Value> =
                    self.positions(t).iter().map(|p| json!([p.x.to_json(), p.y.to_json()])).collect();
                json!({ "vertices": pts })
            })
            .collect();
        let mut gluings = Vec::new();
        for h in self.half_edges() {
            let p = self.partner(h);
            if h < p {
                gluings.push(json!([[h.t, h.e], [p.t, p.e]]));
            }
        }
        let v = self.vertices();
        let mut labels = serde_json::Map::new();
        for l in [Label::Black, Label::White] {
            let corners: Vec<Value> = (0..v.count())
                .filter(|&i| v.labels[i] == l)
                .map(|i| json!([v.corners[i][0].t, v.corners[i][0].e]))
                .collect();
            if !corners.is_empty() {
                labels.insert(l.name().into(), Value::from(corners));
            }
        }
        let idx = self.edge_index();
        let mut classes = serde_json::Map::new();
        for (name, ch) in &self.classes {
            let terms: Vec<Value> = ch
                .0
                .iter()
                .map(|(id, &k)| {
                    let h = idx[id];
                    json!([h.t, h.e, k])
                })
                .collect();
            classes.insert(name.clone(), Value::from(terms));
        }
        json!({ "polygons": polygons, "gluings": gluings, "labels": labels, "classes": classes })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| SurfaceError::Json(m.to_string());
        let polys_v = v.get("polygons").and_then(Value::as_array).ok_or_else(|| bad("missing polygons"))?;
        let mut polys = Vec::new();
        for p in polys_v {
            let verts = p.get("vertices").and_then(Value::as_array).ok_or_else(|| bad("missing vertices"))?;
            let mut poly = Vec::new();
            for q in verts {
                let xy = q.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("vertex must be [x, y]"))?;
                let x = K::from_json(&xy[0]).map_err(SurfaceError::Json)?;
                let y = K::from_json(&xy[1]).map_err(SurfaceError::Json)?;
                poly.push(Vec2::new(x, y));
            }
            polys.push(poly);
        }
        let pair = |x: &Value| -> Result<(usize, usize)> {
            let a = x.as_array().filter(|a| a.len() >= 2).ok_or_else(|| bad("expected [p, e]"))?;
            let p = a[0].as_u64().ok_or_else(|| bad("index must be an integer"))? as usize;
            let e = a[1].as_u64().ok_or_else(|| bad("index must be an integer"))? as usize;
            Ok((p, e))
        };
        let mut gluings = Vec::new();
        for g in v.get("gluings").and_then(Value::as_array).ok_or_else(|| bad("missing gluings"))? {
            let g = g.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("gluing must be a pair"))?;
            gluings.push((pair(&g[0])?, pair(&g[1])?));
        }
        let mut labels = Vec::new();
        if let Some(obj) = v.get("labels").and_then(Value::as_object) {
            for (name, corners) in obj {
                let l = match name.as_str() {
                    "black" => Label::Black,
                    "white" => Label::White,
                    "regular" => Label::Regular,
                    other => return Err(bad(&format!("unknown label {other}"))),
                };
                let corners = corners.as_array().ok_or_else(|| bad("label corners must be a list"))?;
                // A bare [p, v] pair is accepted as a single corner.
                if corners.len() == 2 && corners.iter().all(Value::is_u64) {
                    labels.push((pair(&Value::from(corners.clone()))?, l));
                } else {
                    for c in corners {
                        labels.push((pair(c)?, l));
                    }
                }
            }
        }
        let mut classes = BTreeMap::new();
        if let Some(obj) = v.get("classes").and_then(Value::as_object) {
            for (name, terms) in obj {
                let mut list = Vec::new();
                for term in terms.as_array().ok_or_else(|| bad("class must be a list"))? {
                    let a = term.as_array().filter(|a| a.len() == 3).ok_or_else(|| bad("class term must be [p, e, k]"))?;
                    let k = a[2].as_i64().ok_or_else(|| bad("coefficient must be an integer"))?;
                    list.push((pair(term)?, k));
                }
                classes.insert(name.clone(), list);
            }
        }
        Self::from_polygons(&polys, &gluings, &labels, &classes)
    }
}

/// Ear clipping with exact predicates; returns vertex-index triples.
pub(crate) fn ear_clip<K: Scalar>(poly: &[Vec2<K>]) -> std::result::Result<Vec<[usize; 3]>, String> {
    let orient = |a: &Vec2<K>, b: &Vec2<K>, c: &Vec2<K>| b.sub(a).cross(&c.sub(a)).sign();
    let mut area2 = K::zero();
    for i in 0..poly.len() {
        area2 = area2 + poly[i].cross(&poly[(i + 1) % poly.len()]);
    }
    if area2.sign() <= 0 {
        return Err("not counterclockwise".into());
    }
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut out = Vec::new();
    while idx.len() > 3 {
        let m = idx.len();
        let mut found = None;
        for k in 0..m {
            let (a, b, c) = (idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]);
            if orient(&poly[a], &poly[b], &poly[c]) <= 0 {
                continue;
            }
            let blocked = idx.iter().any(|&q| {
                q != a
                    && q != b
                    && q != c
                    && orient(&poly[a], &poly[b], &poly[q]) >= 0
                    && orient(&poly[b], &poly[c], &poly[q]) >= 0
                    && orient(&poly[c], &poly[a], &poly[q]) >= 0
            });
            if !blocked {
                found = Some(k);
                break;
            }
        }
        let k = found.ok_or("no ear found (polygon not simple)")?;
        out.push([idx[(k + m - 1) % m], idx[k], idx[(k + 1) % m]]);
        idx.remove(k);
    }
    if orient(&poly[idx[0]], &poly[idx[1]], &poly[idx[2]]) <= 0 {
        return Err("degenerate final triangle".into());
    }
    out.push([idx[0], idx[1], idx[2]]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Q;

    fn v(x: i64, y: i64) -> Vec2<Q> {
        Vec2::new(Q::from_integer(x.into()), Q::from_integer(y.into()))
    }

    pub(crate) fn square_torus() -> Surface<Q> {
        let sq = vec![v(0, 0), v(1, 0), v(1, 1), v(0, 1)];
        Surface::from_polygons(&[sq], &[((0, 0), (0, 2)), ((0, 1), (0, 3))], &[], &BTreeMap::new()).unwrap()
    }

    #[test]
    fn torus_basics() {
        let s = square_torus();
        assert_eq!(s.num_triangles(), 2);
        let st = s.stratum();
        assert_eq!(st, Stratum { genus: 1, orders: vec![] });
        let vs = s.vertices();
        assert_eq!(vs.count(), 1);
        assert_eq!(s.cone_angle(&vs, 0), 2);
        assert_eq!(s.area(), Q::from_integer(1.into()));
    }

    #[test]
    fn reversed_pairing_is_rejected() {
        let sq = vec![v(0, 0), v(1, 0), v(1, 1), v(0, 1)];
        let r = Surface::from_polygons(&[sq], &[((0, 0), (0, 1)), ((0, 2), (0, 3))], &[], &BTreeMap::new());
        assert!(matches!(r, Err(SurfaceError::GluingMismatch(..))));
    }

    #[test]
    fn unpaired_edge_is_rejected() {
        let sq = vec![v(0, 0), v(1, 0), v(1, 1), v(0, 1)];
        let r = Surface::from_polygons(&[sq], &[((0, 0), (0, 2))], &[], &BTreeMap::new());
        assert!(matches!(r, Err(SurfaceError::NonClosed(..))));
    }

    #[test]
    fn flip_preserves_chains_and_area() {
        let mut s = square_torus();
        let h = HalfEdge::new(0, 0);
        s.classes.insert("a".into(), s.he_chain(h));
        let before = s.class_holonomy("a").unwrap();
        let d = s
            .half_edges()
            .find(|&h| s.flippable(h))
            .expect("some edge is flippable");
        s.flip(d).unwrap();
        s.validate().unwrap();
        assert_eq!(s.class_holonomy("a").unwrap(), before);
        assert_eq!(s.area(), Q::from_integer(1.into()));
    }

    #[test]
    fn json_round_trip() {
        let s = square_torus();
        let j = s.to_json();
        let t = Surface::<Q>::from_json(&j).unwrap();
        assert_eq!(t.area(), s.area());
        assert_eq!(t.to_json(), j);
    }

    #[test]
    fn reflection_keeps_orientation() {
        let s = square_torus();
        let m = Mat2::diag(Q::from_integer((-1).into()), Q::from_integer(1.into()));
        let r = s.linear_apply(&m).unwrap();
        assert_eq!(r.area(), s.area());
    }
}
