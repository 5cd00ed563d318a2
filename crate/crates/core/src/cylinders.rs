//! Vertical cylinder decompositions.
//!
//! Every upward vertical separatrix is traced to its end and inserted as a
//! chain of edges. The vertical saddle connections then cut the surface into
//! components, each of which is developed into the plane as a strip
//! `0 ≤ x ≤ width`: its left side is made of saddle connections whose
//! half-edges in the component point down, its right side of ones pointing
//! up.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::ay::{alpha_pow, circumference};
use crate::diagram::{CylinderSpec, Diagram, SaddleSpec};
use crate::field::NfElem;
use crate::frame::{solve_unique, Frame};
use crate::geom::Vec2;
use crate::homology::{self, CoreDual, RelHomClass, BASIS};
use crate::refine::{insert_segment, RefineError};
use crate::scalar::Scalar;
use crate::surface::{Chain, EdgeRef, HalfEdge, Label, Surface};
use crate::trace::{prongs, trace_from_corner, TraceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CylinderError {
    #[error("vertical separatrix did not close within {0} crossings")]
    NotPeriodicWithinBudget(usize),
    #[error("component {0} is not a flat cylinder")]
    NotACylinder(usize),
    #[error(transparent)]
    Trace(TraceError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error("|j| = {0} exceeds the guard 40")]
    GuardExceeded(i64),
}

pub type Result<T> = std::result::Result<T, CylinderError>;

/// A vertical saddle connection, oriented upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaddleConnection<K> {
    pub start: Label,
    pub end: Label,
    pub holonomy: Vec2<K>,
    /// Edges crossed by the trace before insertion.
    pub crossings: usize,
    /// The inserted pieces, bottom to top, oriented upward.
    pub pieces: Vec<EdgeRef>,
}

impl<K: Scalar> SaddleConnection<K> {
    pub fn length(&self) -> &K {
        &self.holonomy.y
    }

    pub fn chain(&self) -> Chain {
        let mut c = Chain::new();
        self.pieces.iter().for_each(|&p| c.add_ref(p, 1));
        c
    }
}

/// How the two singularities sit on a cylinder's boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryKind {
    /// White on the left boundary, Black on the right.
    WhiteLeft,
    BlackLeft,
    /// One singularity on both boundaries.
    Same,
    /// A boundary circle carries both singularities.
    Mixed,
}

impl BoundaryKind {
    /// Direction of the vertical rel flow on this cylinder's twist.
    pub fn rel_weight(self) -> Option<i64> {
        match self {
            BoundaryKind::WhiteLeft => Some(-1),
            BoundaryKind::BlackLeft => Some(1),
            BoundaryKind::Same => Some(0),
            BoundaryKind::Mixed => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundaryKind::WhiteLeft => "white-left",
            BoundaryKind::BlackLeft => "black-left",
            BoundaryKind::Same => "same",
            BoundaryKind::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Cylinder<K> {
    pub circumference: K,
    pub width: K,
    /// Saddle connection indices on each side, bottom to top from the base
    /// points of the twist saddle connection.
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    /// Holonomy `(width, y)` of the crossing from the left base point to the
    /// right one, with `|y|` minimal.
    pub twist_sc: Vec2<K>,
    pub kind: BoundaryKind,
    /// Upward core curve along the left boundary, on the refined surface.
    pub core_chain: Chain,
    /// Core class in the basis, when the surface carries one.
    pub core: Option<RelHomClass>,
    pub dual: Option<CoreDual>,
}

impl<K: Scalar> Cylinder<K> {
    pub fn twist(&self) -> &K {
        &self.twist_sc.y
    }
}

#[derive(Debug, Clone)]
pub struct CylinderDecomposition<K> {
    /// The source with every vertical saddle connection inserted as edges;
    /// tracked classes are carried along.
    pub surface: Surface<K>,
    pub saddles: Vec<SaddleConnection<K>>,
    /// Ordered by circumference, then width.
    pub cylinders: Vec<Cylinder<K>>,
    /// Cylinder of every edge not on a saddle connection.
    pub edge_cylinder: HashMap<u32, usize>,
}

impl<K: Scalar> CylinderDecomposition<K> {
    /// Counts of white-left, black-left and same-boundary cylinders.
    pub fn partition(&self) -> (usize, usize, usize) {
        let n = |k| self.cylinders.iter().filter(|c| c.kind == k).count();
        (n(BoundaryKind::WhiteLeft), n(BoundaryKind::BlackLeft), n(BoundaryKind::Same))
    }

    pub fn total_area(&self) -> K {
        self.cylinders.iter().fold(K::zero(), |a, c| a + c.width.clone() * &c.circumference)
    }

    /// The diagram these cylinders and saddle connections assemble into.
    pub fn diagram(&self) -> Diagram<K> {
        Diagram {
            saddles: self
                .saddles
                .iter()
                .map(|s| SaddleSpec { length: s.length().clone(), start: s.start, end: s.end })
                .collect(),
            cylinders: self
                .cylinders
                .iter()
                .map(|c| CylinderSpec {
                    width: c.width.clone(),
                    left: c.left.clone(),
                    right: c.right.clone(),
                    twist: c.twist().clone(),
                })
                .collect(),
        }
    }

    /// Crossings of `chain` (on the refined surface) through cylinder `i`,
    /// counted left to right.
    pub fn crossing_number(&self, chain: &Chain, i: usize) -> Option<i64> {
        let idx = self.surface.edge_index();
        let mut x = K::zero();
        for (id, &k) in &chain.0 {
            if self.edge_cylinder.get(id) == Some(&i) {
                x = x + self.surface.vec(idx[id]).x.clone() * K::from_i64(k);
            }
        }
        exact_integer(&(x / &self.cylinders[i].width))
    }

    pub fn to_json(&self) -> Value {
        let (k, l, m) = self.partition();
        json!({
            "saddle_connections": self.saddles.iter().map(|s| json!({
                "start": s.start.name(),
                "end": s.end.name(),
                "length": s.length().to_json(),
            })).collect::<Vec<_>>(),
            "cylinders": self.cylinders.iter().map(|c| json!({
                "circumference": c.circumference.to_json(),
                "width": c.width.to_json(),
                "twist": c.twist().to_json(),
                "left": c.left,
                "right": c.right,
                "boundary": c.kind.name(),
                "core": c.core.map(|x| x.coeffs.to_vec()),
            })).collect::<Vec<_>>(),
            "partition": [k, l, m],
        })
    }
}

fn exact_integer<K: Scalar>(x: &K) -> Option<i64> {
    let n = x.to_f64().round() as i64;
    (*x == K::from_i64(n)).then_some(n)
}

/// `y mod c` in `[0, c)`.
fn reduce_mod<K: Scalar>(y: &K, c: &K) -> K {
    let n = (y.to_f64() / c.to_f64()).floor() as i64;
    let mut r = y.clone() - c.clone() * K::from_i64(n);
    while r.sign() < 0 {
        r = r + c;
    }
    while r.cmp_exact(c).is_ge() {
        r = r - c;
    }
    r
}

/// Insert every upward vertical saddle connection as an edge chain.
fn insert_saddles<K: Scalar>(s: &mut Surface<K>, budget: usize) -> Result<Vec<SaddleConnection<K>>> {
    let up = Vec2::new(K::zero(), K::one());
    let mut out: Vec<SaddleConnection<K>> = Vec::new();
    let mut ids: HashMap<u32, usize> = HashMap::new();
    loop {
        let fresh = prongs(s, &up).into_iter().find(|&c| !(s.vec(c).same_direction(&up) && ids.contains_key(&s.edge_ref(c).id)));
        let Some(c) = fresh else { return Ok(out) };
        let seg = trace_from_corner(s, c, &up, budget).map_err(|e| match e {
            TraceError::BudgetExceeded(b) => CylinderError::NotPeriodicWithinBudget(b),
            e => CylinderError::Trace(e),
        })?;
        let pieces = insert_segment(s, c, &seg.holonomy)?;
        pieces.iter().for_each(|p| {
            ids.insert(p.id, out.len());
        });
        out.push(SaddleConnection {
            start: seg.start_label,
            end: seg.end_label,
            holonomy: seg.holonomy,
            crossings: seg.crossings,
            pieces,
        });
    }
}

/// Developed start position of every half-edge of one component.
struct Strip<K> {
    tris: Vec<usize>,
    start: HashMap<HalfEdge, Vec2<K>>,
}

fn develop<K: Scalar>(s: &Surface<K>, seed: usize, cut: &HashMap<u32, usize>, comp: &mut [usize], id: usize) -> Strip<K> {
    let mut origin: HashMap<usize, Vec2<K>> = HashMap::from([(seed, Vec2::zero())]);
    let mut tris = vec![seed];
    let mut queue = VecDeque::from([seed]);
    comp[seed] = id;
    while let Some(t) = queue.pop_front() {
        let pos = s.positions(t).map(|p| p.add(&origin[&t]));
        for e in 0..3 {
            let h = HalfEdge::new(t, e);
            if cut.contains_key(&s.edge_ref(h).id) {
                continue;
            }
            let p = s.partner(h);
            if comp[p.t] != usize::MAX {
                continue;
            }
            comp[p.t] = id;
            // p starts where h ends.
            let p_start = pos[(e + 1) % 3].clone();
            let q = s.positions(p.t);
            origin.insert(p.t, p_start.sub(&q[p.e]));
            tris.push(p.t);
            queue.push_back(p.t);
        }
    }
    let mut start = HashMap::new();
    for &t in &tris {
        let q = s.positions(t);
        for e in 0..3 {
            start.insert(HalfEdge::new(t, e), q[e].add(&origin[&t]));
        }
    }
    Strip { tris, start }
}

/// Cut `s` along its vertical saddle connections into cylinders.
pub fn vertical_decomposition<K: Scalar>(s: &Surface<K>, budget: usize) -> Result<CylinderDecomposition<K>> {
    let mut r = s.clone();
    let saddles = insert_saddles(&mut r, budget)?;
    let cut: HashMap<u32, usize> =
        saddles.iter().enumerate().flat_map(|(i, sc)| sc.pieces.iter().map(move |p| (p.id, i))).collect();
    let piece_up: HashMap<u32, bool> = saddles.iter().flat_map(|sc| sc.pieces.iter().map(|p| (p.id, p.fwd))).collect();
    let first_piece: HashMap<u32, usize> = saddles.iter().enumerate().map(|(i, sc)| (sc.pieces[0].id, i)).collect();

    let mut comp = vec![usize::MAX; r.num_triangles()];
    let mut cylinders = Vec::new();
    let mut edge_cylinder = HashMap::new();
    for seed in 0..r.num_triangles() {
        if comp[seed] != usize::MAX {
            continue;
        }
        let ci = cylinders.len();
        let strip = develop(&r, seed, &cut, &mut comp, ci);
        let xs: Vec<&K> = strip.start.values().map(|p| &p.x).collect();
        let xmin = xs.iter().copied().min_by(|a, b| a.cmp_exact(b)).unwrap().clone();
        let xmax = xs.iter().copied().max_by(|a, b| a.cmp_exact(b)).unwrap().clone();
        let width = xmax.clone() - &xmin;
        let area = strip.tris.iter().fold(K::zero(), |a, &t| a + r.triangle(t)[0].cross(&r.triangle(t)[1])).half();
        if width.sign() <= 0 {
            return Err(CylinderError::NotACylinder(ci));
        }
        let circ = area / &width;
        // Bottom point height of each boundary saddle connection.
        let mut left: Vec<(usize, K)> = Vec::new();
        let mut right: Vec<(usize, K)> = Vec::new();
        let mut left_core = Chain::new();
        for &t in &strip.tris {
            for e in 0..3 {
                let h = HalfEdge::new(t, e);
                let er = r.edge_ref(h);
                let Some(&sc) = cut.get(&er.id) else {
                    if er.fwd {
                        edge_cylinder.insert(er.id, ci);
                    }
                    continue;
                };
                let up = er.fwd == piece_up[&er.id];
                let p = &strip.start[&h];
                let (on_side, x) = if up { (&mut right, &xmax) } else { (&mut left, &xmin) };
                if p.x != *x {
                    return Err(CylinderError::NotACylinder(ci));
                }
                if !up {
                    left_core.add_ref(er, -1);
                }
                if first_piece.get(&er.id) == Some(&sc) {
                    let y = if up { p.y.clone() } else { p.y.clone() + &r.vec(h).y };
                    on_side.push((sc, y));
                }
            }
        }
        let span = |v: &[(usize, K)]| v.iter().fold(K::zero(), |a, (i, _)| a + saddles[*i].length());
        if left.is_empty() || right.is_empty() || span(&left) != circ || span(&right) != circ {
            return Err(CylinderError::NotACylinder(ci));
        }
        let (l0, r0, twist) = choose_base(&left, &right, &circ);
        let order = |v: &[(usize, K)], base: &K| {
            let mut w: Vec<(K, usize)> = v.iter().map(|(i, y)| (reduce_mod(&(y.clone() - base), &circ), *i)).collect();
            w.sort_by(|a, b| a.0.cmp_exact(&b.0));
            w.into_iter().map(|(_, i)| i).collect::<Vec<_>>()
        };
        let left_ids = order(&left, &left[l0].1);
        let right_ids = order(&right, &right[r0].1);
        let labels = |ids: &[usize]| {
            let mut v: Vec<Label> = ids.iter().map(|&i| saddles[i].start).collect();
            v.sort();
            v.dedup();
            v
        };
        let kind = match (labels(&left_ids).as_slice(), labels(&right_ids).as_slice()) {
            ([Label::White], [Label::Black]) => BoundaryKind::WhiteLeft,
            ([Label::Black], [Label::White]) => BoundaryKind::BlackLeft,
            ([a], [b]) if a == b => BoundaryKind::Same,
            _ => BoundaryKind::Mixed,
        };
        cylinders.push(Cylinder {
            circumference: circ,
            width: width.clone(),
            left: left_ids,
            right: right_ids,
            twist_sc: Vec2::new(width, twist),
            kind,
            core_chain: left_core,
            core: None,
            dual: None,
        });
    }

    let mut d = CylinderDecomposition { surface: r, saddles, cylinders, edge_cylinder };
    attach_classes(&mut d);
    // Order by circumference then width, renumbering edge membership.
    let mut perm: Vec<usize> = (0..d.cylinders.len()).collect();
    perm.sort_by(|&a, &b| {
        let (x, y) = (&d.cylinders[a], &d.cylinders[b]);
        x.circumference.cmp_exact(&y.circumference).then(x.width.cmp_exact(&y.width))
    });
    let mut rank = vec![0; perm.len()];
    perm.iter().enumerate().for_each(|(new, &old)| rank[old] = new);
    let mut cyls: Vec<Option<Cylinder<K>>> = d.cylinders.into_iter().map(Some).collect();
    d.cylinders = perm.iter().map(|&i| cyls[i].take().unwrap()).collect();
    d.edge_cylinder.values_mut().for_each(|c| *c = rank[*c]);
    Ok(d)
}

/// Base points `(left, right, y)` of the crossing with minimal `|y|`,
/// preferring `y ≥ 0` and then the smallest saddle indices.
fn choose_base<K: Scalar>(left: &[(usize, K)], right: &[(usize, K)], c: &K) -> (usize, usize, K) {
    let mut best: Option<(K, bool, usize, usize, usize, usize, K)> = None;
    for (a, (ia, ya)) in left.iter().enumerate() {
        for (b, (ib, yb)) in right.iter().enumerate() {
            let t0 = reduce_mod(&(yb.clone() - ya), c);
            let t1 = t0.clone() - c;
            let t = if t1.abs_exact().cmp_exact(&t0).is_lt() { t1 } else { t0 };
            let key = (t.abs_exact(), t.sign() < 0, *ia, *ib, a, b, t);
            let better = match &best {
                None => true,
                Some(o) => key
                    .0
                    .cmp_exact(&o.0)
                    .then(key.1.cmp(&o.1))
                    .then(key.2.cmp(&o.2))
                    .then(key.3.cmp(&o.3))
                    .is_lt(),
            };
            if better {
                best = Some(key);
            }
        }
    }
    let (_, _, _, _, a, b, t) = best.expect("nonempty sides");
    (a, b, t)
}

/// Core classes and crossing cochains in the basis, when tracked.
fn attach_classes<K: Scalar>(d: &mut CylinderDecomposition<K>) {
    let s = &d.surface;
    if BASIS.iter().any(|b| s.class(b).is_none()) {
        return;
    }
    let frame = Frame::new(s);
    let basis: Vec<Vec<i64>> = BASIS.iter().map(|b| frame.coords(&s.classes[*b])).collect();
    let mut gens: Vec<Chain> = (0..4).map(|j| s.classes[&format!("beta{j}")].clone()).collect();
    gens.extend((0..4).map(|j| {
        if j == 3 {
            homology::gamma3().chain(s).expect("basis is tracked")
        } else {
            s.classes[&format!("gamma{j}")].clone()
        }
    }));
    let mut out = Vec::new();
    for i in 0..d.cylinders.len() {
        let core = express(&basis, &frame.coords(&d.cylinders[i].core_chain));
        let vals: Option<Vec<i64>> = gens.iter().map(|g| d.crossing_number(g, i)).collect();
        let dual = vals.map(|v| CoreDual { beta: [v[0], v[1], v[2], v[3]], gamma: [v[4], v[5], v[6], v[7]] });
        out.push((core, dual));
    }
    for (c, (core, dual)) in d.cylinders.iter_mut().zip(out) {
        c.core = core;
        c.dual = dual;
    }
}

/// Integer coordinates of `v` in the span of `basis`, if it lies there.
fn express(basis: &[Vec<i64>], v: &[i64]) -> Option<RelHomClass> {
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let n = basis.len();
    let rows: Vec<Vec<BigRational>> =
        (0..v.len()).map(|r| basis.iter().map(|b| q(b[r])).chain(std::iter::once(q(v[r]))).collect()).collect();
    let sol = solve_unique(rows, n)?;
    let mut c = RelHomClass::ZERO;
    for (a, x) in c.coeffs.iter_mut().zip(sol) {
        if !x.is_integer() {
            return None;
        }
        *a = x.to_integer().to_i128()?;
    }
    Some(c)
}

/// Width of the `j`-th cylinder family at rel time `r`: it exists on
/// `(α^{3−j}, α^{−(j+1)})` and peaks at `r = α^{−j}`.
pub fn width_function(j: i64, r: &NfElem) -> Result<NfElem> {
    if j.abs() > 40 {
        return Err(CylinderError::GuardExceeded(j));
    }
    let (lo, mid, hi) = (alpha_pow(3 - j), alpha_pow(-j), alpha_pow(-(j + 1)));
    Ok(if r.cmp_exact(&lo).is_le() || r.cmp_exact(&hi).is_ge() {
        NfElem::zero()
    } else if r.cmp_exact(&mid).is_le() {
        r.clone() - lo
    } else {
        hi - r
    })
}

/// Comparison of one cylinder with the family formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderCheck {
    pub index: usize,
    /// Family index read off the circumference.
    pub j: Option<i64>,
    pub core_ok: bool,
    pub circumference_ok: bool,
    pub width_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometryReport {
    pub cylinders: Vec<CylinderCheck>,
    /// Σ width·circumference equals the area of the surface.
    pub area_ok: bool,
    /// Every family alive at `r` was found.
    pub count_ok: bool,
}

impl GeometryReport {
    pub fn passed(&self) -> bool {
        self.area_ok && self.count_ok && self.cylinders.iter().all(|c| c.core_ok && c.circumference_ok && c.width_ok)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.area_ok {
            out.push("area".into());
        }
        if !self.count_ok {
            out.push("count".into());
        }
        for c in &self.cylinders {
            for (ok, what) in [(c.core_ok, "core"), (c.circumference_ok, "circumference"), (c.width_ok, "width")] {
                if !ok {
                    out.push(format!("cylinder {} (j = {:?}): {what}", c.index, c.j));
                }
            }
        }
        out
    }
}

/// Check a decomposition of `x_r`, `r > 0`, against the family formulas.
pub fn check_geometry(d: &CylinderDecomposition<NfElem>, r: &NfElem) -> GeometryReport {
    let base = circumference(0).to_f64();
    let ln_a = alpha_pow(1).to_f64().ln();
    let mut found = Vec::new();
    let cylinders = d
        .cylinders
        .iter()
        .enumerate()
        .map(|(index, c)| {
            let guess = ((c.circumference.to_f64() / base).ln() / ln_a).round() as i64;
            let j = (guess - 1..=guess + 1).find(|&j| j.abs() <= 40 && circumference(j) == c.circumference);
            let Some(j) = j else {
                return CylinderCheck { index, j: None, core_ok: false, circumference_ok: false, width_ok: false };
            };
            found.push(j);
            let core_ok = c.core.is_some() && homology::extend_family(j).ok().map(|(b, g)| b.plus(&g)) == c.core;
            let width_ok = width_function(j, r).map(|w| w == c.width).unwrap_or(false);
            CylinderCheck { index, j: Some(j), core_ok, circumference_ok: true, width_ok }
        })
        .collect();
    let alive: Vec<i64> = (-41..=41).filter(|&j| width_function(j, r).map(|w| w.sign() > 0).unwrap_or(false)).collect();
    found.sort_unstable();
    GeometryReport { cylinders, area_ok: d.total_area() == d.surface.area(), count_ok: found == alive }
}

/// Per-cylinder table rows `(j, circumference, width, twist)`.
pub fn geometry_rows(d: &CylinderDecomposition<NfElem>) -> BTreeMap<usize, (Option<i64>, f64, f64, f64)> {
    let base = circumference(0).to_f64();
    let ln_a = alpha_pow(1).to_f64().ln();
    d.cylinders
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let j = ((c.circumference.to_f64() / base).ln() / ln_a).round() as i64;
            let j = (circumference(j) == c.circumference).then_some(j);
            (i, (j, c.circumference.to_f64(), c.width.to_f64(), c.twist().to_f64()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ay::build_xr;
    use crate::iso::is_isomorphic;
    use crate::trace::DEFAULT_BUDGET;
    use crate::Q;
    use num_traits::One;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn torus_is_one_cylinder() {
        let d = Diagram {
            saddles: vec![SaddleSpec { length: q(1, 1), start: Label::Black, end: Label::Black }],
            cylinders: vec![CylinderSpec { width: q(3, 2), left: vec![0], right: vec![0], twist: q(2, 5) }],
        };
        let s = d.build().unwrap().surface;
        let dec = vertical_decomposition(&s, 10).unwrap();
        assert_eq!(dec.cylinders.len(), 1);
        let c = &dec.cylinders[0];
        assert_eq!((c.circumference.clone(), c.width.clone()), (q(1, 1), q(3, 2)));
        assert_eq!(*c.twist(), q(2, 5));
        assert_eq!(c.kind, BoundaryKind::Same);
        assert!(is_isomorphic(&dec.diagram().build().unwrap().surface, &s));
    }

    #[test]
    fn twist_is_reduced_to_the_shortest_crossing() {
        let d = Diagram {
            saddles: vec![SaddleSpec { length: q(1, 1), start: Label::Black, end: Label::Black }],
            cylinders: vec![CylinderSpec { width: q(1, 1), left: vec![0], right: vec![0], twist: q(4, 5) }],
        };
        let s = d.build().unwrap().surface;
        let dec = vertical_decomposition(&s, 10).unwrap();
        assert_eq!(*dec.cylinders[0].twist(), q(-1, 5));
    }

    #[test]
    fn three_halves_has_four_cylinders() {
        let r = NfElem::ratio(3, 2);
        let x = build_xr(&r).unwrap();
        let d = vertical_decomposition(&x.surface, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.cylinders.len(), 4);
        assert_eq!(d.partition(), (1, 3, 0));
        for (j, c) in d.cylinders.iter().rev().enumerate() {
            assert_eq!(c.circumference, circumference(j as i64));
        }
        // The smallest cylinder has width r − 1.
        assert_eq!(d.cylinders[0].width, r.clone() - NfElem::one());
        let rep = check_geometry(&d, &r);
        assert!(rep.passed(), "{:?}", rep.failures());
        for c in &d.cylinders {
            assert_eq!(c.twist_sc.x, c.width);
            assert!(c.dual.unwrap().consistent());
            let core = c.core.unwrap();
            assert_eq!(core.boundary_coeff(), 0);
            let hol = homology::hol_class(&d.surface, &core).unwrap();
            assert_eq!(hol, Vec2::new(NfElem::zero(), c.circumference.clone()));
        }
    }

    #[test]
    fn one_has_three_cylinders() {
        let x = build_xr(&NfElem::one()).unwrap();
        let d = vertical_decomposition(&x.surface, DEFAULT_BUDGET).unwrap();
        assert_eq!(d.cylinders.len(), 3);
        let rep = check_geometry(&d, &NfElem::one());
        assert!(rep.passed(), "{:?}", rep.failures());
        assert_eq!(d.cylinders[2].width, NfElem::one() - alpha_pow(3));
    }

    #[test]
    fn x0_vertical_is_minimal() {
        let x = build_xr(&NfElem::zero()).unwrap();
        let e = vertical_decomposition(&x.surface, 2000).unwrap_err();
        assert_eq!(e, CylinderError::NotPeriodicWithinBudget(2000));
    }

    #[test]
    fn width_function_examples() {
        assert_eq!(width_function(1, &NfElem::one()).unwrap(), NfElem::one() - alpha_pow(2));
        for j in -10..10 {
            let mid = alpha_pow(-j);
            assert_eq!(mid.clone() - alpha_pow(3 - j), alpha_pow(-(j + 1)) - mid);
            assert!(width_function(j, &alpha_pow(3 - j)).unwrap().is_zero());
            assert!(width_function(j, &alpha_pow(-(j + 1))).unwrap().is_zero());
        }
        assert!(width_function(41, &NfElem::one()).is_err());
    }
}
