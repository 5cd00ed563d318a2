//! First-return interval exchanges of the vertical flow and the SAF
//! invariant.
//!
//! The transversal is a horizontal segment `I = [0, L)` leaving a Black
//! singularity to the right, inserted into a copy of the surface as a
//! chain of edges. Discontinuities of the return map are the first hits of
//! `I` by the downward separatrices and by the downward ray from the right
//! end of `I`; each continuity interval is then traced upward once from its
//! midpoint.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::field::NfElem;
use crate::geom::Vec2;
use crate::refine::{insert_segment, RefineError};
use crate::scalar::Scalar;
use crate::surface::{HalfEdge, Label, Surface};
use crate::trace::{corner_toward, leave_vertex, march, prongs, Step, TraceError};

/// Default crossing budget for each trace while building an IET.
pub const TRACE_BUDGET: usize = 100_000;
/// Default step budget for periodicity detection.
pub const ORBIT_BUDGET: usize = 1_000_000;
/// Transversal doublings tried before giving up.
const MAX_DOUBLINGS: usize = 40;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IetError {
    #[error("no transversal of length up to {0} meets every vertical leaf")]
    TransversalNotFull(String),
    #[error("the surface has no Black singularity")]
    NoBlack,
    #[error("an upward leaf from inside a continuity interval hit a singularity")]
    MissedDiscontinuity,
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Refine(#[from] RefineError),
}

pub type Result<T> = std::result::Result<T, IetError>;

/// An interval exchange on `[0, Σ aᵢ)`: the `i`-th interval is translated
/// by `tᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iet<K> {
    pub lengths: Vec<K>,
    pub translations: Vec<K>,
    /// Return time of each interval, when built from a surface.
    pub heights: Vec<K>,
}

impl<K: Scalar> Iet<K> {
    /// From lengths and the order of the intervals after the exchange.
    pub fn from_permutation(lengths: Vec<K>, order: &[usize]) -> Self {
        let n = lengths.len();
        let mut start = vec![K::zero(); n];
        let mut acc = K::zero();
        for i in 0..n {
            start[i] = acc.clone();
            acc = acc + &lengths[i];
        }
        let mut image = vec![K::zero(); n];
        let mut acc = K::zero();
        for &i in order {
            image[i] = acc.clone();
            acc = acc + &lengths[i];
        }
        let translations = (0..n).map(|i| image[i].clone() - &start[i]).collect();
        Iet { lengths, translations, heights: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn total(&self) -> K {
        self.lengths.iter().fold(K::zero(), |a, b| a + b)
    }

    /// Left endpoints of the intervals followed by the total length.
    pub fn breakpoints(&self) -> Vec<K> {
        let mut out = vec![K::zero()];
        for a in &self.lengths {
            let last = out.last().unwrap().clone();
            out.push(last + a);
        }
        out
    }

    /// `σ(i)`: the position of interval `i` after the exchange.
    pub fn permutation(&self) -> Vec<usize> {
        let starts = self.breakpoints();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| (starts[a].clone() + &self.translations[a]).cmp_exact(&(starts[b].clone() + &self.translations[b])));
        let mut sigma = vec![0; self.len()];
        order.iter().enumerate().for_each(|(pos, &i)| sigma[i] = pos);
        sigma
    }

    /// Lengths and translations occupy `[0, total)` bijectively.
    pub fn is_consistent(&self) -> bool {
        let starts = self.breakpoints();
        let sigma = self.permutation();
        let mut order = vec![0; self.len()];
        sigma.iter().enumerate().for_each(|(i, &p)| order[p] = i);
        let mut acc = K::zero();
        for &i in &order {
            if starts[i].clone() + &self.translations[i] != acc {
                return false;
            }
            acc = acc + &self.lengths[i];
        }
        self.lengths.iter().all(|a| a.sign() > 0) && acc == self.total()
    }

    fn locate(&self, starts: &[K], x: &K) -> usize {
        starts.partition_point(|s| s.cmp_exact(x).is_le()) - 1
    }

    pub fn apply(&self, x: &K) -> K {
        let starts = self.breakpoints();
        let i = self.locate(&starts, x);
        x.clone() + &self.translations[i]
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lengths": self.lengths.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "translations": self.translations.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "heights": self.heights.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "permutation": self.permutation(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Every interval splits into pieces that return to themselves; the
    /// distinct periods per interval.
    Periodic(Vec<Vec<usize>>),
    Unresolved { steps: usize },
}

impl Verdict {
    pub fn is_periodic(&self) -> bool {
        matches!(self, Verdict::Periodic(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Periodic(_) => "periodic",
            Verdict::Unresolved { .. } => "unresolved",
        }
    }
}

/// Iterate each interval as a set, splitting at discontinuities, until
/// every piece returns onto itself or `budget` piece-steps are spent.
pub fn iet_periodicity<K: Scalar>(t: &Iet<K>, budget: usize) -> Verdict {
    let starts = t.breakpoints();
    let approx: Vec<f64> = starts.iter().map(Scalar::to_f64).collect();
    let tf: Vec<f64> = t.translations.iter().map(Scalar::to_f64).collect();
    let slack = 1e-9 * approx.last().copied().unwrap_or(1.0).abs().max(1e-300);
    // Locate with a float filter; exact comparison only near a breakpoint.
    let locate = |x: &K, xf: f64| -> usize {
        let i = approx.partition_point(|&s| s <= xf).saturating_sub(1).min(t.len() - 1);
        let near = |j: usize| (xf - approx[j]).abs() < slack;
        if near(i) || near(i + 1) {
            t.locate(&starts, x)
        } else {
            i
        }
    };
    let mut periods: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); t.len()];
    let mut steps = 0usize;
    // (interval, original start, current start, length, float of current, steps taken)
    let mut work: Vec<(usize, K, K, K, f64, usize)> =
        (0..t.len()).map(|i| (i, starts[i].clone(), starts[i].clone(), t.lengths[i].clone(), approx[i], 0)).collect();
    while let Some((owner, orig, mut cur, mut len, mut cf, mut n)) = work.pop() {
        let mut lf = len.to_f64();
        loop {
            if steps >= budget {
                return Verdict::Unresolved { steps };
            }
            steps += 1;
            let i = locate(&cur, cf);
            let end = &starts[i + 1];
            let over = cf + lf - approx[i + 1];
            let splits = if over.abs() < slack { (cur.clone() + &len).cmp_exact(end).is_gt() } else { over > 0.0 };
            if splits {
                let cut = end.clone() - &cur;
                let rest = len.clone() - &cut;
                work.push((owner, orig.clone() + &cut, end.clone(), rest, approx[i + 1], n));
                len = cut;
                lf = len.to_f64();
            }
            cur = cur + &t.translations[i];
            cf += tf[i];
            n += 1;
            if cur == orig {
                periods[owner].insert(n);
                break;
            }
            // Resynchronize the float shadow before drift approaches `slack`.
            if n % 64 == 0 {
                cf = cur.to_f64();
            }
        }
    }
    Verdict::Periodic(periods.into_iter().map(|p| p.into_iter().collect()).collect())
}

/// `Σ aᵢ ∧ tᵢ` in coordinates: entry `(k, l)` is the coefficient of
/// `eₖ ∧ eₗ` for the rational basis `eₖ` of the field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Saf {
    pub matrix: Vec<Vec<BigRational>>,
}

impl Saf {
    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(Zero::is_zero)
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.matrix.len();
        (0..n).all(|k| (0..n).all(|l| self.matrix[k][l] == -self.matrix[l][k].clone()))
    }

    pub fn to_json(&self) -> Value {
        Value::from(self.matrix.iter().map(|r| r.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

pub fn saf<K: Scalar>(t: &Iet<K>) -> Saf {
    let d = K::one().rational_coords().len();
    let mut m = vec![vec![BigRational::zero(); d]; d];
    for (a, tr) in t.lengths.iter().zip(&t.translations) {
        let (a, tr) = (a.rational_coords(), tr.rational_coords());
        for k in 0..d {
            for l in 0..d {
                m[k][l] += &a[k] * &tr[l] - &a[l] * &tr[k];
            }
        }
    }
    Saf { matrix: m }
}

/// The transversal inserted into a refined copy of the surface.
struct Transversal<K> {
    r: Surface<K>,
    /// Edge id to (offset of its west end along `I`, length).
    piece: HashMap<u32, (K, K)>,
    len: K,
}

impl<K: Scalar> Transversal<K> {
    fn new(s: &Surface<K>, prong: HalfEdge, len: &K) -> Result<Self> {
        let mut r = s.clone();
        let pieces = insert_segment(&mut r, prong, &Vec2::new(len.clone(), K::zero()))?;
        let idx = r.edge_index();
        let mut piece = HashMap::new();
        let mut off = K::zero();
        for p in pieces {
            let l = r.vec(idx[&p.id]).x.abs_exact();
            piece.insert(p.id, (off.clone(), l.clone()));
            off = off + l;
        }
        Ok(Transversal { r, piece, len: len.clone() })
    }

    fn blocks(&self, h: HalfEdge) -> bool {
        self.piece.contains_key(&self.r.edge_ref(h).id)
    }

    /// Offset along `I` of the crossing of the ray `x = 0` with `h`,
    /// whose developed start is `pa`.
    fn crossing_offset(&self, h: HalfEdge, pa: &Vec2<K>) -> K {
        let (off, _) = &self.piece[&self.r.edge_ref(h).id];
        let v = self.r.vec(h);
        let west = if v.x.sign() > 0 { pa.clone() } else { pa.add(v) };
        off.clone() - &west.x
    }

    /// Offset along `I` of the vertex of corner `c`, if it lies on `I`.
    fn vertex_offset(&self, c: HalfEdge) -> Option<K> {
        let mut g = c;
        loop {
            if let Some((off, len)) = self.piece.get(&self.r.edge_ref(g).id) {
                return Some(if self.r.vec(g).x.sign() > 0 { off.clone() } else { off.clone() + len });
            }
            g = self.r.next_ccw(g);
            if g == c {
                return None;
            }
        }
    }

    /// Follow the ray from the vertex of `c` until it meets `I` or a
    /// singularity; returns the offset and the height reached.
    fn run(&self, mut c: HalfEdge, dir: &Vec2<K>, mut origin: Vec2<K>, budget: usize) -> Result<Option<(K, K)>> {
        let mut crossings = 0;
        let block = |h: HalfEdge| self.blocks(h);
        loop {
            match leave_vertex(&self.r, c, &origin, dir, &block, &mut crossings, budget)? {
                Step::Edge { h, pa } => return Ok(Some((self.crossing_offset(h, &pa), pa.y))),
                Step::Vertex { c: at, pos } => {
                    if let Some(off) = self.vertex_offset(at) {
                        return Ok(Some((off, pos.y)));
                    }
                    if self.r.corner_label(at) != Label::Regular {
                        return Ok(None);
                    }
                    c = corner_toward(&self.r, at, dir)?;
                    origin = pos;
                }
            }
        }
    }

    /// Upward from the point of `I` at offset `x`.
    fn up_from(&self, x: &K, budget: usize) -> Result<(K, K)> {
        let up = Vec2::new(K::zero(), K::one());
        let idx = self.r.edge_index();
        for (id, (off, len)) in &self.piece {
            let rel = x.clone() - off;
            if rel.sign() < 0 || rel.cmp_exact(len).is_gt() {
                continue;
            }
            let mut e = idx[id];
            if self.r.vec(e).x.sign() < 0 {
                e = self.r.partner(e);
            }
            if rel.is_zero() {
                let c = corner_toward(&self.r, e, &up)?;
                return self.run(c, &up, Vec2::zero(), budget)?.ok_or(IetError::MissedDiscontinuity);
            }
            if rel == *len {
                continue;
            }
            // `e` points east with its triangle above `I`.
            let a = Vec2::new(-rel, K::zero());
            let b = a.add(self.r.vec(e));
            let c = b.add(self.r.vec(e.next()));
            let block = |h: HalfEdge| self.blocks(h);
            let mut crossings = 0;
            let step = match c.x.sign() {
                0 => Step::Vertex { c: e.prev(), pos: c },
                1 => march(&self.r, e.prev(), c, &up, &block, &mut crossings, budget)?,
                _ => march(&self.r, e.next(), b, &up, &block, &mut crossings, budget)?,
            };
            return match step {
                Step::Edge { h, pa } => Ok((self.crossing_offset(h, &pa), pa.y)),
                Step::Vertex { c: at, pos } => {
                    if let Some(off) = self.vertex_offset(at) {
                        return Ok((off, pos.y));
                    }
                    if self.r.corner_label(at) != Label::Regular {
                        return Err(IetError::MissedDiscontinuity);
                    }
                    let c = corner_toward(&self.r, at, &up)?;
                    let (off, y) = self.run(c, &up, pos, budget)?.ok_or(IetError::MissedDiscontinuity)?;
                    Ok((off, y))
                }
            };
        }
        Err(IetError::MissedDiscontinuity)
    }

    /// The return map; `None` if some leaf never meets `I`.
    fn iet(&self, area: &K, budget: usize) -> Result<Option<Iet<K>>> {
        let down = Vec2::new(K::zero(), -K::one());
        let mut cuts: Vec<K> = Vec::new();
        let mut sources: Vec<HalfEdge> = prongs(&self.r, &down);
        // The right end of `I`.
        let end = self.r.half_edges().find(|&h| self.vertex_offset(h).is_some_and(|o| o == self.len));
        sources.extend(end.map(|c| corner_toward(&self.r, c, &down)).transpose()?);
        for c in sources {
            if let Some((off, _)) = self.run(c, &down, Vec2::zero(), budget)? {
                cuts.push(off);
            }
        }
        cuts.retain(|x| x.sign() > 0 && x.cmp_exact(&self.len).is_lt());
        cuts.push(K::zero());
        cuts.push(self.len.clone());
        cuts.sort_by(|a, b| a.cmp_exact(b));
        cuts.dedup();
        let mut iet = Iet { lengths: Vec::new(), translations: Vec::new(), heights: Vec::new() };
        let mut swept = K::zero();
        for w in cuts.windows(2) {
            let mid = (w[0].clone() + &w[1]).half();
            let (to, h) = self.up_from(&mid, budget)?;
            let a = w[1].clone() - &w[0];
            swept = swept + a.clone() * &h;
            iet.lengths.push(a);
            iet.translations.push(to - mid);
            iet.heights.push(h);
        }
        Ok((swept == *area).then_some(iet))
    }
}

/// A first-return IET together with the transversal it lives on.
#[derive(Debug, Clone)]
pub struct ReturnMap<K> {
    pub iet: Iet<K>,
    pub transversal_length: K,
    /// Index of the rightward Black prong used, in corner order.
    pub prong: usize,
}

/// First return of the upward vertical flow to a horizontal segment of
/// length `len` leaving Black along rightward prong `prong`.
pub fn first_return_on<K: Scalar>(s: &Surface<K>, prong: usize, len: &K, budget: usize) -> Result<Option<Iet<K>>> {
    let right = Vec2::new(K::one(), K::zero());
    let black: Vec<HalfEdge> = prongs(s, &right).into_iter().filter(|&c| s.corner_label(c) == Label::Black).collect();
    let c = *black.get(prong).ok_or(IetError::NoBlack)?;
    Transversal::new(s, c, len)?.iet(&s.area(), budget)
}

/// The first-return IET on the shortest full transversal of the form
/// `L₀·2ⁿ`, where `L₀` is the largest horizontal extent of an edge. Among
/// the Black prongs, the one with fewest intervals and then the smallest
/// permutation is used.
pub fn first_return_iet<K: Scalar>(s: &Surface<K>, budget: usize) -> Result<ReturnMap<K>> {
    let right = Vec2::new(K::one(), K::zero());
    let n = prongs(s, &right).into_iter().filter(|&c| s.corner_label(c) == Label::Black).count();
    if n == 0 {
        return Err(IetError::NoBlack);
    }
    let l0 = s
        .half_edges()
        .map(|h| s.vec(h).x.abs_exact())
        .max_by(|a, b| a.cmp_exact(b))
        .expect("nonempty surface");
    let mut best: Option<ReturnMap<K>> = None;
    for prong in 0..n {
        let mut len = l0.clone();
        let mut found = None;
        for _ in 0..MAX_DOUBLINGS {
            if let Some(iet) = first_return_on(s, prong, &len, budget)? {
                found = Some(iet);
                break;
            }
            len = len.clone() + &len;
        }
        let Some(iet) = found else { continue };
        let key = (iet.len(), iet.permutation());
        if best.as_ref().is_none_or(|b| key < (b.iet.len(), b.iet.permutation())) {
            best = Some(ReturnMap { iet, transversal_length: len, prong });
        }
    }
    best.ok_or_else(|| IetError::TransversalNotFull(l0.to_f64().to_string()))
}

/// One row of the line-segment table.
#[derive(Debug, Clone)]
pub struct SegmentRow {
    pub r: NfElem,
    pub verdict: Verdict,
    pub intervals: usize,
    pub permutation: Vec<usize>,
    pub saf_zero: bool,
}

/// IETs along the rel leaf at the given times.
pub fn segment_family(times: &[NfElem], orbit_budget: usize) -> std::result::Result<Vec<SegmentRow>, String> {
    times
        .iter()
        .map(|r| {
            let x = crate::ay::build_xr(r).map_err(|e| e.to_string())?;
            let m = first_return_iet(&x.surface, TRACE_BUDGET).map_err(|e| e.to_string())?;
            Ok(SegmentRow {
                r: r.clone(),
                verdict: iet_periodicity(&m.iet, orbit_budget),
                intervals: m.iet.len(),
                permutation: m.iet.permutation(),
                saf_zero: saf(&m.iet).is_zero(),
            })
        })
        .collect()
}

/// Tab-separated rendering of the segment table.
pub fn segment_tsv(rows: &[SegmentRow]) -> String {
    let mut out = String::from("r\tr_approx\tverdict\tintervals\tpermutation\tsaf_zero\n");
    for row in rows {
        let perm: Vec<String> = row.permutation.iter().map(usize::to_string).collect();
        out.push_str(&format!(
            "{}\t{:.12}\t{}\t{}\t{}\t{}\n",
            row.r,
            row.r.to_f64(),
            row.verdict.name(),
            row.intervals,
            perm.join(","),
            row.saf_zero
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ay::{alpha_pow, build_xr, g_tilde};
    use crate::diagram::{CylinderSpec, Diagram, SaddleSpec};
    use crate::Q;
    use num_traits::One;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn identity_is_periodic_with_period_one() {
        let t = Iet::from_permutation(vec![q(1, 2), q(1, 3)], &[0, 1]);
        assert_eq!(iet_periodicity(&t, 10), Verdict::Periodic(vec![vec![1], vec![1]]));
        assert!(saf(&t).is_zero());
    }

    #[test]
    fn rational_rotation_is_periodic() {
        let t = Iet::from_permutation(vec![q(2, 5), q(3, 5)], &[1, 0]);
        assert!(t.is_consistent());
        assert_eq!(iet_periodicity(&t, 100), Verdict::Periodic(vec![vec![5], vec![5]]));
    }

    #[test]
    fn irrational_rotation_has_nonzero_saf() {
        let a = alpha_pow(1);
        let t = Iet::from_permutation(vec![NfElem::one() - &a, a], &[1, 0]);
        let s = saf(&t);
        assert!(!s.is_zero());
        assert!(s.is_antisymmetric());
        // Σ aᵢ ∧ tᵢ = 2·(1 ∧ α).
        assert_eq!(s.matrix[0][1], BigRational::from_integer(2.into()));
        assert!(!iet_periodicity(&t, 10_000).is_periodic());
    }

    #[test]
    fn torus_return_map_is_a_rotation() {
        let d = Diagram {
            saddles: vec![SaddleSpec { length: q(1, 1), start: Label::Black, end: Label::Black }],
            cylinders: vec![CylinderSpec { width: q(2, 1), left: vec![0], right: vec![0], twist: q(1, 3) }],
        };
        let s = d.build().unwrap().surface;
        let t = first_return_on(&s, 0, &q(2, 1), 100).unwrap().unwrap();
        assert_eq!(t.total(), q(2, 1));
        assert!(t.is_consistent());
        assert!(t.heights.iter().all(|h| *h == q(1, 1)));
        assert!(first_return_on(&s, 0, &q(1, 1), 100).unwrap().is_none());
    }

    #[test]
    fn periodic_times_have_periodic_maps() {
        for r in [NfElem::ratio(3, 2), NfElem::ratio(1, 4), -alpha_pow(3)] {
            let x = build_xr(&r).unwrap();
            let m = first_return_iet(&x.surface, TRACE_BUDGET).unwrap();
            assert!(m.iet.is_consistent());
            assert!(iet_periodicity(&m.iet, ORBIT_BUDGET).is_periodic(), "r = {r}");
            assert!(saf(&m.iet).is_zero());
        }
    }

    #[test]
    fn x0_map_is_not_resolved() {
        let x = build_xr(&NfElem::zero()).unwrap();
        let m = first_return_iet(&x.surface, TRACE_BUDGET).unwrap();
        assert!(m.iet.is_consistent());
        assert!(saf(&m.iet).is_zero());
        assert_eq!(iet_periodicity(&m.iet, 20_000), Verdict::Unresolved { steps: 20_000 });
    }

    #[test]
    fn renormalization_scales_the_map() {
        let r = NfElem::ratio(3, 2);
        let x = build_xr(&r).unwrap();
        let gx = x.surface.linear_apply(&g_tilde()).unwrap();
        let m = first_return_iet(&x.surface, TRACE_BUDGET).unwrap();
        let a = m.iet;
        let len = m.transversal_length * alpha_pow(-1);
        let b = first_return_on(&gx, m.prong, &len, TRACE_BUDGET).unwrap().unwrap();
        let scale = |v: &[NfElem], k: i64| v.iter().map(|x| x.clone() * alpha_pow(k)).collect::<Vec<_>>();
        assert_eq!(b.lengths, scale(&a.lengths, -1));
        assert_eq!(b.translations, scale(&a.translations, -1));
        assert_eq!(b.heights, scale(&a.heights, 1));
    }
}
