//! Twist coordinates on a vertically periodic surface.
//!
//! Changing the twist of cylinder `i` by `δ` is the shear
//! `(x, y) ↦ (x, y + δx/wᵢ)` inside that cylinder, applied to the edges of
//! the decomposition's refined triangulation. Edge ids are untouched, so
//! tracked classes stay valid and a class's holonomy moves by
//! `(0, Σ δᵢ·(γ ∩ Cᵢ))`.

use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use crate::ay::{alpha_pow, build_x0};
use crate::cylinders::{BoundaryKind, CylinderDecomposition};
use crate::field::NfElem;
use crate::frame::rational_rank;
use crate::geom::Vec2;
use crate::homology::{self, RelHomClass};
use crate::iso::normalize;
use crate::rel::{rel_apply, RelVector};
use crate::scalar::Scalar;
use crate::surface::{HalfEdge, Surface};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TwistError {
    #[error("cylinder {0} has both singularities on one boundary circle")]
    MixedBoundary(usize),
    #[error("expected {expected} twists, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, TwistError>;

#[derive(Debug, Clone)]
pub struct TwistChart<K> {
    pub decomposition: CylinderDecomposition<K>,
    pub circumferences: Vec<K>,
    pub widths: Vec<K>,
    /// Vertical saddle connection lengths.
    pub lengths: Vec<K>,
    pub twists: Vec<K>,
    pub kinds: Vec<BoundaryKind>,
}

pub fn extract_chart<K: Scalar>(d: &CylinderDecomposition<K>) -> TwistChart<K> {
    TwistChart {
        decomposition: d.clone(),
        circumferences: d.cylinders.iter().map(|c| c.circumference.clone()).collect(),
        widths: d.cylinders.iter().map(|c| c.width.clone()).collect(),
        lengths: d.saddles.iter().map(|s| s.length().clone()).collect(),
        twists: d.cylinders.iter().map(|c| c.twist().clone()).collect(),
        kinds: d.cylinders.iter().map(|c| c.kind).collect(),
    }
}

impl<K: Scalar> TwistChart<K> {
    pub fn len(&self) -> usize {
        self.twists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twists.is_empty()
    }

    /// Counts `(k, ℓ, m)` of white-left, black-left and same cylinders.
    pub fn partition(&self) -> (usize, usize, usize) {
        self.decomposition.partition()
    }

    /// Rel direction `w`: `−1` white-left, `+1` black-left, `0` same.
    pub fn direction(&self) -> Result<Vec<i64>> {
        self.kinds.iter().enumerate().map(|(i, k)| k.rel_weight().ok_or(TwistError::MixedBoundary(i))).collect()
    }

    /// The surface with twists `new`, with regular points removed and
    /// Delaunay-normalized.
    pub fn rebuild(&self, new: &[K]) -> Result<Surface<K>> {
        Ok(normalize(&self.rebuild_refined(new)?))
    }

    /// The sheared refined triangulation, classes included.
    pub fn rebuild_refined(&self, new: &[K]) -> Result<Surface<K>> {
        if new.len() != self.len() {
            return Err(TwistError::Arity { expected: self.len(), got: new.len() });
        }
        let d = &self.decomposition;
        let base = &d.surface;
        // The refined surface carries the decomposition's own twists.
        let shear: Vec<K> = (0..self.len()).map(|i| (new[i].clone() - d.cylinders[i].twist()) / &self.widths[i]).collect();
        let mut s = base.clone();
        for t in 0..s.num_triangles() {
            let cyl = (0..3).find_map(|e| d.edge_cylinder.get(&s.edge_ref(HalfEdge::new(t, e)).id).copied());
            let Some(i) = cyl else { continue };
            if shear[i].is_zero() {
                continue;
            }
            for v in s.tri[t].iter_mut() {
                v.y = v.y.clone() + v.x.clone() * &shear[i];
            }
        }
        Ok(s)
    }

    /// Flow the twists along the vertical rel direction for time `s`.
    pub fn rel_v(&self, s: &K) -> Result<TwistChart<K>> {
        let w = self.direction()?;
        let mut out = self.clone();
        for (y, wi) in out.twists.iter_mut().zip(w) {
            *y = y.clone() + s.clone() * K::from_i64(wi);
        }
        Ok(out)
    }

    /// Twists shifted by the multi-twist lattice vector `Σ nᵢcᵢeᵢ`.
    pub fn dehn(&self, n: &[i64]) -> Vec<K> {
        self.twists.iter().zip(&self.circumferences).zip(n).map(|((y, c), &k)| y.clone() + c.clone() * K::from_i64(k)).collect()
    }

    /// Hypotheses under which distinct twists modulo the lattice give
    /// distinct surfaces; each failure is returned as a warning.
    pub fn injectivity_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if self.circumferences[i] == self.circumferences[j] {
                    out.push(format!("cylinders {i} and {j} have equal circumference"));
                }
                if self.widths[i] == self.widths[j] {
                    out.push(format!("cylinders {i} and {j} have equal width"));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let (k, l, m) = self.partition();
        let v = |xs: &[K]| xs.iter().map(Scalar::to_json).collect::<Vec<_>>();
        json!({
            "circumferences": v(&self.circumferences),
            "widths": v(&self.widths),
            "twists": v(&self.twists),
            "saddle_lengths": v(&self.lengths),
            "partition": [k, l, m],
            "diagram": self.decomposition.to_json(),
        })
    }
}

/// Smallest rational subspace containing the rel direction in normalized
/// twist coordinates `yᵢ/cᵢ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClosure {
    pub dimension: usize,
    /// Rational vectors in `ℚᵐ` spanning the subspace.
    pub basis: Vec<Vec<BigRational>>,
    pub direction: Vec<i64>,
}

impl OrbitClosure {
    pub fn to_json(&self) -> Value {
        json!({
            "dimension": self.dimension,
            "direction": self.direction,
            "basis": self.basis.iter().map(|b| b.iter().map(|q| q.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// `wᵢ/cᵢ = v₀ + αv₁ + α²v₂` with `vₖ ∈ ℚᵐ`; the closure is their span.
pub fn orbit_closure<K: Scalar>(chart: &TwistChart<K>) -> Result<OrbitClosure> {
    let w = chart.direction()?;
    let v: Vec<K> = w.iter().zip(&chart.circumferences).map(|(&wi, c)| K::from_i64(wi) / c).collect();
    let basis = rational_span(&v);
    Ok(OrbitClosure { dimension: basis.len(), basis, direction: w })
}

/// Span of `{1/cᵢ}` over all cylinders. It bounds the closure dimension
/// from above and is defined even when some boundary is mixed.
pub fn reciprocal_rank<K: Scalar>(chart: &TwistChart<K>) -> usize {
    let v: Vec<K> = chart.circumferences.iter().map(|c| K::one() / c).collect();
    rational_span(&v).len()
}

/// Independent rational coordinate vectors of `v ∈ Kᵐ`.
fn rational_span<K: Scalar>(v: &[K]) -> Vec<Vec<BigRational>> {
    let coords: Vec<Vec<BigRational>> = v.iter().map(Scalar::rational_coords).collect();
    let d = coords.first().map_or(0, Vec::len);
    let mut basis: Vec<Vec<BigRational>> = Vec::new();
    for k in 0..d {
        let col: Vec<BigRational> = coords.iter().map(|c| c[k].clone()).collect();
        let mut trial = basis.clone();
        trial.push(col.clone());
        if rational_rank(&trial) > basis.len() {
            basis.push(col);
        }
    }
    basis
}

/// Outcome of the eigen-relation checks for `φ` on `x₀`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenReport {
    /// `hol_x(φ_* b) = α⁻¹·hol_x(b)` for every basis element `b`.
    pub basis_ok: bool,
    /// `hol_x(β_{k+1}) = α⁻¹·hol_x(β_k)` and likewise for `γ`, for
    /// `|k| ≤ range`, measured on `x₀` by path holonomy.
    pub family_ok: bool,
    pub range: i64,
    /// `λ = α⁻¹` satisfies `λ³ = λ² + λ + 1` and is irrational.
    pub eigenvalue_cubic: bool,
    pub failures: Vec<String>,
}

impl EigenReport {
    pub fn passed(&self) -> bool {
        self.basis_ok && self.family_ok && self.eigenvalue_cubic
    }
}

pub fn dominant_eigenvector_check(range: i64) -> Result<EigenReport> {
    let x0 = build_x0().map_err(|e| TwistError::VerificationFailed(e.to_string()))?;
    let s = &x0.surface;
    let lambda = alpha_pow(-1);
    let hx = |c: &RelHomClass| homology::hol_class(s, c).map(|v| v.x).map_err(|e| TwistError::VerificationFailed(e.to_string()));
    let mut failures = Vec::new();
    let mut basis_ok = true;
    for i in 0..7 {
        let b = RelHomClass::unit(i);
        if hx(&homology::phi_push(&b))? != lambda.clone() * hx(&b)? {
            basis_ok = false;
            failures.push(format!("basis {}", homology::BASIS[i]));
        }
    }
    let mut family_ok = true;
    for k in -range..range {
        let (b0, g0) = homology::extend_family(k).map_err(|e| TwistError::VerificationFailed(e.to_string()))?;
        let (b1, g1) = homology::extend_family(k + 1).map_err(|e| TwistError::VerificationFailed(e.to_string()))?;
        for (name, a, b) in [("beta", b0, b1), ("gamma", g0, g1)] {
            if hx(&b)? != lambda.clone() * hx(&a)? {
                family_ok = false;
                failures.push(format!("{name}{k}"));
            }
        }
    }
    let l2 = lambda.clone() * &lambda;
    let cubic = l2.clone() * &lambda == l2 + &lambda + NfElem::one();
    Ok(EigenReport { basis_ok, family_ok, range, eigenvalue_cubic: cubic && !lambda.is_rational(), failures })
}

/// Vertical rel through the chart against the holonomy contract: after
/// time `t` every tracked class gains `(0, t·bc)`, and the rebuilt surface
/// is the one the rel flow engine produces from `s`.
pub fn conjugacy_check<K: Scalar>(s: &Surface<K>, chart: &TwistChart<K>, t: &K) -> Result<bool> {
    let moved = chart.rel_v(t)?;
    let flowed = chart.rebuild_refined(&moved.twists)?;
    let base = &chart.decomposition.surface;
    for (name, c) in &base.classes {
        let (Ok(h), Ok(bc)) = (base.chain_holonomy(c), base.chain_bc(c)) else {
            return Ok(false);
        };
        let want = Vec2::new(h.x, h.y + t.clone() * K::from_i64(bc));
        if flowed.class_holonomy(name).as_ref() != Some(&want) {
            return Ok(false);
        }
    }
    let direct = rel_apply(s, &RelVector::vertical(t.clone())).map_err(|e| TwistError::VerificationFailed(e.to_string()))?;
    Ok(crate::iso::iso_check(&normalize(&flowed), &direct).is_some())
}

/// Crossing numbers of a tracked class with every cylinder.
pub fn crossings<K: Scalar>(chart: &TwistChart<K>, name: &str) -> Option<Vec<i64>> {
    let d = &chart.decomposition;
    let c = d.surface.class(name)?;
    (0..chart.len()).map(|i| d.crossing_number(c, i)).collect()
}

/// Predicted holonomy of a tracked class after retwisting.
pub fn predicted_holonomy<K: Scalar>(chart: &TwistChart<K>, name: &str, new: &[K]) -> Option<Vec2<K>> {
    let d = &chart.decomposition;
    let mut h = d.surface.class_holonomy(name)?;
    for (i, n) in crossings(chart, name)?.into_iter().enumerate() {
        h.y = h.y + (new[i].clone() - d.cylinders[i].twist()) * K::from_i64(n);
    }
    Some(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ay::{build_xr, circumference};
    use crate::cylinders::vertical_decomposition;
    use crate::diagram::{CylinderSpec, Diagram, SaddleSpec};
    use crate::iso::is_isomorphic;
    use crate::trace::DEFAULT_BUDGET;
    use crate::surface::Label;
    use crate::Q;

    fn chart_at(r: NfElem) -> (TwistChart<NfElem>, Surface<NfElem>) {
        let x = build_xr(&r).unwrap();
        let d = vertical_decomposition(&x.surface, DEFAULT_BUDGET).unwrap();
        (extract_chart(&d), x.surface.clone())
    }

    #[test]
    fn round_trip_and_dehn_twists() {
        let (c, s) = chart_at(NfElem::ratio(3, 2));
        assert!(is_isomorphic(&c.rebuild(&c.twists).unwrap(), &s));
        assert!(is_isomorphic(&c.decomposition.diagram().build().unwrap().surface, &s));
        for i in 0..c.len() {
            let mut n = vec![0; c.len()];
            n[i] = if i % 2 == 0 { 1 } else { -1 };
            assert!(is_isomorphic(&c.rebuild(&c.dehn(&n)).unwrap(), &s), "cylinder {i}");
        }
        assert!(c.injectivity_warnings().is_empty());
    }

    #[test]
    fn retwisting_moves_holonomy_by_crossings() {
        let (c, _) = chart_at(NfElem::ratio(3, 2));
        let mut new = c.twists.clone();
        new[1] = new[1].clone() + NfElem::ratio(1, 7);
        let s = c.rebuild_refined(&new).unwrap();
        for name in homology::BASIS {
            assert_eq!(s.class_holonomy(name), predicted_holonomy(&c, name, &new), "{name}");
        }
    }

    #[test]
    fn chart_flow_is_vertical_rel() {
        let (c, s) = chart_at(NfElem::ratio(3, 2));
        let t = NfElem::ratio(2, 5);
        let flowed = c.rel_v(&t).unwrap().rebuild_refined(&c.rel_v(&t).unwrap().twists).unwrap();
        for name in homology::BASIS {
            let bc = if name.starts_with("beta") { -1 } else { 1 };
            let mut want = c.decomposition.surface.class_holonomy(name).unwrap();
            want.y = want.y + t.clone() * NfElem::from_int(bc);
            assert_eq!(flowed.class_holonomy(name).unwrap(), want, "{name}");
        }
        let direct = rel_apply(&s, &RelVector::vertical(t.clone())).unwrap();
        assert!(is_isomorphic(&normalize(&flowed), &direct));
        assert!(conjugacy_check(&s, &c, &t).unwrap());
        assert!(conjugacy_check(&s, &c, &NfElem::ratio(-3, 4)).unwrap());
    }

    #[test]
    fn orbit_closure_dimension_three() {
        let (c, _) = chart_at(NfElem::ratio(3, 2));
        assert_eq!(orbit_closure(&c).unwrap().dimension, 3);
        assert_eq!(reciprocal_rank(&c), 3);
        for (i, cc) in c.circumferences.iter().rev().enumerate() {
            assert_eq!(*cc, circumference(i as i64));
        }
    }

    /// At `r = 1` a boundary carries both singularities, so the twist flow
    /// is undefined; the reciprocals still span three dimensions.
    #[test]
    fn degenerate_time_is_reported() {
        let (c, _) = chart_at(NfElem::one());
        assert_eq!(c.len(), 3);
        assert!(matches!(orbit_closure(&c), Err(TwistError::MixedBoundary(_))));
        assert_eq!(reciprocal_rank(&c), 3);
    }

    #[test]
    fn torus_chart() {
        let q = |n: i64, d: i64| Q::new(n.into(), d.into());
        let d = Diagram {
            saddles: vec![SaddleSpec { length: q(1, 1), start: Label::Black, end: Label::Black }],
            cylinders: vec![CylinderSpec { width: q(2, 1), left: vec![0], right: vec![0], twist: q(1, 3) }],
        };
        let s = d.build().unwrap().surface;
        let c = extract_chart(&vertical_decomposition(&s, 10).unwrap());
        assert_eq!(c.circumferences, vec![q(1, 1)]);
        assert_eq!(orbit_closure(&c).unwrap().dimension, 0);
        assert!(is_isomorphic(&c.rebuild(&c.dehn(&[3])).unwrap(), &s));
        assert!(!is_isomorphic(&c.rebuild(&[q(1, 2)]).unwrap(), &s));
    }

    #[test]
    fn eigen_relations_hold() {
        let r = dominant_eigenvector_check(30).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
    }
}
