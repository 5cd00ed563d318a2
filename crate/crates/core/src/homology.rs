//! Relative homology of the Arnoux–Yoccoz surface in the basis
//! `B = {β₀, γ₀, β₁, γ₁, β₂, γ₂, β₃}`, the families `β_k, γ_k` for all
//! `k ∈ ℤ`, their holonomy along the rel leaf, and the shift `φ_*`.
//!
//! Orientation: `γ_k` runs Black→White and `β_k` White→Black, so the
//! boundary coefficient (change of holonomy per unit of rel) is `+1` on
//! `γ_k` and `−1` on `β_k`.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::ay::{alpha_pow, circumference};
use crate::field::NfElem;
use crate::geom::Vec2;
use crate::scalar::Scalar;
use crate::surface::{Chain, Surface};

/// Largest `|k|` accepted by the family operations.
pub const K_GUARD: i64 = 64;

/// Basis class names, in basis order.
pub const BASIS: [&str; 7] = ["beta0", "gamma0", "beta1", "gamma1", "beta2", "gamma2", "beta3"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HomologyError {
    #[error("|k| = {0} exceeds the guard {K_GUARD}")]
    GuardExceeded(i64),
    #[error("no path representative for {0}")]
    MissingRepresentative(String),
    #[error(transparent)]
    Surface(#[from] crate::surface::SurfaceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelHomClass {
    pub coeffs: [i128; 7],
}

/// Boundary coefficient of each basis element.
const BASIS_BC: [i128; 7] = [-1, 1, -1, 1, -1, 1, -1];

impl RelHomClass {
    pub const ZERO: RelHomClass = RelHomClass { coeffs: [0; 7] };

    pub fn unit(i: usize) -> Self {
        let mut c = Self::ZERO;
        c.coeffs[i] = 1;
        c
    }

    pub fn boundary_coeff(&self) -> i128 {
        self.coeffs.iter().zip(BASIS_BC).map(|(a, b)| a * b).sum()
    }

    pub fn plus(&self, o: &Self) -> Self {
        self.lin(1, o)
    }

    pub fn minus(&self, o: &Self) -> Self {
        self.lin(-1, o)
    }

    /// `self + k·o`.
    pub fn lin(&self, k: i128, o: &Self) -> Self {
        let mut c = *self;
        for (a, b) in c.coeffs.iter_mut().zip(o.coeffs) {
            *a += k * b;
        }
        c
    }

    pub fn scaled(&self, k: i128) -> Self {
        Self::ZERO.lin(k, self)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&a| a == 0)
    }

    /// Edge chain on a surface whose tracked classes include the basis.
    pub fn chain<K: Scalar>(&self, s: &Surface<K>) -> Result<Chain, HomologyError> {
        let mut out = Chain::new();
        for (name, &k) in BASIS.iter().zip(&self.coeffs) {
            if k == 0 {
                continue;
            }
            let c = s.class(name).ok_or_else(|| HomologyError::MissingRepresentative(name.to_string()))?;
            let k = i64::try_from(k).map_err(|_| HomologyError::GuardExceeded(K_GUARD))?;
            out.add_chain(c, k);
        }
        Ok(out)
    }
}

/// `γ₃ = β₀ + γ₀ − β₁ − γ₁ − β₂ − γ₂ − β₃`.
pub fn gamma3() -> RelHomClass {
    RelHomClass { coeffs: [1, 1, -1, -1, -1, -1, -1] }
}

type Table = HashMap<i64, (RelHomClass, RelHomClass)>;

fn table() -> &'static Table {
    static T: OnceLock<Table> = OnceLock::new();
    T.get_or_init(|| {
        let mut t: Table = HashMap::new();
        for k in 0..3 {
            t.insert(k, (RelHomClass::unit(2 * k as usize), RelHomClass::unit(2 * k as usize + 1)));
        }
        t.insert(3, (RelHomClass::unit(6), gamma3()));
        // β_{k+4} = γ_k − β_{k+2} − γ_{k+2} − 2γ_{k+3}, and the same with β, γ exchanged.
        for k in 4..=K_GUARD + 4 {
            let (b0, g0) = t[&(k - 4)];
            let (b2, g2) = t[&(k - 2)];
            let (b3, g3) = t[&(k - 1)];
            let b = g0.minus(&b2).minus(&g2).lin(-2, &g3);
            let g = b0.minus(&g2).minus(&b2).lin(-2, &b3);
            t.insert(k, (b, g));
        }
        for k in (-K_GUARD - 4..0).rev() {
            let (b4, g4) = t[&(k + 4)];
            let (b2, g2) = t[&(k + 2)];
            let (b3, g3) = t[&(k + 3)];
            let g = b4.plus(&b2).plus(&g2).lin(2, &g3);
            let b = g4.plus(&g2).plus(&b2).lin(2, &b3);
            t.insert(k, (b, g));
        }
        t
    })
}

fn guard(k: i64) -> Result<(), HomologyError> {
    if k.abs() > K_GUARD {
        Err(HomologyError::GuardExceeded(k))
    } else {
        Ok(())
    }
}

/// `(β_k, γ_k)` in basis `B`.
pub fn extend_family(k: i64) -> Result<(RelHomClass, RelHomClass), HomologyError> {
    guard(k)?;
    Ok(table()[&k])
}

/// Closed-form holonomies `(hol β_k, hol γ_k)` on `x_r`.
pub fn hol_closed_form(k: i64, r: &NfElem) -> Result<(Vec2<NfElem>, Vec2<NfElem>), HomologyError> {
    guard(k)?;
    let x = alpha_pow(3 - k) - r;
    let y = circumference(k).half();
    Ok((Vec2::new(x.clone(), y.clone()), Vec2::new(-x, y)))
}

/// Holonomy of `c` on `s` through the surface's recorded basis paths.
pub fn hol_class<K: Scalar>(s: &Surface<K>, c: &RelHomClass) -> Result<Vec2<K>, HomologyError> {
    Ok(s.chain_holonomy(&c.chain(s)?)?)
}

/// `φ_*`: `β_k ↦ β_{k+1}`, `γ_k ↦ γ_{k+1}`, extended linearly.
pub fn phi_push(c: &RelHomClass) -> RelHomClass {
    shift(c, 1)
}

/// `φ_*ⁿ`, for `|n| ≤ K_GUARD − 3`.
pub fn shift(c: &RelHomClass, n: i64) -> RelHomClass {
    let images: Vec<RelHomClass> = (0..7)
        .map(|i| {
            let (b, g) = table()[&(i as i64 / 2 + n)];
            if i % 2 == 0 { b } else { g }
        })
        .collect();
    let mut out = RelHomClass::ZERO;
    for (k, img) in c.coeffs.iter().zip(&images) {
        out = out.lin(*k, img);
    }
    out
}

/// Rename tracked classes after a change of marking: the chain recorded as
/// basis element `b` becomes `φ_*ⁿ(b)`, and the basis is re-expressed.
pub fn reindex<K: Scalar>(s: &mut Surface<K>, n: i64) -> Result<(), HomologyError> {
    let old: Vec<Chain> = BASIS
        .iter()
        .map(|b| s.class(b).cloned().ok_or_else(|| HomologyError::MissingRepresentative(b.to_string())))
        .collect::<Result<_, _>>()?;
    // New β_i is the old chain of β_{i−n}.
    let expr = |c: &RelHomClass| {
        let mut out = Chain::new();
        for (k, ch) in c.coeffs.iter().zip(&old) {
            out.add_chain(ch, *k as i64);
        }
        out
    };
    let mut new = Vec::new();
    for i in 0..4 {
        let (b, g) = extend_family(i - n)?;
        new.push((format!("beta{i}"), expr(&b)));
        new.push((format!("gamma{i}"), expr(&g)));
    }
    for (name, ch) in new {
        s.classes.insert(name, ch);
    }
    Ok(())
}

/// Values of a cylinder's crossing cochain `C*` on `β₀…β₃, γ₀…γ₃`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreDual {
    pub beta: [i64; 4],
    pub gamma: [i64; 4],
}

impl CoreDual {
    pub fn eval(&self, c: &RelHomClass) -> i128 {
        let v = [self.beta[0], self.gamma[0], self.beta[1], self.gamma[1], self.beta[2], self.gamma[2], self.beta[3]];
        c.coeffs.iter().zip(v).map(|(a, b)| a * b as i128).sum()
    }

    /// Linearity across the dependent generator `γ₃`.
    pub fn consistent(&self) -> bool {
        self.eval(&gamma3()) == self.gamma[3] as i128
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    fn hol_of(c: &RelHomClass, r: &NfElem) -> Vec2<NfElem> {
        let mut out = Vec2::zero();
        for (i, &k) in c.coeffs.iter().enumerate() {
            let (b, g) = hol_closed_form(i as i64 / 2, r).unwrap();
            let v = if i % 2 == 0 { b } else { g };
            out = out.add(&v.scale(&NfElem::from_int(k as i64)));
        }
        out
    }

    #[test]
    fn basis_examples() {
        assert_eq!(extend_family(0).unwrap().0, RelHomClass::unit(0));
        assert_eq!(extend_family(3).unwrap().1.coeffs, [1, 1, -1, -1, -1, -1, -1]);
        let (b4, _) = extend_family(4).unwrap();
        let (_, g0) = extend_family(0).unwrap();
        let (b2, g2) = extend_family(2).unwrap();
        let g3 = gamma3();
        assert_eq!(b4, g0.minus(&b2).minus(&g2).lin(-2, &g3));
    }

    #[test]
    fn closed_form_examples() {
        let one = NfElem::one();
        let (b3, _) = hol_closed_form(3, &one).unwrap();
        assert_eq!(b3, Vec2::new(NfElem::zero(), alpha_pow(3) + alpha_pow(5)));
        let (b0, _) = hol_closed_form(0, &NfElem::zero()).unwrap();
        assert_eq!(b0, Vec2::new(alpha_pow(3), one + alpha_pow(2)));
        let (_, g2) = hol_closed_form(2, &NfElem::zero()).unwrap();
        assert_eq!(g2, Vec2::new(-alpha_pow(1), alpha_pow(2) + alpha_pow(4)));
        assert!(hol_closed_form(65, &NfElem::zero()).is_err());
    }

    /// The recursion agrees with the closed forms, an independent formula.
    #[test]
    fn family_matches_closed_forms() {
        let r = NfElem::ratio(3, 7) + alpha_pow(2);
        for k in -K_GUARD..=K_GUARD {
            let (b, g) = extend_family(k).unwrap();
            let (hb, hg) = hol_closed_form(k, &r).unwrap();
            assert_eq!(hol_of(&b, &r), hb, "beta{k}");
            assert_eq!(hol_of(&g, &r), hg, "gamma{k}");
            assert_eq!(b.boundary_coeff(), -1);
            assert_eq!(g.boundary_coeff(), 1);
        }
    }

    #[test]
    fn phi_push_examples() {
        assert_eq!(phi_push(&RelHomClass::unit(0)), RelHomClass::unit(2));
        assert_eq!(phi_push(&gamma3()), extend_family(4).unwrap().1);
        let c = RelHomClass::unit(0).plus(&RelHomClass::unit(1));
        assert_eq!(phi_push(&c), RelHomClass::unit(2).plus(&RelHomClass::unit(3)));
        assert_eq!(shift(&phi_push(&c), -1), c);
    }
}
