//! Randomized invariants: field arithmetic against its real embedding, the
//! rel group law and its equivariance, absolute periods under rel,
//! renormalization covariance of cylinders, chart conjugacy, and IETs.

use ayrel::ay::{alpha_pow, build_x0, build_xr, g_tilde};
use ayrel::cylinders::vertical_decomposition;
use ayrel::iet::{iet_periodicity, saf, Iet};
use ayrel::iso::iso_check;
use ayrel::rel::{rel_apply, RelVector};
use ayrel::trace::DEFAULT_BUDGET;
use ayrel::twist::{conjugacy_check, extract_chart};
use ayrel::{Mat2, NfElem, Scalar, Surface};
use num_traits::{One, Zero};
use proptest::prelude::*;

type K = NfElem;

fn elem() -> impl Strategy<Value = K> {
    (-20i64..=20, -20i64..=20, -20i64..=20, 1i64..=9)
        .prop_map(|(a, b, c, d)| K::from_ints(a, b, c) * K::ratio(1, d))
}

fn nonzero() -> impl Strategy<Value = K> {
    elem().prop_filter("nonzero", |x| !x.is_zero())
}

/// Horizontal rel times in `(-2, 2)` away from zero, mixing in `α`.
fn rel_time() -> impl Strategy<Value = K> {
    (1i64..=15, -4i64..=4, prop::bool::ANY).prop_map(|(p, q, neg)| {
        let r = K::ratio(p, 8) + alpha_pow(1) * K::ratio(q, 32);
        if neg { -r } else { r }
    })
}

fn x0() -> Surface<K> {
    build_x0().unwrap().surface
}

fn rel_h(s: &Surface<K>, r: &K) -> Surface<K> {
    rel_apply(s, &RelVector::horizontal(r.clone())).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_operations_match_the_embedding(a in elem(), b in elem(), c in elem()) {
        prop_assert_eq!((a.clone() + &b) * &c, a.clone() * &c + b.clone() * &c);
        prop_assert!(close((a.clone() * &b).to_f64(), a.to_f64() * b.to_f64()));
        prop_assert!(close((a.clone() - &b).to_f64(), a.to_f64() - b.to_f64()));
    }

    #[test]
    fn inverse_round_trips(a in nonzero()) {
        let inv = a.inv().unwrap();
        prop_assert!((a.clone() * &inv).is_one());
        prop_assert!(close(inv.to_f64() * a.to_f64(), 1.0));
    }

    #[test]
    fn sign_is_exact_and_multiplicative(a in elem(), b in elem()) {
        let f = a.to_f64();
        if f.abs() > 1e-6 {
            prop_assert_eq!(a.sign(), if f > 0.0 { 1 } else { -1 });
        }
        prop_assert_eq!((a.clone() * &b).sign(), a.sign() * b.sign());
        prop_assert_eq!(a.sign() == 0, a.is_zero());
    }

    #[test]
    fn text_form_round_trips(a in elem()) {
        prop_assert_eq!(NfElem::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn alpha_powers_compose(i in -40i64..=40, j in -40i64..=40) {
        prop_assert_eq!(alpha_pow(i) * alpha_pow(j), alpha_pow(i + j));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Two exchanges of lengths `a = p + qα`, `b = r + sα`: the SAF vanishes
    /// iff `a` and `b` are rationally dependent.
    #[test]
    fn saf_of_a_rotation_detects_dependence(p in 1i64..6, q in 0i64..4, r in 1i64..6, s in 0i64..4) {
        let a = K::from_int(p) + alpha_pow(1) * K::from_int(q);
        let b = K::from_int(r) + alpha_pow(1) * K::from_int(s);
        let t = Iet::from_permutation(vec![a, b], &[1, 0]);
        prop_assert!(t.is_consistent());
        let v = saf(&t);
        prop_assert!(v.is_antisymmetric());
        prop_assert_eq!(v.is_zero(), p * s == q * r);
    }

    /// Rational exchanges are consistent, report their permutation, have
    /// SAF zero and are periodic.
    #[test]
    fn rational_exchanges_are_periodic(
        lens in prop::collection::vec(1i64..12, 2..7),
        seed in any::<u64>(),
    ) {
        let n = lens.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut x = seed;
        for i in (1..n).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (x >> 33) as usize % (i + 1));
        }
        let t = Iet::from_permutation(lens.iter().map(|&l| K::ratio(l, 5)).collect(), &order);
        prop_assert!(t.is_consistent());
        let sigma = t.permutation();
        for (pos, &i) in order.iter().enumerate() {
            prop_assert_eq!(sigma[i], pos);
        }
        prop_assert!(saf(&t).is_zero());
        prop_assert!(iet_periodicity(&t, 100_000).is_periodic());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rel_is_additive(a in rel_time(), b in rel_time()) {
        prop_assume!(!(a.clone() + &b).is_zero());
        let x = x0();
        let twice = rel_h(&rel_h(&x, &a), &b);
        let once = rel_h(&x, &(a + &b));
        prop_assert!(iso_check(&twice, &once).is_some());
    }

    #[test]
    fn rel_shifts_only_relative_periods(a in rel_time(), b in -8i64..=8) {
        let x = x0();
        let v = RelVector::new(a.clone(), K::ratio(b, 97));
        let y = rel_apply(&x, &v).unwrap();
        for (name, c) in &x.classes {
            let before = x.chain_holonomy(c).unwrap();
            let bc = K::from_i64(x.chain_bc(c).unwrap());
            let after = y.class_holonomy(name).unwrap();
            prop_assert_eq!(after.x, before.x + a.clone() * &bc);
            prop_assert_eq!(after.y, before.y + v.dy.clone() * &bc);
        }
    }

    #[test]
    fn rel_commutes_with_renormalization_and_minus_identity(r in rel_time()) {
        let x = x0();
        let g = g_tilde();
        let lhs = rel_h(&x, &r).linear_apply(&g).unwrap();
        let rhs = rel_h(&x.linear_apply(&g).unwrap(), &(r.clone() * alpha_pow(-1)));
        prop_assert!(iso_check(&lhs, &rhs).is_some());
        let minus = Mat2::diag(-K::one(), -K::one());
        let lhs = rel_h(&x, &r).linear_apply(&minus).unwrap();
        let rhs = rel_h(&x.linear_apply(&minus).unwrap(), &-r);
        prop_assert!(iso_check(&lhs, &rhs).is_some());
    }

    /// `x_{α⁻¹r} ≅ g̃·x_r`: circumferences scale by `α`, widths by `α⁻¹`.
    #[test]
    fn cylinders_are_renormalization_covariant(r in rel_time()) {
        let x = x0();
        let d = vertical_decomposition(&rel_h(&x, &r), DEFAULT_BUDGET).unwrap();
        let e = vertical_decomposition(&rel_h(&x, &(r * alpha_pow(-1))), DEFAULT_BUDGET).unwrap();
        prop_assert_eq!(d.cylinders.len(), e.cylinders.len());
        let mut want: Vec<(K, K)> = d
            .cylinders
            .iter()
            .map(|c| (c.circumference.clone() * alpha_pow(1), c.width.clone() * alpha_pow(-1)))
            .collect();
        let mut got: Vec<(K, K)> = e.cylinders.iter().map(|c| (c.circumference.clone(), c.width.clone())).collect();
        let key = |a: &(K, K), b: &(K, K)| a.0.cmp_exact(&b.0).then(a.1.cmp_exact(&b.1));
        want.sort_by(key);
        got.sort_by(key);
        prop_assert_eq!(want, got);
        let area = e.cylinders.iter().fold(K::zero(), |acc, c| acc + c.circumference.clone() * &c.width);
        prop_assert_eq!(area, x.area());
    }

    #[test]
    fn chart_flow_is_vertical_rel(i in 1i64..=15, t in -12i64..=12) {
        prop_assume!(t != 0);
        let r = K::ratio(i, 8) + alpha_pow(2) * K::ratio(1, 64);
        let x = build_xr(&r).unwrap();
        let d = vertical_decomposition(&x.surface, DEFAULT_BUDGET).unwrap();
        prop_assert!(conjugacy_check(&x.surface, &extract_chart(&d), &K::ratio(t, 9)).unwrap());
    }
}
