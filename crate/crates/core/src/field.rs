//! Exact arithmetic in the cubic field ℚ(α), where α is the real root of
//! `t³ + t² + t − 1`.
//!
//! Elements are stored in the power basis `{1, α, α²}` with a common positive
//! denominator, reduced eagerly with `α³ = 1 − α − α²`. Signs are decided
//! exactly by evaluating against an isolating interval for α.
//!
//! ```
//! use ayrel::NfElem;
//! let a = NfElem::alpha();
//! assert_eq!(&a * &a.pow(2), NfElem::from_ints(1, -1, -1));
//! assert_eq!(NfElem::parse("a^3").unwrap(), NfElem::from_ints(1, -1, -1));
//! assert_eq!((NfElem::from_ints(-1, 2, 0)).sign(), 1);
//! ```

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Rem, Sub, SubAssign};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// `(num[0] + num[1]·α + num[2]·α²) / den` with `den > 0` and the four
/// integers jointly coprime.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NfElem {
    num: [BigInt; 3],
    den: BigInt,
}

impl NfElem {
    fn normalized(mut num: [BigInt; 3], mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for n in num.iter_mut() {
                *n = -std::mem::take(n);
            }
        }
        if num.iter().all(Zero::is_zero) {
            return NfElem { num, den: BigInt::one() };
        }
        if !den.is_one() {
            let mut g = den.clone();
            for n in &num {
                if g.is_one() {
                    break;
                }
                g = g.gcd(n);
            }
            if !g.is_one() {
                for n in num.iter_mut() {
                    *n /= &g;
                }
                den /= &g;
            }
        }
        NfElem { num, den }
    }

    pub fn from_ints(c0: i64, c1: i64, c2: i64) -> Self {
        NfElem { num: [c0.into(), c1.into(), c2.into()], den: BigInt::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ints(n, 0, 0)
    }

    pub fn from_rational(q: &BigRational) -> Self {
        Self::from_coords(q, &BigRational::zero(), &BigRational::zero())
    }

    /// `c0 + c1·α + c2·α²`.
    pub fn from_coords(c0: &BigRational, c1: &BigRational, c2: &BigRational) -> Self {
        let den = c0.denom().lcm(c1.denom()).lcm(c2.denom());
        let scale = |c: &BigRational| c.numer() * (&den / c.denom());
        Self::normalized([scale(c0), scale(c1), scale(c2)], den)
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(&BigRational::new(p.into(), q.into()))
    }

    pub fn alpha() -> Self {
        Self::from_ints(0, 1, 0)
    }

    /// `αᵏ` for any integer `k`; `α⁻¹ = 1 + α + α²`.
    pub fn alpha_pow(k: i64) -> Self {
        if k >= 0 {
            Self::alpha().pow(k as u64)
        } else {
            Self::from_ints(1, 1, 1).pow(k.unsigned_abs())
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Coordinate `i ∈ {0,1,2}` as a rational.
    pub fn coord(&self, i: usize) -> BigRational {
        BigRational::new(self.num[i].clone(), self.den.clone())
    }

    pub fn coords(&self) -> [BigRational; 3] {
        [self.coord(0), self.coord(1), self.coord(2)]
    }

    pub fn is_rational(&self) -> bool {
        self.num[1].is_zero() && self.num[2].is_zero()
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // Multiplication-by-x matrix M (columns x·1, x·α, x·α²); x⁻¹ = M⁻¹·e₀.
        let [a0, a1, a2] = &self.num;
        let m = [
            [a0.clone(), a2.clone(), a1 - a2],
            [a1.clone(), a0 - a2, BigInt::from(2) * a2 - a1],
            [a2.clone(), a1 - a2, a0 - a1],
        ];
        let c00 = &m[1][1] * &m[2][2] - &m[1][2] * &m[2][1];
        let c01 = -(&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0]);
        let c02 = &m[1][0] * &m[2][1] - &m[1][1] * &m[2][0];
        let det = &m[0][0] * &c00 + &m[0][1] * &c01 + &m[0][2] * &c02;
        debug_assert!(!det.is_zero());
        Ok(Self::normalized([&c00 * &self.den, &c01 * &self.den, &c02 * &self.den], det))
    }

    /// Exact sign of the real embedding: −1, 0 or +1.
    pub fn sign(&self) -> i8 {
        poly_sign(&self.num)
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// A rational interval `[lo, hi]` of width `< eps` containing the value.
    pub fn embed(&self, eps: &BigRational) -> (BigRational, BigRational) {
        assert!(eps.is_positive(), "eps must be positive");
        if self.is_rational() {
            let q = self.coord(0);
            return (q.clone(), q);
        }
        let mut level = 0;
        loop {
            let (lo, hi, p) = dyadic_alpha(level);
            let (l, h) = poly_bounds(&self.num, lo, hi, p);
            let scale = BigInt::one() << (2 * p);
            let d = &self.den * &scale;
            let lo_q = BigRational::new(l, d.clone());
            let hi_q = BigRational::new(h, d);
            if &(&hi_q - &lo_q) < eps {
                return (lo_q, hi_q);
            }
            level += 1;
        }
    }

    /// Nearest `f64` (for display and rendering only; never used in predicates).
    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            return self.coord(0).to_f64().unwrap_or(f64::NAN);
        }
        let (lo, hi, p) = dyadic_alpha(0);
        let (l, h) = poly_bounds(&self.num, lo, hi, p);
        let d = &self.den << (2 * p);
        let mid = BigRational::new(l + h, d * 2);
        mid.to_f64().unwrap_or(f64::NAN)
    }

    pub fn parse(text: &str) -> Result<Self, FieldError> {
        Parser { s: text.as_bytes(), pos: 0 }.expr()
    }

    /// `(c0, c1, c2)` as strings `"p/q"`, the JSON coordinate form.
    pub fn to_strings(&self) -> [String; 3] {
        let c = self.coords();
        [rat_str(&c[0]), rat_str(&c[1]), rat_str(&c[2])]
    }

    pub fn from_strings(c: &[&str]) -> Result<Self, FieldError> {
        if c.len() != 3 {
            return Err(FieldError::Parse { pos: 0, msg: "expected three coordinates".into() });
        }
        let mut q = Vec::with_capacity(3);
        for s in c {
            q.push(parse_rat(s)?);
        }
        Ok(Self::from_coords(&q[0], &q[1], &q[2]))
    }
}

fn rat_str(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn parse_rat(s: &str) -> Result<BigRational, FieldError> {
    let err = || FieldError::Parse { pos: 0, msg: format!("bad rational {s:?}") };
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| err())?)),
    }
}

// ---------------------------------------------------------------------------
// Isolating interval and exact sign

/// Rational interval `(lo, hi)` with `p(lo) < 0 < p(hi)`, `p(t) = t³+t²+t−1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolatingInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn min_poly(t: &BigRational) -> BigRational {
    let t2 = t * t;
    &t2 * t + &t2 + t - BigRational::one()
}

impl IsolatingInterval {
    pub fn seed() -> Self {
        IsolatingInterval {
            lo: BigRational::new(1.into(), 2.into()),
            hi: BigRational::new(5.into(), 9.into()),
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn bisect(&self) -> Self {
        let mid = (&self.lo + &self.hi) / BigRational::from_integer(2.into());
        let v = min_poly(&mid);
        if v.is_zero() {
            unreachable!("α is irrational");
        }
        if v.is_negative() {
            IsolatingInterval { lo: mid, hi: self.hi.clone() }
        } else {
            IsolatingInterval { lo: self.lo.clone(), hi: mid }
        }
    }

    /// Bisect until the width is below `eps`.
    pub fn refine(mut self, eps: &BigRational) -> Self {
        while &self.width() >= eps {
            self = self.bisect();
        }
        self
    }

    pub fn is_valid(&self) -> bool {
        self.lo < self.hi && min_poly(&self.lo).is_negative() && min_poly(&self.hi).is_positive()
    }
}

const LEVELS: usize = 24;

/// Level `k` bounds α within `[lo/2ᵖ, hi/2ᵖ]`, `p = 64·2ᵏ`.
fn dyadic_alpha(level: usize) -> (&'static BigInt, &'static BigInt, usize) {
    static CACHE: [OnceLock<(BigInt, BigInt)>; LEVELS] = [const { OnceLock::new() }; LEVELS];
    assert!(level < LEVELS, "sign refinement exhausted");
    let p = 64usize << level;
    let (lo, hi) = CACHE[level].get_or_init(|| {
        let eps = BigRational::new(BigInt::one(), BigInt::one() << (p + 1));
        let iv = IsolatingInterval::seed().refine(&eps);
        let scale = BigRational::from_integer(BigInt::one() << p);
        ((&iv.lo * &scale).floor().to_integer(), (&iv.hi * &scale).ceil().to_integer())
    });
    (lo, hi, p)
}

/// Bounds on `2^{2p}·(n0 + n1 t + n2 t²)` for `t ∈ [lo/2ᵖ, hi/2ᵖ]`, `0 < lo`.
fn poly_bounds(n: &[BigInt; 3], lo: &BigInt, hi: &BigInt, p: usize) -> (BigInt, BigInt) {
    let base = &n[0] << (2 * p);
    let (l1, h1) = minmax(&n[1] * lo, &n[1] * hi);
    let (l2, h2) = minmax(&n[2] * lo * lo, &n[2] * hi * hi);
    (&base + (l1 << p) + l2, base + (h1 << p) + h2)
}

fn minmax(a: BigInt, b: BigInt) -> (BigInt, BigInt) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn poly_sign(n: &[BigInt; 3]) -> i8 {
    if n[1].is_zero() && n[2].is_zero() {
        return sign_int(&n[0]);
    }
    let mut level = 0;
    loop {
        let (lo, hi, p) = dyadic_alpha(level);
        let (l, h) = poly_bounds(n, lo, hi, p);
        if l.is_positive() {
            return 1;
        }
        if h.is_negative() {
            return -1;
        }
        level += 1;
    }
}

fn sign_int(n: &BigInt) -> i8 {
    if n.is_positive() {
        1
    } else if n.is_negative() {
        -1
    } else {
        0
    }
}

// ---------------------------------------------------------------------------
// Arithmetic

fn add_impl(a: &NfElem, b: &NfElem, neg: bool) -> NfElem {
    let nb = |i: usize| if neg { -&b.num[i] } else { b.num[i].clone() };
    if a.den == b.den {
        let num = [&a.num[0] + nb(0), &a.num[1] + nb(1), &a.num[2] + nb(2)];
        return NfElem::normalized(num, a.den.clone());
    }
    let num = [
        &a.num[0] * &b.den + nb(0) * &a.den,
        &a.num[1] * &b.den + nb(1) * &a.den,
        &a.num[2] * &b.den + nb(2) * &a.den,
    ];
    NfElem::normalized(num, &a.den * &b.den)
}

fn mul_impl(a: &NfElem, b: &NfElem) -> NfElem {
    let [a0, a1, a2] = &a.num;
    let [b0, b1, b2] = &b.num;
    let p0 = a0 * b0;
    let p1 = a0 * b1 + a1 * b0;
    let p2 = a0 * b2 + a1 * b1 + a2 * b0;
    let p3 = a1 * b2 + a2 * b1;
    let p4 = a2 * b2;
    // α³ = 1 − α − α², α⁴ = −1 + 2α
    let c0 = &p0 + &p3 - &p4;
    let c1 = &p1 - &p3 + BigInt::from(2) * &p4;
    let c2 = p2 - p3;
    NfElem::normalized([c0, c1, c2], &a.den * &b.den)
}

impl Zero for NfElem {
    fn zero() -> Self {
        NfElem { num: [BigInt::zero(), BigInt::zero(), BigInt::zero()], den: BigInt::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }
}

impl One for NfElem {
    fn one() -> Self {
        Self::from_int(1)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $f:expr) => {
        impl<'a, 'b> $tr<&'b NfElem> for &'a NfElem {
            type Output = NfElem;
            fn $m(self, rhs: &'b NfElem) -> NfElem {
                $f(self, rhs)
            }
        }
        impl<'b> $tr<&'b NfElem> for NfElem {
            type Output = NfElem;
            fn $m(self, rhs: &'b NfElem) -> NfElem {
                $f(&self, rhs)
            }
        }
        impl<'a> $tr<NfElem> for &'a NfElem {
            type Output = NfElem;
            fn $m(self, rhs: NfElem) -> NfElem {
                $f(self, &rhs)
            }
        }
        impl $tr<NfElem> for NfElem {
            type Output = NfElem;
            fn $m(self, rhs: NfElem) -> NfElem {
                $f(&self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| add_impl(a, b, false));
forward_binop!(Sub, sub, |a, b| add_impl(a, b, true));
forward_binop!(Mul, mul, mul_impl);
forward_binop!(Div, div, |a: &NfElem, b: &NfElem| mul_impl(a, &b.inv().expect("division by zero in ℚ(α)")));
forward_binop!(Rem, rem, |_a: &NfElem, b: &NfElem| {
    assert!(!b.is_zero(), "remainder by zero");
    NfElem::zero()
});

impl AddAssign<&NfElem> for NfElem {
    fn add_assign(&mut self, rhs: &NfElem) {
        *self = add_impl(self, rhs, false);
    }
}

impl SubAssign<&NfElem> for NfElem {
    fn sub_assign(&mut self, rhs: &NfElem) {
        *self = add_impl(self, rhs, true);
    }
}

impl Neg for NfElem {
    type Output = NfElem;
    fn neg(self) -> NfElem {
        let [a, b, c] = self.num;
        NfElem { num: [-a, -b, -c], den: self.den }
    }
}

impl Neg for &NfElem {
    type Output = NfElem;
    fn neg(self) -> NfElem {
        NfElem { num: [-&self.num[0], -&self.num[1], -&self.num[2]], den: self.den.clone() }
    }
}

impl num_traits::Num for NfElem {
    type FromStrRadixErr = FieldError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, FieldError> {
        if radix != 10 {
            return Err(FieldError::Parse { pos: 0, msg: "only radix 10 is supported".into() });
        }
        Self::parse(s)
    }
}

impl PartialOrd for NfElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NfElem {
    fn cmp(&self, other: &Self) -> Ordering {
        add_impl(self, other, true).sign().cmp(&0)
    }
}

impl fmt::Display for NfElem {
    /// Parse-grammar form, e.g. `1/2 - a + 3*a^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            match (i, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "a")?,
                (1, false) => write!(f, "{mag}*a")?,
                (_, true) => write!(f, "a^2")?,
                (_, false) => write!(f, "{mag}*a^2")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for NfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NfElem({self} ≈ {:.6})", self.to_f64())
    }
}

impl FromStr for NfElem {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, FieldError> {
        Self::parse(s)
    }
}

#[derive(Serialize, Deserialize)]
struct Coords {
    c0: String,
    c1: String,
    c2: String,
}

impl Serialize for NfElem {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let [c0, c1, c2] = self.to_strings();
        Coords { c0, c1, c2 }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for NfElem {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let c = Coords::deserialize(de)?;
        NfElem::from_strings(&[&c.c0, &c.c1, &c.c2]).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Parser: signed sums of `p/q`, `p/q*a`, `p/q*a^k`, `a^k`.

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, FieldError> {
        Err(FieldError::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn integer(&mut self) -> Result<BigInt, FieldError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let digits = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse"))
    }

    fn power(&mut self) -> Result<NfElem, FieldError> {
        // at 'a'
        self.pos += 1;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                _ => false,
            };
            let e = self.integer()?;
            let e: i64 = match e.to_i64() {
                Some(e) if e <= 4096 => e,
                _ => return self.err("exponent too large"),
            };
            Ok(NfElem::alpha_pow(if neg { -e } else { e }))
        } else {
            Ok(NfElem::alpha())
        }
    }

    fn term(&mut self) -> Result<NfElem, FieldError> {
        match self.peek() {
            Some(b'a') => self.power(),
            Some(c) if c.is_ascii_digit() => {
                let p = self.integer()?;
                let mut q = BigInt::one();
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    q = self.integer()?;
                    if q.is_zero() {
                        return self.err("zero denominator");
                    }
                }
                let c = NfElem::from_rational(&BigRational::new(p, q));
                if self.peek() == Some(b'*') {
                    self.pos += 1;
                    if self.peek() != Some(b'a') {
                        return self.err("expected 'a' after '*'");
                    }
                    Ok(&c * &self.power()?)
                } else {
                    Ok(c)
                }
            }
            Some(_) => self.err("expected a number or 'a'"),
            None => self.err("unexpected end of input"),
        }
    }

    fn expr(&mut self) -> Result<NfElem, FieldError> {
        let mut acc = NfElem::zero();
        let mut first = true;
        loop {
            let mut neg = false;
            match self.peek() {
                Some(b'+') => self.pos += 1,
                Some(b'-') => {
                    self.pos += 1;
                    neg = true;
                }
                None if first => return self.err("empty expression"),
                None => return Ok(acc),
                Some(_) if !first => return self.err("expected '+' or '-'"),
                Some(_) => {}
            }
            let t = self.term()?;
            acc = if neg { &acc - &t } else { &acc + &t };
            first = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn reduction_examples() {
        let a = NfElem::alpha();
        assert_eq!(&a * &a.pow(2), NfElem::from_ints(1, -1, -1));
        assert_eq!(&a * &NfElem::from_ints(1, 1, 1), NfElem::one());
        assert_eq!(&a * &a.pow(3), NfElem::from_ints(-1, 2, 0));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(NfElem::one().inv().unwrap(), NfElem::one());
        assert_eq!(NfElem::alpha().inv().unwrap(), NfElem::from_ints(1, 1, 1));
        let c = NfElem::from_ints(0, 2, 0) * NfElem::from_ints(1, 0, 1);
        assert_eq!(&c * &c.inv().unwrap(), NfElem::one());
        assert_eq!(NfElem::zero().inv(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn sign_examples() {
        assert_eq!(NfElem::zero().sign(), 0);
        assert_eq!(NfElem::from_ints(-1, 2, 0).sign(), 1);
        assert_eq!(NfElem::from_ints(1, -1, -1).sign(), 1);
        assert_eq!(NfElem::from_ints(1, -2, 0).sign(), -1);
    }

    #[test]
    fn embed_examples() {
        let eps = q(1, 10_000);
        let (lo, hi) = NfElem::alpha().embed(&eps);
        assert!(lo <= q(5437, 10_000) + &eps && hi >= q(5437, 10_000) - &eps);
        assert!(&hi - &lo < eps);
        assert_eq!(NfElem::zero().embed(&eps), (q(0, 1), q(0, 1)));
        let (lo, hi) = NfElem::alpha_pow(-1).embed(&eps);
        assert!(lo < q(18394, 10_000) && hi > q(18392, 10_000));
    }

    #[test]
    fn seed_interval_isolates() {
        assert!(IsolatingInterval::seed().is_valid());
        let iv = IsolatingInterval::seed().refine(&q(1, 1 << 40));
        assert!(iv.is_valid());
    }

    #[test]
    fn parse_examples() {
        assert_eq!(NfElem::parse("1 - a").unwrap(), NfElem::from_ints(1, -1, 0));
        assert_eq!(NfElem::parse("2*a + 2*a^2").unwrap(), NfElem::from_ints(0, 2, 2));
        assert_eq!(NfElem::parse("a^3").unwrap(), NfElem::from_ints(1, -1, -1));
        assert_eq!(NfElem::parse("-3/4*a^2 + 1/2").unwrap(), NfElem::from_coords(&q(1, 2), &q(0, 1), &q(-3, 4)));
        assert_eq!(NfElem::parse("a^-1").unwrap(), NfElem::from_ints(1, 1, 1));
        for bad in ["", "1 +", "2*", "1/0", "b", "1 2"] {
            assert!(matches!(NfElem::parse(bad), Err(FieldError::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for x in [
            NfElem::zero(),
            NfElem::from_ints(-1, 2, 0),
            NfElem::from_coords(&q(-1, 3), &q(0, 1), &q(7, 2)),
            NfElem::alpha_pow(-5),
        ] {
            assert_eq!(NfElem::parse(&x.to_string()).unwrap(), x);
        }
    }

    #[test]
    fn json_form() {
        let x = NfElem::from_coords(&q(1, 2), &q(-3, 1), &q(0, 1));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"c0":"1/2","c1":"-3/1","c2":"0/1"}"#);
        assert_eq!(serde_json::from_str::<NfElem>(&s).unwrap(), x);
    }
}
