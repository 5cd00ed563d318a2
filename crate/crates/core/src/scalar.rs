//! The exact ordered-field interface the geometry layer is generic over.
//!
//! Only exact fields qualify: every predicate (orientation, incircle, ray
//! exits) is decided by [`Scalar::sign`], so floating point types are not
//! implementors.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::Neg;

use num_rational::BigRational;
use num_traits::{NumRef, Signed, ToPrimitive};
use serde_json::Value;

use crate::field::NfElem;

pub trait Scalar:
    Clone + Debug + Display + Eq + Hash + NumRef + Neg<Output = Self> + Send + Sync + 'static
{
    /// Exact sign: −1, 0 or +1.
    fn sign(&self) -> i8;
    /// Approximate value for rendering; never used in predicates.
    fn to_f64(&self) -> f64;
    fn from_rational(q: &BigRational) -> Self;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, String>;
    /// Coordinates over ℚ in a fixed basis of the field.
    fn rational_coords(&self) -> Vec<BigRational>;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(n.into()))
    }
    fn is_positive(&self) -> bool {
        self.sign() > 0
    }
    fn is_negative(&self) -> bool {
        self.sign() < 0
    }
    fn cmp_exact(&self, other: &Self) -> std::cmp::Ordering {
        (self.clone() - other).sign().cmp(&0)
    }
    fn abs_exact(&self) -> Self {
        if self.sign() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn half(&self) -> Self {
        self.clone() / Self::from_i64(2)
    }
}

impl Scalar for NfElem {
    fn sign(&self) -> i8 {
        NfElem::sign(self)
    }
    fn to_f64(&self) -> f64 {
        NfElem::to_f64(self)
    }
    fn from_rational(q: &BigRational) -> Self {
        NfElem::from_rational(q)
    }
    fn to_json(&self) -> Value {
        Value::from(self.to_strings().to_vec())
    }
    /// Accepts a coordinate triple, a `{"c0","c1","c2"}` object, or a
    /// parse-grammar string.
    fn from_json(v: &Value) -> Result<Self, String> {
        match v {
            Value::Array(a) => {
                let s: Option<Vec<&str>> = a.iter().map(Value::as_str).collect();
                let s = s.ok_or("coordinate triple must hold strings")?;
                NfElem::from_strings(&s).map_err(|e| e.to_string())
            }
            Value::String(s) => NfElem::parse(s).map_err(|e| e.to_string()),
            Value::Object(_) => serde_json::from_value(v.clone()).map_err(|e| e.to_string()),
            _ => Err(format!("not a field element: {v}")),
        }
    }
    fn rational_coords(&self) -> Vec<BigRational> {
        self.coords().to_vec()
    }
}

impl Scalar for BigRational {
    fn sign(&self) -> i8 {
        if Signed::is_positive(self) {
            1
        } else if Signed::is_negative(self) {
            -1
        } else {
            0
        }
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn to_json(&self) -> Value {
        Value::from(format!("{}/{}", self.numer(), self.denom()))
    }
    fn from_json(v: &Value) -> Result<Self, String> {
        let s = v.as_str().ok_or_else(|| format!("not a rational: {v}"))?;
        let x = NfElem::parse(s).map_err(|e| e.to_string())?;
        if !x.is_rational() {
            return Err(format!("not a rational: {s}"));
        }
        Ok(x.coord(0))
    }
    fn rational_coords(&self) -> Vec<BigRational> {
        vec![self.clone()]
    }
}
