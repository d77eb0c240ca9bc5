//! A scalar that is either an exact rational or a binary float.
//!
//! Arithmetic between two exact values stays exact; as soon as a float is
//! involved the result degrades to `f64`. Ordering is total: exact pairs
//! compare exactly, everything else compares through `f64::total_cmp`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone, Debug)]
pub enum Real {
    Exact(BigRational),
    Float(f64),
}

impl Real {
    pub fn zero() -> Real {
        Real::Exact(BigRational::zero())
    }

    pub fn one() -> Real {
        Real::Exact(BigRational::one())
    }

    pub fn int(n: i64) -> Real {
        Real::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact `num / den`. Panics when `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Real {
        Real::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn float(x: f64) -> Real {
        Real::Float(x)
    }

    /// The exact binary value of `x` as a rational.
    pub fn exact_from_f64(x: f64) -> Option<Real> {
        BigRational::from_f64(x).map(Real::Exact)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(q) => q.to_f64().unwrap_or_else(|| {
                if q.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }),
            Real::Float(x) => *x,
        }
    }

    /// Converts to a float-valued `Real` regardless of representation.
    pub fn to_float(&self) -> Real {
        Real::Float(self.to_f64())
    }

    /// Converts to an exact value; floats map to their exact binary value.
    pub fn to_exact(&self) -> Option<Real> {
        match self {
            Real::Exact(_) => Some(self.clone()),
            Real::Float(x) => Real::exact_from_f64(*x),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Real::Exact(q) => q.is_zero(),
            Real::Float(x) => *x == 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Real::Exact(_) => true,
            Real::Float(x) => x.is_finite(),
        }
    }

    pub fn abs(&self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(q.abs()),
            Real::Float(x) => Real::Float(x.abs()),
        }
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        match self.cmp(&Real::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn min(self, other: Real) -> Real {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Real) -> Real {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `self^n` for a non-negative integer power.
    pub fn powi(&self, n: u32) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(num_traits::pow(q.clone(), n as usize)),
            Real::Float(x) => Real::Float(x.powi(n as i32)),
        }
    }

    /// Midpoint of `self` and `other`.
    pub fn midpoint(&self, other: &Real) -> Real {
        (self + other) / Real::int(2)
    }

    /// `|self - other| <= tol`, exact comparison when both sides are exact.
    pub fn approx_eq(&self, other: &Real, tol: f64) -> bool {
        if self.is_exact() && other.is_exact() {
            self == other
        } else {
            (self.to_f64() - other.to_f64()).abs() <= tol
        }
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Real>>(items: I) -> Real {
        items.into_iter().fold(Real::zero(), |acc, x| acc + x)
    }
}

impl Default for Real {
    fn default() -> Self {
        Real::zero()
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(b),
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                // -0.0 and 0.0 must compare equal
                if a == b {
                    Ordering::Equal
                } else {
                    a.total_cmp(&b)
                }
            }
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl<'a, 'b> $trait<&'b Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'b Real) -> Real {
                match (self, rhs) {
                    (Real::Exact(a), Real::Exact(b)) => Real::Exact(a $op b),
                    _ => Real::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $trait<&'b Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &'b Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(q) => Real::Exact(-q),
            Real::Float(x) => Real::Float(-x),
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        -(self.clone())
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::int(n)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::Float(x)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Real::Exact(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Real::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Parses `"p/q"`, integers, and decimal or scientific literals. All of
/// these are read exactly, so `"0.1"` is one tenth rather than its binary
/// neighbour.
impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Real::Exact(BigRational::new(n, d)));
        }
        parse_decimal(s).ok_or_else(bad)
    }
}

fn parse_decimal(s: &str) -> Option<Real> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(digits.parse::<BigInt>().ok()?);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    if shift >= 0 {
        value *= scale;
    } else {
        value /= scale;
    }
    if negative {
        value = -value;
    }
    Some(Real::Exact(value))
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Real::Exact(_) => serializer.serialize_str(&self.to_string()),
            Real::Float(x) if x.is_finite() => serializer.serialize_f64(*x),
            Real::Float(x) => serializer.serialize_str(&x.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real::int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real::Exact(BigRational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real::Float(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" => Ok(Real::Float(f64::INFINITY)),
                    "-inf" => Ok(Real::Float(f64::NEG_INFINITY)),
                    _ => v.parse().map_err(E::custom),
                }
            }
        }

        deserializer.deserialize_any(RealVisitor)
    }
}

/// Formats `x` like C's `%.15g`.
pub fn format_sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s)
    } else {
        let s = format!("{x:.14e}");
        let (m, e) = s.split_once('e').unwrap();
        format!("{}e{}", trim_zeros(m), e)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}
