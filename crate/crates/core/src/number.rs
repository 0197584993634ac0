//! Exact rationals extended with a distinguished infinite value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A nonnegative-or-signed rational, or `Infinite`, which orders above every
/// finite value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ext {
    Finite(Rational),
    Infinite,
}

impl Ext {
    pub fn zero() -> Self {
        Ext::Finite(Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Ext::Finite(r) if r.is_zero())
    }

    pub fn int(n: i64) -> Self {
        Ext::Finite(int(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ext::Infinite)
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Ext::Finite(r) => Some(r),
            Ext::Infinite => None,
        }
    }

    /// `self - other`, defined when `other` is finite.
    pub fn sub_finite(&self, other: &Ext) -> Option<Ext> {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => Some(Ext::Finite(a - b)),
            (Ext::Infinite, Ext::Finite(_)) => Some(Ext::Infinite),
            _ => None,
        }
    }

    /// `self * x` with the convention `∞ · 0 = 0`.
    pub fn mul_rational(&self, x: &Rational) -> Ext {
        match self {
            Ext::Finite(a) => Ext::Finite(a * x),
            Ext::Infinite if x.is_zero() => Ext::zero(),
            Ext::Infinite => Ext::Infinite,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ext::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            Ext::Infinite => f64::INFINITY,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Ext::Finite(r) => rational_to_json(r),
            Ext::Infinite => Value::String("inf".into()),
        }
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::String(s) if s.trim().eq_ignore_ascii_case("inf") => Ok(Ext::Infinite),
            other => rational_from_json(other).map(Ext::Finite),
        }
    }
}

impl Zero for Ext {
    fn zero() -> Self {
        Ext::Finite(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        matches!(self, Ext::Finite(r) if r.is_zero())
    }
}

impl From<Rational> for Ext {
    fn from(r: Rational) -> Self {
        Ext::Finite(r)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => a.cmp(b),
            (Ext::Finite(_), Ext::Infinite) => Ordering::Less,
            (Ext::Infinite, Ext::Finite(_)) => Ordering::Greater,
            (Ext::Infinite, Ext::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for &Ext {
    type Output = Ext;

    fn add(self, rhs: &Ext) -> Ext {
        match (self, rhs) {
            (Ext::Finite(a), Ext::Finite(b)) => Ext::Finite(a + b),
            _ => Ext::Infinite,
        }
    }
}

impl Add for Ext {
    type Output = Ext;

    fn add(self, rhs: Ext) -> Ext {
        &self + &rhs
    }
}

impl std::iter::Sum for Ext {
    fn sum<I: Iterator<Item = Ext>>(iter: I) -> Ext {
        iter.fold(Ext::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(r) => write!(f, "{r}"),
            Ext::Infinite => f.write_str("inf"),
        }
    }
}

/// Parses an exact rational from `"3"`, `"-2.5"`, `"1e-3"`, `"7/12"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: `{text}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{whole}{frac}");
    let numerator: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().map_err(|_| bad())?
    };
    let scale = exponent - frac.len() as i64;
    let ten = BigInt::from(10);
    let power = num_traits::pow(ten, scale.unsigned_abs() as usize);
    let mut value = if scale >= 0 {
        Rational::from_integer(numerator * power)
    } else {
        Rational::new(numerator, power)
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

pub fn rational_from_json(value: &Value) -> Result<Rational> {
    match value {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected a number, found {other}"))),
    }
}

/// Integers become JSON numbers; everything else a `"p/q"` string.
pub fn rational_to_json(r: &Rational) -> Value {
    if r.is_integer() {
        let n: serde_json::Number = r.numer().to_string().parse().expect("integer literal");
        Value::Number(n)
    } else {
        Value::String(format!("{}/{}", r.numer(), r.denom()))
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_fraction_literals() {
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_rational("-2.50").unwrap(), ratio(-5, 2));
        assert_eq!(parse_rational("7/12").unwrap(), ratio(7, 12));
        assert_eq!(parse_rational("1.5e2").unwrap(), int(150));
        assert_eq!(parse_rational("25e-2").unwrap(), ratio(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn infinity_orders_above_everything() {
        assert!(Ext::Infinite > Ext::int(1_000_000));
        assert_eq!(&Ext::int(2) + &Ext::Infinite, Ext::Infinite);
        assert_eq!(Ext::Infinite.mul_rational(&int(0)), Ext::zero());
        assert_eq!(Ext::Infinite.sub_finite(&Ext::int(3)), Some(Ext::Infinite));
        assert_eq!(Ext::int(3).sub_finite(&Ext::Infinite), None);
    }

    #[test]
    fn json_round_trip() {
        let v: Value = serde_json::from_str(r#"[0.1, "3/4", 12, "inf"]"#).unwrap();
        let parsed: Vec<Ext> = v.as_array().unwrap().iter().map(|x| Ext::from_json(x).unwrap()).collect();
        assert_eq!(parsed[0], Ext::Finite(ratio(1, 10)));
        let back: Vec<String> = parsed.iter().map(|e| e.to_json().to_string()).collect();
        assert_eq!(back, vec!["\"1/10\"", "\"3/4\"", "12", "\"inf\""]);
    }
}
