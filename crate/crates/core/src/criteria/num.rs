//! Exact rationals with a floating-point fallback and an explicit `∞`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Margin under which two inexact values compare equal.
pub const FLOAT_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Num {
    Exact(BigRational),
    Approx(f64),
    Inf,
}

impl Num {
    pub fn int(v: i64) -> Num {
        Num::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(a: i64, b: i64) -> Num {
        Num::Exact(BigRational::new(BigInt::from(a), BigInt::from(b)))
    }

    pub fn approx(v: f64) -> Num {
        if v == f64::INFINITY {
            Num::Inf
        } else {
            Num::Approx(v)
        }
    }

    /// Read a decimal literal exactly: the shortest representation of `v`
    /// is parsed as a rational.
    pub fn from_decimal(v: f64) -> Num {
        if v == f64::INFINITY {
            return Num::Inf;
        }
        format!("{v}").parse().unwrap_or(Num::Approx(v))
    }

    pub fn zero() -> Num {
        Num::int(0)
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Num::Approx(_))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Num::Inf)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Num::Approx(v) => *v,
            Num::Inf => f64::INFINITY,
        }
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Num::Exact(r) => r.is_integer(),
            Num::Approx(v) => (v - v.round()).abs() <= FLOAT_MARGIN,
            Num::Inf => false,
        }
    }

    /// `1/x`, with `1/∞ = 0` and `1/0 = ∞`.
    pub fn recip(&self) -> Num {
        match self {
            Num::Inf => Num::zero(),
            Num::Exact(r) if r.is_zero() => Num::Inf,
            Num::Exact(r) => Num::Exact(r.recip()),
            Num::Approx(v) => Num::approx(1.0 / v),
        }
    }

    fn lift(a: &Num, b: &Num, exact: impl Fn(&BigRational, &BigRational) -> BigRational, float: impl Fn(f64, f64) -> f64) -> Num {
        match (a, b) {
            (Num::Exact(x), Num::Exact(y)) => Num::Exact(exact(x, y)),
            _ => Num::approx(float(a.to_f64(), b.to_f64())),
        }
    }

    pub fn add(&self, o: &Num) -> Num {
        Num::lift(self, o, |x, y| x + y, |x, y| x + y)
    }

    pub fn sub(&self, o: &Num) -> Num {
        Num::lift(self, o, |x, y| x - y, |x, y| x - y)
    }

    pub fn mul(&self, o: &Num) -> Num {
        Num::lift(self, o, |x, y| x * y, |x, y| x * y)
    }

    /// `None` on division by zero.
    pub fn div(&self, o: &Num) -> Option<Num> {
        match o {
            Num::Exact(y) if y.is_zero() => None,
            Num::Approx(y) if y.abs() <= FLOAT_MARGIN => None,
            _ => Some(Num::lift(self, o, |x, y| x / y, |x, y| x / y)),
        }
    }

    /// Three-way comparison; inexact operands within [`FLOAT_MARGIN`]
    /// compare equal.
    pub fn compare(&self, o: &Num) -> Ordering {
        match (self, o) {
            (Num::Inf, Num::Inf) => Ordering::Equal,
            (Num::Inf, _) => Ordering::Greater,
            (_, Num::Inf) => Ordering::Less,
            (Num::Exact(x), Num::Exact(y)) => x.cmp(y),
            _ => {
                let d = self.to_f64() - o.to_f64();
                if d.abs() <= FLOAT_MARGIN {
                    Ordering::Equal
                } else if d > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    pub fn lt(&self, o: &Num) -> bool {
        self.compare(o) == Ordering::Less
    }

    pub fn gt(&self, o: &Num) -> bool {
        self.compare(o) == Ordering::Greater
    }

    pub fn le(&self, o: &Num) -> bool {
        self.compare(o) != Ordering::Greater
    }

    pub fn ge(&self, o: &Num) -> bool {
        self.compare(o) != Ordering::Less
    }

    pub fn eq_num(&self, o: &Num) -> bool {
        self.compare(o) == Ordering::Equal
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Num::Inf => true,
            Num::Exact(r) => r.is_positive(),
            Num::Approx(v) => *v > FLOAT_MARGIN,
        }
    }
}

impl From<i64> for Num {
    fn from(v: i64) -> Num {
        Num::int(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseNumError(String);

impl fmt::Display for ParseNumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot read {:?} as a number", self.0)
    }
}

impl std::error::Error for ParseNumError {}

fn parse_decimal(t: &str) -> Option<BigRational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = BigInt::from_str(&format!("{int}{frac}")).ok()?;
    let ten = BigRational::from_integer(BigInt::from(10));
    let mut value = BigRational::from_integer(digits);
    let shift = exp - frac.len() as i32;
    for _ in 0..shift.unsigned_abs() {
        value = if shift > 0 { value * &ten } else { value / &ten };
    }
    Some(if neg { -value } else { value })
}

impl FromStr for Num {
    type Err = ParseNumError;

    /// Accepts `inf`/`∞`, integers, decimals and fractions `a/b`.
    fn from_str(text: &str) -> Result<Num, ParseNumError> {
        let t = text.trim();
        let err = || ParseNumError(text.to_string());
        if matches!(t, "inf" | "Inf" | "infinity" | "∞") {
            return Ok(Num::Inf);
        }
        if let Some((a, b)) = t.split_once('/') {
            let a = parse_decimal(a.trim()).ok_or_else(err)?;
            let b = parse_decimal(b.trim()).ok_or_else(err)?;
            if b.is_zero() {
                return Err(err());
            }
            return Ok(Num::Exact(a / b));
        }
        parse_decimal(t).map(Num::Exact).ok_or_else(err)
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Exact(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Num::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Num::Approx(v) => write!(f, "{v}"),
            Num::Inf => f.write_str("inf"),
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Num::Approx(v) => s.serialize_f64(*v),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Num, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Num::int(v)),
            Raw::Float(v) => Ok(Num::from_decimal(v)),
            Raw::Text(t) => t.parse().map_err(de::Error::custom),
        }
    }
}
