//! Exact rational numbers.
//!
//! [`Q`] wraps an arbitrary-precision rational and fixes the JSON encoding
//! used across game files, traces, and reports: an integer where the value
//! is integral and representable, otherwise `{"num": "...", "den": "..."}`
//! with decimal strings. Floats are rejected on input so that every payoff
//! comparison in the crate is exact.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number with value semantics. Always stored reduced with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(BigRational);

impl Q {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::MalformedSet("rational with zero denominator".into()));
        }
        Ok(Q(BigRational::new(num, den)))
    }

    pub fn from_int(n: i64) -> Self {
        Q(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Q(BigRational::zero())
    }

    pub fn one() -> Self {
        Q(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Midpoint of two rationals; used to pick interior witnesses.
    pub fn midpoint(&self, other: &Self) -> Self {
        Q((&self.0 + &other.0) / BigRational::from_integer(BigInt::from(2)))
    }

    pub fn as_ratio(&self) -> (&BigInt, &BigInt) {
        (self.0.numer(), self.0.denom())
    }
}

impl From<BigRational> for Q {
    fn from(r: BigRational) -> Self {
        Q(r)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Debug delegates to Display; rationals appear constantly in test output.
impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Q {
    type Err = Error;

    /// Accepts `"3"`, `"-1/2"`, and exact decimals like `"0.25"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::MalformedSet(format!("cannot parse rational `{s}`"));
        if let Some((n, d)) = s.split_once('/') {
            let num = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            return Q::new(num, den);
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int_part.starts_with('-');
            let int = BigInt::from_str(if int_part.is_empty() { "0" } else { int_part })
                .map_err(|_| bad())?;
            let frac = BigInt::from_str(frac_part).map_err(|_| bad())?;
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            let mut num = int.abs() * &scale + frac;
            if negative {
                num = -num;
            }
            return Q::new(num, scale);
        }
        let num = BigInt::from_str(s).map_err(|_| bad())?;
        Ok(Q(BigRational::from_integer(num)))
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Q {
            type Output = Q;
            fn $method(self, rhs: &Q) -> Q {
                Q((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for Q {
            type Output = Q;
            fn $method(self, rhs: Q) -> Q {
                Q(self.0.$method(rhs.0))
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);

impl Div for &Q {
    type Output = Q;
    fn div(self, rhs: &Q) -> Q {
        assert!(!rhs.0.is_zero(), "division by zero");
        Q(&self.0 / &rhs.0)
    }
}

impl Neg for &Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q(-&self.0)
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Ok(n) = i64::try_from(self.0.numer().clone()) {
                return serializer.serialize_i64(n);
            }
        }
        let mut st = serializer.serialize_struct("Q", 2)?;
        st.serialize_field("num", &self.0.numer().to_string())?;
        st.serialize_field("den", &self.0.denom().to_string())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct QVisitor;

        impl<'de> Visitor<'de> for QVisitor {
            type Value = Q;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an integer or {\"num\": ..., \"den\": ...}")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Q, E> {
                Ok(Q::from_int(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Q, E> {
                Ok(Q(BigRational::from_integer(BigInt::from(v))))
            }

            fn visit_f64<E: de::Error>(self, _: f64) -> std::result::Result<Q, E> {
                Err(E::custom("floating point payoffs are not accepted; use {\"num\", \"den\"}"))
            }

            fn visit_map<A: de::MapAccess<'de>>(self, mut map: A) -> std::result::Result<Q, A::Error> {
                let mut num: Option<IntOrString> = None;
                let mut den: Option<IntOrString> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "num" => num = Some(map.next_value()?),
                        "den" => den = Some(map.next_value()?),
                        other => return Err(de::Error::unknown_field(other, &["num", "den"])),
                    }
                }
                let num = num.ok_or_else(|| de::Error::missing_field("num"))?.into_bigint()?;
                let den = den.ok_or_else(|| de::Error::missing_field("den"))?.into_bigint()?;
                Q::new(num, den).map_err(|e| de::Error::custom(e.to_string()))
            }
        }

        deserializer.deserialize_any(QVisitor)
    }
}

/// Rational components may be decimal strings (exact, arbitrary size) or
/// plain JSON integers.
#[derive(Deserialize)]
#[serde(untagged)]
enum IntOrString {
    Int(i64),
    Str(String),
}

impl IntOrString {
    fn into_bigint<E: de::Error>(self) -> std::result::Result<BigInt, E> {
        match self {
            IntOrString::Int(n) => Ok(BigInt::from(n)),
            IntOrString::Str(s) => BigInt::from_str(s.trim())
                .map_err(|_| E::custom(format!("invalid integer string `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(Q::from_str("3").unwrap(), Q::from_int(3));
        assert_eq!(Q::from_str("-1/2").unwrap(), Q::ratio(-1, 2));
        assert_eq!(Q::from_str("0.25").unwrap(), Q::ratio(1, 4));
        assert_eq!(Q::from_str("-0.5").unwrap(), Q::ratio(-1, 2));
        assert_eq!(Q::from_str("2/4").unwrap(), Q::ratio(1, 2));
        assert!(Q::from_str("1/0").is_err());
        assert!(Q::from_str("x").is_err());
    }

    #[test]
    fn ordering_is_exact() {
        assert!(Q::ratio(2, 3) < Q::ratio(3, 4));
        assert!(Q::ratio(999_999, 1_000_000) < Q::one());
        assert_eq!(Q::ratio(2, 4), Q::ratio(1, 2));
    }

    #[test]
    fn json_round_trip() {
        let q = Q::ratio(3, 4);
        let js = serde_json::to_string(&q).unwrap();
        assert_eq!(js, r#"{"num":"3","den":"4"}"#);
        assert_eq!(serde_json::from_str::<Q>(&js).unwrap(), q);

        let i = Q::from_int(-2);
        assert_eq!(serde_json::to_string(&i).unwrap(), "-2");
        assert_eq!(serde_json::from_str::<Q>("-2").unwrap(), i);

        assert_eq!(serde_json::from_str::<Q>(r#"{"num":2,"den":4}"#).unwrap(), Q::ratio(1, 2));
        assert!(serde_json::from_str::<Q>("0.5").is_err());
    }

    #[test]
    fn midpoint_stays_interior() {
        let m = Q::ratio(1, 2).midpoint(&Q::one());
        assert_eq!(m, Q::ratio(3, 4));
    }
}
