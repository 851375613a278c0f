//! Arbitrary-precision rationals and their p-adic valuations.
//!
//! Rationals travel through JSON as strings `"num/den"` (or `"num"` when the
//! denominator is one). Plain JSON integers are accepted on input.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn big(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Exponent of `p` in the nonzero integer `n`.
pub fn int_valuation(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(r: &Rational, p: u64) -> i64 {
    int_valuation(r.numer(), p) - int_valuation(r.denom(), p)
}

/// Valuation normalised so that `v(q) = 1` for `q = p^a`.
pub fn q_valuation(r: &Rational, p: u64, a: u32) -> Rational {
    frac(valuation(r, p), a as i64)
}

pub fn pow_int(base: u64, exp: u32) -> BigInt {
    num_traits::pow(BigInt::from(base), exp as usize)
}

/// Integer power of a rational, negative exponents allowed.
pub fn rpow(base: &Rational, exp: i64) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        Rational::one() / num_traits::pow(base.clone(), (-exp) as usize)
    }
}

/// Floor and ceiling of a rational as `i64`.
pub fn floor_i64(r: &Rational) -> i64 {
    i64::try_from(r.floor().to_integer()).expect("index fits in i64")
}

pub fn ceil_i64(r: &Rational) -> i64 {
    i64::try_from(r.ceil().to_integer()).expect("index fits in i64")
}

/// Serde wrapper that reads a rational from a string or integer and writes
/// the canonical string form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QStr(pub Rational);

impl Serialize for QStr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

struct QVisitor;

impl<'de> Visitor<'de> for QVisitor {
    type Value = QStr;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"num/den\" string or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<QStr, E> {
        parse_rational(v).map(QStr).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<QStr, E> {
        Ok(QStr(int(v)))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<QStr, E> {
        Ok(QStr(Rational::from_integer(BigInt::from(v))))
    }
}

impl<'de> Deserialize<'de> for QStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<QStr, D::Error> {
        d.deserialize_any(QVisitor)
    }
}

/// `#[serde(serialize_with = "ser_q")]` helper for plain `Rational` fields.
pub fn ser_q<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub fn ser_q_opt<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&format_rational(r)),
        None => s.serialize_none(),
    }
}

pub fn ser_q_vec<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}
