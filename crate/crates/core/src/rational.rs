//! Exact rational scalars and their text form.
//!
//! Every exact quantity in the crate is a reduced big rational. On the wire
//! they are always written as `"numerator/denominator"`, including integers
//! (`"3/1"`) and zero (`"0/1"`).

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Reduced arbitrary-precision fraction with a positive denominator.
pub type ExactScalar = BigRational;

pub fn int(v: i64) -> ExactScalar {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> ExactScalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_bigint(v: BigInt) -> ExactScalar {
    BigRational::from_integer(v)
}

pub fn pow(base: &ExactScalar, exp: u32) -> ExactScalar {
    BigRational::new_raw(base.numer().pow(exp), base.denom().pow(exp))
}

/// `"num/den"` rendering used in JSON and on the command line.
pub fn render(r: &ExactScalar) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"a/b"`, a plain integer, or a finite decimal such as `"0.125"`.
pub fn parse(text: &str) -> Result<ExactScalar> {
    let s = text.trim();
    let err = || Error::ParseRational(text.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut n: BigInt = if digits.is_empty() {
            return Err(err());
        } else {
            digits.parse().map_err(|_| err())?
        };
        if negative {
            n = -n;
        }
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(BigRational::from_integer(n))
}

/// Nearest double; underflows to 0 for tiny magnitudes.
pub fn to_f64(r: &ExactScalar) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() && (v != 0.0 || r.is_zero()) {
            return v;
        }
    }
    let l = log2(&r.abs());
    let mag = l.exp2();
    if r.is_negative() {
        -mag
    } else {
        mag
    }
}

fn log2_uint(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 64 {
        return (v.to_u64().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    let top = (v >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// Base-2 logarithm of a positive rational, accurate to double precision even
/// when numerator and denominator have thousands of bits.
pub fn log2(r: &ExactScalar) -> f64 {
    assert!(r.is_positive(), "log2 of a non-positive rational");
    let (sn, n) = r.numer().clone().into_parts();
    debug_assert_eq!(sn, Sign::Plus);
    let d = r.denom().magnitude();
    log2_uint(&n) - log2_uint(d)
}

pub fn min(a: ExactScalar, b: ExactScalar) -> ExactScalar {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn max(a: ExactScalar, b: ExactScalar) -> ExactScalar {
    if a >= b {
        a
    } else {
        b
    }
}

pub fn is_unit_interval(r: &ExactScalar) -> bool {
    !r.is_negative() && *r <= BigRational::one()
}

/// Serde adapter for a single `ExactScalar` as `"num/den"`.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &ExactScalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&render(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ExactScalar, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<ExactScalar>` as an array of `"num/den"` strings.
pub mod serde_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[ExactScalar], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&render(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<ExactScalar>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
