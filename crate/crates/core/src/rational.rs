//! Exact rationals and the `"p/q"` string form used by every file format.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// `base^-k`
pub fn inv_pow(base: usize, k: usize) -> Rational {
    Rational::new(BigInt::one(), num::pow(BigInt::from(base), k))
}

pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::ParseRational(s.to_string());
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => {
            let p: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(p))
        }
    }
}

pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Fractional part in `[0,1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

pub fn floor_usize(r: &Rational) -> usize {
    r.floor().to_integer().to_usize().unwrap_or(0)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// True iff the denominator only has prime factors dividing `base`
/// (the base-`base` expansion terminates).
pub fn is_terminating(r: &Rational, base: usize) -> bool {
    let base = BigInt::from(base);
    let mut d = r.denom().abs();
    loop {
        let g = d.gcd(&base);
        if g.is_one() {
            return d.is_one();
        }
        while (&d % &g).is_zero() {
            d /= &g;
        }
    }
}

/// Serde adapter storing a rational as `"p/q"`.
pub mod serde_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `[lo, hi]` pairs of `"p/q"` strings.
pub mod serde_pair {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        v: &(Rational, Rational),
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&format(&v.0))?;
        seq.serialize_element(&format(&v.1))?;
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<(Rational, Rational), D::Error> {
        let [a, b] = <[String; 2]>::deserialize(d)?;
        Ok((
            parse(&a).map_err(serde::de::Error::custom)?,
            parse(&b).map_err(serde::de::Error::custom)?,
        ))
    }
}

/// Serde adapter for optional `"p/q"` values.
pub mod serde_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        r: &Option<Rational>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}
