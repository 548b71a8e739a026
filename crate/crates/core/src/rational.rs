//! Exact probabilities.
//!
//! Probabilities are arbitrary-precision rationals, always kept in lowest
//! terms with a positive denominator. On the wire they are written as
//! `"num/den"` strings; a bare integer such as `"1"` is accepted on input.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn is_probability(p: &Rational) -> bool {
    !p.is_negative() && *p <= Rational::one()
}

pub fn to_f64(p: &Rational) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"` or `"p"`.
pub fn parse(input: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError {
        input: input.to_string(),
        reason,
    };
    let s = input.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("numerator is not an integer"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| err("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Always `"num/den"`, including integers (`"1/1"`).
pub fn format(p: &Rational) -> String {
    format!("{}/{}", p.numer(), p.denom())
}

/// Display adapter producing the wire form.
pub struct Wire<'a>(pub &'a Rational);

impl fmt::Display for Wire<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// Total-variation distance `½ Σ |p − q|` between two sparse pmfs.
pub fn total_variation<'a, K: Ord + 'a>(
    p: &'a std::collections::BTreeMap<K, Rational>,
    q: &'a std::collections::BTreeMap<K, Rational>,
) -> Rational {
    let mut acc = Rational::zero();
    for (k, pv) in p {
        match q.get(k) {
            Some(qv) => acc += (pv - qv).abs(),
            None => acc += pv.abs(),
        }
    }
    for (k, qv) in q {
        if !p.contains_key(k) {
            acc += qv.abs();
        }
    }
    acc / int(2)
}

/// serde adapters for the `"num/den"` wire form.
pub mod serde_rational {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format(p))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse(&raw).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(ps: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(ps.len()))?;
            for p in ps {
                seq.serialize_element(&format(p))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|r| parse(r).map_err(D::Error::custom))
                .collect()
        }
    }
}
