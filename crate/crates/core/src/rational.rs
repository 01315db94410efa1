//! Exact rational helpers.
//!
//! Every numeric quantity in the crate is an [`ExactRational`]. Across text
//! boundaries (JSON, CLI) rationals are always written as `"num/den"`.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision reduced fraction with positive denominator.
pub type ExactRational = BigRational;

pub fn ratio(num: u64, den: u64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_uint(n: &BigUint) -> ExactRational {
    BigRational::from_integer(BigInt::from(n.clone()))
}

/// Parses `"num/den"` or a bare integer. Decimal notation is rejected.
pub fn parse_rational(text: &str) -> Result<ExactRational, Error> {
    let bad = || Error::RationalSyntax(text.to_string());
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| bad())?;
    let den = BigInt::from_str(den).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Formats as `"num/den"`, keeping the `/1` for integers.
pub fn format_rational(q: &ExactRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Nearest `f64`, for reporting only.
pub fn approx(q: &ExactRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `floor(q)` as a non-negative integer; `None` for negative `q`.
pub(crate) fn floor_uint(q: &ExactRational) -> Option<BigUint> {
    q.floor().to_integer().to_biguint()
}

pub(crate) fn two_pow_neg(k: u64) -> ExactRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod serde_ratio {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &ExactRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(de::Error::custom)
    }
}

/// Optional rationals: `null` or `"n/d"`.
pub mod serde_ratio_opt {
    use super::*;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(q: &Option<ExactRational>, s: S) -> Result<S::Ok, S::Error> {
        match q {
            Some(q) => s.serialize_str(&format_rational(q)),
            None => s.serialize_none(),
        }
    }
}

/// Serde adapter for digit lists: JSON numbers while they fit in `u64`,
/// decimal strings beyond that.
pub mod serde_digits {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(digits: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(digits.len()))?;
        for d in digits {
            match d.to_u64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&d.to_string())?,
            }
        }
        seq.end()
    }

    pub fn serialize_one<S: Serializer>(d: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match d.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&d.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Small(u64),
        Big(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<Raw>::deserialize(d)?
            .into_iter()
            .map(|raw| match raw {
                Raw::Small(v) => Ok(BigUint::from(v)),
                Raw::Big(s) => BigUint::from_str(&s).map_err(de::Error::custom),
            })
            .collect()
    }
}
