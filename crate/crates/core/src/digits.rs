use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phi::{eval_phi, PhiProgram};
use crate::rational::serde_digits;

/// Which series a digit sequence belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Perron series, digits p₁p₂…, half-open cylinders.
    Positive,
    /// Alternating Perron series, digits q₁q₂…, open cylinders.
    Alternating,
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" | "positive" => Ok(Side::Positive),
            "alt" | "alternating" => Ok(Side::Alternating),
            _ => Err(Error::InvalidParameter(format!("unknown side {s:?} (pos|alt)"))),
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Positive => "positive",
            Side::Alternating => "alternating",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// 1-based `index` whose digit is below `r_{index-1} + 1`.
    Digit {
        index: usize,
        #[serde(serialize_with = "serde_digits::serialize_one")]
        required: BigUint,
        #[serde(serialize_with = "serde_digits::serialize_one")]
        found: BigUint,
    },
    Phi {
        index: usize,
        message: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violation: Option<Violation>,
    /// r₀, r₁, … as far as they could be evaluated.
    #[serde(with = "serde_digits")]
    pub r_chain: Vec<BigUint>,
}

/// Checks dₙ ≥ rₙ₋₁ + 1 for every position and evaluates the r-chain.
pub fn validate_digits(program: &PhiProgram, digits: &[BigUint]) -> ValidationReport {
    let mut r_chain = vec![program.phi0().clone()];
    for (i, d) in digits.iter().enumerate() {
        let required = &r_chain[i] + 1u32;
        if *d < required {
            return ValidationReport {
                valid: false,
                violation: Some(Violation::Digit { index: i + 1, required, found: d.clone() }),
                r_chain,
            };
        }
        match eval_phi(program, i + 1, digits) {
            Ok(r) => r_chain.push(r),
            Err(e) => {
                return ValidationReport {
                    valid: false,
                    violation: Some(Violation::Phi { index: i + 1, message: e.to_string() }),
                    r_chain,
                }
            }
        }
    }
    ValidationReport { valid: true, violation: None, r_chain }
}

/// r₀ … r_{k-1} for a base of length k, failing on the first violation.
pub(crate) fn r_values(program: &PhiProgram, digits: &[BigUint]) -> Result<Vec<BigUint>> {
    let mut rs = Vec::with_capacity(digits.len());
    rs.push(program.phi0().clone());
    for (i, d) in digits.iter().enumerate() {
        let required = &rs[i] + 1u32;
        if *d < required {
            return Err(Error::InvalidDigit { index: i + 1, required, found: d.clone() });
        }
        if i + 1 < digits.len() {
            rs.push(eval_phi(program, i + 1, digits)?);
        }
    }
    if digits.is_empty() {
        rs.clear();
    }
    Ok(rs)
}

/// A validated digit prefix together with its cached r-values.
#[derive(Clone, Debug)]
pub struct DigitSeq {
    side: Side,
    program: Arc<PhiProgram>,
    digits: Vec<BigUint>,
    r_values: Vec<BigUint>,
}

impl DigitSeq {
    pub fn new(program: Arc<PhiProgram>, side: Side, digits: Vec<BigUint>) -> Result<Self> {
        let r_values = r_values(&program, &digits)?;
        Ok(DigitSeq { side, program, digits, r_values })
    }

    pub(crate) fn from_parts(
        program: Arc<PhiProgram>,
        side: Side,
        digits: Vec<BigUint>,
        r_values: Vec<BigUint>,
    ) -> Self {
        debug_assert_eq!(digits.len(), r_values.len());
        DigitSeq { side, program, digits, r_values }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn program(&self) -> &Arc<PhiProgram> {
        &self.program
    }

    pub fn digits(&self) -> &[BigUint] {
        &self.digits
    }

    /// r₀ … r_{k-1}.
    pub fn r_values(&self) -> &[BigUint] {
        &self.r_values
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn truncated(&self, k: usize) -> DigitSeq {
        let k = k.min(self.len());
        DigitSeq {
            side: self.side,
            program: Arc::clone(&self.program),
            digits: self.digits[..k].to_vec(),
            r_values: self.r_values[..k].to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::builtin_family;

    fn ds(v: &[u32]) -> Vec<BigUint> {
        v.iter().map(|&d| BigUint::from(d)).collect()
    }

    #[test]
    fn pierce_chain() {
        let p = builtin_family("pierce").unwrap();
        let rep = validate_digits(&p, &ds(&[2, 3, 5]));
        assert!(rep.valid);
        assert_eq!(rep.r_chain, ds(&[1, 2, 3, 5]));

        let rep = validate_digits(&p, &ds(&[2, 2]));
        assert_eq!(
            rep.violation,
            Some(Violation::Digit { index: 2, required: 3u32.into(), found: 2u32.into() })
        );
    }

    #[test]
    fn luroth_minimum_digit() {
        let p = builtin_family("luroth").unwrap();
        let rep = validate_digits(&p, &ds(&[1]));
        assert!(!rep.valid);
        assert!(matches!(rep.violation, Some(Violation::Digit { index: 1, .. })));
    }

    #[test]
    fn phi_failure_is_reported() {
        let p = crate::phi::parse_phi_spec("x(n) - 3", 1u32.into()).unwrap();
        let rep = validate_digits(&p, &ds(&[2, 5]));
        assert!(matches!(rep.violation, Some(Violation::Phi { index: 1, .. })));
        assert_eq!(rep.r_chain.len(), 1);
    }

    #[test]
    fn digit_seq_caches_r_values() {
        let p = Arc::new(builtin_family("alternating-sylvester").unwrap());
        let seq = DigitSeq::new(p.clone(), Side::Alternating, ds(&[3, 7])).unwrap();
        assert_eq!(seq.r_values(), &ds(&[1, 6])[..]);
        assert!(DigitSeq::new(p, Side::Alternating, ds(&[3, 6])).is_err());
    }
}
