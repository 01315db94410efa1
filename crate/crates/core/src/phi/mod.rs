//! The sequence of functions φₙ that parameterizes both representations.
//!
//! A [`PhiProgram`] is either one of the built-in families or an expression in
//! a small integer DSL (see [`parse_expr`] for the grammar). `r₀ = φ₀` is a
//! constant and `rₙ = φₙ(d₁, …, dₙ)` for n ≥ 1.

mod ast;
mod parser;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

pub use ast::{BinOp, Expr};
pub use parser::parse_expr;

/// Largest result size, in bits, a single `^` may produce.
const MAX_POW_BITS: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhiError {
    #[error("empty phi expression")]
    EmptyInput,

    #[error("syntax error at offset {position}: expected one of {expected:?}, found {found}")]
    Syntax { position: usize, expected: Vec<String>, found: String },

    #[error("phi0 must be a positive integer")]
    InvalidPhi0,

    #[error("unknown family {0:?}")]
    UnknownFamily(String),

    #[error("phi_{n} evaluated to {value} (< 1) on prefix {prefix:?}")]
    NonPositive { n: usize, prefix: Vec<BigUint>, value: BigInt },

    #[error("x({index}) is outside [1, {n}]")]
    IndexOutOfRange { n: usize, index: BigInt },

    #[error("negative exponent {exponent} while evaluating phi_{n}")]
    NegativeExponent { n: usize, exponent: BigInt },

    #[error("power too large while evaluating phi_{n}")]
    PowerTooLarge { n: usize },

    #[error("phi_{n} needs {n} digits, got {len}")]
    PrefixTooShort { n: usize, len: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinFamily {
    Luroth,
    ModifiedEngel,
    AlternatingEngel,
    Pierce,
    AlternatingSylvester,
}

impl BuiltinFamily {
    pub const ALL: [BuiltinFamily; 5] = [
        BuiltinFamily::Luroth,
        BuiltinFamily::ModifiedEngel,
        BuiltinFamily::AlternatingEngel,
        BuiltinFamily::Pierce,
        BuiltinFamily::AlternatingSylvester,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinFamily::Luroth => "luroth",
            BuiltinFamily::ModifiedEngel => "modified-engel",
            BuiltinFamily::AlternatingEngel => "alternating-engel",
            BuiltinFamily::Pierce => "pierce",
            BuiltinFamily::AlternatingSylvester => "alternating-sylvester",
        }
    }

    /// The φₙ rule (n ≥ 1) written in the DSL.
    pub fn dsl_text(self) -> &'static str {
        match self {
            BuiltinFamily::Luroth => "1",
            BuiltinFamily::ModifiedEngel | BuiltinFamily::Pierce => "x(n)",
            BuiltinFamily::AlternatingEngel => "x(n) - 1",
            BuiltinFamily::AlternatingSylvester => "(x(n) - 1)*x(n)",
        }
    }

    fn rule(self, last: &BigUint) -> BigInt {
        let last = BigInt::from(last.clone());
        match self {
            BuiltinFamily::Luroth => BigInt::one(),
            BuiltinFamily::ModifiedEngel | BuiltinFamily::Pierce => last,
            BuiltinFamily::AlternatingEngel => last - 1,
            BuiltinFamily::AlternatingSylvester => (&last - 1) * &last,
        }
    }
}

impl FromStr for BuiltinFamily {
    type Err = PhiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| PhiError::UnknownFamily(s.to_string()))
    }
}

impl fmt::Display for BuiltinFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PhiRule {
    Builtin(BuiltinFamily),
    Dsl(Expr),
}

/// Immutable description of P = (φₙ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiProgram {
    phi0: BigUint,
    rule: PhiRule,
    source_text: String,
}

pub fn builtin_family(name: &str) -> Result<PhiProgram, PhiError> {
    Ok(PhiProgram::builtin(name.parse()?))
}

pub fn parse_phi_spec(text: &str, phi0: BigUint) -> Result<PhiProgram, PhiError> {
    if phi0 < BigUint::one() {
        return Err(PhiError::InvalidPhi0);
    }
    let expr = parse_expr(text)?;
    Ok(PhiProgram { phi0, source_text: expr.to_string(), rule: PhiRule::Dsl(expr) })
}

/// Serializable summary of a program for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProgramInfo {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<BuiltinFamily>,
    pub phi: String,
    #[serde(serialize_with = "crate::rational::serde_digits::serialize_one")]
    pub phi0: BigUint,
}

impl PhiProgram {
    pub fn info(&self) -> ProgramInfo {
        ProgramInfo { family: self.family(), phi: self.source_text.clone(), phi0: self.phi0.clone() }
    }

    pub fn builtin(family: BuiltinFamily) -> Self {
        PhiProgram {
            phi0: BigUint::one(),
            rule: PhiRule::Builtin(family),
            source_text: family.dsl_text().to_string(),
        }
    }

    pub fn phi0(&self) -> &BigUint {
        &self.phi0
    }

    pub fn rule(&self) -> &PhiRule {
        &self.rule
    }

    /// Canonical pretty-printed φₙ rule.
    pub fn source_text(&self) -> &str {
        &self.source_text
    }

    pub fn family(&self) -> Option<BuiltinFamily> {
        match self.rule {
            PhiRule::Builtin(f) => Some(f),
            PhiRule::Dsl(_) => None,
        }
    }

    /// The rule as an expression tree, built-ins included.
    pub fn expr(&self) -> Expr {
        match &self.rule {
            PhiRule::Dsl(e) => e.clone(),
            PhiRule::Builtin(f) => parse_expr(f.dsl_text()).expect("built-in texts parse"),
        }
    }

    /// Same φ₀ and the same rule tree. Modified Engel and Pierce compare equal.
    pub fn same_p(&self, other: &PhiProgram) -> bool {
        self.phi0 == other.phi0 && self.expr() == other.expr()
    }

    /// Built-in family whose P this program reproduces, if any.
    pub fn equivalent_family(&self) -> Option<BuiltinFamily> {
        BuiltinFamily::ALL.into_iter().find(|f| self.same_p(&PhiProgram::builtin(*f)))
    }

    /// `Some(c)` when φₙ ≡ c for every n ≥ 1.
    pub fn constant_rule(&self) -> Option<BigUint> {
        match &self.rule {
            PhiRule::Builtin(BuiltinFamily::Luroth) => Some(BigUint::one()),
            PhiRule::Builtin(_) => None,
            PhiRule::Dsl(e) if e.is_constant() => eval_phi(self, 1, &[BigUint::from(2u32)]).ok(),
            PhiRule::Dsl(_) => None,
        }
    }
}

/// rₙ = φₙ(d₁, …, dₙ), with r₀ = φ₀. Only the first `n` digits of `prefix`
/// are read.
pub fn eval_phi(program: &PhiProgram, n: usize, prefix: &[BigUint]) -> Result<BigUint, PhiError> {
    if n == 0 {
        return Ok(program.phi0.clone());
    }
    if prefix.len() < n {
        return Err(PhiError::PrefixTooShort { n, len: prefix.len() });
    }
    let prefix = &prefix[..n];
    let value = match &program.rule {
        PhiRule::Builtin(f) => f.rule(&prefix[n - 1]),
        PhiRule::Dsl(e) => eval_expr(e, n, prefix)?,
    };
    match value.to_biguint() {
        Some(v) if v >= BigUint::one() => Ok(v),
        _ => Err(PhiError::NonPositive { n, prefix: prefix.to_vec(), value }),
    }
}

fn eval_expr(e: &Expr, n: usize, prefix: &[BigUint]) -> Result<BigInt, PhiError> {
    Ok(match e {
        Expr::Int(v) => BigInt::from(v.clone()),
        Expr::Index => BigInt::from(n),
        Expr::Digit(idx) => {
            let index = eval_expr(idx, n, prefix)?;
            match index.to_usize() {
                Some(i) if (1..=n).contains(&i) => BigInt::from(prefix[i - 1].clone()),
                _ => return Err(PhiError::IndexOutOfRange { n, index }),
            }
        }
        Expr::Binary(op, l, r) => {
            let a = eval_expr(l, n, prefix)?;
            let b = eval_expr(r, n, prefix)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Pow => pow(a, b, n)?,
            }
        }
    })
}

fn pow(base: BigInt, exponent: BigInt, n: usize) -> Result<BigInt, PhiError> {
    if exponent.sign() == Sign::Minus {
        return Err(PhiError::NegativeExponent { n, exponent });
    }
    let magnitude = base.magnitude().bits();
    if magnitude <= 1 {
        // 0, 1 and -1 never grow; only the exponent's parity matters
        let parity = u32::try_from(&exponent % 2u32).expect("0 or 1");
        return Ok(match exponent.sign() {
            Sign::NoSign => BigInt::one(),
            _ if base.sign() == Sign::Minus => base.pow(parity),
            _ => base,
        });
    }
    let e = exponent.to_u32().ok_or(PhiError::PowerTooLarge { n })?;
    if magnitude.saturating_mul(u64::from(e)) > MAX_POW_BITS {
        return Err(PhiError::PowerTooLarge { n });
    }
    Ok(base.pow(e))
}
