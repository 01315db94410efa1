//! Cylinder geometry: exact bounds, lengths, child ratios, adjacency and the
//! digitwise order.
//!
//! Alternating cylinders are open intervals (minus the countable boundary
//! set). Positive cylinders are half-open `(inf, sup]`.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;

use crate::digits::{DigitSeq, Side};
use crate::error::{Error, Result};
use crate::expansion::{cylinder_length, partial_sum_p, partial_sum_pminus};
use crate::interval::Interval;
use crate::phi::{eval_phi, PhiProgram};
use crate::rational::{from_uint, serde_digits, serde_ratio, ExactRational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderBox {
    pub side: Side,
    pub base: Vec<BigUint>,
    pub span: Interval,
    pub length: ExactRational,
}

impl CylinderBox {
    pub fn rank(&self) -> usize {
        self.base.len()
    }

    /// 1 for odd rank, 0 for even.
    pub fn parity(&self) -> usize {
        self.rank() % 2
    }

    pub fn inf(&self) -> &ExactRational {
        &self.span.lo
    }

    pub fn sup(&self) -> &ExactRational {
        &self.span.hi
    }
}

#[derive(Serialize)]
struct CylinderJson<'a> {
    side: Side,
    #[serde(with = "serde_digits")]
    base: &'a Vec<BigUint>,
    rank: usize,
    #[serde(with = "serde_ratio")]
    inf: &'a ExactRational,
    #[serde(with = "serde_ratio")]
    sup: &'a ExactRational,
    #[serde(with = "serde_ratio")]
    length: &'a ExactRational,
}

impl Serialize for CylinderBox {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CylinderJson {
            side: self.side,
            base: &self.base,
            rank: self.rank(),
            inf: self.inf(),
            sup: self.sup(),
            length: &self.length,
        }
        .serialize(s)
    }
}

pub fn cyl_bounds_pminus(program: &PhiProgram, base: &[BigUint]) -> Result<CylinderBox> {
    let length = cylinder_length(program, base)?;
    let sum = partial_sum_pminus(program, base)?;
    let span = if base.len() % 2 == 1 {
        Interval::open(&sum - &length, sum)
    } else {
        let sup = &sum + &length;
        Interval::open(sum, sup)
    };
    Ok(CylinderBox { side: Side::Alternating, base: base.to_vec(), span, length })
}

pub fn cyl_bounds_p(program: &PhiProgram, base: &[BigUint]) -> Result<CylinderBox> {
    let length = cylinder_length(program, base)?;
    let lo = partial_sum_p(program, base)?;
    let hi = &lo + &length;
    Ok(CylinderBox { side: Side::Positive, base: base.to_vec(), span: Interval::left_open(lo, hi), length })
}

pub fn cyl_bounds(program: &PhiProgram, side: Side, base: &[BigUint]) -> Result<CylinderBox> {
    match side {
        Side::Positive => cyl_bounds_p(program, base),
        Side::Alternating => cyl_bounds_pminus(program, base),
    }
}

/// `|Δ_{base,i}| / |Δ_base| = r_n / ((i-1)·i)` with `n = |base|`.
pub fn child_ratio(program: &PhiProgram, base: &[BigUint], child: &BigUint) -> Result<ExactRational> {
    crate::digits::r_values(program, base)?;
    let r_n = eval_phi(program, base.len(), base)?;
    let minimum = &r_n + 1u32;
    if *child < minimum {
        return Err(Error::ChildOutOfRange { child: child.clone(), minimum });
    }
    Ok(from_uint(&r_n) / from_uint(&((child - 1u32) * child)))
}

/// The endpoint shared by `Δ_{c₁…c_k}` and `Δ_{c₁…c_{k-1}[c_k+1]}`: the inf
/// of the former for odd k, its sup for even k. Both cylinders are computed
/// independently and must agree exactly.
pub fn adjacent_boundary(program: &PhiProgram, base: &[BigUint]) -> Result<ExactRational> {
    let here = cyl_bounds_pminus(program, base)?;
    let mut next_base = base.to_vec();
    *next_base.last_mut().expect("validated non-empty") += 1u32;
    let next = cyl_bounds_pminus(program, &next_base)?;
    let (mine, theirs) = if base.len() % 2 == 1 {
        (here.inf(), next.sup())
    } else {
        (here.sup(), next.inf())
    };
    assert_eq!(mine, theirs, "adjacent cylinders must share an endpoint");
    Ok(mine.clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DigitOrder {
    Less,
    Greater,
    /// One sequence is a prefix of the other; undecided at this depth.
    PrefixEqual,
}

/// Orders the numbers behind two digit sequences by their first divergence.
pub fn compare_digitwise(a: &DigitSeq, b: &DigitSeq) -> Result<DigitOrder> {
    if a.side() != b.side() {
        return Err(Error::SideMismatch);
    }
    if !(Arc::ptr_eq(a.program(), b.program()) || a.program().same_p(b.program())) {
        return Err(Error::ProgramMismatch);
    }
    let Some((k, ord)) = a
        .digits()
        .iter()
        .zip(b.digits())
        .map(|(x, y)| x.cmp(y))
        .enumerate()
        .find(|(_, o)| *o != Ordering::Equal)
    else {
        return Ok(DigitOrder::PrefixEqual);
    };
    // larger digit means smaller value on the positive side and at odd
    // positions on the alternating side
    let position = k + 1;
    let flips = a.side() == Side::Positive || position % 2 == 1;
    let less = (ord == Ordering::Less) != flips;
    Ok(if less { DigitOrder::Less } else { DigitOrder::Greater })
}
