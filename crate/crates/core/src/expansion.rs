//! Digit extraction and reconstruction for both series.
//!
//! Both sides run the same recursion. With `L_k` the length of the current
//! rank-k cylinder, `S_k` its partial sum and `r_k = φ_k(d₁…d_k)`:
//!
//! ```text
//! x_k = |x - S_k|            v = r_k·L_k / x_k          d_{k+1} = ⌊v⌋ + 1
//! ```
//!
//! On the alternating side an integral `v` means `x` is an endpoint of a
//! rank-(k+1) cylinder, so no representation exists and extraction stops with
//! a [`BoundaryWitness`]. On the positive side an integral `v` simply selects
//! the cylinder whose closed upper end is `x`.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::digits::{r_values, DigitSeq, Side};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::phi::{eval_phi, PhiProgram};
use crate::rational::{floor_uint, format_rational, from_uint, serde_digits, ExactRational};

/// Resource guards for extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest depth any extraction may request.
    pub max_depth: usize,
    /// Extraction aborts once a digit exceeds `2^max_digit_bits`.
    pub max_digit_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_depth: 1 << 20, max_digit_bits: 64 }
    }
}

impl Limits {
    pub fn with_digit_bits(self, max_digit_bits: u64) -> Self {
        Limits { max_digit_bits, ..self }
    }

    fn check_depth(&self, requested: usize) -> Result<()> {
        if requested > self.max_depth {
            return Err(Error::DepthLimit { requested, cap: self.max_depth });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Inf,
    Sup,
}

/// `x` equals the `kind` endpoint of the alternating cylinder with `base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundaryWitness {
    pub rank: usize,
    #[serde(with = "serde_digits")]
    pub base: Vec<BigUint>,
    pub kind: BoundaryKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DigitStatus {
    Ongoing,
    Boundary(BoundaryWitness),
}

#[derive(Clone, Debug)]
pub struct DigitOutcome {
    pub seq: DigitSeq,
    pub status: DigitStatus,
}

impl DigitOutcome {
    pub fn boundary(&self) -> Option<&BoundaryWitness> {
        match &self.status {
            DigitStatus::Boundary(w) => Some(w),
            DigitStatus::Ongoing => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Digit(BigUint),
    Boundary(BoundaryWitness),
}

/// Lazy digit extraction. Yields one [`Step`] per call, ending after a
/// boundary or the first error.
pub struct Expander {
    program: Arc<PhiProgram>,
    side: Side,
    x: ExactRational,
    limits: Limits,
    digit_cap: BigUint,
    digits: Vec<BigUint>,
    r_values: Vec<BigUint>,
    length: ExactRational,
    partial: ExactRational,
    done: bool,
}

impl Expander {
    pub fn new(program: Arc<PhiProgram>, side: Side, x: ExactRational, limits: Limits) -> Result<Self> {
        check_domain(&x, side)?;
        Ok(Expander {
            program,
            side,
            x,
            limits,
            digit_cap: BigUint::one() << limits.max_digit_bits,
            digits: Vec::new(),
            r_values: Vec::new(),
            length: ExactRational::one(),
            partial: ExactRational::zero(),
            done: false,
        })
    }

    pub fn digits(&self) -> &[BigUint] {
        &self.digits
    }

    /// Length of the cylinder spanned by the digits emitted so far.
    pub fn cylinder_length(&self) -> &ExactRational {
        &self.length
    }

    pub fn into_seq(self) -> DigitSeq {
        DigitSeq::from_parts(self.program, self.side, self.digits, self.r_values)
    }

    fn step(&mut self) -> Result<Step> {
        let k = self.digits.len();
        self.limits.check_depth(k + 1)?;
        let r_k = eval_phi(&self.program, k, &self.digits)?;
        let scale = &self.length * from_uint(&r_k);
        let remainder = (&self.x - &self.partial).abs();

        if remainder.is_zero() {
            // x sits on an endpoint of the current cylinder itself
            let kind = if k % 2 == 1 { BoundaryKind::Sup } else { BoundaryKind::Inf };
            return Ok(Step::Boundary(BoundaryWitness { rank: k, base: self.digits.clone(), kind }));
        }

        let v = &scale / &remainder;
        let floor = floor_uint(&v).expect("v is positive");
        if self.side == Side::Alternating && v.is_integer() {
            let mut base = self.digits.clone();
            base.push(floor + 1u32);
            let kind = if (k + 1) % 2 == 1 { BoundaryKind::Sup } else { BoundaryKind::Inf };
            return Ok(Step::Boundary(BoundaryWitness { rank: k + 1, base, kind }));
        }

        let digit = floor + 1u32;
        if digit > self.digit_cap {
            return Err(Error::DigitTooLarge {
                position: k + 1,
                bits: digit.bits(),
                limit_bits: self.limits.max_digit_bits,
            });
        }
        let d = from_uint(&digit);
        let one = ExactRational::one();
        match self.side {
            Side::Positive => self.partial += &scale / &d,
            Side::Alternating if k % 2 == 0 => self.partial += &scale / (&d - &one),
            Side::Alternating => self.partial -= &scale / (&d - &one),
        }
        self.length = scale / ((&d - &one) * &d);
        self.digits.push(digit.clone());
        self.r_values.push(r_k);
        Ok(Step::Digit(digit))
    }
}

impl Iterator for Expander {
    type Item = Result<Step>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let step = self.step();
        if !matches!(step, Ok(Step::Digit(_))) {
            self.done = true;
        }
        Some(step)
    }
}

fn check_domain(x: &ExactRational, side: Side) -> Result<()> {
    let ok = match side {
        Side::Positive => x.is_positive() && *x <= ExactRational::one(),
        Side::Alternating => x.is_positive() && *x < ExactRational::one(),
    };
    if ok {
        Ok(())
    } else {
        let domain = match side {
            Side::Positive => "(0, 1]",
            Side::Alternating => "(0, 1)",
        };
        Err(Error::domain(format_rational(x), domain))
    }
}

pub fn extract_pminus(x: &ExactRational, program: &PhiProgram, max_depth: usize) -> Result<DigitOutcome> {
    extract_pminus_with(x, program, max_depth, &Limits::default())
}

pub fn extract_pminus_with(
    x: &ExactRational,
    program: &PhiProgram,
    max_depth: usize,
    limits: &Limits,
) -> Result<DigitOutcome> {
    limits.check_depth(max_depth)?;
    let mut ex = Expander::new(Arc::new(program.clone()), Side::Alternating, x.clone(), *limits)?;
    let mut status = DigitStatus::Ongoing;
    for _ in 0..max_depth {
        match ex.next().expect("expander yields until a boundary")? {
            Step::Digit(_) => {}
            Step::Boundary(w) => {
                status = DigitStatus::Boundary(w);
                break;
            }
        }
    }
    Ok(DigitOutcome { seq: ex.into_seq(), status })
}

pub fn extract_p(x: &ExactRational, program: &PhiProgram, max_depth: usize) -> Result<DigitSeq> {
    extract_p_with(x, program, max_depth, &Limits::default())
}

pub fn extract_p_with(x: &ExactRational, program: &PhiProgram, max_depth: usize, limits: &Limits) -> Result<DigitSeq> {
    limits.check_depth(max_depth)?;
    let mut ex = Expander::new(Arc::new(program.clone()), Side::Positive, x.clone(), *limits)?;
    for _ in 0..max_depth {
        ex.next().expect("positive side never stops")?;
    }
    Ok(ex.into_seq())
}

/// The products `r₀⋯r_n / ((d₁-1)d₁⋯(d_n-1)d_n)` for n = 0..k, i.e. the
/// cylinder lengths scaled by the next r.
fn scaled_prefixes(rs: &[BigUint], digits: &[BigUint]) -> Vec<ExactRational> {
    let mut out = Vec::with_capacity(digits.len());
    let mut acc = ExactRational::one();
    for (i, r) in rs.iter().enumerate() {
        acc *= from_uint(r);
        out.push(acc.clone());
        let d = from_uint(&digits[i]);
        acc /= (&d - ExactRational::one()) * d;
    }
    out
}

fn nonempty(digits: &[BigUint]) -> Result<()> {
    if digits.is_empty() {
        Err(Error::EmptyBase)
    } else {
        Ok(())
    }
}

/// Sum of the first k terms of the alternating series.
pub fn partial_sum_pminus(program: &PhiProgram, digits: &[BigUint]) -> Result<ExactRational> {
    nonempty(digits)?;
    let rs = r_values(program, digits)?;
    let one = ExactRational::one();
    let mut sum = ExactRational::zero();
    for (n, scale) in scaled_prefixes(&rs, digits).into_iter().enumerate() {
        let term = scale / (from_uint(&digits[n]) - &one);
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// Sum of the first k terms of the positive series.
pub fn partial_sum_p(program: &PhiProgram, digits: &[BigUint]) -> Result<ExactRational> {
    nonempty(digits)?;
    let rs = r_values(program, digits)?;
    Ok(scaled_prefixes(&rs, digits)
        .into_iter()
        .enumerate()
        .map(|(n, scale)| scale / from_uint(&digits[n]))
        .sum())
}

/// `r₀⋯r_{k-1} / ((c₁-1)c₁⋯(c_k-1)c_k)`; shared by both sides.
pub fn cylinder_length(program: &PhiProgram, digits: &[BigUint]) -> Result<ExactRational> {
    nonempty(digits)?;
    let rs = r_values(program, digits)?;
    let num: BigUint = rs.iter().product();
    let den: BigUint = digits.iter().map(|d| (d - 1u32) * d).product();
    Ok(from_uint(&num) / from_uint(&den))
}

/// Exact span of the rank-k cylinder with the given digits.
pub fn reconstruct_enclosure(program: &PhiProgram, side: Side, digits: &[BigUint]) -> Result<Interval> {
    let length = cylinder_length(program, digits)?;
    Ok(match side {
        Side::Positive => {
            let lo = partial_sum_p(program, digits)?;
            let hi = &lo + length;
            Interval::left_open(lo, hi)
        }
        Side::Alternating => {
            let s = partial_sum_pminus(program, digits)?;
            if digits.len() % 2 == 1 {
                Interval::open(&s - length, s)
            } else {
                let hi = &s + length;
                Interval::open(s, hi)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::builtin_family;
    use crate::rational::ratio;

    fn ds(v: &[u32]) -> Vec<BigUint> {
        v.iter().map(|&d| BigUint::from(d)).collect()
    }

    fn fam(name: &str) -> PhiProgram {
        builtin_family(name).unwrap()
    }

    #[test]
    fn alternating_luroth_two_fifths() {
        let out = extract_pminus(&ratio(2, 5), &fam("luroth"), 4).unwrap();
        assert_eq!(out.seq.digits(), &ds(&[3, 2, 2, 3])[..]);
        assert_eq!(out.status, DigitStatus::Ongoing);
    }

    #[test]
    fn alternating_luroth_half_is_boundary() {
        let out = extract_pminus(&ratio(1, 2), &fam("luroth"), 4).unwrap();
        assert!(out.seq.is_empty());
        assert_eq!(
            out.boundary(),
            Some(&BoundaryWitness { rank: 1, base: ds(&[3]), kind: BoundaryKind::Sup })
        );
    }

    #[test]
    fn pierce_sixty_one_hundredths() {
        let out = extract_pminus(&ratio(61, 100), &fam("pierce"), 3).unwrap();
        assert_eq!(out.seq.digits(), &ds(&[2, 3, 5])[..]);
        assert_eq!(out.status, DigitStatus::Ongoing);
        assert_eq!(out.seq.r_values(), &ds(&[1, 2, 3])[..]);
    }

    #[test]
    fn positive_side_examples() {
        let seq = extract_p(&ratio(1, 2), &fam("luroth"), 4).unwrap();
        assert_eq!(seq.digits(), &ds(&[3, 2, 2, 2])[..]);
        let seq = extract_p(&ratio(2, 5), &fam("modified-engel"), 2).unwrap();
        assert_eq!(seq.digits(), &ds(&[3, 8])[..]);
        let seq = extract_p(&ratio(1, 3), &fam("luroth"), 1).unwrap();
        assert_eq!(seq.digits(), &ds(&[4])[..]);
        let seq = extract_p(&ExactRational::one(), &fam("pierce"), 3).unwrap();
        assert_eq!(seq.digits(), &ds(&[2, 3, 4])[..]);
    }

    #[test]
    fn domain_errors() {
        let p = fam("luroth");
        assert!(matches!(extract_pminus(&ExactRational::one(), &p, 3), Err(Error::Domain { .. })));
        assert!(matches!(extract_pminus(&ExactRational::zero(), &p, 3), Err(Error::Domain { .. })));
        assert!(matches!(extract_p(&ratio(3, 2), &p, 3), Err(Error::Domain { .. })));
        assert!(extract_p(&ExactRational::one(), &p, 3).is_ok());
    }

    #[test]
    fn partial_sums() {
        assert_eq!(partial_sum_pminus(&fam("luroth"), &ds(&[3])).unwrap(), ratio(1, 2));
        assert_eq!(partial_sum_pminus(&fam("luroth"), &ds(&[3, 2])).unwrap(), ratio(1, 3));
        assert_eq!(partial_sum_pminus(&fam("pierce"), &ds(&[2, 3])).unwrap(), ratio(1, 2));
        assert_eq!(partial_sum_p(&fam("luroth"), &ds(&[3])).unwrap(), ratio(1, 3));
        assert_eq!(partial_sum_p(&fam("luroth"), &ds(&[3, 2])).unwrap(), ratio(5, 12));
        assert_eq!(partial_sum_p(&fam("modified-engel"), &ds(&[3, 8])).unwrap(), ratio(19, 48));
        assert!(matches!(partial_sum_p(&fam("pierce"), &ds(&[2, 2])), Err(Error::InvalidDigit { index: 2, .. })));
        assert!(matches!(partial_sum_pminus(&fam("pierce"), &[]), Err(Error::EmptyBase)));
    }

    #[test]
    fn enclosures() {
        let iv = reconstruct_enclosure(&fam("luroth"), Side::Alternating, &ds(&[3, 2])).unwrap();
        assert_eq!((iv.lo.clone(), iv.hi.clone()), (ratio(1, 3), ratio(5, 12)));
        assert!(iv.lo_open && iv.hi_open);
        assert!(iv.width() <= ratio(1, 4));
        let iv = reconstruct_enclosure(&fam("pierce"), Side::Alternating, &ds(&[2])).unwrap();
        assert_eq!((iv.lo, iv.hi), (ratio(1, 2), ratio(1, 1)));
        let iv = reconstruct_enclosure(&fam("luroth"), Side::Positive, &ds(&[3, 2])).unwrap();
        assert_eq!((iv.lo.clone(), iv.hi.clone()), (ratio(5, 12), ratio(1, 2)));
        assert!(iv.lo_open && !iv.hi_open);
    }

    #[test]
    fn digit_guard_trips() {
        // Sylvester digits square at every step
        let err = extract_pminus(&ratio(123_456_789_012_345, 1_000_000_000_000_037), &fam("alternating-sylvester"), 30).unwrap_err();
        assert!(matches!(err, Error::DigitTooLarge { limit_bits: 64, .. }), "{err:?}");
    }

    #[test]
    fn depth_cap() {
        let limits = Limits { max_depth: 5, ..Limits::default() };
        let err = extract_pminus_with(&ratio(2, 5), &fam("luroth"), 6, &limits).unwrap_err();
        assert!(matches!(err, Error::DepthLimit { requested: 6, cap: 5 }));
    }
}
