//! Lebesgue-measure experiments: restricted-digit cylinder covers and
//! Monte-Carlo digit laws compared against exact cylinder-length marginals.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::cylinder::cyl_bounds;
use crate::digits::Side;
use crate::error::{Error, Result};
use crate::montecarlo::{draw_rows, SampleConfig, SamplingMode};
use crate::phi::{eval_phi, PhiProgram, ProgramInfo};
use crate::rational::{approx, from_uint, ratio, serde_ratio, ExactRational};

pub const DEFAULT_COVER_BUDGET: u64 = 1 << 20;
pub const DEFAULT_LAW_BUDGET: u64 = 1 << 20;

#[derive(Clone, Debug, Serialize)]
pub struct CoverMeasure {
    pub program: ProgramInfo,
    pub side: Side,
    #[serde(serialize_with = "crate::rational::serde_digits::serialize")]
    pub restriction: Vec<BigUint>,
    pub depth: usize,
    /// Number of depth-d cylinders in the cover.
    pub cylinders: u64,
    #[serde(with = "serde_ratio")]
    pub value: ExactRational,
}

/// Sum of the lengths of every depth-`depth` cylinder on `side` whose digits
/// all lie in `v`.
pub fn cover_measure_restricted(
    program: &PhiProgram,
    side: Side,
    v: &BTreeSet<BigUint>,
    depth: usize,
) -> Result<CoverMeasure> {
    cover_measure_with_budget(program, side, v, depth, DEFAULT_COVER_BUDGET)
}

pub fn cover_measure_with_budget(
    program: &PhiProgram,
    side: Side,
    v: &BTreeSet<BigUint>,
    depth: usize,
    budget: u64,
) -> Result<CoverMeasure> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let mut level: Vec<Vec<BigUint>> = vec![Vec::new()];
    for k in 1..=depth {
        let mut next = Vec::new();
        for base in &level {
            let r = eval_phi(program, base.len(), base)?;
            for c in v.range(&r + 1u32..) {
                if next.len() as u64 >= budget {
                    return Err(Error::EnumerationBudget { budget });
                }
                let mut child = base.clone();
                child.push(c.clone());
                next.push(child);
            }
        }
        if next.is_empty() {
            return Err(Error::EmptyRestriction { level: k });
        }
        level = next;
    }
    let mut value = ExactRational::zero();
    for base in &level {
        value += cyl_bounds(program, side, base)?.length;
    }
    Ok(CoverMeasure {
        program: program.info(),
        side,
        restriction: v.iter().cloned().collect(),
        depth,
        cylinders: level.len() as u64,
        value,
    })
}

/// Exact distribution of the digit at one position, truncated at `max_digit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactLaw {
    /// `mass[i]` is the probability of digit `i + 2`.
    pub mass: Vec<ExactRational>,
    /// Probability of a digit above `max_digit`.
    pub tail: ExactRational,
}

/// Exact marginal law of the digit at `position` (1-based): the total length
/// of the rank-`position` cylinders ending in each digit.
///
/// Closed form when φₙ is constant. For other programs the rank-(n-1)
/// prefixes with digits up to `max_digit` are enumerated, which is exact only
/// when digits can never decrease; built-in families qualify, custom rules
/// with non-constant φ return `None`.
pub fn exact_digit_law(program: &PhiProgram, position: usize, max_digit: u64, budget: u64) -> Result<Option<ExactLaw>> {
    if position == 0 {
        return Err(Error::InvalidParameter("position must be at least 1".into()));
    }
    if max_digit < 2 {
        return Err(Error::InvalidParameter("max_digit must be at least 2".into()));
    }
    let mut mass = vec![ExactRational::zero(); (max_digit - 1) as usize];
    let constant = program.constant_rule();
    if constant.is_some() || position == 1 {
        let r = if position == 1 { program.phi0().clone() } else { constant.unwrap() };
        add_children(&mut mass, &ExactRational::from_integer(1.into()), &r);
    } else if program.family().is_some() {
        let mut stack: Vec<(Vec<BigUint>, ExactRational)> = vec![(Vec::new(), ratio(1, 1))];
        let mut leaves = 0u64;
        while let Some((base, len)) = stack.pop() {
            let r = eval_phi(program, base.len(), &base)?;
            if base.len() + 1 == position {
                leaves += 1;
                if leaves > budget {
                    return Err(Error::EnumerationBudget { budget });
                }
                add_children(&mut mass, &len, &r);
                continue;
            }
            let mut c = &r + 1u32;
            while c <= BigUint::from(max_digit) {
                let child_len = &len * from_uint(&r) / from_uint(&((&c - 1u32) * &c));
                let mut child = base.clone();
                child.push(c.clone());
                stack.push((child, child_len));
                c += 1u32;
            }
        }
    } else {
        return Ok(None);
    }
    let total: ExactRational = mass.iter().sum();
    Ok(Some(ExactLaw { tail: ratio(1, 1) - total, mass }))
}

fn add_children(mass: &mut [ExactRational], len: &ExactRational, r: &BigUint) {
    let first = r.to_u64().map_or(u64::MAX, |r| r.saturating_add(1)).max(2);
    let r = from_uint(r);
    for c in first..=(mass.len() as u64 + 1) {
        mass[(c - 2) as usize] += len * &r / ExactRational::from_integer(((c - 1) * c).into());
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DigitLawRow {
    pub digit: u64,
    pub count: u64,
    #[serde(with = "serde_ratio")]
    pub empirical: ExactRational,
    #[serde(with = "crate::rational::serde_ratio_opt")]
    pub exact: Option<ExactRational>,
    pub deviation: Option<f64>,
    /// `4·sqrt(p(1-p)/N)` for the exact probability `p`.
    pub band: Option<f64>,
    pub flagged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailRow {
    pub above: u64,
    pub count: u64,
    #[serde(with = "serde_ratio")]
    pub empirical: ExactRational,
    #[serde(with = "crate::rational::serde_ratio_opt")]
    pub exact: Option<ExactRational>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DigitLawReport {
    pub program: ProgramInfo,
    pub side: Side,
    pub mode: SamplingMode,
    pub position: usize,
    pub samples: u64,
    pub bits: u64,
    pub seed: u64,
    pub max_digit: u64,
    pub rows: Vec<DigitLawRow>,
    pub tail: TailRow,
    pub max_abs_deviation: Option<f64>,
    pub flagged: usize,
    /// Boundary points and the value 1 that were redrawn (direct mode).
    pub redraws: u64,
    /// Samples whose transported digits failed to reproduce on the
    /// alternating side. Always 0 unless something is broken.
    pub transport_mismatches: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct DigitLawConfig {
    pub sampling: SampleConfig,
    pub max_digit: u64,
    pub budget: u64,
}

impl DigitLawConfig {
    pub fn new(samples: u64, bits: u64, seed: u64) -> Self {
        DigitLawConfig { sampling: SampleConfig::new(samples, bits, seed), max_digit: 10, budget: DEFAULT_LAW_BUDGET }
    }
}

/// Empirical frequencies of the digit at `position` over uniform samples on
/// `side`, next to the exact law where it is available.
pub fn mc_digit_law(program: &PhiProgram, side: Side, position: usize, cfg: &DigitLawConfig) -> Result<DigitLawReport> {
    if position == 0 {
        return Err(Error::InvalidParameter("position must be at least 1".into()));
    }
    let exact = match exact_digit_law(program, position, cfg.max_digit, cfg.budget) {
        Ok(law) => law,
        Err(Error::EnumerationBudget { .. }) => None,
        Err(e) => return Err(e),
    };
    let rows = draw_rows(program, side, position, &cfg.sampling)?;
    let n = cfg.sampling.samples;
    let mut counts = vec![0u64; (cfg.max_digit - 1) as usize];
    let mut tail = 0u64;
    for row in &rows {
        match row.digits[position - 1].to_u64() {
            Some(d) if d <= cfg.max_digit => counts[(d - 2) as usize] += 1,
            _ => tail += 1,
        }
    }
    let (table, tail) = tabulate(&counts, tail, n, exact.as_ref(), cfg.max_digit);
    let max_abs_deviation = max_abs_deviation(&table);
    Ok(DigitLawReport {
        program: program.info(),
        side,
        mode: cfg.sampling.mode,
        position,
        samples: n,
        bits: cfg.sampling.bits,
        seed: cfg.sampling.seed,
        max_digit: cfg.max_digit,
        flagged: table.iter().filter(|r| r.flagged).count(),
        rows: table,
        tail,
        max_abs_deviation,
        redraws: rows.iter().map(|r| r.redraws as u64).sum(),
        transport_mismatches: rows.iter().filter(|r| r.transport_verified == Some(false)).count() as u64,
    })
}

/// Frequency table for digits `2..=max_digit` out of `n` observations.
pub(crate) fn tabulate(
    counts: &[u64],
    tail: u64,
    n: u64,
    exact: Option<&ExactLaw>,
    max_digit: u64,
) -> (Vec<DigitLawRow>, TailRow) {
    let rows = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let empirical = ratio(count, n);
            let exact = exact.map(|law| law.mass[i].clone());
            let deviation = exact.as_ref().map(|p| approx(&empirical) - approx(p));
            let band = exact.as_ref().map(|p| {
                let p = approx(p);
                4.0 * (p * (1.0 - p) / n as f64).sqrt()
            });
            let flagged = matches!((deviation, band), (Some(d), Some(b)) if d.abs() > b);
            DigitLawRow { digit: i as u64 + 2, count, empirical, exact, deviation, band, flagged }
        })
        .collect();
    let tail = TailRow { above: max_digit, count: tail, empirical: ratio(tail, n), exact: exact.map(|l| l.tail.clone()) };
    (rows, tail)
}

pub(crate) fn max_abs_deviation(rows: &[DigitLawRow]) -> Option<f64> {
    rows.iter().filter_map(|r| r.deviation).map(f64::abs).reduce(f64::max)
}

impl DigitLawReport {
    /// `digit,empirical,exact,deviation`, one line per tracked digit and a
    /// final `>max` line for the tail.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("digit,empirical,exact,deviation\n");
        let fmt = crate::rational::format_rational;
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.digit,
                fmt(&row.empirical),
                row.exact.as_ref().map(fmt).unwrap_or_default(),
                row.deviation.map(|d| d.to_string()).unwrap_or_default()
            ));
        }
        let dev = self.tail.exact.as_ref().map(|p| (approx(&self.tail.empirical) - approx(p)).to_string());
        out.push_str(&format!(
            ">{},{},{},{}\n",
            self.tail.above,
            fmt(&self.tail.empirical),
            self.tail.exact.as_ref().map(fmt).unwrap_or_default(),
            dev.unwrap_or_default()
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cylinder::cyl_bounds_p;
    use crate::phi::{builtin_family, parse_phi_spec};

    fn set(v: &[u32]) -> BTreeSet<BigUint> {
        v.iter().map(|&d| BigUint::from(d)).collect()
    }

    fn fam(name: &str) -> PhiProgram {
        builtin_family(name).unwrap()
    }

    #[test]
    fn luroth_cover_values() {
        let p = fam("luroth");
        let one = cover_measure_restricted(&p, Side::Alternating, &set(&[2, 3]), 1).unwrap();
        assert_eq!(one.value, ratio(2, 3));
        let ten = cover_measure_restricted(&p, Side::Positive, &set(&[2, 3]), 10).unwrap();
        assert_eq!(ten.value, ratio(1024, 59049));
        assert_eq!(ten.cylinders, 1024);
    }

    #[test]
    fn empty_restriction() {
        let p = fam("luroth");
        let err = cover_measure_restricted(&p, Side::Positive, &set(&[]), 1).unwrap_err();
        assert!(matches!(err, Error::EmptyRestriction { level: 1 }));
        // Pierce needs strictly increasing digits, so {2,3} dies at level 3
        let err = cover_measure_restricted(&fam("pierce"), Side::Alternating, &set(&[2, 3]), 3).unwrap_err();
        assert!(matches!(err, Error::EmptyRestriction { level: 3 }));
    }

    #[test]
    fn cover_budget() {
        let err = cover_measure_with_budget(&fam("luroth"), Side::Positive, &set(&[2, 3]), 4, 8).unwrap_err();
        assert!(matches!(err, Error::EnumerationBudget { budget: 8 }));
    }

    #[test]
    fn first_digit_law_and_tail() {
        let law = exact_digit_law(&fam("luroth"), 1, 10, DEFAULT_LAW_BUDGET).unwrap().unwrap();
        assert_eq!(law.mass[1], ratio(1, 6));
        assert_eq!(law.tail, ratio(1, 10));
    }

    #[test]
    fn enumerated_law_matches_cylinder_lengths() {
        let p = fam("modified-engel");
        let law = exact_digit_law(&p, 2, 6, DEFAULT_LAW_BUDGET).unwrap().unwrap();
        // P[p2 = 5] = |Δ_{2,5}| + |Δ_{3,5}| + |Δ_{4,5}|
        let mut want = ExactRational::zero();
        for a in 2u32..=4 {
            want += cyl_bounds_p(&p, &[a.into(), 5u32.into()]).unwrap().length;
        }
        assert_eq!(law.mass[3], want);
        assert!(law.mass[0].is_zero());
    }

    #[test]
    fn custom_nonconstant_rule_has_no_exact_law() {
        let p = parse_phi_spec("x(n) + 1", 1u32.into()).unwrap();
        assert!(exact_digit_law(&p, 2, 10, DEFAULT_LAW_BUDGET).unwrap().is_none());
        let q = parse_phi_spec("2", 1u32.into()).unwrap();
        let law = exact_digit_law(&q, 3, 10, DEFAULT_LAW_BUDGET).unwrap().unwrap();
        assert_eq!(law.mass[0], ExactRational::zero());
        assert_eq!(law.mass[1], ratio(1, 3));
        assert_eq!(law.tail, ratio(1, 5));
    }

    #[test]
    fn small_run_frequencies_sum_to_one() {
        let mut cfg = DigitLawConfig::new(10, 64, 7);
        cfg.sampling.threads = Some(1);
        let rep = mc_digit_law(&fam("luroth"), Side::Alternating, 1, &cfg).unwrap();
        let total: ExactRational = rep.rows.iter().map(|r| r.empirical.clone()).sum::<ExactRational>() + &rep.tail.empirical;
        assert_eq!(total, ratio(1, 1));
        assert_eq!(rep.rows.iter().map(|r| r.count).sum::<u64>() + rep.tail.count, 10);
        assert!(rep.to_csv().starts_with("digit,empirical,exact,deviation\n2,"));
    }

    #[test]
    fn sides_share_digits_for_shared_seed() {
        let cfg = DigitLawConfig::new(50, 64, 3);
        let a = mc_digit_law(&fam("modified-engel"), Side::Positive, 1, &cfg).unwrap();
        let b = mc_digit_law(&fam("pierce"), Side::Alternating, 1, &cfg).unwrap();
        let counts = |r: &DigitLawReport| r.rows.iter().map(|row| row.count).collect::<Vec<_>>();
        assert_eq!(counts(&a), counts(&b));
        assert_eq!(b.transport_mismatches, 0);
    }
}
