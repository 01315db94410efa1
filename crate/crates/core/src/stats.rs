//! Asymptotic digit statistics at desk scale: Rényi-type growth of pₙ,
//! per-sample growth exponents and per-position digit frequencies.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;
use statrs::statistics::{Data, OrderStatistics, Statistics};

use crate::digits::{DigitSeq, Side};
use crate::error::{Error, Result};
use crate::measure::{exact_digit_law, max_abs_deviation, tabulate, DigitLawRow, ExactLaw, TailRow};
use crate::montecarlo::{draw_rows, SampleConfig, SamplingMode};
use crate::phi::{PhiProgram, ProgramInfo};
use crate::rational::{format_rational, ratio, ExactRational};

pub const MAX_FREQUENCY_POSITION: usize = 64;
pub const QUANTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Natural log of a positive integer. The top 64 bits are kept exactly and
/// the rest enters as a power of two, so the result is accurate to f64
/// rounding for any size.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().expect("fits in 64 bits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("exactly 64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(1/n)·log pₙ` for n = 1…k.
pub fn growth_exponent(row: &DigitSeq) -> Vec<f64> {
    row.digits().iter().enumerate().map(|(i, d)| ln_biguint(d) / (i + 1) as f64).collect()
}

/// Sample rows of depth n with their derived columns.
#[derive(Clone, Debug)]
pub struct DigitStats {
    pub program: Arc<PhiProgram>,
    pub side: Side,
    pub depth: usize,
    pub config: SampleConfig,
    pub rows: Vec<StatsRow>,
}

#[derive(Clone, Debug)]
pub struct StatsRow {
    pub sample: u64,
    /// Random bits after refinement.
    pub bits: u64,
    pub seq: DigitSeq,
}

impl StatsRow {
    pub fn p_n(&self) -> &BigUint {
        self.seq.digits().last().expect("rows are non-empty")
    }

    pub fn log_p_n(&self) -> f64 {
        ln_biguint(self.p_n())
    }

    /// `(log pₙ − n)/√n`.
    pub fn score(&self) -> f64 {
        let n = self.seq.len() as f64;
        (self.log_p_n() - n) / n.sqrt()
    }

    /// `(1/n)·log pₙ`.
    pub fn growth(&self) -> f64 {
        self.log_p_n() / self.seq.len() as f64
    }

    /// `gₙ = pₙ − r_{n−1}`, at least 1.
    pub fn gap(&self) -> BigUint {
        self.p_n() - self.seq.r_values().last().expect("rows are non-empty")
    }

    /// `(log pₙ − n)/√(2n log log n)`; `None` where log log n ≤ 0.
    pub fn lil_ratio(&self) -> Option<f64> {
        let n = self.seq.len() as f64;
        let ll = n.ln().ln();
        (ll > 0.0).then(|| (self.log_p_n() - n) / (2.0 * n * ll).sqrt())
    }
}

/// Draws `config.samples` rows of `depth` digits on `side`. Rows are
/// validated digit sequences; every derived column is recomputed from them.
pub fn digit_stats(program: &PhiProgram, side: Side, depth: usize, config: &SampleConfig) -> Result<DigitStats> {
    let program = Arc::new(program.clone());
    let rows = draw_rows(&program, side, depth, config)?
        .into_iter()
        .map(|row| {
            Ok(StatsRow { sample: row.index, bits: row.bits, seq: DigitSeq::new(Arc::clone(&program), side, row.digits)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DigitStats { program, side, depth, config: *config, rows })
}

impl DigitStats {
    /// `sample,seed_offset,n,p_n,log_p_n,score`. The seed offset is the
    /// substream index of the sample under the run seed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample,seed_offset,n,p_n,log_p_n,score\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                i,
                row.sample,
                self.depth,
                row.p_n(),
                row.log_p_n(),
                row.score()
            ));
        }
        out
    }

    pub fn summary(&self) -> RenyiProfile {
        let scores: Vec<f64> = self.rows.iter().map(StatsRow::score).collect();
        let growth: Vec<f64> = self.rows.iter().map(StatsRow::growth).collect();
        let lil: Vec<f64> = self.rows.iter().filter_map(StatsRow::lil_ratio).collect();
        let sd = if scores.len() < 2 { 0.0 } else { scores.iter().std_dev() };
        let mut data = Data::new(scores.clone());
        RenyiProfile {
            program: self.program.info(),
            side: self.side,
            mode: self.config.mode,
            n: self.depth,
            samples: self.config.samples,
            bits: self.config.bits,
            seed: self.config.seed,
            max_bits_used: self.rows.iter().map(|r| r.bits).max().unwrap_or(self.config.bits),
            mean_score: scores.iter().mean(),
            sd_score: sd,
            quantiles: QUANTILES.iter().map(|&p| Quantile { p, value: data.quantile(p) }).collect(),
            mean_growth: growth.iter().mean(),
            min_growth: Statistics::min(growth.iter()),
            max_growth: Statistics::max(growth.iter()),
            lil_max: (!lil.is_empty()).then(|| Statistics::max(lil.iter())),
            lil_min: (!lil.is_empty()).then(|| Statistics::min(lil.iter())),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Quantile {
    pub p: f64,
    pub value: f64,
}

/// Summary of `(log pₙ − n)/√n` and `(1/n)·log pₙ` over the samples.
#[derive(Clone, Debug, Serialize)]
pub struct RenyiProfile {
    pub program: ProgramInfo,
    pub side: Side,
    pub mode: SamplingMode,
    pub n: usize,
    pub samples: u64,
    pub bits: u64,
    pub seed: u64,
    /// Largest bit count any sample needed to resolve its rank-n cylinder.
    pub max_bits_used: u64,
    pub mean_score: f64,
    /// Sample standard deviation; 0 for a single sample.
    pub sd_score: f64,
    pub quantiles: Vec<Quantile>,
    pub mean_growth: f64,
    pub min_growth: f64,
    pub max_growth: f64,
    /// Extremes of `(log pₙ − n)/√(2n log log n)`, descriptive only.
    pub lil_max: Option<f64>,
    pub lil_min: Option<f64>,
}

pub fn renyi_profile(program: &PhiProgram, side: Side, n: usize, config: &SampleConfig) -> Result<RenyiProfile> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    Ok(digit_stats(program, side, n, config)?.summary())
}

#[derive(Clone, Debug, Serialize)]
pub struct PositionLaw {
    pub position: usize,
    pub rows: Vec<DigitLawRow>,
    pub tail: TailRow,
    pub max_abs_deviation: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PooledRow {
    pub digit: u64,
    pub count: u64,
    #[serde(with = "crate::rational::serde_ratio")]
    pub empirical: ExactRational,
    #[serde(with = "crate::rational::serde_ratio_opt")]
    pub exact: Option<ExactRational>,
    pub deviation: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FrequencyReport {
    pub program: ProgramInfo,
    pub side: Side,
    pub mode: SamplingMode,
    pub positions: Vec<usize>,
    pub samples: u64,
    pub bits: u64,
    pub seed: u64,
    pub max_digit: u64,
    /// The exact law is the same at every requested position.
    pub position_independent: bool,
    pub per_position: Vec<PositionLaw>,
    /// Frequencies over all `samples × positions` observations.
    pub pooled: Vec<PooledRow>,
    pub pooled_tail: PooledRow,
    pub flagged: usize,
}

/// Per-position and pooled digit frequencies for `positions` (each in
/// `1..=64`), with exact laws where they can be computed.
pub fn digit_frequency(
    program: &PhiProgram,
    side: Side,
    positions: &[usize],
    max_digit: u64,
    config: &SampleConfig,
) -> Result<FrequencyReport> {
    let mut positions = positions.to_vec();
    positions.sort_unstable();
    positions.dedup();
    match (positions.first(), positions.last()) {
        (Some(&lo), Some(&hi)) if lo >= 1 && hi <= MAX_FREQUENCY_POSITION => {}
        _ => return Err(Error::InvalidParameter(format!("positions must lie in 1..={MAX_FREQUENCY_POSITION}"))),
    }
    if max_digit < 2 {
        return Err(Error::InvalidParameter("max_digit must be at least 2".into()));
    }
    let laws = positions
        .iter()
        .map(|&k| match exact_digit_law(program, k, max_digit, crate::measure::DEFAULT_LAW_BUDGET) {
            Ok(law) => Ok(law),
            Err(Error::EnumerationBudget { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<Option<ExactLaw>>>>()?;
    let depth = *positions.last().expect("non-empty");
    let rows = draw_rows(program, side, depth, config)?;
    let n = config.samples;
    let width = (max_digit - 1) as usize;

    let mut per_position = Vec::with_capacity(positions.len());
    let mut pooled_counts = vec![0u64; width];
    let mut pooled_tail = 0u64;
    for (&k, law) in positions.iter().zip(&laws) {
        let mut counts = vec![0u64; width];
        let mut tail = 0u64;
        for row in &rows {
            match row.digits[k - 1].to_u64() {
                Some(d) if d <= max_digit => counts[(d - 2) as usize] += 1,
                _ => tail += 1,
            }
        }
        for (p, c) in pooled_counts.iter_mut().zip(&counts) {
            *p += c;
        }
        pooled_tail += tail;
        let (table, tail) = tabulate(&counts, tail, n, law.as_ref(), max_digit);
        per_position.push(PositionLaw { position: k, max_abs_deviation: max_abs_deviation(&table), rows: table, tail });
    }

    let all_exact: Option<Vec<&ExactLaw>> = laws.iter().map(Option::as_ref).collect();
    let position_independent = all_exact.as_ref().is_some_and(|l| l.windows(2).all(|w| w[0] == w[1]));
    let total = n * positions.len() as u64;
    let pooled_exact = |pick: &dyn Fn(&ExactLaw) -> ExactRational| {
        all_exact.as_ref().map(|l| {
            l.iter().map(|law| pick(law)).sum::<ExactRational>() / ExactRational::from_integer(l.len().into())
        })
    };
    let pooled_row = |digit: u64, count: u64, exact: Option<ExactRational>| {
        let empirical = ratio(count, total);
        let deviation = exact.as_ref().map(|p| crate::rational::approx(&empirical) - crate::rational::approx(p));
        PooledRow { digit, count, empirical, exact, deviation }
    };
    let pooled = pooled_counts
        .iter()
        .enumerate()
        .map(|(i, &c)| pooled_row(i as u64 + 2, c, pooled_exact(&|law| law.mass[i].clone())))
        .collect();
    let pooled_tail = pooled_row(max_digit + 1, pooled_tail, pooled_exact(&|law| law.tail.clone()));

    Ok(FrequencyReport {
        program: program.info(),
        side,
        mode: config.mode,
        flagged: per_position.iter().flat_map(|p| &p.rows).filter(|r| r.flagged).count(),
        positions,
        samples: n,
        bits: config.bits,
        seed: config.seed,
        max_digit,
        position_independent,
        per_position,
        pooled,
        pooled_tail,
    })
}

impl FrequencyReport {
    /// `position,digit,empirical,exact,deviation`; position `all` holds the
    /// pooled rows and digit `>M` the tail.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("position,digit,empirical,exact,deviation\n");
        let opt = |q: &Option<ExactRational>| q.as_ref().map(format_rational).unwrap_or_default();
        let dev = |d: Option<f64>| d.map(|d| d.to_string()).unwrap_or_default();
        for law in &self.per_position {
            for r in &law.rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    law.position,
                    r.digit,
                    format_rational(&r.empirical),
                    opt(&r.exact),
                    dev(r.deviation)
                ));
            }
            let t = &law.tail;
            out.push_str(&format!(
                "{},>{},{},{},\n",
                law.position,
                t.above,
                format_rational(&t.empirical),
                opt(&t.exact)
            ));
        }
        for r in &self.pooled {
            out.push_str(&format!(
                "all,{},{},{},{}\n",
                r.digit,
                format_rational(&r.empirical),
                opt(&r.exact),
                dev(r.deviation)
            ));
        }
        let t = &self.pooled_tail;
        out.push_str(&format!(
            "all,>{},{},{},{}\n",
            self.max_digit,
            format_rational(&t.empirical),
            opt(&t.exact),
            dev(t.deviation)
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phi::builtin_family;

    fn fam(name: &str) -> PhiProgram {
        builtin_family(name).unwrap()
    }

    fn seq(name: &str, digits: &[u64]) -> DigitSeq {
        let d = digits.iter().map(|&d| BigUint::from(d)).collect();
        DigitSeq::new(Arc::new(fam(name)), Side::Positive, d).unwrap()
    }

    #[test]
    fn ln_of_large_integers() {
        assert_eq!(ln_biguint(&BigUint::from(1u32)), 0.0);
        let big = BigUint::from(1u32) << 1000u32;
        assert!((ln_biguint(&big) - 1000.0 * std::f64::consts::LN_2).abs() < 1e-9);
        let odd = BigUint::from(3u32).pow(400);
        assert!((ln_biguint(&odd) - 400.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn growth_of_constant_row() {
        let g = growth_exponent(&seq("luroth", &[2; 10]));
        assert_eq!(g.len(), 10);
        for (i, v) in g.iter().enumerate() {
            assert!((v - 2f64.ln() / (i + 1) as f64).abs() < 1e-15);
        }
        assert_eq!(growth_exponent(&seq("luroth", &[7])), vec![7f64.ln()]);
    }

    #[test]
    fn single_sample_has_zero_sd() {
        let cfg = SampleConfig::new(1, 64, 0);
        let prof = renyi_profile(&fam("modified-engel"), Side::Positive, 2, &cfg).unwrap();
        assert_eq!(prof.sd_score, 0.0);
        assert_eq!(prof.samples, 1);
        assert!(renyi_profile(&fam("modified-engel"), Side::Positive, 1, &cfg).is_err());
    }

    #[test]
    fn gap_is_digit_minus_previous_r() {
        let stats = digit_stats(&fam("pierce"), Side::Alternating, 5, &SampleConfig::new(20, 64, 1)).unwrap();
        for row in &stats.rows {
            let d = row.seq.digits();
            assert_eq!(row.gap(), &d[4] - &d[3]);
            assert!(row.gap() >= BigUint::from(1u32));
        }
        let csv = stats.to_csv();
        assert_eq!(csv.lines().count(), 21);
        assert!(csv.starts_with("sample,seed_offset,n,p_n,log_p_n,score\n0,0,5,"));
    }

    #[test]
    fn sides_agree_row_for_row() {
        let cfg = SampleConfig::new(16, 256, 4);
        let a = digit_stats(&fam("modified-engel"), Side::Positive, 12, &cfg).unwrap();
        let b = digit_stats(&fam("pierce"), Side::Alternating, 12, &cfg).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.seq.digits(), y.seq.digits());
        }
    }

    #[test]
    fn luroth_frequencies_are_position_independent() {
        let cfg = SampleConfig::new(200, 64, 2);
        let rep = digit_frequency(&fam("luroth"), Side::Alternating, &[1, 2, 3, 4, 5, 6, 7, 8], 10, &cfg).unwrap();
        assert!(rep.position_independent);
        for law in &rep.per_position {
            assert_eq!(law.rows[0].exact, Some(ratio(1, 2)));
            assert_eq!(law.rows[1].exact, Some(ratio(1, 6)));
        }
        let total: ExactRational =
            rep.pooled.iter().map(|r| r.empirical.clone()).sum::<ExactRational>() + &rep.pooled_tail.empirical;
        assert_eq!(total, ratio(1, 1));
        assert_eq!(rep.pooled_tail.exact, Some(ratio(1, 10)));
    }

    #[test]
    fn pierce_frequencies_depend_on_position() {
        let cfg = SampleConfig::new(50, 64, 2);
        let rep = digit_frequency(&fam("pierce"), Side::Alternating, &[1, 2], 10, &cfg).unwrap();
        assert!(!rep.position_independent);
        assert!(digit_frequency(&fam("pierce"), Side::Alternating, &[65], 10, &cfg).is_err());
        assert!(digit_frequency(&fam("pierce"), Side::Alternating, &[], 10, &cfg).is_err());
    }
}
