//! Shared Monte-Carlo sampling loop.

use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::cylinder::cyl_bounds_pminus;
use crate::digits::Side;
use crate::error::{Error, Result};
use crate::expansion::{DigitStatus, Expander, Limits, Step};
use crate::phi::PhiProgram;
use crate::rational::{two_pow_neg, ExactRational};
use crate::sampling::{substream, DyadicSample};

/// How points on the alternating side are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Draw x uniformly on (0, 1] and use F_P(x): the alternating digits are
    /// the positive digits of x. Rows agree across sides for a shared seed.
    #[default]
    Transported,
    /// Draw y uniformly on (0, 1) and expand it directly; boundary points
    /// are redrawn.
    Direct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub samples: u64,
    /// Initial random bits per sample.
    pub bits: u64,
    pub seed: u64,
    pub mode: SamplingMode,
    /// Samples are refined until the rank-n cylinder is at least
    /// `2^-(bits - 8)` wide; refinement past this many bits fails.
    pub max_bits: u64,
    pub threads: Option<usize>,
}

impl SampleConfig {
    pub fn new(samples: u64, bits: u64, seed: u64) -> Self {
        SampleConfig { samples, bits, seed, mode: SamplingMode::default(), max_bits: 1 << 16, threads: None }
    }

    pub(crate) fn check(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("sample count must be at least 1".into()));
        }
        if self.bits < 32 {
            return Err(Error::InvalidParameter(format!("need at least 32 random bits, got {}", self.bits)));
        }
        if self.max_bits < self.bits {
            return Err(Error::InvalidParameter("max_bits is below bits".into()));
        }
        Ok(())
    }
}

/// Digits of one sample on the requested side.
#[derive(Clone, Debug)]
pub struct SampleRow {
    pub index: u64,
    /// Random bits the sample ended up with after refinement.
    pub bits: u64,
    pub digits: Vec<BigUint>,
    /// Boundary points or the value 1 that were redrawn (direct mode).
    pub redraws: u32,
    /// For transported alternating rows: the alternating expansion of a point
    /// inside the image cylinder reproduced `digits`.
    pub transport_verified: Option<bool>,
}

enum Attempt {
    Done(Vec<BigUint>),
    Refine,
    Redraw,
}

fn attempt(program: &Arc<PhiProgram>, side: Side, x: ExactRational, depth: usize, bits: u64) -> Result<Attempt> {
    let limits = Limits::default().with_digit_bits(bits + 64);
    let mut ex = Expander::new(Arc::clone(program), side, x, limits)?;
    for _ in 0..depth {
        match ex.next().expect("expander yields until a boundary") {
            Ok(Step::Digit(_)) => {}
            Ok(Step::Boundary(_)) => return Ok(Attempt::Redraw),
            Err(Error::DigitTooLarge { .. }) => return Ok(Attempt::Refine),
            Err(e) => return Err(e),
        }
    }
    let resolved = ex.cylinder_length() >= &two_pow_neg(bits - 8);
    Ok(if resolved { Attempt::Done(ex.into_seq().digits().to_vec()) } else { Attempt::Refine })
}

/// Alternating expansion of the midpoint of the image cylinder.
fn verify_transport(program: &Arc<PhiProgram>, digits: &[BigUint], bits: u64) -> Result<bool> {
    let image = cyl_bounds_pminus(program, digits)?;
    let mid = image.span.midpoint();
    let limits = Limits::default().with_digit_bits(bits + 64);
    let out = crate::expansion::extract_pminus_with(&mid, program, digits.len(), &limits)?;
    Ok(out.seq.digits() == digits && matches!(out.status, DigitStatus::Ongoing))
}

pub fn draw_row(program: &Arc<PhiProgram>, side: Side, depth: usize, cfg: &SampleConfig, index: u64) -> Result<SampleRow> {
    let mut rng = substream(cfg.seed, index);
    let direct = side == Side::Alternating && cfg.mode == SamplingMode::Direct;
    let expand_side = if direct { Side::Alternating } else { Side::Positive };
    let mut redraws = 0u32;
    'draw: loop {
        let mut sample = DyadicSample::draw(&mut rng, cfg.bits);
        loop {
            if direct && sample.is_one() {
                redraws += 1;
                continue 'draw;
            }
            match attempt(program, expand_side, sample.value(), depth, sample.bits())? {
                Attempt::Done(digits) => {
                    let transport_verified = if side == Side::Alternating && !direct {
                        Some(verify_transport(program, &digits, sample.bits())?)
                    } else {
                        None
                    };
                    return Ok(SampleRow { index, bits: sample.bits(), digits, redraws, transport_verified });
                }
                Attempt::Redraw => {
                    redraws += 1;
                    continue 'draw;
                }
                Attempt::Refine => {
                    let extra = sample.bits();
                    if sample.bits() + extra > cfg.max_bits {
                        return Err(Error::PrecisionExhausted { sample: index, bits: sample.bits(), cap: cfg.max_bits });
                    }
                    sample.refine(&mut rng, extra);
                }
            }
        }
    }
}

/// Draws `cfg.samples` rows in index order, in parallel when allowed.
pub fn draw_rows(program: &PhiProgram, side: Side, depth: usize, cfg: &SampleConfig) -> Result<Vec<SampleRow>> {
    cfg.check()?;
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let program = Arc::new(program.clone());
    let run = || -> Result<Vec<SampleRow>> {
        (0..cfg.samples).into_par_iter().map(|i| draw_row(&program, side, depth, cfg, i)).collect()
    };
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?
            .install(run),
        None => run(),
    }
}
