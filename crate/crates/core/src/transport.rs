//! The digit-preserving map F_P from positive to alternating representations.
//!
//! F_P sends the number with positive digits p₁p₂… to the number with the same
//! alternating digits. Both cylinders over a common base have the same length,
//! which is what makes F_P measure preserving.

use num_bigint::BigUint;
use serde::Serialize;

use crate::cylinder::{cyl_bounds_p, cyl_bounds_pminus, CylinderBox};
use crate::error::{Error, Result};
use crate::expansion::{extract_p_with, extract_pminus_with, BoundaryWitness, Limits};
use crate::interval::Interval;
use crate::phi::PhiProgram;
use crate::rational::{serde_digits, serde_ratio, ExactRational};

#[derive(Clone, Debug, Serialize)]
pub struct TransportResult {
    #[serde(with = "serde_ratio")]
    pub input: ExactRational,
    #[serde(with = "serde_digits")]
    pub digits: Vec<BigUint>,
    /// Alternating cylinder over `digits`; contains F_P(input).
    pub image_enclosure: Interval,
    pub depth: usize,
}

pub fn transport_point(program: &PhiProgram, x: &ExactRational, depth: usize) -> Result<TransportResult> {
    transport_point_with(program, x, depth, &Limits::default())
}

pub fn transport_point_with(
    program: &PhiProgram,
    x: &ExactRational,
    depth: usize,
    limits: &Limits,
) -> Result<TransportResult> {
    if depth == 0 {
        return Err(Error::InvalidParameter("transport depth must be at least 1".into()));
    }
    let seq = extract_p_with(x, program, depth, limits)?;
    let image = cyl_bounds_pminus(program, seq.digits())?;
    Ok(TransportResult {
        input: x.clone(),
        digits: seq.digits().to_vec(),
        image_enclosure: image.span,
        depth,
    })
}

/// Positive and alternating cylinders over one base; their lengths agree.
pub fn transport_cylinder(program: &PhiProgram, base: &[BigUint]) -> Result<(CylinderBox, CylinderBox)> {
    let pos = cyl_bounds_p(program, base)?;
    let alt = cyl_bounds_pminus(program, base)?;
    debug_assert_eq!(pos.length, alt.length);
    Ok((pos, alt))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum BoundaryInfo {
    Boundary(BoundaryWitness),
    /// No endpoint found within `depth` digits. `exhausted` is set when the
    /// probe stopped early on the digit-size guard.
    NotDetected { depth: usize, exhausted: bool },
}

pub const DEFAULT_PROBE_DEPTH: usize = 64;

/// Semi-decides membership in the set of alternating-cylinder endpoints.
/// A reported boundary is exact; `NotDetected` only covers the probed depth.
pub fn is_membership(program: &PhiProgram, x: &ExactRational) -> Result<BoundaryInfo> {
    is_membership_with(program, x, DEFAULT_PROBE_DEPTH, &Limits::default())
}

pub fn is_membership_with(
    program: &PhiProgram,
    x: &ExactRational,
    depth: usize,
    limits: &Limits,
) -> Result<BoundaryInfo> {
    match extract_pminus_with(x, program, depth, limits) {
        Ok(out) => Ok(match out.boundary() {
            Some(w) => BoundaryInfo::Boundary(w.clone()),
            None => BoundaryInfo::NotDetected { depth: out.seq.len(), exhausted: false },
        }),
        Err(Error::DigitTooLarge { position, .. }) => {
            Ok(BoundaryInfo::NotDetected { depth: position - 1, exhausted: true })
        }
        Err(e) => Err(e),
    }
}

/// The endpoint a witness names, recomputed from cylinder geometry.
pub fn witness_endpoint(program: &PhiProgram, w: &BoundaryWitness) -> Result<ExactRational> {
    if w.base.is_empty() {
        // only reachable for x on the ends of (0, 1) itself
        return Ok(ExactRational::default());
    }
    let cyl = cyl_bounds_pminus(program, &w.base)?;
    Ok(match w.kind {
        crate::expansion::BoundaryKind::Inf => cyl.inf().clone(),
        crate::expansion::BoundaryKind::Sup => cyl.sup().clone(),
    })
}
