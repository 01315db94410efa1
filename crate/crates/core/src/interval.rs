use serde::Serialize;

use crate::rational::{serde_ratio, ExactRational};

/// Exact interval with per-endpoint openness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Interval {
    #[serde(with = "serde_ratio")]
    pub lo: ExactRational,
    #[serde(with = "serde_ratio")]
    pub hi: ExactRational,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn open(lo: ExactRational, hi: ExactRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi, lo_open: true, hi_open: true }
    }

    /// `(lo, hi]`
    pub fn left_open(lo: ExactRational, hi: ExactRational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi, lo_open: true, hi_open: false }
    }

    pub fn width(&self) -> ExactRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> ExactRational {
        (&self.lo + &self.hi) / ExactRational::from_integer(2.into())
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        let above = if self.lo_open { *x > self.lo } else { *x >= self.lo };
        let below = if self.hi_open { *x < self.hi } else { *x <= self.hi };
        above && below
    }

    /// `lo < x < hi` regardless of the openness flags.
    pub fn strictly_contains(&self, x: &ExactRational) -> bool {
        *x > self.lo && *x < self.hi
    }

    /// True when `inner` lies within `self` without touching either endpoint.
    pub fn strictly_encloses(&self, inner: &Interval) -> bool {
        inner.lo > self.lo && inner.hi < self.hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn openness_is_respected() {
        let iv = Interval::left_open(ratio(1, 3), ratio(1, 2));
        assert!(!iv.contains(&ratio(1, 3)));
        assert!(iv.contains(&ratio(1, 2)));
        assert!(!iv.strictly_contains(&ratio(1, 2)));
        assert_eq!(iv.width(), ratio(1, 6));
        assert_eq!(iv.midpoint(), ratio(5, 12));
    }
}
