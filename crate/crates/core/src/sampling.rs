//! Reproducible uniform dyadic samples.
//!
//! Sample `i` of a run with seed `s` draws from its own ChaCha8 stream
//! (`seed = s`, `stream = i`), so samples can be generated in any order or in
//! parallel with identical results.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rational::ExactRational;

pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_bits(rng: &mut impl RngCore, bits: u64) -> BigUint {
    let words = bits.div_ceil(32) as usize;
    let raw: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
    let mut m = BigUint::new(raw);
    let excess = (words as u64) * 32 - bits;
    m >>= excess;
    m
}

/// The point `(m + 1) / 2^bits` of the dyadic lattice on `(0, 1]`, with `m`
/// uniform on `[0, 2^bits)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicSample {
    m: BigUint,
    bits: u64,
}

impl DyadicSample {
    pub fn draw(rng: &mut impl RngCore, bits: u64) -> Self {
        DyadicSample { m: random_bits(rng, bits), bits }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn value(&self) -> ExactRational {
        ExactRational::new(BigInt::from(&self.m + 1u32), BigInt::one() << self.bits)
    }

    /// True for the sample `1`, which is outside `(0, 1)`.
    pub fn is_one(&self) -> bool {
        self.m.bits() == self.bits && (&self.m + 1u32) == (BigUint::one() << self.bits)
    }

    /// Appends `extra` fresh low-order bits. The refined point stays in the
    /// same coarse cell and is uniform on the finer lattice.
    pub fn refine(&mut self, rng: &mut impl RngCore, extra: u64) {
        let low = random_bits(rng, extra);
        self.m = (&self.m << extra) + low;
        self.bits += extra;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = DyadicSample::draw(&mut substream(7, 3), 64);
        let b = DyadicSample::draw(&mut substream(7, 3), 64);
        let c = DyadicSample::draw(&mut substream(7, 4), 64);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn values_lie_in_unit_interval() {
        let mut rng = substream(1, 0);
        for bits in [1, 5, 32, 33, 64, 100] {
            for _ in 0..50 {
                let s = DyadicSample::draw(&mut rng, bits);
                let v = s.value();
                assert!(v > ratio(0, 1) && v <= ratio(1, 1));
                assert_eq!(s.is_one(), v == ratio(1, 1));
            }
        }
    }

    #[test]
    fn refinement_stays_in_cell() {
        let mut rng = substream(2, 0);
        for _ in 0..100 {
            let mut s = DyadicSample::draw(&mut rng, 40);
            let hi = s.value();
            let lo = &hi - ExactRational::new(1.into(), BigInt::one() << 40u32);
            s.refine(&mut rng, 40);
            let v = s.value();
            assert!(v > lo && v <= hi);
            assert_eq!(s.bits(), 80);
        }
    }
}
