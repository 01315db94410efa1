//! Test-side reference implementations, written without the library's
//! series formulas: cylinders are built by nesting children inside their
//! parent, and φ is coded directly per family.

#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use perron_core::{builtin_family, BuiltinFamily, PhiProgram, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub const FAMILIES: [BuiltinFamily; 5] = BuiltinFamily::ALL;

/// The four programs with distinct alternating behaviour.
pub const SANDWICH_FAMILIES: [&str; 4] = ["luroth", "alternating-engel", "pierce", "alternating-sylvester"];

pub fn fam(name: &str) -> PhiProgram {
    builtin_family(name).unwrap()
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

pub fn qi(n: &BigUint) -> Q {
    Q::from_integer(BigInt::from(n.clone()))
}

pub fn digits(v: &[u64]) -> Vec<BigUint> {
    v.iter().map(|&d| d.into()).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// rₙ for the built-in family, given the last digit (`None` for r₀).
pub fn phi(family: BuiltinFamily, last: Option<&BigUint>) -> BigUint {
    let Some(x) = last else { return BigUint::one() };
    match family {
        BuiltinFamily::Luroth => BigUint::one(),
        BuiltinFamily::ModifiedEngel | BuiltinFamily::Pierce => x.clone(),
        BuiltinFamily::AlternatingEngel => x - 1u32,
        BuiltinFamily::AlternatingSylvester => (x - 1u32) * x,
    }
}

/// Exact endpoints `(inf, sup)` of a cylinder, built by descending from
/// `(0, 1)` one child at a time.
pub fn nested_bounds(family: BuiltinFamily, side: Side, base: &[BigUint]) -> (Q, Q) {
    let (mut lo, mut hi) = (Q::zero(), Q::one());
    let mut last: Option<&BigUint> = None;
    for (k, c) in base.iter().enumerate() {
        let r = qi(&phi(family, last));
        let len = &hi - &lo;
        assert!(*c > phi(family, last), "invalid base {base:?}");
        let c = qi(c);
        let near = &len * &r / &c;
        let far = &len * &r / (&c - Q::one());
        // the series term grows away from the anchor endpoint: always `lo`
        // on the positive side, alternating between inf and sup otherwise
        let from_lo = side == Side::Positive || k % 2 == 0;
        if from_lo {
            (lo, hi) = (&lo + near, &lo + far);
        } else {
            (lo, hi) = (&hi - far, &hi - near);
        }
        last = Some(&base[k]);
    }
    (lo, hi)
}

/// Random valid base with rank in `1..=max_rank` and digits `<= max_digit`.
/// The rank is cut short when no admissible digit is left.
pub fn random_base(family: BuiltinFamily, rng: &mut impl Rng, max_rank: usize, max_digit: u64) -> Vec<BigUint> {
    let rank = rng.random_range(1..=max_rank);
    let mut base: Vec<BigUint> = Vec::new();
    for _ in 0..rank {
        let lo = phi(family, base.last()) + 1u32;
        let lo: u64 = (&lo).try_into().unwrap_or(u64::MAX);
        if lo > max_digit {
            break;
        }
        base.push(rng.random_range(lo..=max_digit).into());
    }
    base
}

/// Uniform dyadic `(m + 1)/2^bits` on `(0, 1]`, independent of the library
/// sampler.
pub fn dyadic(rng: &mut impl Rng, bits: u32) -> Q {
    assert!(bits <= 64);
    let m: u64 = if bits == 64 { rng.random() } else { rng.random_range(0..1u64 << bits) };
    Q::new(BigInt::from(m) + 1, BigInt::one() << bits)
}
