//! Randomized invariants across modules.

mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use common::*;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use perron_core::phi::{parse_expr, BinOp, Expr};
use perron_core::*;
use proptest::prelude::*;

fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..50).prop_map(|n| Expr::Int(n.into())),
        Just(Expr::Index),
        (1u32..4).prop_map(|n| Expr::Digit(Box::new(Expr::Int(n.into())))),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinOp::Add, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinOp::Sub, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinOp::Mul, a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::binary(BinOp::Pow, a, b)),
            inner.prop_map(|e| Expr::Digit(Box::new(e))),
        ]
    })
}

fn family_index() -> impl Strategy<Value = BuiltinFamily> {
    (0usize..5).prop_map(|i| FAMILIES[i])
}

/// A valid base for `family` driven by proptest-chosen offsets.
fn base_from_offsets(family: BuiltinFamily, offsets: &[u64]) -> Vec<BigUint> {
    let mut base: Vec<BigUint> = Vec::new();
    for &o in offsets {
        let c = phi(family, base.last()) + 1u32 + o;
        if c.bits() > 200 {
            break;
        }
        base.push(c);
    }
    base
}

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::Positive), Just(Side::Alternating)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dsl_print_parse_round_trip(e in arb_expr()) {
        let text = e.to_string();
        let back = parse_expr(&text).unwrap();
        prop_assert_eq!(&back, &e, "{}", text);
        prop_assert_eq!(back.to_string(), text);
    }

    #[test]
    fn builtin_and_dsl_rules_agree(family in family_index(), offsets in prop::collection::vec(0u64..30, 1..8)) {
        let builtin = PhiProgram::builtin(family);
        let dsl = parse_phi_spec(family.dsl_text(), BigUint::one()).unwrap();
        let base = base_from_offsets(family, &offsets);
        for n in 0..=base.len() {
            prop_assert_eq!(eval_phi(&builtin, n, &base).unwrap(), eval_phi(&dsl, n, &base).unwrap());
        }
        prop_assert!(builtin.same_p(&dsl));
        prop_assert_eq!(dsl.equivalent_family().map(|f| PhiProgram::builtin(f).same_p(&builtin)), Some(true));
    }

    #[test]
    fn cylinders_match_nested_oracle(family in family_index(), side in side(), offsets in prop::collection::vec(0u64..1000, 1..10)) {
        let program = PhiProgram::builtin(family);
        let base = base_from_offsets(family, &offsets);
        let cyl = cyl_bounds(&program, side, &base).unwrap();
        let (lo, hi) = nested_bounds(family, side, &base);
        prop_assert_eq!(cyl.inf(), &lo);
        prop_assert_eq!(cyl.sup(), &hi);
        // nesting inside the parent
        if base.len() > 1 {
            let parent = cyl_bounds(&program, side, &base[..base.len() - 1]).unwrap();
            prop_assert!(parent.inf() <= cyl.inf() && cyl.sup() <= parent.sup());
            let ratio = child_ratio(&program, &base[..base.len() - 1], base.last().unwrap()).unwrap();
            prop_assert_eq!(&cyl.length / &parent.length, ratio);
        }
    }

    #[test]
    fn sandwich_and_shrinkage(family in family_index(), num in 1u64..u64::MAX, depth in 1usize..12) {
        let program = PhiProgram::builtin(family);
        let x = q(num as i64 & i64::MAX, i64::MAX);
        prop_assume!(x > Q::zero() && x < Q::one());
        let limits = Limits::default().with_digit_bits(4096);
        let out = match extract_pminus_with(&x, &program, depth, &limits) {
            Ok(out) => out,
            // Sylvester digits square each step and may outrun any fixed guard
            Err(Error::DigitTooLarge { .. }) if family == BuiltinFamily::AlternatingSylvester => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let mut width = Q::one();
        for k in 1..=out.seq.len() {
            let cyl = cyl_bounds_pminus(&program, &out.seq.digits()[..k]).unwrap();
            prop_assert!(cyl.span.strictly_contains(&x) || out.boundary().is_some());
            prop_assert!(cyl.length < width);
            width = cyl.length.clone();
        }
        if let Some(w) = out.boundary() {
            prop_assert_eq!(witness_endpoint(&program, w).unwrap(), x);
        }
    }

    #[test]
    fn midpoint_recovers_digits(family in family_index(), offsets in prop::collection::vec(0u64..50, 1..8)) {
        let program = PhiProgram::builtin(family);
        let base = base_from_offsets(family, &offsets);
        let limits = Limits::default().with_digit_bits(4096);
        for side in [Side::Positive, Side::Alternating] {
            let cyl = cyl_bounds(&program, side, &base).unwrap();
            let mid = cyl.span.midpoint();
            let digits = match side {
                Side::Positive => extract_p_with(&mid, &program, base.len(), &limits).unwrap().digits().to_vec(),
                Side::Alternating => {
                    let out = extract_pminus_with(&mid, &program, base.len(), &limits).unwrap();
                    prop_assert!(out.boundary().is_none());
                    out.seq.digits().to_vec()
                }
            };
            prop_assert_eq!(&digits, &base);
        }
    }

    #[test]
    fn positive_supremum_round_trip(family in family_index(), offsets in prop::collection::vec(0u64..50, 1..6)) {
        // the closed upper end of a positive cylinder expands into it
        let program = PhiProgram::builtin(family);
        let base = base_from_offsets(family, &offsets);
        let cyl = cyl_bounds_p(&program, &base).unwrap();
        let limits = Limits::default().with_digit_bits(4096);
        let seq = extract_p_with(cyl.sup(), &program, base.len(), &limits).unwrap();
        prop_assert_eq!(seq.digits(), &base[..]);
    }

    #[test]
    fn order_matches_values(family in family_index(), side in side(), a in prop::collection::vec(0u64..40, 1..6), b in prop::collection::vec(0u64..40, 1..6)) {
        let program = Arc::new(PhiProgram::builtin(family));
        let (da, db) = (base_from_offsets(family, &a), base_from_offsets(family, &b));
        let sa = DigitSeq::new(Arc::clone(&program), side, da.clone()).unwrap();
        let sb = DigitSeq::new(Arc::clone(&program), side, db.clone()).unwrap();
        let (alo, ahi) = nested_bounds(family, side, &da);
        let (blo, bhi) = nested_bounds(family, side, &db);
        match compare_digitwise(&sa, &sb).unwrap() {
            DigitOrder::Less => prop_assert!(ahi <= blo),
            DigitOrder::Greater => prop_assert!(bhi <= alo),
            DigitOrder::PrefixEqual => prop_assert!((blo <= alo && ahi <= bhi) || (alo <= blo && bhi <= ahi)),
        }
    }

    #[test]
    fn cover_is_monotone(digits_v in prop::collection::btree_set(2u64..12, 1..5), family in family_index()) {
        let program = PhiProgram::builtin(family);
        let v: BTreeSet<BigUint> = digits_v.into_iter().map(BigUint::from).collect();
        let mut prev: Option<Q> = None;
        for d in 1..=4 {
            match cover_measure_restricted(&program, Side::Alternating, &v, d) {
                Ok(c) => {
                    prop_assert!(c.value >= Q::zero() && c.value <= Q::one());
                    if let Some(p) = &prev {
                        prop_assert!(&c.value <= p);
                    }
                    prev = Some(c.value);
                }
                Err(Error::EmptyRestriction { level }) => {
                    prop_assert!(level >= 1 && level <= d);
                    break;
                }
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn luroth_cover_is_a_power(digits_v in prop::collection::btree_set(2u64..30, 1..6), d in 1usize..5) {
        let program = fam("luroth");
        let v: BTreeSet<BigUint> = digits_v.iter().map(|&c| BigUint::from(c)).collect();
        let rho: Q = digits_v.iter().map(|&c| q(1, ((c - 1) * c) as i64)).sum();
        let cover = cover_measure_restricted(&program, Side::Positive, &v, d).unwrap();
        prop_assert_eq!(cover.value, rho.pow(d as i32));
    }
}
