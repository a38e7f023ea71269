use proptest::prelude::*;

use symbreak::alphabetic::{
    brute_force_optimal, dp_optimal_cost, hu_tucker, hu_tucker_phase1, phase1_path,
    reconstruct_from_depths, tree_cost, SolveResult, TieBreak, TiePolicy,
};
use symbreak::partition::{
    brute_force_partition, greedy_partition, greedy_partition_path, partition_value,
};
use symbreak::{
    dyadic_shadow, evaluate, perturbed_sign, sign, stability_witness, verify_policy,
    LinearFunctional, Orientation, PerturbedValue, Rational, ShadowVector, SignValue, WeightVector,
};

/// `k / 2^m`, small enough that ties are common.
fn small_rational(max_k: i64) -> impl Strategy<Value = Rational> {
    (0..=max_k, 0..=2u32).prop_map(|(k, m)| Rational::new(k, 1 << m))
}

fn signed_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=6).prop_map(|(a, b)| Rational::new(a, b))
}

fn weights(n: std::ops::RangeInclusive<usize>, max_k: i64) -> impl Strategy<Value = WeightVector> {
    prop::collection::vec(small_rational(max_k), n).prop_map(|v| WeightVector::new(v).unwrap())
}

fn orientation() -> impl Strategy<Value = Orientation> {
    prop_oneof![Just(Orientation::Positive), Just(Orientation::Negative)]
}

fn policy() -> impl Strategy<Value = TiePolicy> {
    prop_oneof![Just(TiePolicy::Leftmost), Just(TiePolicy::Rightmost)]
}

/// Coefficients over `1..=n`, possibly all zero.
fn functional(n: usize, coeff: BoxedStrategy<Rational>) -> impl Strategy<Value = LinearFunctional> {
    prop::collection::vec(coeff, n).prop_map(|cs| {
        LinearFunctional::from_terms(cs.into_iter().enumerate().map(|(i, c)| (i + 1, c))).unwrap()
    })
}

fn unit_functional(n: usize) -> impl Strategy<Value = LinearFunctional> {
    functional(n, (-1i64..=1).prop_map(Rational::from_integer).boxed())
}

fn paired_value(f: &LinearFunctional, w: &WeightVector, s: &ShadowVector) -> PerturbedValue {
    f.terms()
        .into_iter()
        .fold(PerturbedValue::default(), |acc, (i, c)| {
            let term = PerturbedValue::new(&c * w.get(i).unwrap(), &c * &s.entries()[i - 1]);
            &acc + &term
        })
}

fn vector(values: Vec<Rational>) -> WeightVector {
    WeightVector::new(values).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn evaluate_is_linear(
        (f, w, d) in (1usize..8).prop_flat_map(|n| (
            functional(n, signed_rational().boxed()),
            prop::collection::vec(signed_rational(), n),
            prop::collection::vec(signed_rational(), n),
        ))
    ) {
        let sum: Vec<Rational> = w.iter().zip(&d).map(|(a, b)| a + b).collect();
        let lhs = evaluate(&f, &vector(sum)).unwrap();
        let rhs = evaluate(&f, &vector(w)).unwrap() + evaluate(&f, &vector(d)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluate_continuity_modulus(
        (f, w, d) in (1usize..8).prop_flat_map(|n| (
            functional(n, signed_rational().boxed()),
            prop::collection::vec(signed_rational(), n),
            prop::collection::vec(signed_rational(), n),
        ))
    ) {
        let base = vector(w.clone());
        let moved = base.checked_add(&d).unwrap();
        let change = (evaluate(&f, &moved).unwrap() - evaluate(&f, &base).unwrap()).abs();
        let max_delta = d.iter().map(Rational::abs).max().unwrap();
        prop_assert!(change <= f.l1_norm() * max_delta);
    }

    #[test]
    fn perturbed_sign_matches_paired_arithmetic(
        (f, w, o) in (1usize..10).prop_flat_map(|n| (unit_functional(n), weights(n..=n, 3), orientation()))
    ) {
        let s = dyadic_shadow(w.len(), o).unwrap();
        prop_assert_eq!(perturbed_sign(&f, &w, &s).unwrap(), paired_value(&f, &w, &s).sign());
    }

    #[test]
    fn perturbed_sign_agrees_with_custom_shadows(
        (f, w, s) in (1usize..8).prop_flat_map(|n| (
            functional(n, signed_rational().boxed()),
            prop::collection::vec(signed_rational(), n),
            prop::collection::vec(signed_rational(), n),
        ))
    ) {
        let (w, s) = (vector(w), ShadowVector::custom(s));
        prop_assert_eq!(perturbed_sign(&f, &w, &s).unwrap(), paired_value(&f, &w, &s).sign());
    }

    #[test]
    fn limit_property_at_witness_and_half(
        (f, w, s) in (1usize..8).prop_flat_map(|n| (
            functional(n, signed_rational().boxed()),
            prop::collection::vec(signed_rational(), n),
            prop::collection::vec(signed_rational(), n),
        ))
    ) {
        let (w, s) = (vector(w), ShadowVector::custom(s));
        let expected = perturbed_sign(&f, &w, &s).unwrap();
        prop_assume!(expected != SignValue::Zero);
        let at_w = evaluate(&f, &w).unwrap();
        let along = f.evaluate_slice(s.entries()).unwrap();
        let a_star = if at_w.is_zero() {
            Rational::one()
        } else {
            at_w.abs().checked_div(&(along.abs() + Rational::one())).unwrap()
        };
        for a in [a_star.clone(), a_star.checked_div(&Rational::from_integer(2)).unwrap()] {
            let shifted = w.shifted(&a, s.entries()).unwrap();
            prop_assert_eq!(sign(&evaluate(&f, &shifted).unwrap()), expected);
        }
    }

    #[test]
    fn dyadic_sign_follows_leading_coefficient(
        (f, w) in (1usize..24).prop_flat_map(|n| (unit_functional(n), weights(n..=n, 2)))
    ) {
        prop_assume!(!f.is_zero());
        let pos = dyadic_shadow(w.len(), Orientation::Positive).unwrap();
        let neg = dyadic_shadow(w.len(), Orientation::Negative).unwrap();
        let lead = sign(&f.leading_term().unwrap().1);
        prop_assert_eq!(sign(&f.evaluate_slice(pos.entries()).unwrap()), lead);
        prop_assert_ne!(perturbed_sign(&f, &w, &pos).unwrap(), SignValue::Zero);
        prop_assert_ne!(perturbed_sign(&f, &w, &neg).unwrap(), SignValue::Zero);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn dp_matches_enumeration(w in weights(1..=9, 6)) {
        let (cost, count) = brute_force_optimal(&w).unwrap();
        prop_assert_eq!(dp_optimal_cost(&w).unwrap(), cost);
        prop_assert!(count >= 1);
    }

    #[test]
    fn hu_tucker_is_feasible_and_optimal(w in weights(1..=40, 4), p in policy()) {
        let (result, trace) = hu_tucker(&w, p).unwrap();
        let tree = match result {
            SolveResult::Solution(t) => t,
            SolveResult::Failure => return Err(TestCaseError::fail("phase 1 depths not realizable")),
        };
        prop_assert!(tree.is_alphabetic());
        prop_assert_eq!(tree_cost(&tree, &w).unwrap(), dp_optimal_cost(&w).unwrap());
        for r in trace.records() {
            prop_assert!(r.functional.is_unit_shaped());
            prop_assert_eq!(r.functional.leading_term().unwrap().1, -Rational::one());
        }
    }

    #[test]
    fn traces_verify_under_the_bound_orientation(w in weights(1..=30, 3)) {
        for (p, o) in [(TiePolicy::Leftmost, Orientation::Negative), (TiePolicy::Rightmost, Orientation::Positive)] {
            let (_, trace) = hu_tucker(&w, p).unwrap();
            let s = dyadic_shadow(w.len(), o).unwrap();
            let report = verify_policy(&trace, &w, &s).unwrap();
            prop_assert!(report.passed());
            prop_assert_eq!(verify_policy(&trace, &w, &s).unwrap(), report);
        }
    }

    #[test]
    fn hu_tucker_path_is_stable(w in weights(1..=25, 3), p in policy()) {
        let o = if p == TiePolicy::Leftmost { Orientation::Negative } else { Orientation::Positive };
        let s = dyadic_shadow(w.len(), o).unwrap();
        let run = hu_tucker_phase1(&w, TieBreak::Policy(p)).unwrap();
        let a = stability_witness(&run.trace, &w, &s).unwrap();
        prop_assert!(a > Rational::zero());
        let rerun = phase1_path(&w.shifted(&a, s.entries()).unwrap(), TieBreak::Policy(p)).unwrap();
        prop_assert!(rerun.trace.same_path(&run.trace));
        prop_assert_eq!(rerun.trace.tie_count(), 0);
        prop_assert_eq!(reconstruct_from_depths(&rerun.depths), reconstruct_from_depths(&run.depths));
    }

    #[test]
    fn greedy_partition_is_sound_and_stable(w in weights(1..=12, 4), o in orientation()) {
        let s = dyadic_shadow(w.len(), o).unwrap();
        let (assignment, trace) = greedy_partition(&w, &s).unwrap();
        prop_assert!(trace.records().iter().all(|r| r.functional.is_unit_shaped()));
        prop_assert!(verify_policy(&trace, &w, &s).unwrap().passed());
        prop_assert!(partition_value(&assignment, &w).unwrap() >= brute_force_partition(&w).unwrap());

        let a = stability_witness(&trace, &w, &s).unwrap();
        let (again, retrace) = greedy_partition_path(&w.shifted(&a, s.entries()).unwrap(), &s).unwrap();
        prop_assert_eq!(again, assignment);
        prop_assert!(retrace.same_path(&trace));
        prop_assert_eq!(retrace.tie_count(), 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mirror_symmetry(w in weights(1..=16, 3)) {
        let (left, _) = hu_tucker(&w.reversed(), TiePolicy::Leftmost).unwrap();
        let (right, _) = hu_tucker(&w, TiePolicy::Rightmost).unwrap();
        prop_assert_eq!(left.tree().unwrap().mirror(), right.tree().unwrap().clone());
    }
}
