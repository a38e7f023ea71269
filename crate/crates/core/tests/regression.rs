//! Fixed values cross-checked against an independent implementation before
//! being frozen here.

use symbreak::alphabetic::{
    brute_force_optimal, dp_optimal_cost, enumerate_trees, hu_tucker, hu_tucker_phase1,
    reconstruct_from_depths, tree_cost, AlphabeticTree, SolveResult, TieBreak, TiePolicy,
};
use symbreak::harness::{check_instance, check_lipschitz, CheckOptions};
use symbreak::partition::{greedy_partition, partition_value};
use symbreak::{dyadic_shadow, Orientation, Rational, WeightVector};

fn w(v: &[i64]) -> WeightVector {
    WeightVector::from_integers(v).unwrap()
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

#[test]
fn one_two_three() {
    for policy in TiePolicy::ALL {
        let (result, trace) = hu_tucker(&w(&[1, 2, 3]), policy).unwrap();
        let tree = result.tree().unwrap();
        assert_eq!(tree, &AlphabeticTree::parse("((b1 b2) b3)").unwrap());
        assert_eq!(tree_cost(tree, &w(&[1, 2, 3])).unwrap(), q(9));
        assert_eq!(trace.tie_count(), 0);
    }
    assert_eq!(brute_force_optimal(&w(&[1, 2, 3])).unwrap(), (q(9), 1));
}

#[test]
fn five_equal_weights() {
    let ones = w(&[1; 5]);
    assert_eq!(dp_optimal_cost(&ones).unwrap(), q(12));
    assert_eq!(brute_force_optimal(&ones).unwrap(), (q(12), 4));
    let left = hu_tucker_phase1(&ones, TieBreak::Policy(TiePolicy::Leftmost)).unwrap();
    let right = hu_tucker_phase1(&ones, TieBreak::Policy(TiePolicy::Rightmost)).unwrap();
    assert_eq!(left.depths, vec![3, 3, 2, 2, 2]);
    assert_eq!(right.depths, vec![2, 2, 2, 3, 3]);
    for policy in TiePolicy::ALL {
        let (result, _) = hu_tucker(&ones, policy).unwrap();
        assert_eq!(tree_cost(result.tree().unwrap(), &ones).unwrap(), q(12));
    }
}

#[test]
fn oracle_values() {
    assert_eq!(dp_optimal_cost(&w(&[1, 2, 3, 4])).unwrap(), q(19));
    assert_eq!(brute_force_optimal(&w(&[0, 0, 0])).unwrap(), (q(0), 2));
    assert_eq!(dp_optimal_cost(&w(&[2, 2, 3])).unwrap(), q(11));
    let bumped = WeightVector::new(vec![Rational::new(3, 2), q(1), q(1), q(1), q(1)]).unwrap();
    assert_eq!(dp_optimal_cost(&bumped).unwrap(), q(13));
    let counts: Vec<usize> = (1..=8)
        .map(|n| enumerate_trees(n).unwrap().count())
        .collect();
    assert_eq!(counts, [1, 1, 2, 5, 14, 42, 132, 429]);
}

#[test]
fn depth_sequences() {
    assert_eq!(
        reconstruct_from_depths(&[3, 2, 2, 3, 2]),
        SolveResult::Failure
    );
    assert_eq!(
        reconstruct_from_depths(&[2, 2, 2, 3, 3])
            .tree()
            .unwrap()
            .to_string(),
        "((b1 b2) (b3 (b4 b5)))"
    );
}

#[test]
fn harness_examples() {
    let opts = CheckOptions::default();
    let v = check_instance(&w(&[1; 5]), TiePolicy::Leftmost, &opts).unwrap();
    assert!(v.passed());
    assert_eq!(v.cost, Some(q(12)));
    assert_eq!(v.optimal_count, Some(4));
    assert!(check_lipschitz(&w(&[1, 2, 3]), &[q(1), q(0), q(0)]).unwrap());
}

#[test]
fn partition_example() {
    let ws = w(&[3, 1, 1, 2, 2, 1]);
    let (assignment, _) =
        greedy_partition(&ws, &dyadic_shadow(6, Orientation::Positive).unwrap()).unwrap();
    assert_eq!(assignment.to_string(), "112221");
    assert_eq!(partition_value(&assignment, &ws).unwrap(), q(0));
}
