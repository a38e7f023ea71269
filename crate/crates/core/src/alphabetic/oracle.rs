//! Independent optimality oracles: the cubic interval DP and exhaustive
//! enumeration of every alphabetic tree.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::alphabetic::tree::AlphabeticTree;
use crate::error::{Error, Result};
use crate::numeric::{Rational, WeightVector};

/// Largest `n` [`enumerate_trees`] accepts.
pub const MAX_ENUMERATION_LEAVES: usize = 12;

/// Interval DP: `C[i][i] = 0`,
/// `C[i][j] = min_k (C[i][k] + C[k+1][j]) + sum(w_i..w_j)`.
///
/// Runs over the weights scaled to a common denominator, in `i128` when the
/// total cost provably fits and in `BigInt` otherwise.
pub fn dp_optimal_cost(w: &WeightVector) -> Result<Rational> {
    w.check_nonnegative()?;
    let (scaled, denom) = w.scaled_integers();
    let total: BigInt = scaled.iter().sum();
    let bound = total * BigInt::from(w.len());
    let cost = if bound.bits() < 120 {
        let small: Vec<i128> = scaled
            .iter()
            .map(|k| k.to_i128().expect("bounded"))
            .collect();
        BigInt::from(interval_dp(&small))
    } else {
        interval_dp(&scaled)
    };
    Ok(Rational::from_parts(cost, denom).expect("positive denominator"))
}

fn interval_dp<T>(weights: &[T]) -> T
where
    T: Clone + Ord + Zero,
    for<'a> &'a T: std::ops::Add<&'a T, Output = T> + std::ops::Sub<&'a T, Output = T>,
{
    let n = weights.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(T::zero());
    for x in weights {
        let next = prefix.last().unwrap() + x;
        prefix.push(next);
    }
    // cost[i][j] for 0 <= i <= j < n, row-major
    let mut cost = vec![T::zero(); n * n];
    for len in 2..=n {
        for i in 0..=n - len {
            let j = i + len - 1;
            let mut best: Option<T> = None;
            for k in i..j {
                let c = &cost[i * n + k] + &cost[(k + 1) * n + j];
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
            let span = &prefix[j + 1] - &prefix[i];
            cost[i * n + j] = &best.expect("nonempty split range") + &span;
        }
    }
    cost[n - 1].clone()
}

fn trees_over(lo: usize, hi: usize) -> Vec<AlphabeticTree> {
    if lo == hi {
        return vec![AlphabeticTree::Leaf(lo)];
    }
    let mut out = Vec::new();
    for split in lo..hi {
        let lefts = trees_over(lo, split);
        let rights = trees_over(split + 1, hi);
        for l in &lefts {
            for r in &rights {
                out.push(AlphabeticTree::join(l.clone(), r.clone()));
            }
        }
    }
    out
}

/// Every alphabetic tree on `n` leaves, each exactly once (Catalan(n-1) of
/// them).
pub fn enumerate_trees(n: usize) -> Result<std::vec::IntoIter<AlphabeticTree>> {
    if n == 0 {
        return Err(Error::InvalidSize("need at least one leaf".into()));
    }
    if n > MAX_ENUMERATION_LEAVES {
        return Err(Error::Capacity {
            n,
            max: MAX_ENUMERATION_LEAVES,
        });
    }
    Ok(trees_over(1, n).into_iter())
}

/// Minimum cost over all alphabetic trees and how many trees attain it.
pub fn brute_force_optimal(w: &WeightVector) -> Result<(Rational, usize)> {
    let trees = enumerate_trees(w.len())?;
    w.check_nonnegative()?;
    let (scaled, denom) = w.scaled_integers();
    let total: BigInt = scaled.iter().sum();
    let (cost, count) = if (total * BigInt::from(w.len())).bits() < 120 {
        let small: Vec<i128> = scaled
            .iter()
            .map(|k| k.to_i128().expect("bounded"))
            .collect();
        let (c, k) = min_with_count(trees.map(|t| depth_weighted(&t, &small)));
        (BigInt::from(c), k)
    } else {
        min_with_count(trees.map(|t| depth_weighted(&t, &scaled)))
    };
    Ok((
        Rational::from_parts(cost, denom).expect("positive denominator"),
        count,
    ))
}

fn depth_weighted<T>(tree: &AlphabeticTree, weights: &[T]) -> T
where
    T: Zero + Clone + for<'a> std::ops::AddAssign<&'a T> + std::ops::Mul<i128, Output = T>,
{
    let mut total = T::zero();
    for (x, d) in weights.iter().zip(tree.depths()) {
        total += &(x.clone() * d as i128);
    }
    total
}

fn min_with_count<T: Ord>(costs: impl Iterator<Item = T>) -> (T, usize) {
    let mut best: Option<(T, usize)> = None;
    for c in costs {
        best = match best {
            Some((b, count)) if b == c => Some((b, count + 1)),
            Some((b, count)) if b < c => Some((b, count)),
            _ => Some((c, 1)),
        };
    }
    best.expect("at least one tree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: &[i64]) -> WeightVector {
        WeightVector::from_integers(v).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn dp_examples() {
        assert_eq!(dp_optimal_cost(&w(&[7])).unwrap(), q(0));
        assert_eq!(dp_optimal_cost(&w(&[1, 2, 3])).unwrap(), q(9));
        assert_eq!(dp_optimal_cost(&w(&[1, 1, 1, 1, 1])).unwrap(), q(12));
        assert!(matches!(
            dp_optimal_cost(&w(&[1, -2])),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn dp_fractional_and_huge() {
        let ws = WeightVector::new(vec!["1/2".parse().unwrap(), "1/3".parse().unwrap()]).unwrap();
        assert_eq!(dp_optimal_cost(&ws).unwrap(), Rational::new(5, 6));
        let big: Rational = "340282366920938463463374607431768211456".parse().unwrap();
        let ws = WeightVector::new(vec![big.clone(), big.clone(), big.clone()]).unwrap();
        assert_eq!(dp_optimal_cost(&ws).unwrap(), big.mul_int(5));
    }

    #[test]
    fn enumeration_counts() {
        let catalan = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786];
        for (k, &c) in catalan.iter().enumerate() {
            let trees: Vec<_> = enumerate_trees(k + 1).unwrap().collect();
            assert_eq!(trees.len(), c);
            if k < 8 {
                let distinct: std::collections::HashSet<_> = trees.iter().collect();
                assert_eq!(distinct.len(), c);
            }
            assert!(trees.iter().all(AlphabeticTree::is_alphabetic));
        }
        assert!(matches!(
            enumerate_trees(13),
            Err(Error::Capacity { n: 13, max: 12 })
        ));
        assert!(enumerate_trees(0).is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_optimal(&w(&[1, 2, 3])).unwrap(), (q(9), 1));
        assert_eq!(brute_force_optimal(&w(&[1, 1, 1, 1])).unwrap(), (q(8), 1));
        assert_eq!(brute_force_optimal(&w(&[1, 1])).unwrap(), (q(2), 1));
        assert_eq!(brute_force_optimal(&w(&[1, 1, 1, 1, 1])).unwrap().0, q(12));
        assert_eq!(brute_force_optimal(&w(&[0, 0, 0])).unwrap(), (q(0), 2));
    }
}
