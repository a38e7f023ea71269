//! PARTITION: split the weights into two sides minimizing the absolute
//! difference of the side sums.
//!
//! The greedy heuristic here is instrumented like Hu-Tucker: it sorts by
//! nonincreasing weight with pairwise comparisons `w_j - w_k`, then puts each
//! item on the currently lighter side by testing the sign of the running
//! difference `sum(S1) - sum(S2)`. Every tie goes through the perturbed sign.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::numeric::{evaluate, sign, LinearFunctional, Rational, SignValue, WeightVector};
use crate::perturb::{perturbed_sign, ShadowVector};
use crate::trace::DecisionTrace;

/// Largest instance [`brute_force_partition`] accepts.
pub const MAX_BRUTE_FORCE_ITEMS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    S1,
    S2,
}

/// Side of each item, in index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionAssignment {
    pub sides: Vec<Side>,
}

impl fmt::Display for PartitionAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sides {
            f.write_str(match s {
                Side::S1 => "1",
                Side::S2 => "2",
            })?;
        }
        Ok(())
    }
}

impl FromStr for PartitionAssignment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let sides = s
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '1' => Ok(Side::S1),
                '2' => Ok(Side::S2),
                _ => Err(Error::parse(
                    1,
                    i + 1,
                    format!("expected `1` or `2`, found `{c}`"),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PartitionAssignment { sides })
    }
}

/// `|sum(S1) - sum(S2)|`.
pub fn partition_value(p: &PartitionAssignment, w: &WeightVector) -> Result<Rational> {
    if p.sides.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            found: p.sides.len(),
        });
    }
    let diff: Rational = p
        .sides
        .iter()
        .zip(w.iter())
        .map(|(side, x)| match side {
            Side::S1 => x.clone(),
            Side::S2 => -x,
        })
        .sum();
    Ok(diff.abs())
}

fn resolve(
    f: &LinearFunctional,
    value: &Rational,
    w: &WeightVector,
    s: &ShadowVector,
) -> Result<SignValue> {
    match sign(value) {
        SignValue::Zero => perturbed_sign(f, w, s),
        other => Ok(other),
    }
}

/// The greedy run on any rational vector, without the domain check.
pub fn greedy_partition_path(
    w: &WeightVector,
    s: &ShadowVector,
) -> Result<(PartitionAssignment, DecisionTrace)> {
    if s.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            found: s.len(),
        });
    }
    let n = w.len();
    let mut trace = DecisionTrace::new(n);

    // insertion sort, heaviest first
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for j in 1..=n {
        let mut pos = order.len();
        while pos > 0 {
            let k = order[pos - 1];
            let f = LinearFunctional::from_int_terms(&[(j, 1), (k, -1)])?;
            let value = evaluate(&f, w)?;
            let realized = resolve(&f, &value, w, s)?;
            trace.push(f, value, realized)?;
            if realized == SignValue::Positive {
                pos -= 1;
            } else {
                break;
            }
        }
        order.insert(pos, j);
    }

    let mut sides = vec![Side::S1; n];
    for (rank, &item) in order.iter().enumerate().skip(1) {
        let terms: Vec<(usize, i64)> = order[..rank]
            .iter()
            .map(|&i| (i, if sides[i - 1] == Side::S1 { 1 } else { -1 }))
            .collect();
        let f = LinearFunctional::from_int_terms(&terms)?;
        let value = evaluate(&f, w)?;
        let realized = resolve(&f, &value, w, s)?;
        trace.push(f, value, realized)?;
        sides[item - 1] = if realized == SignValue::Negative {
            Side::S1
        } else {
            Side::S2
        };
    }
    Ok((PartitionAssignment { sides }, trace))
}

/// Sorted greedy over nonnegative weights, ties broken along `s`.
pub fn greedy_partition(
    w: &WeightVector,
    s: &ShadowVector,
) -> Result<(PartitionAssignment, DecisionTrace)> {
    w.check_nonnegative()?;
    greedy_partition_path(w, s)
}

/// Exact optimum over all `2^n` assignments.
pub fn brute_force_partition(w: &WeightVector) -> Result<Rational> {
    let n = w.len();
    if n > MAX_BRUTE_FORCE_ITEMS {
        return Err(Error::Capacity {
            n,
            max: MAX_BRUTE_FORCE_ITEMS,
        });
    }
    w.check_nonnegative()?;
    let (scaled, denom) = w.scaled_integers();
    let total: BigInt = scaled.iter().sum();
    let mut best: Option<BigInt> = None;
    for mask in 0u32..(1u32 << n) {
        let s1: BigInt = scaled
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, x)| x)
            .sum();
        let diff = (&s1 + &s1 - &total).abs();
        if best.as_ref().is_none_or(|b| diff < *b) {
            best = Some(diff);
        }
    }
    Ok(Rational::from_parts(best.expect("nonempty"), denom).expect("positive denominator"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturb::{dyadic_shadow, Orientation};

    fn w(v: &[i64]) -> WeightVector {
        WeightVector::from_integers(v).unwrap()
    }

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn value_examples() {
        assert_eq!(
            partition_value(&"12".parse().unwrap(), &w(&[1, 1])).unwrap(),
            q(0)
        );
        assert_eq!(
            partition_value(&"112".parse().unwrap(), &w(&[1, 2, 4])).unwrap(),
            q(1)
        );
        assert_eq!(
            partition_value(&"1".parse().unwrap(), &w(&[5])).unwrap(),
            q(5)
        );
        assert!(partition_value(&"1".parse().unwrap(), &w(&[5, 1])).is_err());
        assert!("13".parse::<PartitionAssignment>().is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_partition(&w(&[1, 2, 4])).unwrap(), q(1));
        assert_eq!(brute_force_partition(&w(&[1, 1])).unwrap(), q(0));
        assert_eq!(
            brute_force_partition(&w(&[3, 1, 1, 2, 2, 1])).unwrap(),
            q(0)
        );
        assert!(matches!(
            brute_force_partition(&w(&[1; 17])),
            Err(Error::Capacity { n: 17, max: 16 })
        ));
    }

    #[test]
    fn greedy_examples() {
        for o in [Orientation::Positive, Orientation::Negative] {
            let s = dyadic_shadow(2, o).unwrap();
            let (p, _) = greedy_partition(&w(&[1, 1]), &s).unwrap();
            assert_eq!(partition_value(&p, &w(&[1, 1])).unwrap(), q(0));
            let s = dyadic_shadow(1, o).unwrap();
            let (p, t) = greedy_partition(&w(&[1]), &s).unwrap();
            assert_eq!(partition_value(&p, &w(&[1])).unwrap(), q(1));
            assert!(t.is_empty());
        }
        let ws = w(&[3, 1, 1, 2, 2, 1]);
        let s = dyadic_shadow(6, Orientation::Positive).unwrap();
        let (p, t) = greedy_partition(&ws, &s).unwrap();
        assert_eq!(partition_value(&p, &ws).unwrap(), q(0));
        assert!(t.records().iter().all(|r| r.functional.is_unit_shaped()));
        assert!(t.tie_count() > 0);
    }

    #[test]
    fn greedy_is_deterministic_and_rejects_negative() {
        let ws = w(&[2, 2, 1, 1]);
        let s = dyadic_shadow(4, Orientation::Positive).unwrap();
        assert_eq!(
            greedy_partition(&ws, &s).unwrap(),
            greedy_partition(&ws, &s).unwrap()
        );
        assert!(greedy_partition(
            &w(&[1, -1]),
            &dyadic_shadow(2, Orientation::Positive).unwrap()
        )
        .is_err());
    }
}
