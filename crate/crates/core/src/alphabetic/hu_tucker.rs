//! Hu-Tucker, instrumented.
//!
//! Phase 1 keeps a working sequence of nodes ordered by their leftmost
//! descendant leaf. Two nodes are combinable when only internal nodes lie
//! between them. Each step scans the combinable pairs left to right, folding
//! them into an incumbent minimum: the incumbent always precedes the candidate
//! in (left position, right position) order, so it is the subtrahend and every
//! comparison asks for the sign of
//!
//! ```text
//! v(w) = weight(candidate pair) - weight(incumbent pair)
//! ```
//!
//! whose lowest-index nonzero coefficient is -1. A negative sign means the
//! candidate is lighter and takes over. Phase 2 rebuilds an alphabetic tree
//! from the phase-1 leaf depths alone.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::alphabetic::tree::{reconstruct_from_depths, SolveResult};
use crate::error::{Error, Result};
use crate::numeric::{sign, LinearFunctional, Rational, SignValue, WeightVector};
use crate::perturb::{perturbed_sign, perturbed_weights, PerturbedValue, ShadowVector};
use crate::trace::DecisionTrace;

/// Which of several equally light combinable pairs is combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Alphabetic ordering: the pair with the leftmost nodes.
    Leftmost,
    /// The pair latest in (left position, right position) order.
    Rightmost,
}

impl TiePolicy {
    pub const ALL: [TiePolicy; 2] = [TiePolicy::Leftmost, TiePolicy::Rightmost];

    pub fn as_str(self) -> &'static str {
        match self {
            TiePolicy::Leftmost => "leftmost",
            TiePolicy::Rightmost => "rightmost",
        }
    }

    /// Realized sign of a tied comparison: keeping the incumbent is a
    /// positive outcome, switching to the candidate a negative one.
    fn tie_sign(self) -> SignValue {
        match self {
            TiePolicy::Leftmost => SignValue::Positive,
            TiePolicy::Rightmost => SignValue::Negative,
        }
    }
}

impl std::str::FromStr for TiePolicy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "leftmost" => Ok(TiePolicy::Leftmost),
            "rightmost" => Ok(TiePolicy::Rightmost),
            other => Err(format!("unknown tie policy `{other}`")),
        }
    }
}

/// How a phase-1 comparison with `v(w) = 0` is resolved.
#[derive(Debug, Clone, Copy)]
pub enum TieBreak<'a> {
    Policy(TiePolicy),
    Shadow(&'a ShadowVector),
}

struct SeqNode<T> {
    id: usize,
    weight: T,
    leaves: Arc<[usize]>,
    is_leaf: bool,
}

/// Result of a phase-1 run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase1Run {
    /// Depth of each leaf `b_1 .. b_n` in the phase-1 tree.
    pub depths: Vec<usize>,
    pub trace: DecisionTrace,
    /// Combined pairs in order, each as (left leaf set, right leaf set).
    pub merges: Vec<(Vec<usize>, Vec<usize>)>,
}

/// Phase 1 over explicit shadow arithmetic, no tie policy involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicRun {
    pub depths: Vec<usize>,
    pub comparisons: usize,
    /// Comparisons whose perturbed values were exactly equal.
    pub ties: usize,
    pub merges: Vec<(Vec<usize>, Vec<usize>)>,
}

trait PairJudge<T> {
    fn candidate_wins(
        &mut self,
        incumbent: [&SeqNode<T>; 2],
        incumbent_weight: &T,
        candidate: [&SeqNode<T>; 2],
        candidate_weight: &T,
    ) -> Result<bool>;
}

/// Works on the weights scaled to a common denominator; the recorded values
/// are divided back out.
struct TracedJudge<'a> {
    w: &'a WeightVector,
    denom: &'a BigInt,
    tie_break: TieBreak<'a>,
    trace: DecisionTrace,
}

fn pair_functional<T>(
    incumbent: [&SeqNode<T>; 2],
    candidate: [&SeqNode<T>; 2],
) -> LinearFunctional {
    let shared = |node: &SeqNode<T>, other: [&SeqNode<T>; 2]| other.iter().any(|o| o.id == node.id);
    let mut sets = Vec::with_capacity(4);
    for node in candidate {
        if !shared(node, incumbent) {
            sets.push((Rational::one(), node.leaves.clone()));
        }
    }
    for node in incumbent {
        if !shared(node, candidate) {
            sets.push((-Rational::one(), node.leaves.clone()));
        }
    }
    LinearFunctional::from_disjoint_sets(sets)
}

impl PairJudge<BigInt> for TracedJudge<'_> {
    fn candidate_wins(
        &mut self,
        incumbent: [&SeqNode<BigInt>; 2],
        incumbent_weight: &BigInt,
        candidate: [&SeqNode<BigInt>; 2],
        candidate_weight: &BigInt,
    ) -> Result<bool> {
        let functional = pair_functional(incumbent, candidate);
        let value = Rational::from_parts(candidate_weight - incumbent_weight, self.denom.clone())
            .expect("positive denominator");
        let realized = match sign(&value) {
            SignValue::Zero => match self.tie_break {
                TieBreak::Policy(p) => p.tie_sign(),
                TieBreak::Shadow(s) => perturbed_sign(&functional, self.w, s)?,
            },
            s => s,
        };
        let branch = self.trace.push(functional, value, realized)?;
        Ok(branch.sign() == SignValue::Negative)
    }
}

#[derive(Default)]
struct SymbolicJudge {
    comparisons: usize,
    ties: usize,
}

impl PairJudge<PerturbedValue> for SymbolicJudge {
    fn candidate_wins(
        &mut self,
        _: [&SeqNode<PerturbedValue>; 2],
        incumbent_weight: &PerturbedValue,
        _: [&SeqNode<PerturbedValue>; 2],
        candidate_weight: &PerturbedValue,
    ) -> Result<bool> {
        self.comparisons += 1;
        match candidate_weight.cmp(incumbent_weight) {
            Ordering::Less => Ok(true),
            Ordering::Equal => {
                self.ties += 1;
                Ok(false)
            }
            Ordering::Greater => Ok(false),
        }
    }
}

struct Phase1Outcome {
    depths: Vec<usize>,
    merges: Vec<(Vec<usize>, Vec<usize>)>,
}

fn run_phase1<T, J>(weights: Vec<T>, judge: &mut J) -> Result<Phase1Outcome>
where
    T: Clone,
    for<'x> &'x T: std::ops::Add<&'x T, Output = T>,
    J: PairJudge<T>,
{
    let n = weights.len();
    let mut seq: Vec<SeqNode<T>> = weights
        .into_iter()
        .enumerate()
        .map(|(i, weight)| SeqNode {
            id: i,
            weight,
            leaves: Arc::from(vec![i + 1]),
            is_leaf: true,
        })
        .collect();
    let mut next_id = n;
    let mut depths = vec![0usize; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));

    while seq.len() > 1 {
        let mut best: Option<(usize, usize, T)> = None;
        for p in 0..seq.len() {
            for q in p + 1..seq.len() {
                let weight = &seq[p].weight + &seq[q].weight;
                let take = match &best {
                    None => true,
                    Some((bp, bq, bw)) => judge.candidate_wins(
                        [&seq[*bp], &seq[*bq]],
                        bw,
                        [&seq[p], &seq[q]],
                        &weight,
                    )?,
                };
                if take {
                    best = Some((p, q, weight));
                }
                if seq[q].is_leaf {
                    break;
                }
            }
        }
        let (p, q, weight) = best.expect("at least one combinable pair");
        let right = seq.remove(q);
        let left = &seq[p];
        for &leaf in left.leaves.iter().chain(right.leaves.iter()) {
            depths[leaf - 1] += 1;
        }
        merges.push((left.leaves.to_vec(), right.leaves.to_vec()));
        let mut leaves: Vec<usize> = left
            .leaves
            .iter()
            .chain(right.leaves.iter())
            .copied()
            .collect();
        leaves.sort_unstable();
        seq[p] = SeqNode {
            id: next_id,
            weight,
            leaves: Arc::from(leaves),
            is_leaf: false,
        };
        next_id += 1;
        debug_assert!(
            seq.windows(2)
                .all(|pair| pair[0].leaves[0] < pair[1].leaves[0]),
            "sequence lost leftmost-leaf order"
        );
    }
    Ok(Phase1Outcome { depths, merges })
}

/// Phase 1 on any rational vector, without the nonnegativity check. The
/// decision path is defined everywhere; this is how it is probed at points
/// just outside the problem domain.
pub fn phase1_path(w: &WeightVector, tie_break: TieBreak<'_>) -> Result<Phase1Run> {
    if let TieBreak::Shadow(s) = tie_break {
        if s.len() != w.len() {
            return Err(Error::LengthMismatch {
                expected: w.len(),
                found: s.len(),
            });
        }
    }
    let scaled = w.scaled();
    let mut judge = TracedJudge {
        w,
        denom: &scaled.denom,
        tie_break,
        trace: DecisionTrace::new(w.len()),
    };
    let outcome = run_phase1(scaled.numerators.clone(), &mut judge)?;
    Ok(Phase1Run {
        depths: outcome.depths,
        trace: judge.trace,
        merges: outcome.merges,
    })
}

/// Instrumented phase 1 over nonnegative weights.
pub fn hu_tucker_phase1(w: &WeightVector, tie_break: TieBreak<'_>) -> Result<Phase1Run> {
    w.check_nonnegative()?;
    phase1_path(w, tie_break)
}

/// Phase 1 over the paired weights `(w_i, s_i)` compared lexicographically.
pub fn symbolic_phase1(w: &WeightVector, s: &ShadowVector) -> Result<SymbolicRun> {
    let weights = perturbed_weights(w, s)?;
    let mut judge = SymbolicJudge::default();
    let outcome = run_phase1(weights, &mut judge)?;
    Ok(SymbolicRun {
        depths: outcome.depths,
        comparisons: judge.comparisons,
        ties: judge.ties,
        merges: outcome.merges,
    })
}

/// Both phases. The trace covers phase 1 only; phase 2 depends on the
/// phase-1 tree and not on the weights.
pub fn hu_tucker(w: &WeightVector, policy: TiePolicy) -> Result<(SolveResult, DecisionTrace)> {
    let run = hu_tucker_phase1(w, TieBreak::Policy(policy))?;
    Ok((reconstruct_from_depths(&run.depths), run.trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabetic::tree::tree_cost;
    use crate::perturb::{dyadic_shadow, Orientation};

    fn w(v: &[i64]) -> WeightVector {
        WeightVector::from_integers(v).unwrap()
    }

    #[test]
    fn phase1_no_ties() {
        for policy in TiePolicy::ALL {
            let run = hu_tucker_phase1(&w(&[1, 2, 3]), TieBreak::Policy(policy)).unwrap();
            assert_eq!(run.depths, vec![2, 2, 1]);
            assert_eq!(run.merges, vec![(vec![1], vec![2]), (vec![1, 2], vec![3])]);
            assert_eq!(run.trace.len(), 1);
            assert_eq!(run.trace.tie_count(), 0);
        }
    }

    #[test]
    fn phase1_all_equal() {
        let run = hu_tucker_phase1(&w(&[1; 5]), TieBreak::Policy(TiePolicy::Leftmost)).unwrap();
        assert_eq!(run.depths, vec![3, 3, 2, 2, 2]);
        assert_eq!(
            run.merges,
            vec![
                (vec![1], vec![2]),
                (vec![3], vec![4]),
                (vec![1, 2], vec![5]),
                (vec![1, 2, 5], vec![3, 4]),
            ]
        );
        let run = hu_tucker_phase1(&w(&[1; 5]), TieBreak::Policy(TiePolicy::Rightmost)).unwrap();
        assert_eq!(run.depths, vec![2, 2, 2, 3, 3]);
    }

    #[test]
    fn functionals_lead_with_minus_one() {
        let run = hu_tucker_phase1(
            &w(&[2, 1, 1, 3, 1, 1, 2]),
            TieBreak::Policy(TiePolicy::Leftmost),
        )
        .unwrap();
        for r in run.trace.records() {
            assert!(r.functional.is_unit_shaped());
            assert_eq!(r.functional.leading_term().unwrap().1, -Rational::one());
        }
    }

    #[test]
    fn shadow_tie_break_matches_policy() {
        let weights = w(&[1, 1, 1, 1, 1]);
        let neg = dyadic_shadow(5, Orientation::Negative).unwrap();
        let pos = dyadic_shadow(5, Orientation::Positive).unwrap();
        let left = hu_tucker_phase1(&weights, TieBreak::Policy(TiePolicy::Leftmost)).unwrap();
        let right = hu_tucker_phase1(&weights, TieBreak::Policy(TiePolicy::Rightmost)).unwrap();
        assert_eq!(
            hu_tucker_phase1(&weights, TieBreak::Shadow(&neg)).unwrap(),
            left
        );
        assert_eq!(
            hu_tucker_phase1(&weights, TieBreak::Shadow(&pos)).unwrap(),
            right
        );
        let sym = symbolic_phase1(&weights, &neg).unwrap();
        assert_eq!(sym.depths, left.depths);
        assert_eq!(sym.ties, 0);
        assert_eq!(sym.comparisons, left.trace.len());
    }

    #[test]
    fn full_solver() {
        let (res, trace) = hu_tucker(&w(&[1, 2, 3]), TiePolicy::Leftmost).unwrap();
        let tree = res.tree().unwrap();
        assert_eq!(tree.to_string(), "((b1 b2) b3)");
        assert_eq!(
            tree_cost(tree, &w(&[1, 2, 3])).unwrap(),
            Rational::from_integer(9)
        );
        assert_eq!(trace.len(), 1);

        let (res, trace) = hu_tucker(&w(&[5]), TiePolicy::Leftmost).unwrap();
        assert_eq!(res.tree().unwrap().to_string(), "b1");
        assert!(trace.is_empty());

        let (res, _) = hu_tucker(&w(&[1; 5]), TiePolicy::Leftmost).unwrap();
        assert_eq!(
            tree_cost(res.tree().unwrap(), &w(&[1; 5])).unwrap(),
            Rational::from_integer(12)
        );
    }

    #[test]
    fn rejects_negative_weight() {
        assert!(matches!(
            hu_tucker(&w(&[1, -1]), TiePolicy::Leftmost),
            Err(Error::NegativeWeight { index: 2, .. })
        ));
        assert!(phase1_path(&w(&[1, -1]), TieBreak::Policy(TiePolicy::Leftmost)).is_ok());
    }
}
