//! Decision traces: the root-to-leaf path an instrumented algorithm takes
//! through its comparison tree, plus the two checks run against them.
//!
//! [`verify_policy`] re-evaluates every comparison and confirms each tie was
//! resolved the way the shadow direction dictates. [`stability_witness`]
//! computes a step `a* > 0` for which the whole path is unchanged at
//! `w + a*s` for every `0 < a <= a*`.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{sign, BlockSums, LinearFunctional, Rational, SignValue, WeightVector};
use crate::perturb::ShadowVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "L")]
    Left,
    #[serde(rename = "R")]
    Right,
}

impl Branch {
    /// Left when the functional is negative, right when positive.
    pub fn from_sign(s: SignValue) -> Option<Branch> {
        match s {
            SignValue::Negative => Some(Branch::Left),
            SignValue::Positive => Some(Branch::Right),
            SignValue::Zero => None,
        }
    }

    pub fn sign(self) -> SignValue {
        match self {
            Branch::Left => SignValue::Negative,
            Branch::Right => SignValue::Positive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Left => "L",
            Branch::Right => "R",
        }
    }
}

/// One internal node on the traversed path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRecord {
    pub step: usize,
    pub functional: LinearFunctional,
    pub primary_value: Rational,
    pub realized_sign: SignValue,
    pub tie: bool,
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecisionTrace {
    n: usize,
    records: Vec<ComparisonRecord>,
}

impl DecisionTrace {
    pub fn new(n: usize) -> Self {
        DecisionTrace {
            n,
            records: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn records(&self) -> &[ComparisonRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn tie_count(&self) -> usize {
        self.records.iter().filter(|r| r.tie).count()
    }

    /// Appends a resolved comparison; `realized` must not be `Zero`.
    pub fn push(
        &mut self,
        functional: LinearFunctional,
        primary_value: Rational,
        realized: SignValue,
    ) -> Result<Branch> {
        let step = self.records.len() + 1;
        let branch = Branch::from_sign(realized).ok_or(Error::UnresolvedTie { step })?;
        let tie = primary_value.is_zero();
        debug_assert!(tie || sign(&primary_value) == realized);
        self.records.push(ComparisonRecord {
            step,
            functional,
            primary_value,
            realized_sign: realized,
            tie,
            branch,
        });
        Ok(branch)
    }

    /// Same functionals and branches in the same order; the recorded values
    /// may differ.
    pub fn same_path(&self, other: &DecisionTrace) -> bool {
        self.records.len() == other.records.len()
            && self
                .records
                .iter()
                .zip(&other.records)
                .all(|(a, b)| a.branch == b.branch && a.functional == b.functional)
    }

    /// Line-delimited text form, one flat object per record.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str("{\"step\":");
            write!(out, "{}", r.step).unwrap();
            out.push_str(",\"coeffs\":{");
            for (k, (i, c)) in r.functional.terms().into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write!(out, "\"{i}\":\"{c}\"").unwrap();
            }
            writeln!(
                out,
                "}},\"value\":\"{}\",\"tie\":{},\"branch\":\"{}\"}}",
                r.primary_value,
                r.tie,
                r.branch.as_str()
            )
            .unwrap();
        }
        out
    }

    /// Parses [`to_jsonl`](Self::to_jsonl) output. Blank lines are skipped.
    pub fn from_jsonl(text: &str, n: usize) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Line {
            step: usize,
            coeffs: BTreeMap<String, Rational>,
            value: Rational,
            tie: bool,
            branch: Branch,
        }

        let mut trace = DecisionTrace::new(n);
        for (line_no, raw) in text.lines().enumerate() {
            let line_no = line_no + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(raw)
                .map_err(|e| Error::parse(line_no, e.column(), e.to_string()))?;
            let mut terms = Vec::with_capacity(parsed.coeffs.len());
            for (key, c) in parsed.coeffs {
                let index: usize = key.parse().ok().filter(|&i| i >= 1).ok_or_else(|| {
                    Error::parse(line_no, 1, format!("bad coefficient index `{key}`"))
                })?;
                terms.push((index, c));
            }
            let functional = LinearFunctional::from_terms(terms)?;
            let expected_step = trace.records.len() + 1;
            if parsed.step != expected_step {
                return Err(Error::parse(
                    line_no,
                    1,
                    format!(
                        "step {} out of sequence, expected {expected_step}",
                        parsed.step
                    ),
                ));
            }
            if parsed.tie != parsed.value.is_zero() {
                return Err(Error::parse(line_no, 1, "tie flag disagrees with value"));
            }
            trace.records.push(ComparisonRecord {
                step: parsed.step,
                functional,
                primary_value: parsed.value,
                realized_sign: parsed.branch.sign(),
                tie: parsed.tie,
                branch: parsed.branch,
            });
        }
        Ok(trace)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordCheck {
    pub step: usize,
    pub recomputed: Rational,
    pub tie: bool,
    pub realized: SignValue,
    /// What the shadow direction dictates (for ties) or the plain sign.
    pub expected: SignValue,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub checks: Vec<RecordCheck>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.checks.iter().find(|c| !c.consistent).map(|c| c.step)
    }
}

/// Rechecks every record against `w` and every tie against `s`.
pub fn verify_policy(
    t: &DecisionTrace,
    w: &WeightVector,
    s: &ShadowVector,
) -> Result<VerificationReport> {
    verify_cached(
        t,
        &mut BlockSums::new(w.scaled()),
        &mut BlockSums::new(s.scaled()),
    )
}

fn verify_cached(
    t: &DecisionTrace,
    ws: &mut BlockSums<'_>,
    ss: &mut BlockSums<'_>,
) -> Result<VerificationReport> {
    let n = ws.vector().numerators.len();
    if ss.vector().numerators.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: ss.vector().numerators.len(),
        });
    }
    let mut checks = Vec::with_capacity(t.records.len());
    for r in &t.records {
        let recomputed = ws.evaluate(&r.functional)?;
        if recomputed != r.primary_value {
            return Err(Error::CorruptTrace {
                step: r.step,
                recorded: r.primary_value.to_string(),
                recomputed: recomputed.to_string(),
            });
        }
        let expected = match sign(&recomputed) {
            SignValue::Zero => ss.sign(&r.functional)?,
            other => other,
        };
        checks.push(RecordCheck {
            step: r.step,
            recomputed,
            tie: r.tie,
            realized: r.realized_sign,
            expected,
            consistent: expected == r.realized_sign,
        });
    }
    let verdict = if checks.iter().all(|c| c.consistent) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(VerificationReport { checks, verdict })
}

/// Largest step this construction certifies: every comparison on the path
/// keeps its realized sign at `w + a*s` for all `0 < a <= a*`.
pub fn stability_witness(
    t: &DecisionTrace,
    w: &WeightVector,
    s: &ShadowVector,
) -> Result<Rational> {
    let (mut wsum, mut ssum) = (BlockSums::new(w.scaled()), BlockSums::new(s.scaled()));
    let report = verify_cached(t, &mut wsum, &mut ssum)?;
    if let Some(step) = report.first_failure() {
        return Err(Error::PolicyMismatch { step });
    }
    let (wd, sd) = (&w.scaled().denom, &s.scaled().denom);
    // Each bound |v(w)| / (|v(s)| + 1) is kept as an unreduced integer
    // fraction and compared by cross-multiplication.
    let mut best: Option<(BigInt, BigInt)> = None;
    for r in t.records.iter().filter(|r| !r.tie) {
        let bound = match (
            wsum.numerator(&r.functional)?,
            ssum.numerator(&r.functional)?,
        ) {
            (Some(p), Some(v)) => (p.abs() * sd, wd * (v.abs() + sd)),
            _ => {
                let along = r.functional.evaluate_scaled(s.scaled())?;
                let q = r
                    .primary_value
                    .abs()
                    .checked_div(&(along.abs() + Rational::one()))
                    .expect("positive divisor");
                (q.numer().clone(), q.denom().clone())
            }
        };
        let smaller = match &best {
            None => true,
            Some((num, den)) => &bound.0 * den < num * &bound.1,
        };
        if smaller {
            best = Some(bound);
        }
    }
    let witness = match best {
        Some((num, den)) => Rational::from_parts(num, den).expect("positive denominator"),
        None => Rational::one(),
    };

    let shifted = w.shifted(&witness, s.entries())?;
    let mut moved = BlockSums::new(shifted.scaled());
    for r in &t.records {
        if moved.sign(&r.functional)? != r.realized_sign {
            return Err(Error::PolicyMismatch { step: r.step });
        }
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturb::{dyadic_shadow, Orientation};

    fn tie_trace() -> (DecisionTrace, WeightVector) {
        let w = WeightVector::from_integers(&[5, 2, 5]).unwrap();
        let mut t = DecisionTrace::new(3);
        let f = LinearFunctional::from_int_terms(&[(1, -1), (3, 1)]).unwrap();
        t.push(f, Rational::zero(), SignValue::Positive).unwrap();
        let g = LinearFunctional::from_int_terms(&[(2, 1), (3, -1)]).unwrap();
        t.push(g, Rational::from_integer(-3), SignValue::Negative)
            .unwrap();
        (t, w)
    }

    #[test]
    fn push_enforces_resolution() {
        let mut t = DecisionTrace::new(2);
        let f = LinearFunctional::from_int_terms(&[(1, 1)]).unwrap();
        assert_eq!(
            t.push(f, Rational::zero(), SignValue::Zero),
            Err(Error::UnresolvedTie { step: 1 })
        );
    }

    #[test]
    fn verify_detects_orientation() {
        let (t, w) = tie_trace();
        let neg = dyadic_shadow(3, Orientation::Negative).unwrap();
        let pos = dyadic_shadow(3, Orientation::Positive).unwrap();
        assert!(verify_policy(&t, &w, &neg).unwrap().passed());
        let report = verify_policy(&t, &w, &pos).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert_eq!(report.first_failure(), Some(1));
    }

    #[test]
    fn verify_is_pure() {
        let (t, w) = tie_trace();
        let neg = dyadic_shadow(3, Orientation::Negative).unwrap();
        let before = t.clone();
        let a = verify_policy(&t, &w, &neg).unwrap();
        let b = verify_policy(&t, &w, &neg).unwrap();
        assert_eq!(a, b);
        assert_eq!(t, before);
    }

    #[test]
    fn corrupt_trace_is_distinct() {
        let w = WeightVector::from_integers(&[1, 2]).unwrap();
        let mut t = DecisionTrace::new(2);
        let f = LinearFunctional::from_int_terms(&[(1, 1)]).unwrap();
        t.push(f, Rational::from_integer(7), SignValue::Positive)
            .unwrap();
        let s = dyadic_shadow(2, Orientation::Positive).unwrap();
        assert!(matches!(
            verify_policy(&t, &w, &s),
            Err(Error::CorruptTrace { step: 1, .. })
        ));
    }

    #[test]
    fn empty_trace_vacuous() {
        let w = WeightVector::from_integers(&[4]).unwrap();
        let s = dyadic_shadow(1, Orientation::Positive).unwrap();
        let t = DecisionTrace::new(1);
        assert!(verify_policy(&t, &w, &s).unwrap().passed());
        assert_eq!(stability_witness(&t, &w, &s).unwrap(), Rational::one());
    }

    #[test]
    fn witness_values() {
        let (t, w) = tie_trace();
        let neg = dyadic_shadow(3, Orientation::Negative).unwrap();
        // only record 2 is a non-tie: |-3| / (|-4 + 2| + 1) = 1
        assert_eq!(stability_witness(&t, &w, &neg).unwrap(), Rational::one());
        let pos = dyadic_shadow(3, Orientation::Positive).unwrap();
        assert_eq!(
            stability_witness(&t, &w, &pos),
            Err(Error::PolicyMismatch { step: 1 })
        );
    }

    #[test]
    fn jsonl_roundtrip_and_errors() {
        let (t, _) = tie_trace();
        let text = t.to_jsonl();
        assert_eq!(
            text.lines().next().unwrap(),
            r#"{"step":1,"coeffs":{"1":"-1","3":"1"},"value":"0","tie":true,"branch":"R"}"#
        );
        assert_eq!(DecisionTrace::from_jsonl(&text, 3).unwrap(), t);

        let bad = r#"{"step":1,"coeffs":{"1":"1"},"value":"0","tie":false,"branch":"L"}"#;
        assert!(DecisionTrace::from_jsonl(bad, 1).is_err());
        let bad = r#"{"step":2,"coeffs":{"1":"1"},"value":"1","tie":false,"branch":"R"}"#;
        assert!(DecisionTrace::from_jsonl(bad, 1).is_err());
        match DecisionTrace::from_jsonl("{\"step\":1,", 1) {
            Err(Error::Parse { line: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
