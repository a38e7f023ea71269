//! Exact-arithmetic toolkit for robust tie-breaking in weighted combinatorial
//! algorithms.
//!
//! Algorithms are viewed as walks down a binary decision tree whose internal
//! nodes branch on the sign of a linear functional of the weights. Ties
//! (`v(w) = 0`) are broken by symbolic perturbation along a shadow direction,
//! and the crate ships the machinery to check that on real runs: decision
//! traces, policy verification, stability witnesses, an instrumented
//! Hu-Tucker solver with DP and brute-force oracles, a PARTITION greedy demo,
//! and a seeded campaign harness over degenerate instance families.

#![forbid(unsafe_code)]

pub mod alphabetic;
pub mod error;
pub mod harness;
pub mod numeric;
pub mod partition;
pub mod perturb;
pub mod trace;

pub use error::{Error, Result};
pub use numeric::{
    evaluate, parse_weights, sign, LinearFunctional, Rational, SignValue, WeightVector,
};
pub use perturb::{
    dyadic_shadow, lex_compare, perturbed_sign, Orientation, PerturbedValue, ShadowVector,
};
pub use trace::{
    stability_witness, verify_policy, Branch, ComparisonRecord, DecisionTrace, Verdict,
    VerificationReport,
};
