//! Shadow directions and the perturbed sign comparator.
//!
//! A tie `v(w) = 0` is resolved as if the weights had been displaced by an
//! infinitesimal step `a * s` along a shadow vector `s`: the realized sign is
//! the sign `v(w + a*s)` takes for all small enough `a > 0`. For a linear `v`
//! that limit is `sign(v(w))` when nonzero and `sign(v(s))` otherwise.
//! [`PerturbedValue`] is the same idea carried through the arithmetic: each
//! quantity is a pair `(value, shadow)` ordered lexicographically.

use std::cmp::Ordering;
use std::ops::{Add, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    evaluate, sign, LinearFunctional, Rational, ScaledVector, SignValue, WeightVector,
};

/// Which way a dyadic shadow points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Positive => "positive",
            Orientation::Negative => "negative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShadowKind {
    PositiveDyadic,
    NegativeDyadic,
    Custom,
}

/// Linear direction `s`, the displacement being `h(a) = a * s`.
#[derive(Debug, Clone)]
pub struct ShadowVector {
    entries: Vec<Rational>,
    kind: ShadowKind,
    scaled: OnceLock<ScaledVector>,
}

impl PartialEq for ShadowVector {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.entries == other.entries
    }
}

impl Eq for ShadowVector {}

impl ShadowVector {
    pub fn custom(entries: Vec<Rational>) -> Self {
        ShadowVector {
            entries,
            kind: ShadowKind::Custom,
            scaled: OnceLock::new(),
        }
    }

    /// Common-denominator form, computed once and cached.
    pub fn scaled(&self) -> &ScaledVector {
        self.scaled.get_or_init(|| ScaledVector::new(&self.entries))
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn kind(&self) -> ShadowKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn orientation(&self) -> Option<Orientation> {
        match self.kind {
            ShadowKind::PositiveDyadic => Some(Orientation::Positive),
            ShadowKind::NegativeDyadic => Some(Orientation::Negative),
            ShadowKind::Custom => None,
        }
    }
}

/// `(2^n, 2^(n-1), ..., 2^1)`, or its negation.
pub fn dyadic_shadow(n: usize, orientation: Orientation) -> Result<ShadowVector> {
    if n == 0 {
        return Err(Error::InvalidSize("dyadic shadow needs n >= 1".into()));
    }
    let entries = (1..=n)
        .map(|i| {
            let e = Rational::pow2((n + 1 - i) as u32);
            match orientation {
                Orientation::Positive => e,
                Orientation::Negative => -e,
            }
        })
        .collect();
    let kind = match orientation {
        Orientation::Positive => ShadowKind::PositiveDyadic,
        Orientation::Negative => ShadowKind::NegativeDyadic,
    };
    Ok(ShadowVector {
        entries,
        kind,
        scaled: OnceLock::new(),
    })
}

fn check_lengths(w: &WeightVector, s: &ShadowVector) -> Result<()> {
    if w.len() != s.len() {
        return Err(Error::LengthMismatch {
            expected: w.len(),
            found: s.len(),
        });
    }
    Ok(())
}

/// Sign of `v(w)`, falling back to `sign(v(s))` on a tie. `Zero` only when
/// `v` is constant along `s` at a tie.
pub fn perturbed_sign(
    f: &LinearFunctional,
    w: &WeightVector,
    s: &ShadowVector,
) -> Result<SignValue> {
    check_lengths(w, s)?;
    let primary = evaluate(f, w)?;
    if !primary.is_zero() {
        return Ok(sign(&primary));
    }
    Ok(sign(&f.evaluate_scaled(s.scaled())?))
}

/// A first-order infinitesimal: `primary + shadow * eps`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PerturbedValue {
    pub primary: Rational,
    pub shadow: Rational,
}

impl PerturbedValue {
    pub fn new(primary: Rational, shadow: Rational) -> Self {
        PerturbedValue { primary, shadow }
    }

    pub fn sign(&self) -> SignValue {
        match sign(&self.primary) {
            SignValue::Zero => sign(&self.shadow),
            s => s,
        }
    }
}

impl Add<&PerturbedValue> for &PerturbedValue {
    type Output = PerturbedValue;
    fn add(self, rhs: &PerturbedValue) -> PerturbedValue {
        PerturbedValue {
            primary: &self.primary + &rhs.primary,
            shadow: &self.shadow + &rhs.shadow,
        }
    }
}

impl Sub<&PerturbedValue> for &PerturbedValue {
    type Output = PerturbedValue;
    fn sub(self, rhs: &PerturbedValue) -> PerturbedValue {
        PerturbedValue {
            primary: &self.primary - &rhs.primary,
            shadow: &self.shadow - &rhs.shadow,
        }
    }
}

impl PartialOrd for PerturbedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PerturbedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        lex_compare(self, other)
    }
}

pub fn lex_compare(a: &PerturbedValue, b: &PerturbedValue) -> Ordering {
    a.primary
        .cmp(&b.primary)
        .then_with(|| a.shadow.cmp(&b.shadow))
}

/// Pairs each weight with its shadow entry.
pub fn perturbed_weights(w: &WeightVector, s: &ShadowVector) -> Result<Vec<PerturbedValue>> {
    check_lengths(w, s)?;
    Ok(w.iter()
        .zip(s.entries())
        .map(|(a, b)| PerturbedValue::new(a.clone(), b.clone()))
        .collect())
}

/// `v` applied to the paired weights `(w_i, s_i)` in explicit shadow
/// arithmetic.
pub fn evaluate_perturbed(
    f: &LinearFunctional,
    w: &WeightVector,
    s: &ShadowVector,
) -> Result<PerturbedValue> {
    check_lengths(w, s)?;
    Ok(PerturbedValue::new(
        evaluate(f, w)?,
        f.evaluate_scaled(s.scaled())?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_integer(x)).collect()
    }

    #[test]
    fn dyadic_examples() {
        assert_eq!(
            dyadic_shadow(3, Orientation::Positive).unwrap().entries(),
            &ints(&[8, 4, 2])[..]
        );
        assert_eq!(
            dyadic_shadow(1, Orientation::Positive).unwrap().entries(),
            &ints(&[2])[..]
        );
        let neg = dyadic_shadow(3, Orientation::Negative).unwrap();
        assert_eq!(neg.entries(), &ints(&[-8, -4, -2])[..]);
        assert_eq!(neg.orientation(), Some(Orientation::Negative));
        assert!(matches!(
            dyadic_shadow(0, Orientation::Positive),
            Err(Error::InvalidSize(_))
        ));
    }

    #[test]
    fn perturbed_sign_examples() {
        let pos = dyadic_shadow(3, Orientation::Positive).unwrap();
        let neg = dyadic_shadow(3, Orientation::Negative).unwrap();
        let f = LinearFunctional::from_int_terms(&[(1, -1), (3, 1)]).unwrap();
        let w = WeightVector::from_integers(&[5, 2, 5]).unwrap();
        assert_eq!(perturbed_sign(&f, &w, &pos).unwrap(), SignValue::Negative);
        assert_eq!(perturbed_sign(&f, &w, &neg).unwrap(), SignValue::Positive);

        let g = LinearFunctional::from_int_terms(&[(2, 1)]).unwrap();
        let w = WeightVector::from_integers(&[0, 3, 0]).unwrap();
        assert_eq!(perturbed_sign(&g, &w, &pos).unwrap(), SignValue::Positive);
    }

    #[test]
    fn zero_functional_is_constant() {
        let s = dyadic_shadow(2, Orientation::Positive).unwrap();
        let w = WeightVector::from_integers(&[1, 1]).unwrap();
        assert_eq!(
            perturbed_sign(&LinearFunctional::zero(), &w, &s).unwrap(),
            SignValue::Zero
        );
    }

    #[test]
    fn lex_compare_examples() {
        let p = |a: &str, b: &str| PerturbedValue::new(a.parse().unwrap(), b.parse().unwrap());
        assert_eq!(lex_compare(&p("3", "-6"), &p("3", "0")), Ordering::Less);
        assert_eq!(lex_compare(&p("2", "100"), &p("3", "-100")), Ordering::Less);
        assert_eq!(lex_compare(&p("1/2", "4"), &p("1/2", "4")), Ordering::Equal);
    }

    #[test]
    fn length_mismatch() {
        let s = dyadic_shadow(2, Orientation::Positive).unwrap();
        let w = WeightVector::from_integers(&[1, 1, 1]).unwrap();
        let f = LinearFunctional::from_int_terms(&[(1, 1)]).unwrap();
        assert!(matches!(
            perturbed_sign(&f, &w, &s),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
