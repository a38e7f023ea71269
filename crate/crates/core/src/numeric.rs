//! Exact rationals, weight vectors and linear branching functionals.
//!
//! Every quantity in the toolkit is a [`Rational`]; nothing is ever rounded.
//! A branching functional is a linear form `v(w) = sum c_i * w_i` over the
//! 1-based weight indices of an instance, and the only thing an algorithm
//! ever asks about it is its [`SignValue`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact arbitrary-precision fraction, always kept in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    /// Builds `numer/denom`, normalizing. Fails on a zero denominator.
    pub fn from_parts(numer: BigInt, denom: BigInt) -> Option<Self> {
        if denom.is_zero() {
            None
        } else {
            Some(Rational(BigRational::new(numer, denom)))
        }
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `2^k` as an exact integer.
    pub fn pow2(k: u32) -> Self {
        Rational::from_bigint(BigInt::one() << k as usize)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn sign(&self) -> SignValue {
        sign(self)
    }

    /// Exact division; `None` for a zero divisor.
    pub fn checked_div(&self, rhs: &Rational) -> Option<Rational> {
        if rhs.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &rhs.0))
        }
    }

    pub fn mul_int(&self, k: i64) -> Rational {
        Rational(&self.0 * BigRational::from_integer(k.into()))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Error position inside a single rational token (0-based byte offset).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalParseError {
    pub offset: usize,
    pub message: &'static str,
}

impl fmt::Display for RationalParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at offset {}", self.message, self.offset)
    }
}

impl std::error::Error for RationalParseError {}

fn scan_digits(s: &str, start: usize) -> usize {
    s[start..].bytes().take_while(u8::is_ascii_digit).count()
}

impl FromStr for Rational {
    type Err = RationalParseError;

    /// Accepts `[+-]digits[/digits]` with a positive denominator and no
    /// embedded whitespace.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let err = |offset, message| Err(RationalParseError { offset, message });
        let mut pos = 0;
        if s.starts_with(['+', '-']) {
            pos = 1;
        }
        let int_len = scan_digits(s, pos);
        if int_len == 0 {
            return err(pos, "expected digits");
        }
        let numer: BigInt = s[..pos + int_len].parse().expect("validated digits");
        pos += int_len;
        if pos == s.len() {
            return Ok(Rational::from_bigint(numer));
        }
        if s.as_bytes()[pos] != b'/' {
            return err(pos, "unexpected character");
        }
        pos += 1;
        let den_len = scan_digits(s, pos);
        if den_len == 0 {
            return err(pos, "expected denominator digits");
        }
        let denom: BigInt = s[pos..pos + den_len].parse().expect("validated digits");
        if pos + den_len != s.len() {
            return err(pos + den_len, "unexpected character");
        }
        if denom.is_zero() {
            return err(pos, "zero denominator");
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

/// Three-valued sign, ordered `Negative < Zero < Positive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SignValue {
    Negative,
    Zero,
    Positive,
}

impl SignValue {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => SignValue::Negative,
            Ordering::Equal => SignValue::Zero,
            Ordering::Greater => SignValue::Positive,
        }
    }
}

pub fn sign(x: &Rational) -> SignValue {
    if x.0.is_positive() {
        SignValue::Positive
    } else if x.0.is_negative() {
        SignValue::Negative
    } else {
        SignValue::Zero
    }
}

/// A vector of rationals rewritten over one common denominator:
/// `value_i = numerators_i / denom`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledVector {
    pub numerators: Vec<BigInt>,
    pub denom: BigInt,
}

impl ScaledVector {
    pub fn new(values: &[Rational]) -> Self {
        let denom = values
            .iter()
            .fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let numerators = values
            .iter()
            .map(|w| w.numer() * (&denom / w.denom()))
            .collect();
        ScaledVector { numerators, denom }
    }
}

/// Weight vector `w = (w_1, ..., w_n)` of a problem instance.
#[derive(Clone, Serialize, Deserialize)]
#[serde(from = "Vec<Rational>", into = "Vec<Rational>")]
pub struct WeightVector {
    values: Vec<Rational>,
    scaled: OnceLock<ScaledVector>,
}

impl PartialEq for WeightVector {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for WeightVector {}

impl std::hash::Hash for WeightVector {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.values.hash(state)
    }
}

impl From<Vec<Rational>> for WeightVector {
    fn from(values: Vec<Rational>) -> Self {
        WeightVector {
            values,
            scaled: OnceLock::new(),
        }
    }
}

impl From<WeightVector> for Vec<Rational> {
    fn from(w: WeightVector) -> Self {
        w.values
    }
}

impl WeightVector {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSize("weight vector must be nonempty".into()));
        }
        Ok(WeightVector::from(weights))
    }

    pub fn from_integers(weights: &[i64]) -> Result<Self> {
        Self::new(weights.iter().map(|&w| Rational::from_integer(w)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based access.
    pub fn get(&self, index: usize) -> Option<&Rational> {
        index.checked_sub(1).and_then(|i| self.values.get(i))
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.values
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.values.iter()
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.values
    }

    /// Common-denominator form, computed once and cached.
    pub fn scaled(&self) -> &ScaledVector {
        self.scaled.get_or_init(|| ScaledVector::new(&self.values))
    }

    /// First negative entry, if any, as a domain error.
    pub fn check_nonnegative(&self) -> Result<()> {
        match self.values.iter().position(Rational::is_negative) {
            Some(i) => Err(Error::NegativeWeight {
                index: i + 1,
                value: self.values[i].to_string(),
            }),
            None => Ok(()),
        }
    }

    pub fn reversed(&self) -> WeightVector {
        WeightVector::from(self.values.iter().rev().cloned().collect::<Vec<_>>())
    }

    pub fn checked_add(&self, other: &[Rational]) -> Result<WeightVector> {
        if other.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(WeightVector::from(
            self.values
                .iter()
                .zip(other)
                .map(|(a, b)| a + b)
                .collect::<Vec<_>>(),
        ))
    }

    /// `w + a * s`.
    pub fn shifted(&self, a: &Rational, direction: &[Rational]) -> Result<WeightVector> {
        let step: Vec<Rational> = direction.iter().map(|s| a * s).collect();
        self.checked_add(&step)
    }

    /// Integer numerators over the least common denominator.
    pub fn scaled_integers(&self) -> (Vec<BigInt>, BigInt) {
        let s = self.scaled();
        (s.numerators.clone(), s.denom.clone())
    }
}

impl fmt::Debug for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.values.iter()).finish()
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

/// Parses whitespace-separated rational tokens. Blank lines are ignored and a
/// line whose first non-blank character is `#` is a comment.
pub fn parse_weights(text: &str) -> Result<WeightVector> {
    let mut weights = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        if line.trim_start().starts_with('#') {
            continue;
        }
        let mut rest = line;
        let mut col = 0;
        while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
            let len = rest[start..]
                .find(char::is_whitespace)
                .unwrap_or(rest.len() - start);
            let token = &rest[start..start + len];
            let value: Rational = token.parse().map_err(|e: RationalParseError| {
                Error::parse(
                    line_no + 1,
                    col + start + e.offset + 1,
                    format!("malformed rational `{token}`: {}", e.message),
                )
            })?;
            weights.push(value);
            col += start + len;
            rest = &rest[start + len..];
        }
    }
    if weights.is_empty() {
        return Err(Error::parse(1, 1, "no weights found"));
    }
    WeightVector::new(weights)
}

/// One coefficient shared by a set of weight indices.
#[derive(Clone)]
struct Block {
    coeff: Rational,
    indices: Arc<[usize]>,
}

/// Sparse linear form `v(w) = sum c_i * w_i` over 1-based indices.
///
/// Storage groups indices sharing a coefficient into blocks whose index sets
/// are pairwise disjoint; a block can share its index set with the node that
/// produced it. Two functionals are equal when their coefficient maps are.
#[derive(Clone, Default)]
pub struct LinearFunctional {
    blocks: Vec<Block>,
}

impl LinearFunctional {
    pub fn zero() -> Self {
        LinearFunctional::default()
    }

    /// Builds a functional from `(index, coefficient)` terms; repeated indices
    /// are summed and zero coefficients dropped. Index 0 is rejected.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut collected: Vec<(usize, Rational)> = terms.into_iter().collect();
        if collected.iter().any(|(i, _)| *i == 0) {
            return Err(Error::IndexOutOfRange { index: 0, len: 0 });
        }
        collected.sort_by_key(|(i, _)| *i);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(collected.len());
        for (i, c) in collected {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc = &*acc + &c,
                _ => merged.push((i, c)),
            }
        }
        let blocks = merged
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| Block {
                coeff: c,
                indices: Arc::from(vec![i]),
            })
            .collect();
        Ok(LinearFunctional { blocks })
    }

    /// Convenience for small integer coefficients, e.g. `&[(1, -1), (3, 1)]`.
    pub fn from_int_terms(terms: &[(usize, i64)]) -> Result<Self> {
        Self::from_terms(terms.iter().map(|&(i, c)| (i, Rational::from_integer(c))))
    }

    /// Builds `sum_k coeff_k * (sum of w_i over set_k)` from index sets that
    /// must be pairwise disjoint, sorted and 1-based.
    pub(crate) fn from_disjoint_sets(sets: Vec<(Rational, Arc<[usize]>)>) -> Self {
        debug_assert!(sets.iter().all(|(_, s)| s.windows(2).all(|p| p[0] < p[1])));
        let blocks = sets
            .into_iter()
            .filter(|(c, s)| !c.is_zero() && !s.is_empty())
            .map(|(coeff, indices)| Block { coeff, indices })
            .collect();
        LinearFunctional { blocks }
    }

    /// Sorted `(index, coefficient)` pairs with nonzero coefficients.
    pub fn terms(&self) -> Vec<(usize, Rational)> {
        let mut out: Vec<(usize, Rational)> = self
            .blocks
            .iter()
            .flat_map(|b| b.indices.iter().map(|&i| (i, b.coeff.clone())))
            .collect();
        out.sort_by_key(|(i, _)| *i);
        out
    }

    pub fn coefficient(&self, index: usize) -> Rational {
        self.blocks
            .iter()
            .find(|b| b.indices.binary_search(&index).is_ok())
            .map(|b| b.coeff.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.blocks.iter().map(|b| b.indices.len()).sum()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.blocks
            .iter()
            .filter_map(|b| b.indices.last().copied())
            .max()
    }

    /// Lowest index with a nonzero coefficient, with that coefficient.
    pub fn leading_term(&self) -> Option<(usize, Rational)> {
        self.blocks
            .iter()
            .filter_map(|b| b.indices.first().map(|&i| (i, &b.coeff)))
            .min_by_key(|(i, _)| *i)
            .map(|(i, c)| (i, c.clone()))
    }

    /// Sum of absolute coefficients.
    pub fn l1_norm(&self) -> Rational {
        self.blocks
            .iter()
            .map(|b| b.coeff.abs().mul_int(b.indices.len() as i64))
            .sum()
    }

    /// Every coefficient is in {-1, 0, +1} and at least one is nonzero.
    pub fn is_unit_shaped(&self) -> bool {
        let one = Rational::one();
        !self.blocks.is_empty() && self.blocks.iter().all(|b| b.coeff.abs() == one)
    }

    fn check_range(&self, len: usize) -> Result<()> {
        match self.max_index() {
            Some(index) if index > len => Err(Error::IndexOutOfRange { index, len }),
            _ => Ok(()),
        }
    }

    /// Evaluates against an arbitrary vector of values (0-based slice,
    /// 1-based functional indices).
    pub fn evaluate_slice(&self, values: &[Rational]) -> Result<Rational> {
        self.check_range(values.len())?;
        let mut total = Rational::zero();
        for b in &self.blocks {
            let inner: Rational = b.indices.iter().map(|&i| &values[i - 1]).sum();
            total = total + &b.coeff * &inner;
        }
        Ok(total)
    }
}

impl LinearFunctional {
    /// `sum c_i * numerators_i` when every coefficient is an integer, so
    /// that the value is this over `v.denom`.
    pub(crate) fn scaled_numerator(&self, v: &ScaledVector) -> Option<BigInt> {
        if self.blocks.iter().any(|b| !b.coeff.denom().is_one()) {
            return None;
        }
        let mut total = BigInt::zero();
        for b in &self.blocks {
            let inner: BigInt = b.indices.iter().map(|&i| &v.numerators[i - 1]).sum();
            if b.coeff.numer().is_one() {
                total += inner;
            } else if (-b.coeff.numer()).is_one() {
                total -= inner;
            } else {
                total += b.coeff.numer() * inner;
            }
        }
        Some(total)
    }

    pub fn sign_on(&self, v: &ScaledVector) -> Result<SignValue> {
        self.check_range(v.numerators.len())?;
        match self.scaled_numerator(v) {
            Some(total) => Ok(SignValue::from_ordering(
                total.sign().cmp(&num_bigint::Sign::NoSign),
            )),
            None => Ok(sign(&self.evaluate_scaled(v)?)),
        }
    }

    /// Evaluates against a common-denominator vector, summing integers.
    pub fn evaluate_scaled(&self, v: &ScaledVector) -> Result<Rational> {
        self.check_range(v.numerators.len())?;
        if let Some(total) = self.scaled_numerator(v) {
            return Ok(Rational::from_parts(total, v.denom.clone()).expect("positive denominator"));
        }
        let mut total = Rational::zero();
        for b in &self.blocks {
            let inner: BigInt = b.indices.iter().map(|&i| &v.numerators[i - 1]).sum();
            total = total + &b.coeff * &Rational::from_bigint(inner);
        }
        Ok(total
            .checked_div(&Rational::from_bigint(v.denom.clone()))
            .expect("positive denominator"))
    }
}

/// Memoizes block sums against one vector. Functionals built from shared
/// index sets (as phase-1 traces are) then evaluate in time proportional to
/// their block count rather than their support.
pub(crate) struct BlockSums<'a> {
    vector: &'a ScaledVector,
    sums: HashMap<usize, (Arc<[usize]>, BigInt)>,
}

impl<'a> BlockSums<'a> {
    pub(crate) fn new(vector: &'a ScaledVector) -> Self {
        BlockSums {
            vector,
            sums: HashMap::new(),
        }
    }

    pub(crate) fn vector(&self) -> &'a ScaledVector {
        self.vector
    }

    fn sum(&mut self, indices: &Arc<[usize]>) -> &BigInt {
        let v = self.vector;
        let key = Arc::as_ptr(indices) as *const usize as usize;
        &self
            .sums
            .entry(key)
            .or_insert_with(|| {
                (
                    indices.clone(),
                    indices.iter().map(|&i| &v.numerators[i - 1]).sum(),
                )
            })
            .1
    }

    /// Same as [`LinearFunctional::scaled_numerator`], with memoized blocks.
    pub(crate) fn numerator(&mut self, f: &LinearFunctional) -> Result<Option<BigInt>> {
        f.check_range(self.vector.numerators.len())?;
        if f.blocks.iter().any(|b| !b.coeff.denom().is_one()) {
            return Ok(None);
        }
        let mut total = BigInt::zero();
        for b in &f.blocks {
            let inner = self.sum(&b.indices);
            if b.coeff.numer().is_one() {
                total += inner;
            } else if (-b.coeff.numer()).is_one() {
                total -= inner;
            } else {
                total += b.coeff.numer() * inner;
            }
        }
        Ok(Some(total))
    }

    pub(crate) fn evaluate(&mut self, f: &LinearFunctional) -> Result<Rational> {
        match self.numerator(f)? {
            Some(total) => Ok(Rational::from_parts(total, self.vector.denom.clone())
                .expect("positive denominator")),
            None => f.evaluate_scaled(self.vector),
        }
    }

    pub(crate) fn sign(&mut self, f: &LinearFunctional) -> Result<SignValue> {
        match self.numerator(f)? {
            Some(total) => Ok(SignValue::from_ordering(
                total.sign().cmp(&num_bigint::Sign::NoSign),
            )),
            None => Ok(sign(&f.evaluate_scaled(self.vector)?)),
        }
    }
}

impl PartialEq for LinearFunctional {
    fn eq(&self, other: &Self) -> bool {
        self.terms() == other.terms()
    }
}

impl Eq for LinearFunctional {}

impl fmt::Debug for LinearFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms()).finish()
    }
}

/// `v(w) = sum c_i * w_i`, exactly.
pub fn evaluate(f: &LinearFunctional, w: &WeightVector) -> Result<Rational> {
    f.evaluate_scaled(w.scaled())
}
