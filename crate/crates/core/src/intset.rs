//! Finite sets of integers and the operations on them: dilation, Minkowski
//! sums, linear forms and affine normalization.
//!
//! An [`IntSet`] is always stored as a strictly increasing `Vec<i64>`. Sumsets
//! go through [`crate::kernel`], which packs operands into bit arrays when the
//! result range fits the configured window and falls back to a sort-merge
//! otherwise. All arithmetic is checked; an overflow is an error.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, KernelConfig};

/// A finite set of integers.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "Vec<i64>", from = "Vec<i64>")]
pub struct IntSet {
    elems: Vec<i64>,
}

impl IntSet {
    pub fn new() -> Self {
        IntSet { elems: Vec::new() }
    }

    /// Builds a set from arbitrary values; sorts and drops duplicates.
    pub fn from_vec(mut elems: Vec<i64>) -> Self {
        elems.sort_unstable();
        elems.dedup();
        IntSet { elems }
    }

    /// Builds a set from values that are already strictly increasing.
    ///
    /// Returns `None` if the input is not strictly increasing.
    pub fn from_sorted(elems: Vec<i64>) -> Option<Self> {
        if elems.windows(2).all(|w| w[0] < w[1]) {
            Some(IntSet { elems })
        } else {
            None
        }
    }

    pub(crate) fn from_sorted_unchecked(elems: Vec<i64>) -> Self {
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]));
        IntSet { elems }
    }

    /// The interval `{lo, lo + 1, …, hi}`; empty when `hi < lo`.
    pub fn interval(lo: i64, hi: i64) -> Self {
        if hi < lo {
            return IntSet::new();
        }
        IntSet {
            elems: (lo..=hi).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<i64> {
        self.elems
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, i64>> {
        self.elems.iter().copied()
    }

    pub fn min(&self) -> Option<i64> {
        self.elems.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.elems.last().copied()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    /// `gcd` of all elements; `0` for the empty set and for `{0}`.
    pub fn gcd(&self) -> u64 {
        self.elems
            .iter()
            .fold(0u64, |g, &x| g.gcd(&x.unsigned_abs()))
    }

    /// `{u·a : a ∈ A}`. `u = 0` maps a nonempty set to `{0}`.
    pub fn dilate(&self, u: i64) -> Result<IntSet> {
        dilate(self, u)
    }

    /// `{a + t : a ∈ A}`.
    pub fn translate(&self, t: i64) -> Result<IntSet> {
        let elems = self
            .elems
            .iter()
            .map(|&a| a.checked_add(t).ok_or(Error::overflow("translate")))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntSet::from_sorted_unchecked(elems))
    }

    pub fn sum(&self, other: &IntSet) -> Result<IntSet> {
        minkowski_sum(self, other)
    }

    pub fn union(&self, other: &IntSet) -> IntSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.elems, &other.elems);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        IntSet::from_sorted_unchecked(out)
    }

    /// `A ∖ B`.
    pub fn difference(&self, other: &IntSet) -> IntSet {
        let mut out = Vec::with_capacity(self.len());
        let mut j = 0;
        let b = &other.elems;
        for &x in &self.elems {
            while j < b.len() && b[j] < x {
                j += 1;
            }
            if j == b.len() || b[j] != x {
                out.push(x);
            }
        }
        IntSet::from_sorted_unchecked(out)
    }

    pub fn is_subset(&self, other: &IntSet) -> bool {
        self.difference(other).is_empty()
    }
}

impl fmt::Debug for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.elems.iter()).finish()
    }
}

impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elems.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<i64> for IntSet {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        IntSet::from_vec(iter.into_iter().collect())
    }
}

impl From<Vec<i64>> for IntSet {
    fn from(v: Vec<i64>) -> Self {
        IntSet::from_vec(v)
    }
}

impl<const N: usize> From<[i64; N]> for IntSet {
    fn from(v: [i64; N]) -> Self {
        IntSet::from_vec(v.to_vec())
    }
}

impl From<IntSet> for Vec<i64> {
    fn from(s: IntSet) -> Self {
        s.elems
    }
}

impl<'a> IntoIterator for &'a IntSet {
    type Item = i64;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, i64>>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

/// Coefficients `(u₁, …, uₙ)` of the form `f(A) = u₁·A + … + uₙ·A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LinearForm {
    coeffs: Vec<i64>,
}

impl LinearForm {
    /// Fails if the list is empty or holds a zero coefficient.
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidForm(
                "a form needs at least one coefficient".into(),
            ));
        }
        if coeffs.contains(&0) {
            return Err(Error::InvalidForm("coefficients must be nonzero".into()));
        }
        Ok(LinearForm { coeffs })
    }

    /// The binary form `m·x + k·y`.
    pub fn binary(m: i64, k: i64) -> Result<Self> {
        LinearForm::new(vec![m, k])
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    /// True iff the form is `m·x + k·y` with `k ≥ |m| ≥ 1` and `gcd(m, k) = 1`.
    pub fn is_normalized_binary(&self) -> bool {
        match *self.coeffs.as_slice() {
            [m, k] => {
                let am = m.unsigned_abs();
                k > 0 && (k as u64) >= am && am >= 1 && am.gcd(&(k as u64)) == 1
            }
            _ => false,
        }
    }
}

impl TryFrom<Vec<i64>> for LinearForm {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Self> {
        LinearForm::new(v)
    }
}

impl From<LinearForm> for Vec<i64> {
    fn from(f: LinearForm) -> Self {
        f.coeffs
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// `{u·a : a ∈ A}`, re-sorted when `u < 0`.
pub fn dilate(a: &IntSet, u: i64) -> Result<IntSet> {
    if a.is_empty() {
        return Ok(IntSet::new());
    }
    if u == 0 {
        return Ok(IntSet::from_sorted_unchecked(vec![0]));
    }
    let mut elems = a
        .elems
        .iter()
        .map(|&x| x.checked_mul(u).ok_or(Error::overflow("dilate")))
        .collect::<Result<Vec<_>>>()?;
    if u < 0 {
        elems.reverse();
    }
    Ok(IntSet::from_sorted_unchecked(elems))
}

/// `{a + b : a ∈ A, b ∈ B}`.
pub fn minkowski_sum(a: &IntSet, b: &IntSet) -> Result<IntSet> {
    kernel::dilated_sum(a, 1, b, 1, &KernelConfig::default())
}

/// `u·A + v·B` through the fast path.
pub fn dilated_sum(a: &IntSet, u: i64, b: &IntSet, v: i64) -> Result<IntSet> {
    kernel::dilated_sum(a, u, b, v, &KernelConfig::default())
}

/// `f(A) = u₁·A + … + uₙ·A` with the default kernel configuration.
pub fn evaluate_form(f: &LinearForm, a: &IntSet) -> Result<IntSet> {
    evaluate_form_with(f, a, &KernelConfig::default())
}

pub fn evaluate_form_with(f: &LinearForm, a: &IntSet, config: &KernelConfig) -> Result<IntSet> {
    if a.is_empty() {
        return Err(Error::EmptySet {
            op: "evaluate_form",
        });
    }
    match f.coefficients() {
        [u] => dilate(a, *u),
        [u, v, rest @ ..] => {
            let mut acc = kernel::dilated_sum(a, *u, a, *v, config)?;
            for &w in rest {
                acc = kernel::dilated_sum(&acc, 1, a, w, config)?;
            }
            Ok(acc)
        }
        [] => unreachable!("LinearForm is never empty"),
    }
}

/// Result of [`normalize_set`]: `set = (A − shift) / scale`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Normalized {
    pub set: IntSet,
    pub shift: i64,
    pub scale: u64,
}

impl Normalized {
    /// Maps the normalized set back to the original: `scale·A' + shift`.
    pub fn restore(&self) -> Result<IntSet> {
        let scale = i64::try_from(self.scale).map_err(|_| Error::overflow("restore"))?;
        self.set.dilate(scale)?.translate(self.shift)
    }
}

/// Translates `A` so that `min A = 0`, then divides by the gcd of what is left.
///
/// Singletons map to `({0}, a, 1)`.
pub fn normalize_set(a: &IntSet) -> Result<Normalized> {
    let shift = a.min().ok_or(Error::EmptySet {
        op: "normalize_set",
    })?;
    // differences from the minimum fit in u64 even when they overflow i64
    let offsets: Vec<u64> = a.iter().map(|x| x.wrapping_sub(shift) as u64).collect();
    let g = offsets.iter().fold(0u64, |g, &d| g.gcd(&d));
    let scale = if g == 0 { 1 } else { g };
    let elems = offsets
        .iter()
        .map(|&d| i64::try_from(d / scale).map_err(|_| Error::overflow("normalize_set")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Normalized {
        set: IntSet::from_sorted_unchecked(elems),
        shift,
        scale,
    })
}

/// True iff `f` is a binary form `m·x + k·y` with `k ≥ |m| ≥ 1`, `gcd(m, k) = 1`.
pub fn validate_normalized_form(f: &LinearForm) -> bool {
    f.is_normalized_binary()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IntSet {
        IntSet::from_vec(v.to_vec())
    }

    #[test]
    fn dilate_examples() {
        assert_eq!(dilate(&set(&[0, 1, 3]), 2).unwrap(), set(&[0, 2, 6]));
        assert_eq!(dilate(&set(&[-1, 2]), 1).unwrap(), set(&[-1, 2]));
        assert_eq!(dilate(&set(&[-1, 2]), -3).unwrap(), set(&[-6, 3]));
        assert_eq!(dilate(&set(&[4, 9]), 0).unwrap(), set(&[0]));
        assert!(dilate(&IntSet::new(), 0).unwrap().is_empty());
    }

    #[test]
    fn dilate_overflow_is_an_error() {
        let err = dilate(&set(&[i64::MAX / 2 + 1]), 2).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
        assert!(dilate(&set(&[i64::MIN]), -1).is_err());
    }

    #[test]
    fn minkowski_examples() {
        assert_eq!(
            minkowski_sum(&set(&[0, 1]), &set(&[0, 1])).unwrap(),
            set(&[0, 1, 2])
        );
        let b = set(&[-4, 7, 19]);
        assert_eq!(minkowski_sum(&set(&[0]), &b).unwrap(), b);
        assert_eq!(
            minkowski_sum(&set(&[0, 2, 6]), &set(&[0, 3, 9])).unwrap(),
            set(&[0, 2, 3, 5, 6, 9, 11, 15])
        );
        assert!(minkowski_sum(&IntSet::new(), &b).unwrap().is_empty());
    }

    #[test]
    fn minkowski_overflow_is_an_error() {
        let a = set(&[i64::MAX - 1]);
        assert!(matches!(
            minkowski_sum(&a, &set(&[5])),
            Err(Error::Overflow { .. })
        ));
        let lo = set(&[i64::MIN + 1]);
        assert!(minkowski_sum(&lo, &set(&[-2])).is_err());
    }

    #[test]
    fn evaluate_form_examples() {
        let f = LinearForm::binary(2, 3).unwrap();
        let out = evaluate_form(&f, &set(&[0, 1, 2, 3])).unwrap();
        assert_eq!(out, set(&[0, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 15]));
        assert_eq!(out.len(), 14);
        let id = LinearForm::new(vec![1]).unwrap();
        assert_eq!(evaluate_form(&id, &set(&[5, 7])).unwrap(), set(&[5, 7]));
        assert_eq!(
            evaluate_form(&f, &set(&[0, 1])).unwrap(),
            set(&[0, 2, 3, 5])
        );
    }

    #[test]
    fn evaluate_form_rejects_empty_set() {
        let f = LinearForm::binary(2, 3).unwrap();
        assert!(matches!(
            evaluate_form(&f, &IntSet::new()),
            Err(Error::EmptySet { .. })
        ));
    }

    #[test]
    fn ternary_form_matches_definition() {
        let f = LinearForm::new(vec![1, -2, 4]).unwrap();
        let a = set(&[0, 1, 5]);
        let mut expect = Vec::new();
        for x in &a {
            for y in &a {
                for z in &a {
                    expect.push(x - 2 * y + 4 * z);
                }
            }
        }
        assert_eq!(evaluate_form(&f, &a).unwrap(), IntSet::from_vec(expect));
    }

    #[test]
    fn normalize_examples() {
        let n = normalize_set(&set(&[6, 10, 14])).unwrap();
        assert_eq!((n.set.clone(), n.shift, n.scale), (set(&[0, 1, 2]), 6, 4));
        assert_eq!(n.restore().unwrap(), set(&[6, 10, 14]));
        let n = normalize_set(&set(&[0, 1, 5])).unwrap();
        assert_eq!((n.set, n.shift, n.scale), (set(&[0, 1, 5]), 0, 1));
        let n = normalize_set(&set(&[-3, 3])).unwrap();
        assert_eq!((n.set, n.shift, n.scale), (set(&[0, 1]), -3, 6));
        let n = normalize_set(&set(&[42])).unwrap();
        assert_eq!((n.set, n.shift, n.scale), (set(&[0]), 42, 1));
        assert!(normalize_set(&IntSet::new()).is_err());
    }

    #[test]
    fn normalize_handles_full_range() {
        let n = normalize_set(&set(&[i64::MIN, i64::MAX])).unwrap();
        assert_eq!(n.set, set(&[0, 1]));
        assert_eq!(n.scale, u64::MAX);
    }

    #[test]
    fn normalized_form_examples() {
        let f = |m, k| LinearForm::binary(m, k).unwrap();
        assert!(validate_normalized_form(&f(2, 9)));
        assert!(!validate_normalized_form(&f(2, 4)));
        assert!(!validate_normalized_form(&f(3, 2)));
        assert!(validate_normalized_form(&f(-2, 3)));
        assert!(validate_normalized_form(&f(1, 1)));
        assert!(!validate_normalized_form(&f(2, -3)));
        assert!(!validate_normalized_form(
            &LinearForm::new(vec![1, 2, 3]).unwrap()
        ));
    }

    #[test]
    fn linear_form_rejects_zero() {
        assert!(LinearForm::new(vec![]).is_err());
        assert!(LinearForm::new(vec![2, 0]).is_err());
    }

    #[test]
    fn set_algebra() {
        let a = set(&[1, 3, 5, 7]);
        let b = set(&[3, 4, 5]);
        assert_eq!(a.union(&b), set(&[1, 3, 4, 5, 7]));
        assert_eq!(a.difference(&b), set(&[1, 7]));
        assert!(set(&[3, 5]).is_subset(&a));
        assert_eq!(set(&[6, 10, 14]).gcd(), 2);
        assert!(IntSet::from_sorted(vec![1, 1]).is_none());
    }
}
