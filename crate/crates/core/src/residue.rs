//! Congruence-class decomposition of a set modulo `k`.
//!
//! `A` splits into classes `A_i = k·X_i + u_i` with `0 ≤ u_i < k`, ordered by
//! size descending and then by residue ascending. Class indices are 1-based
//! throughout, matching the usual `A_1, …, A_j` labelling.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::intset::{dilated_sum, IntSet};
use crate::modular::ModSet;

fn check_modulus(k: i64) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidModulus { modulus: k });
    }
    Ok(k as u64)
}

/// `{a mod n : a ∈ A}` with residues in `[0, n)`.
pub fn project_mod(a: &IntSet, n: i64) -> Result<ModSet> {
    let n = check_modulus(n)?;
    if a.is_empty() {
        return Err(Error::EmptySet { op: "project_mod" });
    }
    Ok(ModSet::from_residues(n, a.iter()))
}

/// `c_n(A)`, the number of residues of `A` modulo `n`. `c_1(A) = 1`.
pub fn residue_count(a: &IntSet, n: i64) -> Result<usize> {
    if n == 1 && !a.is_empty() {
        return Ok(1);
    }
    project_mod(a, n).map(|s| s.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceClass {
    pub residue: u64,
    /// `X_i`, so that `elements = k·quotient + residue`.
    pub quotient: IntSet,
    pub elements: IntSet,
}

impl CongruenceClass {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// How to split classes into `E` and `F`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EfReading {
    /// `i ∈ F` iff `X_i` meets every residue mod `k`.
    #[default]
    Projection,
    /// `i ∈ E` iff `|X_i| < k`, `i ∈ F` iff `|X_i| = k`; larger classes are in neither.
    Cardinality,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueDecomposition {
    modulus: u64,
    classes: Vec<CongruenceClass>,
    quotient_residues: Vec<usize>,
    source: IntSet,
}

impl ResidueDecomposition {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `j = c_k(A)`.
    pub fn j(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[CongruenceClass] {
        &self.classes
    }

    /// The class `A_i`, 1-based.
    pub fn class(&self, i: usize) -> Result<&CongruenceClass> {
        i.checked_sub(1)
            .and_then(|x| self.classes.get(x))
            .ok_or(Error::ClassIndexOutOfRange {
                index: i,
                classes: self.classes.len(),
            })
    }

    pub fn source(&self) -> &IntSet {
        &self.source
    }

    /// `c_k(X_i)` for each class.
    pub fn quotient_residue_counts(&self) -> &[usize] {
        &self.quotient_residues
    }

    pub fn in_e(&self, i: usize, reading: EfReading) -> bool {
        let k = self.modulus as usize;
        match reading {
            EfReading::Projection => self.quotient_residues[i - 1] < k,
            EfReading::Cardinality => self.classes[i - 1].len() < k,
        }
    }

    pub fn in_f(&self, i: usize, reading: EfReading) -> bool {
        let k = self.modulus as usize;
        match reading {
            EfReading::Projection => self.quotient_residues[i - 1] == k,
            EfReading::Cardinality => self.classes[i - 1].len() == k,
        }
    }

    /// `E` under the default projection reading.
    pub fn e_indices(&self) -> Vec<usize> {
        self.e_indices_with(EfReading::Projection)
    }

    pub fn f_indices(&self) -> Vec<usize> {
        self.f_indices_with(EfReading::Projection)
    }

    pub fn e_indices_with(&self, reading: EfReading) -> Vec<usize> {
        (1..=self.j()).filter(|&i| self.in_e(i, reading)).collect()
    }

    pub fn f_indices_with(&self, reading: EfReading) -> Vec<usize> {
        (1..=self.j()).filter(|&i| self.in_f(i, reading)).collect()
    }
}

/// Splits `A` into its congruence classes modulo `k`.
pub fn decompose(a: &IntSet, k: i64) -> Result<ResidueDecomposition> {
    let km = check_modulus(k)?;
    if a.is_empty() {
        return Err(Error::EmptySet { op: "decompose" });
    }
    let mut by_residue: Vec<(u64, Vec<i64>)> = Vec::new();
    let mut keyed: Vec<(u64, i64)> = a.iter().map(|x| (x.rem_euclid(k) as u64, x)).collect();
    keyed.sort_unstable();
    for (r, x) in keyed {
        match by_residue.last_mut() {
            Some((lr, xs)) if *lr == r => xs.push(x),
            _ => by_residue.push((r, vec![x])),
        }
    }
    by_residue.sort_by(|(r1, x1), (r2, x2)| x2.len().cmp(&x1.len()).then(r1.cmp(r2)));
    let classes: Vec<CongruenceClass> = by_residue
        .into_iter()
        .map(|(r, xs)| {
            // (x - r) / k is exact; x - r cannot overflow since 0 <= r < k
            let quotient = xs
                .iter()
                .map(|&x| (x - r as i64).div_euclid(k))
                .collect::<Vec<_>>();
            CongruenceClass {
                residue: r,
                quotient: IntSet::from_sorted_unchecked(quotient),
                elements: IntSet::from_sorted_unchecked(xs),
            }
        })
        .collect();
    let quotient_residues = classes
        .iter()
        .map(|c| ModSet::from_residues(km, c.quotient.iter()).len())
        .collect();
    Ok(ResidueDecomposition {
        modulus: km,
        classes,
        quotient_residues,
        source: a.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaSet {
    pub class_index: usize,
    pub elements: IntSet,
}

/// `Δ_ii = (2·A_i + k·A) ∖ (2·A_i + k·A_i)`.
pub fn delta_set(d: &ResidueDecomposition, i: usize, a: &IntSet) -> Result<DeltaSet> {
    if *a != d.source {
        return Err(Error::SourceMismatch);
    }
    let ai = &d.class(i)?.elements;
    let k = d.modulus as i64;
    let whole = dilated_sum(ai, 2, a, k)?;
    let own = dilated_sum(ai, 2, ai, k)?;
    Ok(DeltaSet {
        class_index: i,
        elements: whole.difference(&own),
    })
}

/// `|Δ_ii|` for every class, in class order.
pub fn delta_sizes(d: &ResidueDecomposition) -> Result<Vec<usize>> {
    (1..=d.j())
        .map(|i| delta_set(d, i, &d.source).map(|x| x.elements.len()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IntSet {
        IntSet::from_vec(v.to_vec())
    }

    #[test]
    fn projection_examples() {
        let p = project_mod(&set(&[0, 1, 5, 10, 11]), 5).unwrap();
        assert_eq!(p.members().collect::<Vec<_>>(), vec![0, 1]);
        let p = project_mod(&set(&[-1, 4]), 5).unwrap();
        assert_eq!(p.members().collect::<Vec<_>>(), vec![4]);
        assert!(project_mod(&IntSet::interval(0, 6), 7).unwrap().is_full());
        assert!(project_mod(&set(&[1]), 1).is_err());
        assert!(project_mod(&IntSet::new(), 3).is_err());
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&set(&[0, 1, 5, 10, 11]), 5).unwrap();
        assert_eq!(d.j(), 2);
        let c1 = d.class(1).unwrap();
        assert_eq!(
            (c1.residue, &c1.elements, &c1.quotient),
            (0, &set(&[0, 5, 10]), &set(&[0, 1, 2]))
        );
        let c2 = d.class(2).unwrap();
        assert_eq!(
            (c2.residue, &c2.elements, &c2.quotient),
            (1, &set(&[1, 11]), &set(&[0, 2]))
        );

        let d = decompose(&set(&[0, 1, 2, 3]), 3).unwrap();
        assert_eq!(d.j(), 3);
        let rs: Vec<u64> = d.classes().iter().map(|c| c.residue).collect();
        assert_eq!(rs, vec![0, 1, 2]);
        assert_eq!(d.class(1).unwrap().quotient, set(&[0, 1]));

        let d = decompose(&set(&[7]), 4).unwrap();
        let c = d.class(1).unwrap();
        assert_eq!((c.residue, &c.quotient), (3, &set(&[1])));
    }

    #[test]
    fn negative_elements_keep_residues_nonnegative() {
        let d = decompose(&set(&[-7, -2, 3]), 5).unwrap();
        assert_eq!(d.j(), 1);
        let c = d.class(1).unwrap();
        assert_eq!((c.residue, &c.quotient), (3, &set(&[-2, -1, 0])));
    }

    #[test]
    fn e_and_f_under_both_readings() {
        // X_1 = {0, 1, 2, 3} covers Z/3Z but has 4 > 3 elements
        let d = decompose(&set(&[0, 3, 6, 9, 1]), 3).unwrap();
        assert_eq!(d.f_indices(), vec![1]);
        assert_eq!(d.e_indices(), vec![2]);
        assert_eq!(
            d.f_indices_with(EfReading::Cardinality),
            Vec::<usize>::new()
        );
        assert_eq!(d.e_indices_with(EfReading::Cardinality), vec![2]);
    }

    #[test]
    fn delta_examples() {
        let a = set(&[0, 1, 2, 3]);
        let d = decompose(&a, 3).unwrap();
        assert_eq!(delta_set(&d, 1, &a).unwrap().elements, set(&[3, 12]));
        assert_eq!(delta_set(&d, 2, &a).unwrap().elements, set(&[2, 8, 11]));
        assert_eq!(delta_set(&d, 3, &a).unwrap().elements, set(&[4, 7, 13]));
        let single = set(&[2, 9, 16]);
        let d = decompose(&single, 7).unwrap();
        assert!(delta_set(&d, 1, &single).unwrap().elements.is_empty());
    }

    #[test]
    fn delta_errors() {
        let a = set(&[0, 1, 2, 3]);
        let d = decompose(&a, 3).unwrap();
        assert!(matches!(
            delta_set(&d, 0, &a),
            Err(Error::ClassIndexOutOfRange { .. })
        ));
        assert!(matches!(
            delta_set(&d, 4, &a),
            Err(Error::ClassIndexOutOfRange { .. })
        ));
        assert!(matches!(
            delta_set(&d, 1, &set(&[0, 1])),
            Err(Error::SourceMismatch)
        ));
    }
}
