//! Whole-set bounds on `|n·A + m·B|` and `|2·A + k·A|`.

use num_bigint::BigInt;
use num_integer::Integer;

use super::arith::{
    class_threshold, size_threshold, theorem_bound, unconditional_bound, Factorization,
};
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::kernel::{dilated_sum_len, KernelConfig};
use crate::report::{BoundReport, Hypothesis};
use crate::residue::{decompose, delta_sizes, residue_count};

/// `|2·A + k·A|` through the fast path, without materializing the set.
pub fn two_k_sumset_len(a: &IntSet, k: i64) -> Result<u64> {
    dilated_sum_len(a, 2, a, k, &KernelConfig::default()).map(|n| n as u64)
}

fn nonempty(a: &IntSet, op: &'static str) -> Result<()> {
    if a.is_empty() {
        Err(Error::EmptySet { op })
    } else {
        Ok(())
    }
}

fn odd_k(k: i64, what: &'static str) -> Result<u64> {
    if k < 3 {
        return Err(Error::InvalidModulus { modulus: k });
    }
    if k % 2 == 0 {
        return Err(Error::EvenModulus { k, what });
    }
    Ok(k as u64)
}

/// `|n·A + m·B| ≥ c_n(B)|A| + c_m(A)|B| − c_m(A)c_n(B)` for coprime `n, m ≥ 1`.
pub fn prop_l_check(n: i64, m: i64, a: &IntSet, b: &IntSet) -> Result<BoundReport> {
    for x in [n, m] {
        if x < 1 {
            return Err(Error::InvalidModulus { modulus: x });
        }
    }
    if n.gcd(&m) != 1 {
        return Err(Error::NotCoprime { n, m });
    }
    nonempty(a, "prop_l_check")?;
    nonempty(b, "prop_l_check")?;
    let actual = dilated_sum_len(a, n, b, m, &KernelConfig::default())? as u64;
    let cn_b = BigInt::from(residue_count(b, n)?);
    let cm_a = BigInt::from(residue_count(a, m)?);
    let bound = &cn_b * a.len() + &cm_a * b.len() - &cm_a * &cn_b;
    Ok(BoundReport::new(
        "prop_l",
        Some(m),
        a.len(),
        actual,
        bound,
        vec![],
    ))
}

/// `|n·A + m·A| ≥ 4|A| − 4` for coprime `2 ≤ n < m`.
pub fn corollary1_check(n: i64, m: i64, a: &IntSet) -> Result<BoundReport> {
    if !(2 <= n && n < m) {
        return Err(Error::InvalidForm(format!(
            "need 2 <= n < m, got n = {n}, m = {m}"
        )));
    }
    if n.gcd(&m) != 1 {
        return Err(Error::NotCoprime { n, m });
    }
    nonempty(a, "corollary1_check")?;
    let actual = dilated_sum_len(a, n, a, m, &KernelConfig::default())? as u64;
    let bound = BigInt::from(4) * a.len() - 4;
    Ok(BoundReport::new(
        "corollary1",
        Some(m),
        a.len(),
        actual,
        bound,
        vec![],
    ))
}

/// `|2·A + k·A| ≥ (k + 2)|A| − 2k` for odd `k` when `c_k(A) = k`.
pub fn corollary2_check(k: i64, a: &IntSet) -> Result<BoundReport> {
    let ku = odd_k(k, "corollary2_check")?;
    nonempty(a, "corollary2_check")?;
    let actual = two_k_sumset_len(a, k)?;
    let full = residue_count(a, k)? as u64 == ku;
    let bound = BigInt::from(ku + 2) * a.len() - 2 * ku;
    Ok(BoundReport::new(
        "corollary2",
        Some(k),
        a.len(),
        actual,
        bound,
        vec![Hypothesis::new("full_residues", full)],
    ))
}

/// `|2·A + k·A| ≥ (k + 2)|A| − k² − k + 2`.
///
/// Proven for `|A| > 8k^k` when `k` is an odd prime power or a product of two
/// distinct odd primes. The bound is evaluated for every odd `k ≥ 3`; the
/// hypotheses record whether this instance is covered.
pub fn theorem_check(a: &IntSet, k: i64) -> Result<BoundReport> {
    let ku = odd_k(k, "theorem_check")?;
    nonempty(a, "theorem_check")?;
    let fact = Factorization::of(ku);
    let name = if fact.is_odd_prime_power() {
        "theorem_prime_power"
    } else if fact.is_odd_semiprime() {
        "theorem_semiprime"
    } else {
        "theorem"
    };
    let size = a.len() as u64;
    let largest = decompose(a, k)?.class(1)?.len();
    let actual = two_k_sumset_len(a, k)?;
    Ok(BoundReport::new(
        name,
        Some(k),
        a.len(),
        actual,
        theorem_bound(ku, size),
        vec![
            Hypothesis::new("k_in_scope", fact.in_scope()),
            Hypothesis::new(
                "size_threshold_met",
                BigInt::from(size) > size_threshold(ku),
            ),
            Hypothesis::new(
                "largest_class_threshold_met",
                BigInt::from(largest) > class_threshold(ku),
            ),
        ],
    ))
}

/// `|2·A + k·A| ≥ (k + 2)|A| − 4k^(k−1)` for `k` an odd prime power or odd semiprime.
pub fn lemma_da_check(a: &IntSet, k: i64) -> Result<BoundReport> {
    let ku = odd_k(k, "lemma_da_check")?;
    if !Factorization::of(ku).in_scope() {
        return Err(Error::OutOfScope {
            k,
            what: "lemma_da_check",
        });
    }
    nonempty(a, "lemma_da_check")?;
    let actual = two_k_sumset_len(a, k)?;
    Ok(BoundReport::new(
        "lemma_da",
        Some(k),
        a.len(),
        actual,
        unconditional_bound(ku, a.len() as u64),
        vec![],
    ))
}

/// `Σ_i |Δ_ii| ≥ j(j − 1)` for the decomposition of `A` modulo `k`.
pub fn lemma_graph_check(a: &IntSet, k: i64) -> Result<BoundReport> {
    let d = decompose(a, k)?;
    let total: usize = delta_sizes(&d)?.iter().sum();
    let j = d.j() as u64;
    Ok(BoundReport::new(
        "lemma_graph",
        Some(k),
        a.len(),
        total as u64,
        BigInt::from(j * (j - 1)),
        vec![],
    ))
}
