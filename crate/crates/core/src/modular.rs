//! Subsets of `ℤ/nℤ` and executable forms of three addition lemmas over them:
//! Chowla's bound, the stabilizer structure lemma and the mixed-coprimality
//! bound for composite moduli.
//!
//! Checkers return a typed [`Precondition`] error whenever an instance misses
//! a hypothesis, so sweeps can count vacuous instances separately.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use serde_json::json;

use crate::error::{Error, Precondition, Result};
use crate::report::{BoundReport, Hypothesis};

/// A subset of `ℤ/nℤ` stored as a bit mask.
///
/// Moduli up to 64 fit a single word and take the rotation fast path in
/// [`mod_sum`]. Modulus 1 is allowed for the coset index sets produced by
/// [`stabilizer_decompose`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModSet {
    modulus: u64,
    words: Vec<u64>,
}

impl ModSet {
    pub fn empty(modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        ModSet {
            modulus,
            words: vec![0; modulus.div_ceil(64) as usize],
        }
    }

    pub fn full(modulus: u64) -> Self {
        let mut s = ModSet::empty(modulus);
        for r in 0..modulus {
            s.insert(r);
        }
        s
    }

    /// Reduces every value into `[0, n)`; negative values wrap.
    pub fn from_residues<I: IntoIterator<Item = i64>>(modulus: u64, values: I) -> Self {
        let mut s = ModSet::empty(modulus);
        for v in values {
            s.insert(v.rem_euclid(modulus as i64) as u64);
        }
        s
    }

    /// Builds a set from the low `n` bits of `mask` (`n ≤ 64`).
    pub fn from_mask(modulus: u64, mask: u64) -> Self {
        assert!((1..=64).contains(&modulus));
        ModSet {
            modulus,
            words: vec![mask & low_mask(modulus)],
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The bit mask when the modulus is at most 64.
    pub fn mask(&self) -> Option<u64> {
        (self.modulus <= 64).then(|| self.words[0])
    }

    pub fn insert(&mut self, r: u64) {
        assert!(
            r < self.modulus,
            "residue {r} out of range for modulus {}",
            self.modulus
        );
        self.words[(r / 64) as usize] |= 1 << (r % 64);
    }

    pub fn contains(&self, r: u64) -> bool {
        r < self.modulus && self.words[(r / 64) as usize] >> (r % 64) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() as u64 == self.modulus
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.modulus).filter(|&r| self.contains(r))
    }

    /// `A + α`.
    pub fn shift(&self, alpha: i64) -> ModSet {
        let n = self.modulus;
        let s = alpha.rem_euclid(n as i64) as u64;
        match self.mask() {
            Some(m) => ModSet::from_mask(n, rotate(m, s, n)),
            None => {
                let mut out = ModSet::empty(n);
                for r in self.members() {
                    out.insert((r + s) % n);
                }
                out
            }
        }
    }
}

fn low_mask(n: u64) -> u64 {
    if n >= 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

// Cyclic left rotation of the low n bits by s < n.
fn rotate(m: u64, s: u64, n: u64) -> u64 {
    if s == 0 {
        return m;
    }
    ((m << s) | (m >> (n - s))) & low_mask(n)
}

impl fmt::Debug for ModSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} mod {}",
            self.members().collect::<Vec<_>>(),
            self.modulus
        )
    }
}

impl Serialize for ModSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            modulus: u64,
            members: Vec<u64>,
        }
        Repr {
            modulus: self.modulus,
            members: self.members().collect(),
        }
        .serialize(s)
    }
}

/// `{a + b mod n : a ∈ A, b ∈ B}`.
pub fn mod_sum(a: &ModSet, b: &ModSet) -> Result<ModSet> {
    let n = a.modulus;
    if b.modulus != n {
        return Err(Error::ModulusMismatch {
            left: n,
            right: b.modulus,
        });
    }
    if let (Some(ma), Some(mb)) = (a.mask(), b.mask()) {
        let mut acc = 0u64;
        let mut rest = mb;
        while rest != 0 {
            let s = rest.trailing_zeros() as u64;
            rest &= rest - 1;
            acc |= rotate(ma, s, n);
        }
        return Ok(ModSet::from_mask(n, acc));
    }
    let mut out = ModSet::empty(n);
    for x in a.members() {
        for y in b.members() {
            out.insert((x + y) % n);
        }
    }
    Ok(out)
}

fn min_bound(n: u64, a: &ModSet, b: &ModSet) -> u64 {
    n.min((a.len() + b.len()) as u64 - 1)
}

/// `|A + B| ≥ min(n, |A| + |B| − 1)` when `0 ∈ B` and `B ∖ {0}` consists of units.
pub fn chowla_check(a: &ModSet, b: &ModSet) -> Result<BoundReport> {
    const LEMMA: &str = "chowla";
    let n = a.modulus;
    if b.modulus != n {
        return Err(Error::ModulusMismatch {
            left: n,
            right: b.modulus,
        });
    }
    if n < 2 {
        return Err(Error::precondition(
            LEMMA,
            Precondition::ModulusTooSmall { modulus: n },
        ));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::precondition(LEMMA, Precondition::EmptyOperand));
    }
    if !b.contains(0) {
        return Err(Error::precondition(LEMMA, Precondition::ZeroNotInB));
    }
    if let Some(bad) = b.members().find(|&x| x != 0 && x.gcd(&n) != 1) {
        return Err(Error::precondition(
            LEMMA,
            Precondition::NotCoprime {
                element: bad,
                modulus: n,
            },
        ));
    }
    let actual = mod_sum(a, b)?.len() as u64;
    Ok(BoundReport::new(
        LEMMA,
        Some(n as i64),
        a.len(),
        actual,
        BigInt::from(min_bound(n, a, b)),
        vec![
            Hypothesis::new("zero_in_b", true),
            Hypothesis::new("b_nonzero_units", true),
        ],
    ))
}

/// `A` as a union of cosets of the subgroup `d·ℤ/nℤ`, `d = gcd(n, α)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stabilizer {
    pub d: u64,
    /// Coset representatives `I ⊆ ℤ/dℤ`.
    pub cosets: ModSet,
}

impl Stabilizer {
    /// Number of elements in each coset, `n/d`.
    pub fn coset_size(&self, n: u64) -> u64 {
        n / self.d
    }

    /// `⋃_{β∈I} (d·{0, …, n/d − 1} + β)` inside `ℤ/nℤ`.
    pub fn reconstruct(&self, n: u64) -> ModSet {
        let mut out = ModSet::empty(n);
        for beta in self.cosets.members() {
            for t in 0..n / self.d {
                out.insert(self.d * t + beta);
            }
        }
        out
    }
}

/// If `A + α = A`, returns the coset structure of `A`; otherwise `None`.
pub fn stabilizer_decompose(a: &ModSet, alpha: i64) -> Result<Option<Stabilizer>> {
    const LEMMA: &str = "stabilizer";
    let n = a.modulus;
    let s = alpha.rem_euclid(n as i64) as u64;
    if s == 0 {
        return Err(Error::precondition(LEMMA, Precondition::ShiftIsZero));
    }
    if a.is_empty() {
        return Err(Error::precondition(LEMMA, Precondition::EmptyOperand));
    }
    if a.shift(s as i64) != *a {
        return Ok(None);
    }
    let d = n.gcd(&s);
    let mut cosets = ModSet::empty(d);
    for beta in (0..d).filter(|&b| a.contains(b)) {
        cosets.insert(beta);
    }
    let st = Stabilizer { d, cosets };
    debug_assert_eq!(st.reconstruct(n), *a);
    debug_assert_eq!(a.len() as u64 % (n / d), 0);
    Ok(Some(st))
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|p| p * p <= n).all(|p| n % p != 0)
}

/// `|A + B| ≥ min(k, |A| + |B| − 1)` for composite `k > 2`, `gcd(q, k) ≠ 1`,
/// `0 ∈ B ⊆ {0, q̄} ∪ units` and `|A + {0, q̄}| ≥ |A| + 1`.
pub fn lemma8_check(a: &ModSet, q: i64, b: &ModSet) -> Result<BoundReport> {
    const LEMMA: &str = "lemma_l8";
    let k = a.modulus;
    let fail = |v| Err(Error::precondition(LEMMA, v));
    if b.modulus != k {
        return Err(Error::ModulusMismatch {
            left: k,
            right: b.modulus,
        });
    }
    if k <= 2 {
        return fail(Precondition::ModulusTooSmall { modulus: k });
    }
    if is_prime(k) {
        return fail(Precondition::ModulusPrime { modulus: k });
    }
    let qbar = q.rem_euclid(k as i64) as u64;
    if qbar.gcd(&k) == 1 {
        return fail(Precondition::QCoprime {
            q: qbar,
            modulus: k,
        });
    }
    if a.is_empty() || b.is_empty() {
        return fail(Precondition::EmptyOperand);
    }
    if !b.contains(0) {
        return fail(Precondition::ZeroNotInB);
    }
    if let Some(bad) = b.members().find(|&x| x != 0 && x != qbar && x.gcd(&k) != 1) {
        return fail(Precondition::ElementNotAllowed { element: bad });
    }
    let pair = ModSet::from_residues(k, [0, qbar as i64]);
    let grown = mod_sum(a, &pair)?.len();
    if grown < a.len() + 1 {
        return fail(Precondition::NoGrowth {
            size: a.len(),
            grown,
        });
    }
    let actual = mod_sum(a, b)?.len() as u64;
    Ok(BoundReport::new(
        LEMMA,
        Some(k as i64),
        a.len(),
        actual,
        BigInt::from(min_bound(k, a, b)),
        vec![
            Hypothesis::new("k_composite", true),
            Hypothesis::new("q_not_unit", true),
            Hypothesis::new("b_allowed", true),
            Hypothesis::new("a_grows_by_q", true),
        ],
    ))
}

/// Aggregate of an exhaustive lemma sweep. Violations are sorted so the
/// summary does not depend on how the work was split.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepSummary {
    pub lemma: String,
    pub instances_checked: u64,
    pub vacuous: u64,
    pub violations: Vec<serde_json::Value>,
}

impl SweepSummary {
    fn merge(mut self, other: SweepSummary) -> SweepSummary {
        self.instances_checked += other.instances_checked;
        self.vacuous += other.vacuous;
        self.violations.extend(other.violations);
        self
    }

    fn finish(mut self, lemma: &str) -> SweepSummary {
        self.lemma = lemma.to_string();
        self.violations.sort_by_key(|v| v.to_string());
        self
    }
}

fn members(s: &ModSet) -> Vec<u64> {
    s.members().collect()
}

/// Every nonempty `A, B ⊆ ℤ/nℤ` for `2 ≤ n ≤ max_n`; instances failing the
/// preconditions count as vacuous.
pub fn chowla_sweep(max_n: u64) -> Result<SweepSummary> {
    if !(2..=20).contains(&max_n) {
        return Err(Error::InvalidModulus {
            modulus: max_n as i64,
        });
    }
    let jobs: Vec<(u64, u64)> = (2..=max_n)
        .flat_map(|n| (1..1u64 << n).map(move |am| (n, am)))
        .collect();
    let summary = jobs
        .into_par_iter()
        .map(|(n, am)| -> Result<SweepSummary> {
            let a = ModSet::from_mask(n, am);
            let mut s = SweepSummary::default();
            for bm in 1..1u64 << n {
                let b = ModSet::from_mask(n, bm);
                s.instances_checked += 1;
                match chowla_check(&a, &b) {
                    Ok(r) if !r.satisfied => s.violations.push(json!({
                        "n": n, "a": members(&a), "b": members(&b),
                        "actual": r.actual, "bound": r.bound.to_string(),
                    })),
                    Ok(_) => {}
                    Err(Error::Precondition { .. }) => s.vacuous += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(s)
        })
        .try_reduce(SweepSummary::default, |x, y| Ok(x.merge(y)))?;
    Ok(summary.finish("chowla"))
}

/// For every nonempty `A ⊆ ℤ/nℤ` and `α ≢ 0`, checks that `A + α = A` holds
/// exactly when `A` is closed under adding `d = gcd(n, α)` with `n/d | |A|`,
/// and that the returned coset structure rebuilds `A`.
pub fn stabilizer_sweep(max_n: u64) -> Result<SweepSummary> {
    if !(2..=20).contains(&max_n) {
        return Err(Error::InvalidModulus {
            modulus: max_n as i64,
        });
    }
    let jobs: Vec<(u64, u64)> = (2..=max_n)
        .flat_map(|n| (1..1u64 << n).map(move |am| (n, am)))
        .collect();
    let summary = jobs
        .into_par_iter()
        .map(|(n, am)| -> Result<SweepSummary> {
            let a = ModSet::from_mask(n, am);
            let mut s = SweepSummary::default();
            for alpha in 1..n {
                s.instances_checked += 1;
                let d = n.gcd(&alpha);
                let closed = a.members().all(|x| a.contains((x + d) % n));
                let rhs = closed && a.len() as u64 % (n / d) == 0;
                let got = stabilizer_decompose(&a, alpha as i64)?;
                let ok = match &got {
                    Some(st) => rhs && st.d == d && st.reconstruct(n) == a,
                    None => !rhs,
                };
                if !ok {
                    s.violations.push(json!({
                        "n": n, "a": members(&a), "alpha": alpha,
                        "decomposed": got.is_some(), "coset_union": rhs,
                    }));
                }
            }
            Ok(s)
        })
        .try_reduce(SweepSummary::default, |x, y| Ok(x.merge(y)))?;
    Ok(summary.finish("stabilizer"))
}

/// For each composite modulus `k`, every nonempty `A`, every `q` with
/// `gcd(q, k) ≠ 1` and every `B ∋ 0` drawn from `{0, q̄} ∪ units`.
pub fn lemma8_sweep(moduli: &[u64]) -> Result<SweepSummary> {
    for &k in moduli {
        if k <= 2 || k > 20 || is_prime(k) {
            return Err(Error::InvalidModulus { modulus: k as i64 });
        }
    }
    let jobs: Vec<(u64, u64)> = moduli
        .iter()
        .flat_map(|&k| (1..1u64 << k).map(move |am| (k, am)))
        .collect();
    let summary = jobs
        .into_par_iter()
        .map(|(k, am)| -> Result<SweepSummary> {
            let a = ModSet::from_mask(k, am);
            let mut s = SweepSummary::default();
            for q in (0..k).filter(|q| q.gcd(&k) != 1) {
                let allowed: Vec<u64> = (1..k).filter(|&x| x == q || x.gcd(&k) == 1).collect();
                for sub in 0..1u64 << allowed.len() {
                    let mut b = ModSet::from_mask(k, 1);
                    for (i, &x) in allowed.iter().enumerate() {
                        if sub >> i & 1 == 1 {
                            b.insert(x);
                        }
                    }
                    s.instances_checked += 1;
                    match lemma8_check(&a, q as i64, &b) {
                        Ok(r) if !r.satisfied => s.violations.push(json!({
                            "k": k, "a": members(&a), "q": q, "b": members(&b),
                            "actual": r.actual, "bound": r.bound.to_string(),
                        })),
                        Ok(_) => {}
                        Err(Error::Precondition { .. }) => s.vacuous += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
            Ok(s)
        })
        .try_reduce(SweepSummary::default, |x, y| Ok(x.merge(y)))?;
    Ok(summary.finish("lemma_l8"))
}
