//! Extremal search and counterexample hunting over finite families of sets.
//!
//! Exhaustive runs split the candidate space into disjoint lexicographic
//! chunks keyed by the smallest elements; chunk results are collected in
//! chunk order and folded sequentially, so the output does not depend on the
//! number of worker threads. Random runs derive every sample from
//! `(seed, size, index)` alone.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{evaluate_detailed, theorem_bound, BoundKind};
use crate::error::{Error, Result};
use crate::intset::{normalize_set, IntSet};
use crate::kernel::{dilated_sum_len, KernelConfig};
use crate::modular::{chowla_sweep, lemma8_sweep, stabilizer_sweep, SweepSummary};
use crate::oracle;
use crate::report::{opt_bigint_json, BoundReport};
use crate::residue::decompose;

pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const DEFAULT_WITNESS_CAP: usize = 64;

/// Structured set families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `{0, …, n−1}`.
    Ap,
    /// `k·[0, ⌈n/2⌉) ∪ (k·[0, ⌊n/2⌋) + 1)`.
    TwoAp,
    /// `{0} ∪ {2^i : 0 ≤ i < n−1}`.
    Geometric,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Ap, Family::TwoAp, Family::Geometric];

    pub fn name(self) -> &'static str {
        match self {
            Family::Ap => "ap",
            Family::TwoAp => "two_ap",
            Family::Geometric => "geometric",
        }
    }

    /// The member of size `n` for dilation parameter `k`.
    pub fn member(self, k: i64, n: usize) -> Result<IntSet> {
        if n == 0 {
            return Err(Error::InvalidSpec("family members need n >= 1".into()));
        }
        match self {
            Family::Ap => Ok(IntSet::interval(0, n as i64 - 1)),
            Family::TwoAp => {
                if k < 2 {
                    return Err(Error::InvalidSpec(format!("two_ap needs k >= 2, got {k}")));
                }
                let evens = (0..n.div_ceil(2) as i64).map(|x| x.checked_mul(k));
                let odds =
                    (0..(n / 2) as i64).map(|x| x.checked_mul(k).and_then(|y| y.checked_add(1)));
                evens
                    .chain(odds)
                    .map(|x| x.ok_or(Error::overflow("Family::member")))
                    .collect::<Result<Vec<_>>>()
                    .map(IntSet::from_vec)
            }
            Family::Geometric => {
                if n > 63 {
                    return Err(Error::overflow("Family::member"));
                }
                Ok(std::iter::once(0)
                    .chain((0..n as u32 - 1).map(|i| 1i64 << i))
                    .collect())
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ap" => Ok(Family::Ap),
            "two_ap" | "two-ap" | "2ap" => Ok(Family::TwoAp),
            "geometric" | "geo" => Ok(Family::Geometric),
            _ => Err(Error::InvalidSpec(format!("unknown family '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchMode {
    Exhaustive,
    /// `samples` sets per size, uniform among the subsets of `[0, N)` of that size.
    Random {
        samples: u64,
        seed: u64,
    },
    /// Every [`Family`] member, plus the two-AP variants with offsets `2..k`.
    Structured,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchSpec {
    pub k: i64,
    pub min_size: usize,
    pub max_size: usize,
    /// `N`: sets are drawn from `[0, N)`. Structured mode ignores it.
    pub universe: u64,
    pub mode: SearchMode,
    pub budget: u64,
    pub witness_cap: usize,
    /// Exhaustive extremal search only: enumerate the normalized
    /// representatives (sets containing 0 with gcd 1) instead of every subset.
    pub normalized: bool,
}

impl SearchSpec {
    pub fn new(k: i64, set_size: usize, universe: u64, mode: SearchMode) -> Self {
        SearchSpec {
            k,
            min_size: set_size,
            max_size: set_size,
            universe,
            mode,
            budget: DEFAULT_BUDGET,
            witness_cap: DEFAULT_WITNESS_CAP,
            normalized: true,
        }
    }

    pub fn with_sizes(mut self, min_size: usize, max_size: usize) -> Self {
        self.min_size = min_size;
        self.max_size = max_size;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_witness_cap(mut self, cap: usize) -> Self {
        self.witness_cap = cap;
        self
    }

    pub fn raw(mut self) -> Self {
        self.normalized = false;
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.k == 0 {
            return bad("k must be nonzero".into());
        }
        if self.min_size == 0 || self.min_size > self.max_size {
            return bad(format!(
                "bad size range {}..={}",
                self.min_size, self.max_size
            ));
        }
        if self.mode == SearchMode::Structured {
            return Ok(());
        }
        if self.max_size as u64 > self.universe {
            return bad(format!(
                "size {} exceeds universe {}",
                self.max_size, self.universe
            ));
        }
        // every value 2a + kb must fit in i64
        let span = (self.k.unsigned_abs() as u128 + 2) * self.universe as u128;
        if span > i64::MAX as u128 {
            return Err(Error::overflow("SearchSpec"));
        }
        Ok(())
    }

    fn n_universe(&self) -> i64 {
        self.universe as i64
    }

    fn check_budget(&self, normalized: bool) -> Result<()> {
        let n = self.universe;
        let count: u128 = (self.min_size..=self.max_size)
            .map(|s| {
                if normalized {
                    binomial(n - 1, s as u64 - 1)
                } else {
                    binomial(n, s as u64)
                }
            })
            .fold(0u128, u128::saturating_add);
        if count <= self.budget as u128 {
            return Ok(());
        }
        let candidates = match (normalized, self.min_size == self.max_size) {
            (false, true) => format!("C({n}, {}) = {count}", self.max_size),
            (true, true) => format!("C({}, {}) = {count}", n - 1, self.max_size - 1),
            _ => count.to_string(),
        };
        Err(Error::BudgetExceeded {
            universe: n,
            size: self.max_size,
            candidates,
            budget: self.budget,
        })
    }
}

/// `C(n, r)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut c: u128 = 1;
    for i in 0..r {
        // c·(n−i) is divisible by i+1 since c = C(n, i)
        match c.checked_mul((n - i) as u128) {
            Some(x) => c = x / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    c
}

/// A batch of exhaustive candidates: `prefix` followed by every increasing
/// `rest`-tuple drawn from `(prefix.last, N)`.
#[derive(Clone, Debug)]
struct Chunk {
    prefix: Vec<i64>,
    rest: usize,
}

fn chunks(spec: &SearchSpec, normalized: bool) -> Vec<Chunk> {
    let n = spec.n_universe();
    let mut out = Vec::new();
    for size in spec.min_size..=spec.max_size {
        if normalized {
            if size == 1 {
                out.push(Chunk {
                    prefix: vec![0],
                    rest: 0,
                });
                continue;
            }
            for c in 1..=n - (size as i64 - 1) {
                out.push(Chunk {
                    prefix: vec![0, c],
                    rest: size - 2,
                });
            }
        } else {
            for c in 0..=n - size as i64 {
                out.push(Chunk {
                    prefix: vec![c],
                    rest: size - 1,
                });
            }
        }
    }
    out
}

fn for_each_in_chunk(chunk: &Chunk, n: i64, mut f: impl FnMut(&[i64])) {
    let base = chunk.prefix.len();
    let len = base + chunk.rest;
    let start = *chunk.prefix.last().expect("chunks have a prefix");
    if start + chunk.rest as i64 >= n {
        return;
    }
    let mut buf = chunk.prefix.clone();
    buf.extend((1..=chunk.rest as i64).map(|d| start + d));
    loop {
        f(&buf);
        let Some(p) = (base..len).rev().find(|&p| buf[p] < n - (len - p) as i64) else {
            return;
        };
        buf[p] += 1;
        for q in p + 1..len {
            buf[q] = buf[q - 1] + 1;
        }
    }
}

fn gcd_is_one(a: &[i64]) -> bool {
    use num_integer::Integer;
    a.len() == 1 || a.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

/// `|2·A + k·A|` for a small sorted slice, sorting into `scratch`.
fn two_k_count(a: &[i64], k: i64, scratch: &mut Vec<i64>) -> Result<u64> {
    if a.len() > 64 {
        let set = IntSet::from_sorted_unchecked(a.to_vec());
        return dilated_sum_len(&set, 2, &set, k, &KernelConfig::default()).map(|n| n as u64);
    }
    scratch.clear();
    for &x in a {
        for &y in a {
            scratch.push(2 * x + k * y);
        }
    }
    scratch.sort_unstable();
    scratch.dedup();
    Ok(scratch.len() as u64)
}

/// The `i`-th random set of size `n` for `seed`. Independent of which other
/// sizes or indices are drawn.
pub fn random_set(seed: u64, universe: u64, n: usize, i: u64) -> Result<IntSet> {
    let len = usize::try_from(universe).map_err(|_| Error::overflow("random_set"))?;
    if n > len {
        return Err(Error::InvalidSpec(format!(
            "size {n} exceeds universe {universe}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) ^ i);
    Ok(sample(&mut rng, len, n)
        .into_iter()
        .map(|x| x as i64)
        .collect())
}

fn structured_members(k: i64, n: usize) -> Result<Vec<IntSet>> {
    let mut out = vec![Family::Ap.member(k, n)?];
    if k >= 2 {
        out.push(Family::TwoAp.member(k, n)?);
        let kk = k.min(64);
        for t in 2..kk {
            let evens = (0..n.div_ceil(2) as i64).map(|x| x * k);
            let odds = (0..(n / 2) as i64).map(|x| x * k + t);
            out.push(evens.chain(odds).collect());
        }
    }
    if n <= 63 {
        out.push(Family::Geometric.member(k, n)?);
    }
    Ok(out)
}

/// Minimizers collected so far: sorted, deduplicated, at most `cap + 1` kept
/// so that truncation is visible.
#[derive(Clone, Debug)]
struct Best {
    examined: u64,
    minimum: u64,
    witnesses: Vec<Vec<i64>>,
}

impl Best {
    fn empty() -> Self {
        Best {
            examined: 0,
            minimum: u64::MAX,
            witnesses: Vec::new(),
        }
    }

    fn offer(&mut self, value: u64, witness: impl FnOnce() -> Vec<i64>, cap: usize) {
        self.examined += 1;
        if value > self.minimum {
            return;
        }
        if value < self.minimum {
            self.minimum = value;
            self.witnesses.clear();
        }
        if self.witnesses.len() <= cap {
            self.witnesses.push(witness());
        } else {
            let w = witness();
            if &w < self.witnesses.last().expect("nonempty") {
                self.witnesses.push(w);
            }
        }
        if self.witnesses.len() > 4 * (cap + 1) {
            self.tidy(cap);
        }
    }

    fn tidy(&mut self, cap: usize) {
        self.witnesses.sort_unstable();
        self.witnesses.dedup();
        self.witnesses.truncate(cap + 1);
    }

    fn merge(mut self, other: Best, cap: usize) -> Best {
        self.examined += other.examined;
        if other.minimum < self.minimum {
            self.minimum = other.minimum;
            self.witnesses = other.witnesses;
        } else if other.minimum == self.minimum {
            self.witnesses.extend(other.witnesses);
        }
        self.tidy(cap);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub spec: SearchSpec,
    /// Smallest `|2·A + k·A|` seen.
    pub minimum: u64,
    /// Minimizers in normalized form, sorted, at most `witness_cap`.
    pub witnesses: Vec<IntSet>,
    pub witnesses_truncated: bool,
    pub instances_examined: u64,
    /// Whole-set bounds accepting `k`, evaluated on the first witness.
    pub bound_comparison: Vec<BoundReport>,
}

/// Minimum of `|2·A + k·A|` over the sets of one size described by `spec`.
pub fn extremal_min(spec: &SearchSpec) -> Result<SearchResult> {
    spec.validate()?;
    if spec.min_size != spec.max_size {
        return Err(Error::InvalidSpec(
            "extremal search takes a single set size".into(),
        ));
    }
    let (k, cap, size) = (spec.k, spec.witness_cap, spec.min_size);
    let normalize = |a: &[i64]| -> Vec<i64> {
        normalize_set(&IntSet::from_sorted_unchecked(a.to_vec()))
            .expect("nonempty")
            .set
            .into_vec()
    };
    let best = match spec.mode {
        SearchMode::Exhaustive => {
            spec.check_budget(spec.normalized)?;
            let n = spec.n_universe();
            let parts = chunks(spec, spec.normalized)
                .par_iter()
                .map(|chunk| -> Result<Best> {
                    let mut best = Best::empty();
                    let mut scratch = Vec::new();
                    let mut err = None;
                    for_each_in_chunk(chunk, n, |a| {
                        if err.is_some() || (spec.normalized && !gcd_is_one(a)) {
                            return;
                        }
                        match two_k_count(a, k, &mut scratch) {
                            Ok(v) if spec.normalized => best.offer(v, || a.to_vec(), cap),
                            Ok(v) => best.offer(v, || normalize(a), cap),
                            Err(e) => err = Some(e),
                        }
                    });
                    err.map_or(Ok(best), Err)
                })
                .collect::<Result<Vec<_>>>()?;
            parts
                .into_iter()
                .fold(Best::empty(), |acc, b| acc.merge(b, cap))
        }
        SearchMode::Random { samples, seed } => {
            let parts = (0..samples)
                .into_par_iter()
                .map(|i| -> Result<Best> {
                    let a = random_set(seed, spec.universe, size, i)?;
                    let v = two_k_count(a.as_slice(), k, &mut Vec::new())?;
                    let mut best = Best::empty();
                    best.offer(v, || normalize(a.as_slice()), cap);
                    Ok(best)
                })
                .collect::<Result<Vec<_>>>()?;
            parts
                .into_iter()
                .fold(Best::empty(), |acc, b| acc.merge(b, cap))
        }
        SearchMode::Structured => {
            let mut best = Best::empty();
            for a in structured_members(k, size)? {
                let v = two_k_count(a.as_slice(), k, &mut Vec::new())?;
                best.offer(v, || normalize(a.as_slice()), cap);
            }
            best.tidy(cap);
            best
        }
    };
    if best.examined == 0 {
        return Err(Error::InvalidSpec("no candidate sets".into()));
    }
    let truncated = best.witnesses.len() > cap;
    let witnesses: Vec<IntSet> = best
        .witnesses
        .into_iter()
        .take(cap)
        .map(IntSet::from_sorted_unchecked)
        .collect();
    let bound_comparison = match witnesses.first() {
        Some(w) => witness_bounds(w, k)?,
        None => Vec::new(),
    };
    Ok(SearchResult {
        spec: spec.clone(),
        minimum: best.minimum,
        witnesses,
        witnesses_truncated: truncated,
        instances_examined: best.examined,
        bound_comparison,
    })
}

/// The whole-set bounds (theorem, da, prop, corollaries) that accept `k`,
/// evaluated on `a`.
pub fn witness_bounds(a: &IntSet, k: i64) -> Result<Vec<BoundReport>> {
    use BoundKind::*;
    let mut out = Vec::new();
    for kind in [Theorem, LemmaDa, PropL, Corollary1, Corollary2] {
        if kind.accepts(k) {
            out.extend(evaluate_detailed(kind, a, k)?.into_iter().map(|e| e.report));
        }
    }
    Ok(out)
}

/// One failing instance found by [`hunt_counterexamples`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub set: IntSet,
    pub class: Option<usize>,
    pub report: BoundReport,
    /// `actual` recomputed with the naive oracle.
    pub oracle_actual: u64,
    pub confirmed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HuntReport {
    pub bound: String,
    pub spec: SearchSpec,
    pub instances: u64,
    pub reports: u64,
    pub hypotheses_met: u64,
    /// Hypotheses met and inequality failed.
    pub violation_count: u64,
    pub violations: Vec<Finding>,
    /// Inequality failed on an instance the statement does not cover.
    pub unguaranteed_failure_count: u64,
    pub unguaranteed_failures: Vec<Finding>,
    /// Every failure agreed with the naive oracle.
    pub all_confirmed: bool,
    #[serde(with = "opt_bigint_json")]
    pub min_margin: Option<BigInt>,
    #[serde(with = "opt_bigint_json")]
    pub min_margin_hypotheses_met: Option<BigInt>,
}

impl HuntReport {
    fn empty(bound: BoundKind, spec: &SearchSpec) -> Self {
        HuntReport {
            bound: bound.name().to_string(),
            spec: spec.clone(),
            instances: 0,
            reports: 0,
            hypotheses_met: 0,
            violation_count: 0,
            violations: Vec::new(),
            unguaranteed_failure_count: 0,
            unguaranteed_failures: Vec::new(),
            all_confirmed: true,
            min_margin: None,
            min_margin_hypotheses_met: None,
        }
    }

    fn merge(mut self, other: HuntReport, cap: usize) -> Self {
        fn min_opt(a: Option<BigInt>, b: Option<BigInt>) -> Option<BigInt> {
            match (a, b) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, None) => x,
                (None, y) => y,
            }
        }
        self.instances += other.instances;
        self.reports += other.reports;
        self.hypotheses_met += other.hypotheses_met;
        self.violation_count += other.violation_count;
        self.unguaranteed_failure_count += other.unguaranteed_failure_count;
        self.violations.extend(other.violations);
        self.violations.truncate(cap);
        self.unguaranteed_failures
            .extend(other.unguaranteed_failures);
        self.unguaranteed_failures.truncate(cap);
        self.all_confirmed &= other.all_confirmed;
        self.min_margin = min_opt(self.min_margin, other.min_margin);
        self.min_margin_hypotheses_met = min_opt(
            self.min_margin_hypotheses_met,
            other.min_margin_hypotheses_met,
        );
        self
    }

    fn absorb(&mut self, kind: BoundKind, a: &IntSet, cap: usize) -> Result<()> {
        let k = self.spec.k;
        self.instances += 1;
        for e in evaluate_detailed(kind, a, k)? {
            let r = e.report;
            self.reports += 1;
            let met = r.hypotheses_met();
            if met {
                self.hypotheses_met += 1;
                if self
                    .min_margin_hypotheses_met
                    .as_ref()
                    .is_none_or(|m| r.margin < *m)
                {
                    self.min_margin_hypotheses_met = Some(r.margin.clone());
                }
            }
            if self.min_margin.as_ref().is_none_or(|m| r.margin < *m) {
                self.min_margin = Some(r.margin.clone());
            }
            if r.satisfied {
                continue;
            }
            let oracle_actual = oracle_actual(kind, a, k, e.class)?;
            let confirmed = oracle_actual == r.actual;
            self.all_confirmed &= confirmed;
            let (count, list) = if met {
                (&mut self.violation_count, &mut self.violations)
            } else {
                (
                    &mut self.unguaranteed_failure_count,
                    &mut self.unguaranteed_failures,
                )
            };
            *count += 1;
            if list.len() < cap {
                list.push(Finding {
                    set: a.clone(),
                    class: e.class,
                    report: r,
                    oracle_actual,
                    confirmed,
                });
            }
        }
        Ok(())
    }
}

fn oracle_delta_len(a: &IntSet, k: i64, i: usize) -> Result<u64> {
    let d = decompose(a, k)?;
    let ai = &d.class(i)?.elements;
    let whole = oracle::dilated_sum(ai, 2, a, k)?;
    let own = oracle::dilated_sum(ai, 2, ai, k)?;
    Ok(whole.difference(&own).len() as u64)
}

/// The `actual` of a report, recomputed without the fast kernel.
fn oracle_actual(kind: BoundKind, a: &IntSet, k: i64, class: Option<usize>) -> Result<u64> {
    use BoundKind::*;
    match (kind, class) {
        (Theorem | LemmaDa | PropL | Corollary1 | Corollary2, _) => {
            Ok(oracle::dilated_sum(a, 2, a, k)?.len() as u64)
        }
        (Graph, _) => {
            let j = decompose(a, k)?.j();
            (1..=j).map(|i| oracle_delta_len(a, k, i)).sum()
        }
        (TwoFull, Some(i)) => {
            let d = decompose(a, k)?;
            let ai = &d.class(i)?.elements;
            let even = ai.iter().any(|x| x % 2 == 0);
            let odd = ai.iter().any(|x| x % 2 != 0);
            Ok(even as u64 + odd as u64)
        }
        (Imp | Imp2, Some(i)) => oracle_delta_len(a, k, i),
        _ => Err(Error::UnknownBound(kind.name().to_string())),
    }
}

/// Result of a hunt: set-level bounds produce a [`HuntReport`], statements
/// about `ℤ/nℤ` delegate to their exhaustive sweeps.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum HuntOutcome {
    Sets(HuntReport),
    Modular(SweepSummary),
}

impl HuntOutcome {
    /// Hypothesis-met violations (for sweeps, every recorded violation).
    pub fn violation_count(&self) -> u64 {
        match self {
            HuntOutcome::Sets(r) => r.violation_count,
            HuntOutcome::Modular(s) => s.violations.len() as u64,
        }
    }
}

/// Looks for instances where `bound` fails.
///
/// Exhaustive mode walks every subset of `[0, N)` with size in range (not
/// just normalized ones: the lemma hypotheses `0 ∈ A` and `gcd(A) = 1` are
/// not translation invariant). For `chowla` and `l6` the sweep runs over all
/// moduli up to `k`; for `l8` over modulus `k`.
pub fn hunt_counterexamples(spec: &SearchSpec, bound: BoundKind) -> Result<HuntOutcome> {
    match bound {
        BoundKind::Chowla => return Ok(HuntOutcome::Modular(chowla_sweep(spec.k as u64)?)),
        BoundKind::L6 => return Ok(HuntOutcome::Modular(stabilizer_sweep(spec.k as u64)?)),
        BoundKind::L8 => return Ok(HuntOutcome::Modular(lemma8_sweep(&[spec.k as u64])?)),
        _ => {}
    }
    spec.validate()?;
    if !bound.accepts(spec.k) {
        return Err(Error::InvalidSpec(format!(
            "bound {bound} does not apply to k = {}",
            spec.k
        )));
    }
    let cap = spec.witness_cap;
    let fresh = || HuntReport::empty(bound, spec);
    let parts: Vec<HuntReport> = match spec.mode {
        SearchMode::Exhaustive => {
            spec.check_budget(false)?;
            let n = spec.n_universe();
            chunks(spec, false)
                .par_iter()
                .map(|chunk| -> Result<HuntReport> {
                    let mut rep = fresh();
                    let mut res = Ok(());
                    for_each_in_chunk(chunk, n, |a| {
                        if res.is_ok() {
                            res =
                                rep.absorb(bound, &IntSet::from_sorted_unchecked(a.to_vec()), cap);
                        }
                    });
                    res.map(|_| rep)
                })
                .collect::<Result<_>>()?
        }
        SearchMode::Random { samples, seed } => {
            let jobs: Vec<(usize, u64)> = (spec.min_size..=spec.max_size)
                .flat_map(|s| (0..samples).map(move |i| (s, i)))
                .collect();
            jobs.par_iter()
                .map(|&(size, i)| -> Result<HuntReport> {
                    let mut rep = fresh();
                    rep.absorb(bound, &random_set(seed, spec.universe, size, i)?, cap)?;
                    Ok(rep)
                })
                .collect::<Result<_>>()?
        }
        SearchMode::Structured => {
            let mut rep = fresh();
            for size in spec.min_size..=spec.max_size {
                for a in structured_members(spec.k, size)? {
                    rep.absorb(bound, &a, cap)?;
                }
            }
            vec![rep]
        }
    };
    Ok(HuntOutcome::Sets(
        parts.into_iter().fold(fresh(), |acc, r| acc.merge(r, cap)),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub k: i64,
    pub family: Family,
    pub n: usize,
    pub actual: u64,
    #[serde(with = "crate::report::bigint_json")]
    pub bound: BigInt,
    #[serde(with = "crate::report::bigint_json")]
    pub margin: BigInt,
}

/// `|2·A + k·A|` along a family against `(k + 2)n − k² − k + 2`.
pub fn margin_profile(
    k: i64,
    min_n: usize,
    max_n: usize,
    family: Family,
) -> Result<Vec<ProfileRow>> {
    if k < 2 {
        return Err(Error::InvalidModulus { modulus: k });
    }
    if min_n == 0 || min_n > max_n {
        return Err(Error::InvalidSpec(format!(
            "bad size range {min_n}..={max_n}"
        )));
    }
    (min_n..=max_n)
        .into_par_iter()
        .map(|n| {
            let a = family.member(k, n)?;
            let actual = dilated_sum_len(&a, 2, &a, k, &KernelConfig::default())? as u64;
            let bound = theorem_bound(k as u64, n as u64);
            Ok(ProfileRow {
                k,
                family,
                n,
                actual,
                margin: BigInt::from(actual) - &bound,
                bound,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IntSet {
        IntSet::from_vec(v.to_vec())
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(10, 4), 210);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(1000, 500), u128::MAX);
    }

    #[test]
    fn chunks_cover_every_subset_once() {
        for (n, s) in [(6u64, 3usize), (7, 1), (5, 5), (9, 4)] {
            let spec = SearchSpec::new(3, s, n, SearchMode::Exhaustive);
            let mut raw = Vec::new();
            for c in chunks(&spec, false) {
                for_each_in_chunk(&c, n as i64, |a| raw.push(a.to_vec()));
            }
            assert_eq!(raw.len() as u128, binomial(n, s as u64));
            raw.sort();
            raw.dedup();
            assert_eq!(raw.len() as u128, binomial(n, s as u64));
            let mut norm = 0;
            for c in chunks(&spec, true) {
                for_each_in_chunk(&c, n as i64, |a| {
                    assert_eq!(a[0], 0);
                    norm += 1;
                });
            }
            assert_eq!(norm as u128, binomial(n - 1, s as u64 - 1));
        }
    }

    #[test]
    fn extremal_small() {
        let r = extremal_min(&SearchSpec::new(3, 3, 6, SearchMode::Exhaustive)).unwrap();
        assert_eq!(r.minimum, 8);
        assert!(r.witnesses.contains(&set(&[0, 1, 3])));
        let cor1 = r
            .bound_comparison
            .iter()
            .find(|b| b.bound_name == "corollary1")
            .unwrap();
        assert_eq!((cor1.actual, cor1.bound.clone()), (8, BigInt::from(8)));

        let r = extremal_min(&SearchSpec::new(3, 1, 50, SearchMode::Exhaustive)).unwrap();
        assert_eq!((r.minimum, r.witnesses.clone()), (1, vec![set(&[0])]));
    }

    #[test]
    fn normalized_and_raw_agree() {
        for (k, n, u) in [(3, 4, 10), (5, 3, 9), (-2, 3, 8)] {
            let norm = extremal_min(&SearchSpec::new(k, n, u, SearchMode::Exhaustive)).unwrap();
            let raw =
                extremal_min(&SearchSpec::new(k, n, u, SearchMode::Exhaustive).raw()).unwrap();
            assert_eq!(norm.minimum, raw.minimum);
            assert_eq!(norm.witnesses, raw.witnesses);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let spec = SearchSpec::new(3, 10, 40, SearchMode::Exhaustive)
            .with_budget(1000)
            .raw();
        let err = extremal_min(&spec).unwrap_err();
        assert!(err.to_string().contains("C(40, 10) = 847660528"), "{err}");
    }

    #[test]
    fn random_sets_are_reproducible() {
        let a = random_set(42, 1000, 20, 3).unwrap();
        assert_eq!(a, random_set(42, 1000, 20, 3).unwrap());
        assert_eq!(a.len(), 20);
        assert!(a.iter().all(|x| (0..1000).contains(&x)));
        assert_ne!(a, random_set(42, 1000, 20, 4).unwrap());
        assert_ne!(a, random_set(43, 1000, 20, 3).unwrap());
        let spec = SearchSpec::new(
            3,
            20,
            1000,
            SearchMode::Random {
                samples: 30,
                seed: 9,
            },
        );
        let x = serde_json::to_string(&extremal_min(&spec).unwrap()).unwrap();
        let y = serde_json::to_string(&extremal_min(&spec).unwrap()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn families() {
        assert_eq!(Family::TwoAp.member(3, 5).unwrap(), set(&[0, 1, 3, 4, 6]));
        assert_eq!(Family::Geometric.member(3, 4).unwrap(), set(&[0, 1, 2, 4]));
        assert_eq!(Family::Ap.member(3, 3).unwrap(), set(&[0, 1, 2]));
        assert!(Family::Geometric.member(3, 64).is_err());
    }

    #[test]
    fn profile_ap() {
        // AP: (k + 2)n − 2k, the full-residue equality case
        let rows = margin_profile(3, 10, 10, Family::Ap).unwrap();
        assert_eq!(
            (
                rows[0].actual,
                rows[0].bound.clone(),
                rows[0].margin.clone()
            ),
            (44, 40.into(), 4.into())
        );
        let rows = margin_profile(9, 100, 100, Family::Ap).unwrap();
        assert_eq!((rows[0].actual, rows[0].bound.clone()), (1082, 1012.into()));
    }

    #[test]
    fn hunt_graph_small() {
        let spec = SearchSpec::new(4, 1, 9, SearchMode::Exhaustive).with_sizes(1, 9);
        let HuntOutcome::Sets(r) = hunt_counterexamples(&spec, BoundKind::Graph).unwrap() else {
            panic!()
        };
        assert_eq!(r.instances, 511);
        assert_eq!(r.violation_count, 0);
        assert!(r.min_margin.unwrap() >= BigInt::from(0));
    }

    #[test]
    fn hunt_reports_unguaranteed_failures() {
        // prop_l at k = 3 holds everywhere; the theorem bound fails nowhere
        // either, so use lemma 2-full, whose activating condition is a flag
        let spec = SearchSpec::new(3, 1, 10, SearchMode::Exhaustive).with_sizes(1, 10);
        let HuntOutcome::Sets(r) = hunt_counterexamples(&spec, BoundKind::TwoFull).unwrap() else {
            panic!()
        };
        assert_eq!(r.violation_count, 0);
        assert!(r.unguaranteed_failure_count > 0);
        assert!(r.all_confirmed);
        assert!(r
            .unguaranteed_failures
            .iter()
            .all(|f| f.confirmed && f.oracle_actual == 1));
    }

    #[test]
    fn hunt_delegates_modular() {
        let spec = SearchSpec::new(6, 1, 1, SearchMode::Exhaustive);
        let out = hunt_counterexamples(&spec, BoundKind::Chowla).unwrap();
        assert!(matches!(out, HuntOutcome::Modular(ref s) if s.lemma == "chowla"));
        assert_eq!(out.violation_count(), 0);
        let spec = SearchSpec::new(4, 1, 5, SearchMode::Exhaustive);
        assert!(hunt_counterexamples(&spec, BoundKind::Theorem).is_err());
    }
}
