//! Class-level lemmas about `Δ_ii`, checked as instance predicates.
//!
//! Each checker evaluates "hypotheses ⇒ conclusion" on one concrete set. The
//! conclusion is phrased as `actual ≥ bound` in a [`BoundReport`]; the
//! activating condition and the structural assumptions are hypothesis flags,
//! so an instance is a violation only when every flag holds and the
//! inequality fails. Instances where a threshold cannot even be formed
//! (no class `A_m`, no class `A_2`, an index outside `E`) are
//! [`Error::NotApplicable`].

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use super::arith::Factorization;
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::report::{BoundReport, Hypothesis};
use crate::residue::{decompose, delta_sizes, residue_count, EfReading, ResidueDecomposition};

/// A decomposition together with the indices the class lemmas refer to.
///
/// `m_index = min{i : p ∤ u_i}` depends on which prime plays `p`; for
/// semiprime `k` build one context per ordering with
/// [`AnalysisContext::orderings`].
#[derive(Clone, Debug)]
pub struct AnalysisContext {
    k: u64,
    factorization: Factorization,
    prime: Option<u64>,
    decomposition: ResidueDecomposition,
    deltas: Vec<usize>,
    reading: EfReading,
    m_index: Option<usize>,
    n_index: Option<usize>,
}

impl AnalysisContext {
    /// Context with `p` the smallest prime factor of `k`.
    pub fn new(a: &IntSet, k: i64) -> Result<Self> {
        let d = decompose(a, k)?;
        let fact = Factorization::of(k as u64);
        let p = fact.named_primes().first().copied();
        Self::build(d, fact, p)
    }

    /// Context with an explicit choice of `p`, which must be a prime named by
    /// the factorization of `k`.
    pub fn with_prime(a: &IntSet, k: i64, p: u64) -> Result<Self> {
        let d = decompose(a, k)?;
        let fact = Factorization::of(k as u64);
        if !fact.named_primes().contains(&p) {
            return Err(Error::OutOfScope {
                k,
                what: "AnalysisContext::with_prime",
            });
        }
        Self::build(d, fact, Some(p))
    }

    /// One context per admissible `p`: a single one for prime powers, two for
    /// semiprimes, none otherwise.
    pub fn orderings(a: &IntSet, k: i64) -> Result<Vec<Self>> {
        let d = decompose(a, k)?;
        let fact = Factorization::of(k as u64);
        let deltas = delta_sizes(&d)?;
        fact.named_primes()
            .into_iter()
            .map(|p| Self::with_deltas(d.clone(), fact, Some(p), deltas.clone()))
            .collect()
    }

    fn build(d: ResidueDecomposition, fact: Factorization, p: Option<u64>) -> Result<Self> {
        let deltas = delta_sizes(&d)?;
        Self::with_deltas(d, fact, p, deltas)
    }

    fn with_deltas(
        d: ResidueDecomposition,
        fact: Factorization,
        p: Option<u64>,
        deltas: Vec<usize>,
    ) -> Result<Self> {
        let m_index = p.and_then(|p| {
            d.classes()
                .iter()
                .position(|c| c.residue % p != 0)
                .map(|x| x + 1)
        });
        let mut ctx = AnalysisContext {
            k: d.modulus(),
            factorization: fact,
            prime: p,
            decomposition: d,
            deltas,
            reading: EfReading::Projection,
            m_index,
            n_index: None,
        };
        ctx.n_index = ctx.compute_n_index();
        Ok(ctx)
    }

    /// Switches the `E`/`F` reading; `n_index` follows.
    pub fn with_reading(mut self, reading: EfReading) -> Self {
        self.reading = reading;
        self.n_index = self.compute_n_index();
        self
    }

    fn compute_n_index(&self) -> Option<usize> {
        (1..=self.j()).find(|&i| self.in_e(i) && self.deltas[i - 1] < self.class_len(i))
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn factorization(&self) -> Factorization {
        self.factorization
    }

    pub fn prime(&self) -> Option<u64> {
        self.prime
    }

    pub fn decomposition(&self) -> &ResidueDecomposition {
        &self.decomposition
    }

    pub fn reading(&self) -> EfReading {
        self.reading
    }

    /// `min{i : p ∤ u_i}`.
    pub fn m_index(&self) -> Option<usize> {
        self.m_index
    }

    /// `min{i ∈ E : |Δ_ii| < |A_i|}`.
    pub fn n_index(&self) -> Option<usize> {
        self.n_index
    }

    pub fn j(&self) -> usize {
        self.decomposition.j()
    }

    /// `|Δ_ii|`, 1-based.
    pub fn delta_len(&self, i: usize) -> usize {
        self.deltas[i - 1]
    }

    pub fn class_len(&self, i: usize) -> usize {
        self.decomposition.classes()[i - 1].len()
    }

    pub fn residue(&self, i: usize) -> u64 {
        self.decomposition.classes()[i - 1].residue
    }

    pub fn in_e(&self, i: usize) -> bool {
        self.decomposition.in_e(i, self.reading)
    }

    pub fn e_indices(&self) -> Vec<usize> {
        self.decomposition.e_indices_with(self.reading)
    }

    fn source_gcd_one(&self) -> bool {
        self.decomposition.source().gcd() == 1
    }

    fn check_instance(&self, a: &IntSet, i: usize) -> Result<()> {
        if a != self.decomposition.source() {
            return Err(Error::SourceMismatch);
        }
        self.decomposition.class(i).map(|_| ())
    }
}

fn report(
    name: impl Into<String>,
    ctx: &AnalysisContext,
    actual: usize,
    bound: usize,
    hyps: Vec<Hypothesis>,
) -> BoundReport {
    BoundReport::new(
        name,
        Some(ctx.k as i64),
        ctx.decomposition.source().len(),
        actual as u64,
        BigInt::from(bound),
        hyps,
    )
}

/// If `|Δ_ii| < |A_i|` then `A_i` meets both parities.
///
/// Reported as `c₂(A_i) ≥ 2` with the activating condition as the hypothesis
/// `delta_below_class`.
pub fn lemma_2full_check(ctx: &AnalysisContext, a: &IntSet, i: usize) -> Result<BoundReport> {
    if !ctx.factorization.in_scope() {
        return Err(Error::OutOfScope {
            k: ctx.k as i64,
            what: "lemma_2full_check",
        });
    }
    ctx.check_instance(a, i)?;
    let class = &ctx.decomposition.classes()[i - 1];
    let parities = residue_count(&class.elements, 2)?;
    Ok(report(
        "lemma_2full",
        ctx,
        parities,
        2,
        vec![
            Hypothesis::new("gcd_one", ctx.source_gcd_one()),
            Hypothesis::new("zero_in_set", a.contains(0)),
            Hypothesis::new("delta_below_class", ctx.delta_len(i) < class.len()),
        ],
    ))
}

/// Lower bounds on `|Δ_ii|` for `i ∈ E ∖ {m}` when `k = p^α`.
///
/// Part (i): `p | u_i ⇒ |Δ_ii| ≥ |A_m|`. Part (ii): for the class `A_l` with
/// `u_l = 0`, if one exists, `p ∤ u_i ⇒ |Δ_ii| ≥ |A_l|`.
pub fn lemma_imp_check(ctx: &AnalysisContext, a: &IntSet, i: usize) -> Result<Vec<BoundReport>> {
    const LEMMA: &str = "lemma_imp";
    if !ctx.factorization.is_odd_prime_power() {
        return Err(Error::OutOfScope {
            k: ctx.k as i64,
            what: "lemma_imp_check",
        });
    }
    ctx.check_instance(a, i)?;
    let p = ctx.prime.expect("prime powers name their prime");
    let m = ctx
        .m_index
        .ok_or_else(|| Error::not_applicable(LEMMA, "every residue is divisible by p"))?;
    if i == m {
        return Err(Error::not_applicable(LEMMA, format!("i = m = {m}")));
    }
    if !ctx.in_e(i) {
        return Err(Error::not_applicable(
            LEMMA,
            format!("class {i} is not in E"),
        ));
    }
    let gcd_one = ctx.source_gcd_one();
    let p_divides = ctx.residue(i) % p == 0;
    let delta = ctx.delta_len(i);
    let mut out = vec![report(
        "lemma_imp_i",
        ctx,
        delta,
        ctx.class_len(m),
        vec![
            Hypothesis::new("gcd_one", gcd_one),
            Hypothesis::new("p_divides_u_i", p_divides),
        ],
    )];
    if let Some(l) = (1..=ctx.j()).find(|&l| ctx.residue(l) == 0) {
        out.push(report(
            "lemma_imp_ii",
            ctx,
            delta,
            ctx.class_len(l),
            vec![
                Hypothesis::new("gcd_one", gcd_one),
                Hypothesis::new("p_not_dividing_u_i", !p_divides),
            ],
        ));
    }
    Ok(out)
}

/// Which row of the semiprime case table produced the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Imp2Row {
    /// `gcd(u₂, k) = 1`, `i = 2`: `|A_1|`.
    UnitSecond,
    /// `gcd(u₂, k) = 1`, `i ≠ 2`: `|A_2|`.
    UnitOther,
    /// `gcd(u₂, k) = p`, `i = 1`: `min(|A_2|, q|A_m|)`.
    PFirst,
    /// `gcd(u₂, k) = p`, `1 < i < m`: `min(|A_1|, q|A_m|)`.
    PBeforeM,
    /// `gcd(u₂, k) = p`, `i = m`: `|A_2|`.
    PAtM,
    /// `gcd(u₂, k) = p`, `i > m`: `min(|A_1|, |A_2|, q|A_m|)`.
    PAfterM,
}

impl Imp2Row {
    pub fn label(self) -> &'static str {
        match self {
            Imp2Row::UnitSecond => "unit_u2:i=2",
            Imp2Row::UnitOther => "unit_u2:i!=2",
            Imp2Row::PFirst => "p_u2:i=1",
            Imp2Row::PBeforeM => "p_u2:1<i<m",
            Imp2Row::PAtM => "p_u2:i=m",
            Imp2Row::PAfterM => "p_u2:i>m",
        }
    }
}

/// Threshold for `|Δ_ii|`, `i ∈ E`, when `k = pq`, and the row that fired.
pub fn imp2_threshold(ctx: &AnalysisContext, i: usize) -> Result<(Imp2Row, usize)> {
    const LEMMA: &str = "lemma_imp2";
    if ctx.j() < 2 {
        return Err(Error::not_applicable(LEMMA, "fewer than two classes"));
    }
    if !ctx.in_e(i) {
        return Err(Error::not_applicable(
            LEMMA,
            format!("class {i} is not in E"),
        ));
    }
    let p = ctx.prime.expect("semiprimes name their primes");
    let q = ctx.k / p;
    let (a1, a2) = (ctx.class_len(1), ctx.class_len(2));
    let g = ctx.residue(2).gcd(&ctx.k);
    if g == 1 {
        return Ok(if i == 2 {
            (Imp2Row::UnitSecond, a1)
        } else {
            (Imp2Row::UnitOther, a2)
        });
    }
    if g != p {
        return Err(Error::not_applicable(
            LEMMA,
            format!("gcd(u_2, k) = {g} is neither 1 nor p = {p}"),
        ));
    }
    let m = ctx
        .m_index
        .ok_or_else(|| Error::not_applicable(LEMMA, "every residue is divisible by p"))?;
    let qm = (q as usize).saturating_mul(ctx.class_len(m));
    Ok(if i == 1 {
        (Imp2Row::PFirst, a2.min(qm))
    } else if i < m {
        (Imp2Row::PBeforeM, a1.min(qm))
    } else if i == m {
        (Imp2Row::PAtM, a2)
    } else {
        (Imp2Row::PAfterM, a1.min(a2).min(qm))
    })
}

/// The semiprime case table for `|Δ_ii|`, `i ∈ E`. The fired row is part of
/// the bound name.
pub fn lemma_imp2_check(ctx: &AnalysisContext, a: &IntSet, i: usize) -> Result<BoundReport> {
    if !ctx.factorization.is_odd_semiprime() {
        return Err(Error::OutOfScope {
            k: ctx.k as i64,
            what: "lemma_imp2_check",
        });
    }
    ctx.check_instance(a, i)?;
    let (row, threshold) = imp2_threshold(ctx, i)?;
    Ok(report(
        format!("lemma_imp2[{}]", row.label()),
        ctx,
        ctx.delta_len(i),
        threshold,
        vec![Hypothesis::new("gcd_one", ctx.source_gcd_one())],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IntSet {
        IntSet::from_vec(v.to_vec())
    }

    #[test]
    fn context_indices() {
        let a = set(&[0, 1, 3, 6, 9]);
        let ctx = AnalysisContext::new(&a, 3).unwrap();
        assert_eq!(ctx.prime(), Some(3));
        assert_eq!(ctx.m_index(), Some(2));
        assert_eq!(ctx.delta_len(1), 1);
        assert_eq!(ctx.class_len(1), 4);
        // class 1 has X = {0,1,2,3}, full mod 3, so it is in F
        assert_eq!(ctx.e_indices(), vec![2]);
        assert_eq!(ctx.n_index(), None);
        let lit = ctx.with_reading(EfReading::Cardinality);
        assert_eq!(lit.e_indices(), vec![2]);
    }

    #[test]
    fn two_full_examples() {
        let a = set(&[0, 1, 3, 6, 9]);
        let ctx = AnalysisContext::new(&a, 3).unwrap();
        let r = lemma_2full_check(&ctx, &a, 1).unwrap();
        assert_eq!(r.hypothesis("delta_below_class"), Some(true));
        assert_eq!(r.actual, 2);
        assert!(r.satisfied && r.hypotheses_met());

        let a = set(&[0, 1, 2, 3]);
        let ctx = AnalysisContext::new(&a, 3).unwrap();
        let r = lemma_2full_check(&ctx, &a, 1).unwrap();
        assert_eq!(r.hypothesis("delta_below_class"), Some(false));
        assert!(!r.is_violation());

        // A = {0, 1}, k = 3: A_1 = {0}, Δ_11 = (0 + 3·{0,1}) ∖ {0} = {3}
        let a = set(&[0, 1]);
        let ctx = AnalysisContext::new(&a, 3).unwrap();
        assert_eq!(ctx.delta_len(1), 1);
        let r = lemma_2full_check(&ctx, &a, 1).unwrap();
        assert_eq!(r.hypothesis("delta_below_class"), Some(false));
    }

    #[test]
    fn imp_examples() {
        let a = set(&[0, 1, 3, 6, 9]);
        let ctx = AnalysisContext::new(&a, 3).unwrap();
        let rs = lemma_imp_check(&ctx, &a, 1);
        // class 1 is in F under the projection reading
        assert!(matches!(rs, Err(Error::NotApplicable { .. })));
        let lit = ctx.clone().with_reading(EfReading::Cardinality);
        assert!(lemma_imp_check(&lit, &a, 1).is_err());

        let a = set(&[0, 1, 2, 3]);
        let ctx = AnalysisContext::new(&a, 3).unwrap();
        assert_eq!(ctx.m_index(), Some(2));
        let rs = lemma_imp_check(&ctx, &a, 3).unwrap();
        let part_ii = rs.iter().find(|r| r.bound_name == "lemma_imp_ii").unwrap();
        assert_eq!(
            (part_ii.actual, part_ii.bound.clone()),
            (3, BigInt::from(2))
        );
        assert!(part_ii.hypotheses_met() && part_ii.satisfied);
        let part_i = rs.iter().find(|r| r.bound_name == "lemma_imp_i").unwrap();
        assert_eq!(part_i.hypothesis("p_divides_u_i"), Some(false));
        assert!(matches!(
            lemma_imp_check(&ctx, &a, 2),
            Err(Error::NotApplicable { .. })
        ));

        let a = set(&[0, 3, 9]);
        let ctx = AnalysisContext::new(&a, 3).unwrap();
        assert_eq!(ctx.m_index(), None);
        assert!(matches!(
            lemma_imp_check(&ctx, &a, 1),
            Err(Error::NotApplicable { .. })
        ));
    }

    #[test]
    fn imp_part_i_fires_when_class_one_is_in_e() {
        // A_1 = {0, 3}: X_1 = {0, 1} misses a residue mod 3, so 1 ∈ E; u_1 = 0
        let a = set(&[0, 3, 1]);
        let ctx = AnalysisContext::new(&a, 3).unwrap();
        let rs = lemma_imp_check(&ctx, &a, 1).unwrap();
        let part_i = &rs[0];
        assert!(part_i.hypotheses_met());
        let naive = {
            let d = ctx.decomposition();
            crate::residue::delta_set(d, 1, &a).unwrap().elements.len()
        };
        assert_eq!(part_i.actual as usize, naive);
        assert!(part_i.satisfied);
    }

    #[test]
    fn imp2_example() {
        let a = set(&[0, 1, 2, 30, 45]);
        let ctxs = AnalysisContext::orderings(&a, 15).unwrap();
        assert_eq!(ctxs.len(), 2);
        assert_eq!(ctxs[0].prime(), Some(3));
        assert_eq!(ctxs[1].prime(), Some(5));
        for ctx in &ctxs {
            for i in 1..=ctx.j() {
                let r = lemma_imp2_check(ctx, &a, i).unwrap();
                // u_2 = 1 is a unit, so case (i) applies
                assert!(r.bound_name.starts_with("lemma_imp2[unit_u2"));
                let naive = crate::residue::delta_set(ctx.decomposition(), i, &a)
                    .unwrap()
                    .elements
                    .len();
                assert_eq!(r.actual as usize, naive);
                assert!(r.satisfied, "{r:?}");
            }
        }
    }

    #[test]
    fn imp2_not_applicable_cases() {
        let a = set(&[0, 15, 30]);
        let ctx = AnalysisContext::new(&a, 15).unwrap();
        assert!(matches!(
            lemma_imp2_check(&ctx, &a, 1),
            Err(Error::NotApplicable { .. })
        ));
        // u_2 = 5 shares the factor 5 = q with k when p = 3
        let a = set(&[0, 15, 30, 5, 20, 1]);
        let ctx = AnalysisContext::with_prime(&a, 15, 3).unwrap();
        assert!(matches!(
            lemma_imp2_check(&ctx, &a, 2),
            Err(Error::NotApplicable { .. })
        ));
        let ctx = AnalysisContext::with_prime(&a, 15, 5).unwrap();
        assert_eq!(ctx.m_index(), Some(3));
        let r = lemma_imp2_check(&ctx, &a, 2).unwrap();
        assert_eq!(r.bound_name, "lemma_imp2[p_u2:1<i<m]");
        // min(|A_1|, q|A_m|) = min(3, 3·1)
        assert_eq!(r.bound, BigInt::from(3));
        assert!(AnalysisContext::with_prime(&a, 15, 7).is_err());
        assert!(matches!(
            lemma_imp_check(&ctx, &a, 2),
            Err(Error::OutOfScope { .. })
        ));
    }
}
