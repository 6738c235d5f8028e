//! Bounds addressable by name, for sweeps and the command line.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use super::arith::Factorization;
use super::checks::{
    corollary1_check, corollary2_check, lemma_da_check, lemma_graph_check, prop_l_check,
    theorem_check,
};
use super::lemmas::{lemma_2full_check, lemma_imp2_check, lemma_imp_check, AnalysisContext};
use crate::error::{Error, Result};
use crate::intset::IntSet;
use crate::report::BoundReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundKind {
    Theorem,
    LemmaDa,
    /// The two-set proposition with `n = 2`, `m = k`, `B = A`.
    PropL,
    /// `n = 2`, `m = k`.
    Corollary1,
    Corollary2,
    Graph,
    TwoFull,
    Imp,
    Imp2,
    Chowla,
    L6,
    L8,
}

impl BoundKind {
    pub const ALL: [BoundKind; 12] = [
        BoundKind::Theorem,
        BoundKind::LemmaDa,
        BoundKind::PropL,
        BoundKind::Corollary1,
        BoundKind::Corollary2,
        BoundKind::Graph,
        BoundKind::TwoFull,
        BoundKind::Imp,
        BoundKind::Imp2,
        BoundKind::Chowla,
        BoundKind::L6,
        BoundKind::L8,
    ];

    /// Short name accepted by [`FromStr`].
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Theorem => "thm",
            BoundKind::LemmaDa => "da",
            BoundKind::PropL => "prop",
            BoundKind::Corollary1 => "cor1",
            BoundKind::Corollary2 => "cor2",
            BoundKind::Graph => "graph",
            BoundKind::TwoFull => "2full",
            BoundKind::Imp => "imp",
            BoundKind::Imp2 => "imp2",
            BoundKind::Chowla => "chowla",
            BoundKind::L6 => "l6",
            BoundKind::L8 => "l8",
        }
    }

    /// Statements about subsets of `ℤ/nℤ`; they are checked by the sweeps in
    /// [`crate::modular`] rather than on integer sets.
    pub fn is_modular(self) -> bool {
        matches!(self, BoundKind::Chowla | BoundKind::L6 | BoundKind::L8)
    }

    /// Whether [`evaluate`] accepts this `k` at all. Per-instance
    /// applicability (which classes are in `E`, and so on) is decided later.
    pub fn accepts(self, k: i64) -> bool {
        if self.is_modular() {
            return false;
        }
        if self == BoundKind::Graph {
            return k >= 2;
        }
        if k < 3 || k % 2 == 0 {
            return matches!(self, BoundKind::PropL | BoundKind::Corollary1)
                && k >= 3
                && k.gcd(&2) == 1;
        }
        let f = Factorization::of(k as u64);
        match self {
            BoundKind::LemmaDa | BoundKind::TwoFull => f.in_scope(),
            BoundKind::Imp => f.is_odd_prime_power(),
            BoundKind::Imp2 => f.is_odd_semiprime(),
            _ => true,
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "thm" | "theorem" => BoundKind::Theorem,
            "da" | "lemma_da" => BoundKind::LemmaDa,
            "prop" | "prop_l" => BoundKind::PropL,
            "cor1" | "corollary1" => BoundKind::Corollary1,
            "cor2" | "corollary2" => BoundKind::Corollary2,
            "graph" | "lemma_graph" => BoundKind::Graph,
            "2full" | "two_full" | "lemma_2full" => BoundKind::TwoFull,
            "imp" | "lemma_imp" => BoundKind::Imp,
            "imp2" | "lemma_imp2" => BoundKind::Imp2,
            "chowla" => BoundKind::Chowla,
            "l6" | "stabilizer" => BoundKind::L6,
            "l8" | "lemma_l8" => BoundKind::L8,
            _ => return Err(Error::UnknownBound(s.to_string())),
        };
        Ok(kind)
    }
}

/// One report from [`evaluate_detailed`], with the class it concerns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    /// 1-based class index for the class lemmas, `None` for whole-set bounds.
    pub class: Option<usize>,
    pub report: BoundReport,
}

/// Every report the named bound produces on `A` with parameter `k`.
///
/// Class lemmas yield one report per applicable class (and per choice of `p`
/// for semiprime `k`); classes the lemma says nothing about are skipped.
pub fn evaluate(kind: BoundKind, a: &IntSet, k: i64) -> Result<Vec<BoundReport>> {
    Ok(evaluate_detailed(kind, a, k)?
        .into_iter()
        .map(|e| e.report)
        .collect())
}

fn whole(r: Result<BoundReport>) -> Result<Vec<Evaluation>> {
    r.map(|report| {
        vec![Evaluation {
            class: None,
            report,
        }]
    })
}

fn skip_inapplicable<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::NotApplicable { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// [`evaluate`], keeping track of which class each report is about.
pub fn evaluate_detailed(kind: BoundKind, a: &IntSet, k: i64) -> Result<Vec<Evaluation>> {
    let mut out = Vec::new();
    match kind {
        BoundKind::Theorem => return whole(theorem_check(a, k)),
        BoundKind::LemmaDa => return whole(lemma_da_check(a, k)),
        BoundKind::PropL => return whole(prop_l_check(2, k, a, a)),
        BoundKind::Corollary1 => return whole(corollary1_check(2, k, a)),
        BoundKind::Corollary2 => return whole(corollary2_check(k, a)),
        BoundKind::Graph => return whole(lemma_graph_check(a, k)),
        BoundKind::TwoFull => {
            let ctx = AnalysisContext::new(a, k)?;
            for i in 1..=ctx.j() {
                out.push(Evaluation {
                    class: Some(i),
                    report: lemma_2full_check(&ctx, a, i)?,
                });
            }
        }
        BoundKind::Imp => {
            let ctx = AnalysisContext::new(a, k)?;
            for i in 1..=ctx.j() {
                for report in skip_inapplicable(lemma_imp_check(&ctx, a, i))?.unwrap_or_default() {
                    out.push(Evaluation {
                        class: Some(i),
                        report,
                    });
                }
            }
        }
        BoundKind::Imp2 => {
            for ctx in AnalysisContext::orderings(a, k)? {
                for i in 1..=ctx.j() {
                    if let Some(report) = skip_inapplicable(lemma_imp2_check(&ctx, a, i))? {
                        out.push(Evaluation {
                            class: Some(i),
                            report,
                        });
                    }
                }
            }
        }
        BoundKind::Chowla | BoundKind::L6 | BoundKind::L8 => {
            return Err(Error::not_applicable(
                "registry",
                format!("{kind} is a statement about subsets of Z/nZ; run its sweep instead"),
            ))
        }
    }
    Ok(out)
}

/// Set-level bounds that accept `k`.
pub fn applicable(k: i64) -> Vec<BoundKind> {
    BoundKind::ALL
        .into_iter()
        .filter(|b| b.accepts(k))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for b in BoundKind::ALL {
            assert_eq!(b.name().parse::<BoundKind>().unwrap(), b);
        }
        assert_eq!("theorem".parse::<BoundKind>().unwrap(), BoundKind::Theorem);
        assert!(matches!(
            "nope".parse::<BoundKind>(),
            Err(Error::UnknownBound(_))
        ));
    }

    #[test]
    fn applicability_by_k() {
        use BoundKind::*;
        assert_eq!(
            applicable(9),
            vec![Theorem, LemmaDa, PropL, Corollary1, Corollary2, Graph, TwoFull, Imp]
        );
        assert_eq!(
            applicable(15),
            vec![Theorem, LemmaDa, PropL, Corollary1, Corollary2, Graph, TwoFull, Imp2]
        );
        assert_eq!(
            applicable(45),
            vec![Theorem, PropL, Corollary1, Corollary2, Graph]
        );
        assert_eq!(applicable(4), vec![Graph]);
    }

    #[test]
    fn every_accepted_bound_evaluates() {
        let a = IntSet::from([0, 1, 2, 5, 9, 16]);
        for k in [3, 4, 5, 9, 15, 45] {
            for b in applicable(k) {
                let rs = evaluate(b, &a, k).unwrap();
                assert!(rs.iter().all(|r| !r.is_violation()), "{b} k={k}: {rs:?}");
            }
        }
        assert!(evaluate(BoundKind::Chowla, &a, 3).is_err());
    }
}
