//! Naive pairwise enumeration.
//!
//! Shares no code with [`crate::kernel`]: every sum is formed explicitly with
//! checked arithmetic and collected into an ordered set. Used as the reference
//! that the fast path is tested against and to re-confirm reported failures.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::intset::{IntSet, LinearForm};

/// `u·A + v·B` by enumerating all `|A|·|B|` pairs.
pub fn dilated_sum(a: &IntSet, u: i64, b: &IntSet, v: i64) -> Result<IntSet> {
    let mut out = BTreeSet::new();
    for x in a {
        let ux = x.checked_mul(u).ok_or(Error::overflow("dilate"))?;
        for y in b {
            let vy = y.checked_mul(v).ok_or(Error::overflow("dilate"))?;
            out.insert(ux.checked_add(vy).ok_or(Error::overflow("sum"))?);
        }
    }
    Ok(out.into_iter().collect())
}

/// `u₁·A + … + uₙ·A`, folding one coefficient at a time.
pub fn evaluate_form(f: &LinearForm, a: &IntSet) -> Result<IntSet> {
    if a.is_empty() {
        return Err(Error::EmptySet {
            op: "evaluate_form",
        });
    }
    let mut acc: BTreeSet<i64> = BTreeSet::from([0]);
    for &u in f.coefficients() {
        let mut next = BTreeSet::new();
        for &s in &acc {
            for x in a {
                let ux = x.checked_mul(u).ok_or(Error::overflow("dilate"))?;
                next.insert(s.checked_add(ux).ok_or(Error::overflow("sum"))?);
            }
        }
        acc = next;
    }
    Ok(acc.into_iter().collect())
}
