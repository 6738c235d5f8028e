use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

/// A named hypothesis of a bound and whether the instance meets it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub met: bool,
}

impl Hypothesis {
    pub fn new(name: impl Into<String>, met: bool) -> Self {
        Hypothesis {
            name: name.into(),
            met,
        }
    }
}

/// Actual cardinality of one instance compared against a lower bound.
///
/// `satisfied ⇔ actual ≥ bound` and `margin = actual − bound`, both enforced
/// by [`BoundReport::new`]. Hypotheses never gate the comparison; they are
/// recorded so callers can tell guaranteed instances from the rest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub k: Option<i64>,
    pub size: usize,
    pub actual: u64,
    #[serde(with = "bigint_json")]
    pub bound: BigInt,
    #[serde(with = "bigint_json")]
    pub margin: BigInt,
    pub hypotheses: Vec<Hypothesis>,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(
        bound_name: impl Into<String>,
        k: Option<i64>,
        size: usize,
        actual: u64,
        bound: BigInt,
        hypotheses: Vec<Hypothesis>,
    ) -> Self {
        let margin = BigInt::from(actual) - &bound;
        BoundReport {
            bound_name: bound_name.into(),
            k,
            size,
            actual,
            satisfied: !margin.is_negative(),
            bound,
            margin,
            hypotheses,
        }
    }

    pub fn hypotheses_met(&self) -> bool {
        self.hypotheses.iter().all(|h| h.met)
    }

    /// Every hypothesis holds and the inequality fails.
    pub fn is_violation(&self) -> bool {
        self.hypotheses_met() && !self.satisfied
    }

    /// The bound is nonpositive, so any instance satisfies it.
    pub fn is_trivial(&self) -> bool {
        !self.bound.is_positive()
    }

    pub fn hypothesis(&self, name: &str) -> Option<bool> {
        self.hypotheses
            .iter()
            .find(|h| h.name == name)
            .map(|h| h.met)
    }
}

/// Exact integers as JSON numbers of any length.
pub(crate) mod bigint_json {
    use std::str::FromStr;

    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        let n = serde_json::Number::from_str(&v.to_string()).map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        BigInt::from_str(&n.to_string()).map_err(D::Error::custom)
    }
}

pub(crate) mod opt_bigint_json {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => super::bigint_json::serialize(x, s),
            None => s.serialize_none(),
        }
    }
}
