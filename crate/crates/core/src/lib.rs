//! Dilated sumsets `m·A + k·A` over the integers.
//!
//! The crate computes sumsets exactly, decomposes sets into congruence
//! classes, checks lower bounds for `|2·A + k·A|` and the lemmas around them
//! on concrete instances, and searches small universes for extremal sets.
//!
//! ```
//! use dilatekit::{evaluate_form, IntSet, LinearForm};
//!
//! let a = IntSet::from([0, 1, 2, 3]);
//! let f = LinearForm::binary(2, 3)?;
//! assert_eq!(evaluate_form(&f, &a)?.len(), 14);
//! # Ok::<(), dilatekit::Error>(())
//! ```

pub mod bounds;
pub mod error;
pub mod intset;
pub mod io;
pub mod kernel;
pub mod modular;
pub mod oracle;
pub mod report;
pub mod residue;
pub mod search;

pub use bounds::{evaluate, theorem_bound, AnalysisContext, BoundKind, Factorization};
pub use error::{Error, Precondition, Result};
pub use intset::{
    dilate, dilated_sum, evaluate_form, minkowski_sum, normalize_set, validate_normalized_form,
    IntSet, LinearForm, Normalized,
};
pub use modular::{chowla_check, lemma8_check, mod_sum, stabilizer_decompose, ModSet, Stabilizer};
pub use report::{BoundReport, Hypothesis};
pub use residue::{
    decompose, delta_set, project_mod, CongruenceClass, DeltaSet, ResidueDecomposition,
};
pub use search::{
    extremal_min, hunt_counterexamples, margin_profile, Family, SearchMode, SearchResult,
    SearchSpec,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sumsets.md")]
    mod sumsets {}
    #[doc = include_str!("../../../book/src/residues.md")]
    mod residues {}
    #[doc = include_str!("../../../book/src/modular.md")]
    mod modular {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/search.md")]
    mod search {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
