//! Lower bounds on `|2·A + k·A|` and the class lemmas behind them.
//!
//! Every check returns a [`BoundReport`](crate::BoundReport). Bounds are
//! always computed, including outside their proven range; hypothesis flags
//! say whether the instance is one the statement actually covers.

pub mod arith;
pub mod checks;
pub mod lemmas;
pub mod registry;

pub use arith::{
    class_threshold, size_threshold, theorem_bound, unconditional_bound, Factorization,
};
pub use checks::{
    corollary1_check, corollary2_check, lemma_da_check, lemma_graph_check, prop_l_check,
    theorem_check, two_k_sumset_len,
};
pub use lemmas::{
    imp2_threshold, lemma_2full_check, lemma_imp2_check, lemma_imp_check, AnalysisContext, Imp2Row,
};
pub use registry::{applicable, evaluate, evaluate_detailed, BoundKind, Evaluation};
