//! Finite structures, evaluation of terms and formulas, satisfaction and
//! the similarity / ultrametric checks.

mod eval;
mod metric;
mod structure;

pub(crate) use eval::require_sentence;
pub use eval::{
    connective, delta_value, entails_over, eval, eval_sentence, eval_term, failing_sentences,
    models_theory, not_value, satisfies, Assignment, EvalError,
};
pub use metric::{
    check_similarity, check_ultrametric, distance, similarity_axioms, UltrametricReport, Violation,
};
pub(crate) use structure::tuple_index;
pub use structure::{tuples, Structure, StructureBuilder, StructureError};
