//! Desk-scale model theory: generated subgroups and exhaustive structures,
//! embeddings checked against depth-bounded formula families, bounded
//! elementary equivalence and bounded elementary diagrams.
//!
//! The families stand in for "all formulas": a check at depth `d` covers
//! every formula of nesting depth at most `d` over variables `x1 .. xk`.

mod embedding;
mod family;
mod subgroup;

use thiserror::Error;

pub use embedding::{
    bounded_ediag, bounded_elementary_equiv, check_embedding, expand_with_constants,
    search_embeddings, separating_sentence, EmbeddingCandidate, ValueMap,
};
pub use family::{
    assignment_index, family_with_last_level, formula_family, var_name, FamilyConfig, Member,
};
pub use subgroup::{
    coprime_basis, factor_over, generated_subgroup, is_exhaustive, member, GeneratedSubgroup,
};

use crate::group::GroupError;
use crate::semantics::EvalError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelTheoryError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("structures have different signatures")]
    SignatureMismatch,
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
