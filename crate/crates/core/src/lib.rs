//! Exact semantics and tooling for first-order additive Goedel logic.
//!
//! Truth values live in `{0} ∪ G ∪ {inf}` for a totally ordered abelian group
//! `G` written multiplicatively. The crate provides:
//!
//! - [`group`]: the exact group backends and the extended truth-value carrier.
//! - [`syntax`]: signatures, formulas, the text grammar and derived connectives.
//! - [`semantics`]: finite structures, evaluation, satisfaction and the
//!   similarity / ultrametric checks for an equality predicate.
//! - [`classical`]: the translation into two-sorted classical logic together
//!   with a classical evaluator used to check it.
//! - [`solver`]: a grounding model finder that decides case-split linear
//!   order constraints by Fourier-Motzkin elimination.
//! - [`model_theory`]: generated subgroups, exhaustive structures, bounded
//!   elementary embeddings, equivalence and diagrams.
//! - [`random`]: seeded generators for structures and sentences.

pub mod classical;
pub mod group;
pub mod model_theory;
pub mod random;
pub mod semantics;
pub mod solver;
pub mod syntax;

pub use group::{Backend, GroupElem, GroupError, TruthValue};
pub use semantics::{Assignment, EvalError, Structure, StructureBuilder, StructureError};
pub use syntax::{BinOp, Formula, Quantifier, Signature, SyntaxError, Term};

/// Version of the text formats (formulas, signatures, structures, theories).
pub const FORMAT_VERSION: u32 = 1;
