//! Translation of formulas into a two-sorted classical language (objects and
//! truth values) and a classical evaluator used to check that the
//! translation is faithful on finite structures.

mod eval;
mod formula;
mod structure;
mod translate;

use thiserror::Error;

pub use eval::{eval_classical, ClassicalAssignment};
pub use formula::{CFormula, Sort, ValTerm};
pub use structure::{to_classical, ClassicalStructure};
pub use translate::{translate, translate_sentence, Translation};

use crate::semantics::{eval, satisfies, tuples, Assignment, EvalError, Structure};
use crate::syntax::{expand_derived, free_vars, Formula};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassicalError {
    #[error("derived connective in `{0}`; expand it first")]
    Derived(String),
    #[error("variable `{0}` is used with both sorts")]
    Sort(String),
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("value {0} is not in the value sort")]
    ValueOutsideSort(String),
    #[error(
        "closure exhausted: subformula value {value} lies outside the value sort at bound {bound}"
    )]
    ClosureExhausted { value: String, bound: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Default closure bound for checking `phi`: twice the depth of its
/// expansion.
pub fn default_bound(phi: &Formula) -> usize {
    2 * expand_derived(phi).depth()
}

fn subformulas<'a>(phi: &'a Formula, out: &mut Vec<&'a Formula>) {
    out.push(phi);
    match phi {
        Formula::Binary(_, l, r) => {
            subformulas(l, out);
            subformulas(r, out);
        }
        Formula::Inv(g)
        | Formula::Not(g)
        | Formula::Power(g, _)
        | Formula::Delta(g)
        | Formula::Quant(_, _, g) => subformulas(g, out),
        _ => {}
    }
}

/// Fails with [`ClassicalError::ClosureExhausted`] unless every value taken
/// by every subformula of `phi`, under every assignment of its free
/// variables, lies in the value sort of `c`. When this holds the value
/// quantifiers of the translation see every witness they need.
pub fn ensure_closure(
    phi: &Formula,
    m: &Structure,
    c: &ClassicalStructure,
) -> Result<(), ClassicalError> {
    let mut subs = Vec::new();
    subformulas(phi, &mut subs);
    for sub in subs {
        let vars: Vec<String> = free_vars(sub).into_iter().collect();
        for tuple in tuples(m.size(), vars.len()) {
            let mut v = Assignment::new();
            for (x, &a) in vars.iter().zip(&tuple) {
                v.set(x, a);
            }
            let value = eval(sub, m, &v)?;
            if !c.contains_value(&value) {
                return Err(ClassicalError::ClosureExhausted {
                    value: value.to_string(),
                    bound: c.bound(),
                });
            }
        }
    }
    Ok(())
}

/// Outcome of comparing `m |= phi` with its classical counterpart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationCheck {
    pub source: bool,
    pub classical: bool,
    pub bound: usize,
    pub value_sort_size: usize,
}

impl TranslationCheck {
    pub fn agrees(&self) -> bool {
        self.source == self.classical
    }
}

/// Compares `m |= phi` with `m_G |= exists g (phi_G(g) /\ g = inf)`.
/// Derived connectives are expanded first. `bound` defaults to
/// [`default_bound`].
pub fn check_translation(
    phi: &Formula,
    m: &Structure,
    bound: Option<usize>,
) -> Result<TranslationCheck, ClassicalError> {
    crate::semantics::require_sentence(phi)?;
    let core = expand_derived(phi);
    let bound = bound.unwrap_or_else(|| 2 * core.depth());
    let c = to_classical(m, bound);
    ensure_closure(&core, m, &c)?;
    let source = satisfies(m, phi)?;
    let classical = eval_classical(&translate_sentence(&core)?, &c, &ClassicalAssignment::new())?;
    Ok(TranslationCheck {
        source,
        classical,
        bound,
        value_sort_size: c.values().len(),
    })
}
