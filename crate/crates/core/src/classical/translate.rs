use super::formula::{CFormula, Sort, ValTerm};
use super::ClassicalError;
use crate::syntax::{BinOp, Formula, Quantifier};

/// A translated formula together with its distinguished value variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    pub formula: CFormula,
    pub value_var: String,
}

struct Translator {
    prefix: String,
    next: usize,
}

impl Translator {
    fn fresh(&mut self) -> String {
        let name = format!("{}{}", self.prefix, self.next);
        self.next += 1;
        name
    }

    fn tr(&mut self, phi: &Formula, g: &str) -> Result<CFormula, ClassicalError> {
        let gv = || ValTerm::var(g);
        use CFormula as C;
        Ok(match phi {
            Formula::Bot => C::val_eq(gv(), ValTerm::Zero),
            Formula::Top => C::val_eq(gv(), ValTerm::Inf),
            Formula::One => C::val_eq(gv(), ValTerm::One),
            Formula::Atom(p, args) => C::Rel(p.clone(), args.clone(), gv()),
            Formula::Binary(op, l, r) if op.is_core() => {
                let (g1, g2) = (self.fresh(), self.fresh());
                let a = self.tr(l, &g1)?;
                let b = self.tr(r, &g2)?;
                let v1 = || ValTerm::var(&g1);
                let v2 = || ValTerm::var(&g2);
                let link = match op {
                    BinOp::And => vec![
                        C::imp(C::le(v1(), v2()), C::val_eq(gv(), v1())),
                        C::imp(C::le(v2(), v1()), C::val_eq(gv(), v2())),
                    ],
                    BinOp::Imp => vec![
                        C::imp(C::le(v1(), v2()), C::val_eq(gv(), ValTerm::Inf)),
                        C::imp(C::not(C::le(v1(), v2())), C::val_eq(gv(), v2())),
                    ],
                    _ => vec![C::val_eq(gv(), ValTerm::mul(v1(), v2()))],
                };
                let mut body = vec![a, b];
                body.extend(link);
                C::exists(
                    Sort::Value,
                    g1.clone(),
                    C::exists(Sort::Value, g2.clone(), C::And(body)),
                )
            }
            Formula::Inv(inner) => {
                let g1 = self.fresh();
                let a = self.tr(inner, &g1)?;
                let link = C::val_eq(gv(), ValTerm::inv(ValTerm::var(&g1)));
                C::exists(Sort::Value, g1, C::And(vec![a, link]))
            }
            Formula::Quant(q, y, inner) => {
                let (g1, g2, g3) = (self.fresh(), self.fresh(), self.fresh());
                let a1 = self.tr(inner, &g1)?;
                let a3 = self.tr(inner, &g3)?;
                let (bound, witness) = match q {
                    Quantifier::Forall => (
                        C::le(gv(), ValTerm::var(&g1)),
                        (
                            C::le(gv(), ValTerm::var(&g2)),
                            C::le(ValTerm::var(&g3), ValTerm::var(&g2)),
                        ),
                    ),
                    Quantifier::Exists => (
                        C::le(ValTerm::var(&g1), gv()),
                        (
                            C::le(ValTerm::var(&g2), gv()),
                            C::le(ValTerm::var(&g2), ValTerm::var(&g3)),
                        ),
                    ),
                };
                let first = C::forall(
                    Sort::Object,
                    y.clone(),
                    C::forall(Sort::Value, g1, C::imp(a1, bound)),
                );
                let second = C::forall(
                    Sort::Value,
                    g2,
                    C::imp(
                        witness.0,
                        C::exists(
                            Sort::Object,
                            y.clone(),
                            C::exists(Sort::Value, g3, C::And(vec![a3, witness.1])),
                        ),
                    ),
                );
                C::And(vec![first, second])
            }
            other => return Err(ClassicalError::Derived(other.to_string())),
        })
    }
}

fn value_prefix(phi: &Formula) -> String {
    let mut names = phi.bound_vars();
    names.extend(crate::syntax::free_vars(phi));
    let mut prefix = String::from("g");
    while names.iter().any(|n| {
        n.strip_prefix(prefix.as_str())
            .is_some_and(|rest| rest.chars().all(|c| c.is_ascii_digit()))
    }) {
        prefix.push('v');
    }
    prefix
}

/// Translates a core formula `phi(x)` into a classical formula `phi_G(x, g)`
/// such that `phi_G(a, g)` holds exactly when `phi(a)` has value `g`.
/// Value variables are numbered from a single counter and never clash with
/// the object variables of `phi`.
pub fn translate(phi: &Formula) -> Result<Translation, ClassicalError> {
    let mut t = Translator {
        prefix: value_prefix(phi),
        next: 0,
    };
    let g = t.fresh();
    let formula = t.tr(phi, &g)?;
    Ok(Translation {
        formula,
        value_var: g,
    })
}

/// `exists g (phi_G(g) /\ g = inf)`, true in the classical companion
/// exactly when the sentence holds.
pub fn translate_sentence(phi: &Formula) -> Result<CFormula, ClassicalError> {
    let Translation { formula, value_var } = translate(phi)?;
    let top = CFormula::val_eq(ValTerm::var(&value_var), ValTerm::Inf);
    Ok(CFormula::exists(
        Sort::Value,
        value_var,
        CFormula::And(vec![formula, top]),
    ))
}
