use std::collections::BTreeMap;

use thiserror::Error;

use super::structure::Structure;
use crate::group::{
    tv_inv, tv_max, tv_min, tv_mul, tv_pow, tv_resid, Backend, GroupError, TruthValue,
};
use crate::syntax::{free_vars, BinOp, Formula, Quantifier, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("symbol `{0}` is not interpreted in the structure (or has a different arity)")]
    UnknownSymbol(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("not a sentence: free variables {0:?}")]
    NotASentence(Vec<String>),
    #[error("the signature declares no equality predicate")]
    NoEquality,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Variables mapped to universe indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    map: BTreeMap<String, usize>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: impl Into<String>, element: usize) -> Self {
        self.map.insert(var.into(), element);
        self
    }

    /// Builds an assignment from `(variable, element name)` pairs.
    pub fn from_names(m: &Structure, pairs: &[(&str, &str)]) -> Result<Self, EvalError> {
        let mut a = Assignment::new();
        for (var, name) in pairs {
            let idx = m
                .element(name)
                .ok_or_else(|| EvalError::UnknownElement(name.to_string()))?;
            a.map.insert(var.to_string(), idx);
        }
        Ok(a)
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.map.get(var).copied()
    }

    pub fn set(&mut self, var: &str, element: usize) -> Option<usize> {
        self.map.insert(var.to_string(), element)
    }

    fn restore(&mut self, var: &str, previous: Option<usize>) {
        match previous {
            Some(p) => self.map.insert(var.to_string(), p),
            None => self.map.remove(var),
        };
    }
}

pub fn eval_term(t: &Term, m: &Structure, v: &Assignment) -> Result<usize, EvalError> {
    match t {
        Term::Var(x) => v
            .get(x)
            .ok_or_else(|| EvalError::UnboundVariable(x.clone())),
        Term::App(f, args) => {
            let vals = args
                .iter()
                .map(|a| eval_term(a, m, v))
                .collect::<Result<Vec<_>, _>>()?;
            m.function_value(f, &vals)
                .ok_or_else(|| EvalError::UnknownSymbol(f.clone()))
        }
    }
}

/// `~a`: `inf` when `a = 0`, otherwise `0`.
pub fn not_value(a: &TruthValue) -> TruthValue {
    if a.is_zero() {
        TruthValue::Inf
    } else {
        TruthValue::Zero
    }
}

/// `delta(a)`: `inf` when `a = inf`, otherwise `0`.
pub fn delta_value(a: &TruthValue) -> TruthValue {
    if a.is_inf() {
        TruthValue::Inf
    } else {
        TruthValue::Zero
    }
}

/// Value of `a op b` for every binary connective, derived ones by their
/// case tables:
///
/// ```text
/// a \/ b   max(a, b)
/// a <-> b  min(a -> b, b -> a)
/// a => b   inf if a < b, else b
/// a ==> b  inf if a < b; 0 if a = b = inf; else b
/// a ->l b  inf if a <= b, else b * a^-1
/// ```
pub fn connective(
    op: BinOp,
    a: &TruthValue,
    b: &TruthValue,
    backend: Backend,
) -> Result<TruthValue, GroupError> {
    use TruthValue::{Inf, Zero};
    Ok(match op {
        BinOp::And => tv_min(a, b)?,
        BinOp::Or => tv_max(a, b)?,
        BinOp::Imp => tv_resid(a, b)?,
        BinOp::Tensor => tv_mul(a, b, backend)?,
        BinOp::Iff => tv_min(&tv_resid(a, b)?, &tv_resid(b, a)?)?,
        BinOp::DArrow => {
            if crate::group::tv_compare(a, b)?.is_lt() {
                Inf
            } else {
                b.clone()
            }
        }
        BinOp::DDArrow => {
            if crate::group::tv_compare(a, b)?.is_lt() {
                Inf
            } else if a.is_inf() && b.is_inf() {
                Zero
            } else {
                b.clone()
            }
        }
        BinOp::LukImp => {
            if crate::group::tv_compare(a, b)?.is_le() {
                Inf
            } else {
                tv_mul(b, &tv_inv(a), backend)?
            }
        }
    })
}

fn eval_in(phi: &Formula, m: &Structure, v: &mut Assignment) -> Result<TruthValue, EvalError> {
    let backend = m.backend();
    Ok(match phi {
        Formula::Bot => TruthValue::Zero,
        Formula::Top => TruthValue::Inf,
        Formula::One => TruthValue::one(backend),
        Formula::Atom(p, args) => {
            let vals = args
                .iter()
                .map(|a| eval_term(a, m, v))
                .collect::<Result<Vec<_>, _>>()?;
            m.predicate_value(p, &vals)
                .cloned()
                .ok_or_else(|| EvalError::UnknownSymbol(p.clone()))?
        }
        Formula::Binary(op, l, r) => {
            let a = eval_in(l, m, v)?;
            let b = eval_in(r, m, v)?;
            connective(*op, &a, &b, backend)?
        }
        Formula::Inv(g) => tv_inv(&eval_in(g, m, v)?),
        Formula::Not(g) => not_value(&eval_in(g, m, v)?),
        Formula::Delta(g) => delta_value(&eval_in(g, m, v)?),
        Formula::Power(g, n) => tv_pow(&eval_in(g, m, v)?, *n),
        Formula::Quant(q, x, body) => {
            let (stop, better): (TruthValue, fn(&TruthValue, &TruthValue) -> bool) = match q {
                Quantifier::Forall => (TruthValue::Zero, |new, old| new < old),
                Quantifier::Exists => (TruthValue::Inf, |new, old| new > old),
            };
            let previous = v.get(x);
            let mut acc: Option<TruthValue> = None;
            for b in 0..m.size() {
                v.set(x, b);
                let val = match eval_in(body, m, v) {
                    Ok(val) => val,
                    Err(e) => {
                        v.restore(x, previous);
                        return Err(e);
                    }
                };
                let done = val == stop;
                if acc.as_ref().is_none_or(|old| better(&val, old)) {
                    acc = Some(val);
                }
                if done {
                    break;
                }
            }
            v.restore(x, previous);
            acc.expect("nonempty universe")
        }
    })
}

/// Truth value of `phi` in `m` under `v`. Quantifiers range over the whole
/// (finite) universe: `forall` is the minimum and `exists` the maximum.
pub fn eval(phi: &Formula, m: &Structure, v: &Assignment) -> Result<TruthValue, EvalError> {
    let mut v = v.clone();
    eval_in(phi, m, &mut v)
}

pub fn eval_sentence(phi: &Formula, m: &Structure) -> Result<TruthValue, EvalError> {
    require_sentence(phi)?;
    eval(phi, m, &Assignment::new())
}

pub(crate) fn require_sentence(phi: &Formula) -> Result<(), EvalError> {
    let fv = free_vars(phi);
    if fv.is_empty() {
        Ok(())
    } else {
        Err(EvalError::NotASentence(fv.into_iter().collect()))
    }
}

/// `m |= phi` iff `phi` evaluates to `inf`.
pub fn satisfies(m: &Structure, phi: &Formula) -> Result<bool, EvalError> {
    Ok(eval_sentence(phi, m)?.is_inf())
}

pub fn models_theory(m: &Structure, theory: &[Formula]) -> Result<bool, EvalError> {
    for phi in theory {
        if !satisfies(m, phi)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Indices of the sentences of `theory` that `m` does not satisfy.
pub fn failing_sentences(m: &Structure, theory: &[Formula]) -> Result<Vec<usize>, EvalError> {
    let mut out = Vec::new();
    for (i, phi) in theory.iter().enumerate() {
        if !satisfies(m, phi)? {
            out.push(i);
        }
    }
    Ok(out)
}

/// Entailment relative to a finite pool: every member of `pool` that models
/// `theory` also satisfies `chi`.
pub fn entails_over(
    pool: &[Structure],
    theory: &[Formula],
    chi: &Formula,
) -> Result<bool, EvalError> {
    require_sentence(chi)?;
    for m in pool {
        if models_theory(m, theory)? && !satisfies(m, chi)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{expand_derived, parse};

    fn tv(s: &str) -> TruthValue {
        s.parse().unwrap()
    }

    fn sample() -> Structure {
        Structure::parse(
            "backend rat\nuniverse m1 m2\nfn f m1 -> m2\nfn f m2 -> m1\nfn c -> m2\n\
             pred P m1 = 2\npred P m2 = 3\npred Q = 3\npred R = inf\n",
        )
        .unwrap()
    }

    #[test]
    fn term_examples() {
        let m = sample();
        let v = Assignment::new().with("x", 0);
        assert_eq!(eval_term(&Term::var("x"), &m, &v), Ok(0));
        let fc = Term::app("f", vec![Term::constant("c")]);
        assert_eq!(eval_term(&fc, &m, &v), Ok(0));
        let g = Term::app("f", vec![Term::var("y")]);
        assert_eq!(
            eval_term(&g, &m, &v),
            Err(EvalError::UnboundVariable("y".into()))
        );
    }

    #[test]
    fn formula_examples() {
        let m = sample();
        let sig = m.signature().clone();
        let val = |s: &str| eval_sentence(&parse(s, &sig).unwrap(), &m).unwrap();
        assert_eq!(val("forall x. P(x)"), tv("2"));
        assert_eq!(val("exists x. P(x)"), tv("3"));
        assert_eq!(val("delta(Q)"), tv("0"));
        assert_eq!(val("P(c) ==> R"), tv("inf"));
        assert_eq!(val("forall x. P(x) ==> Q"), tv("3"));
        assert_eq!(val("one"), tv("1"));
        assert_eq!(val("Q^3"), tv("27"));
        assert_eq!(val("Q ->l P(f(c))"), tv("2/3"));
    }

    #[test]
    fn satisfaction_examples() {
        let m = sample();
        let sig = m.signature().clone();
        assert!(satisfies(&m, &parse("R", &sig).unwrap()).unwrap());
        assert!(satisfies(&m, &parse("~delta(Q)", &sig).unwrap()).unwrap());
        let open = parse("P(x)", &sig).unwrap();
        assert_eq!(
            satisfies(&m, &open),
            Err(EvalError::NotASentence(vec!["x".into()]))
        );
        let theory = vec![parse("Q ==> R", &sig).unwrap()];
        let chi = parse("Q -> R", &sig).unwrap();
        assert!(entails_over(std::slice::from_ref(&m), &theory, &chi).unwrap());
        assert_eq!(
            failing_sentences(&m, &[chi.clone(), parse("Q", &sig).unwrap()]).unwrap(),
            vec![1]
        );
    }

    #[test]
    fn tables_agree_with_expansion_on_grid() {
        let grid = ["0", "1/2", "1", "2", "inf"];
        for a in grid {
            for b in grid {
                let m = Structure::parse(&format!(
                    "backend rat\nuniverse u\npred P = {a}\npred Q = {b}\n"
                ))
                .unwrap();
                let sig = m.signature().clone();
                for text in [
                    "P \\/ Q", "P <-> Q", "~~P", "P => Q", "P ==> Q", "delta(P)", "P ->l Q", "P^2",
                    "top", "~P",
                ] {
                    let f = parse(text, &sig).unwrap();
                    assert_eq!(
                        eval_sentence(&f, &m).unwrap(),
                        eval_sentence(&expand_derived(&f), &m).unwrap(),
                        "{text} at P={a}, Q={b}"
                    );
                }
            }
        }
    }
}
