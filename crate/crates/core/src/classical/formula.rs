use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::{Quantifier, Term};

/// The two sorts of the classical companion language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sort {
    Object,
    Value,
}

/// Terms of the value sort.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValTerm {
    Var(String),
    Zero,
    One,
    Inf,
    Mul(Box<ValTerm>, Box<ValTerm>),
    Inv(Box<ValTerm>),
}

impl ValTerm {
    pub fn var(name: impl Into<String>) -> ValTerm {
        ValTerm::Var(name.into())
    }

    pub fn mul(a: ValTerm, b: ValTerm) -> ValTerm {
        ValTerm::Mul(Box::new(a), Box::new(b))
    }

    pub fn inv(a: ValTerm) -> ValTerm {
        ValTerm::Inv(Box::new(a))
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            ValTerm::Var(v) => {
                out.insert(v.clone());
            }
            ValTerm::Zero | ValTerm::One | ValTerm::Inf => {}
            ValTerm::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ValTerm::Inv(a) => a.collect_vars(out),
        }
    }
}

/// Two-sorted classical first-order formulas.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CFormula {
    Le(ValTerm, ValTerm),
    ValEq(ValTerm, ValTerm),
    ObjEq(Term, Term),
    /// Graph of a predicate: `R(t1, ..., tn, g)`.
    Rel(String, Vec<Term>, ValTerm),
    Not(Box<CFormula>),
    And(Vec<CFormula>),
    Or(Vec<CFormula>),
    Imp(Box<CFormula>, Box<CFormula>),
    Quant(Quantifier, Sort, String, Box<CFormula>),
}

impl CFormula {
    pub fn le(a: ValTerm, b: ValTerm) -> CFormula {
        CFormula::Le(a, b)
    }

    pub fn val_eq(a: ValTerm, b: ValTerm) -> CFormula {
        CFormula::ValEq(a, b)
    }

    pub fn not(f: CFormula) -> CFormula {
        CFormula::Not(Box::new(f))
    }

    pub fn imp(a: CFormula, b: CFormula) -> CFormula {
        CFormula::Imp(Box::new(a), Box::new(b))
    }

    pub fn forall(sort: Sort, var: impl Into<String>, body: CFormula) -> CFormula {
        CFormula::Quant(Quantifier::Forall, sort, var.into(), Box::new(body))
    }

    pub fn exists(sort: Sort, var: impl Into<String>, body: CFormula) -> CFormula {
        CFormula::Quant(Quantifier::Exists, sort, var.into(), Box::new(body))
    }

    pub fn size(&self) -> usize {
        match self {
            CFormula::Le(..) | CFormula::ValEq(..) | CFormula::ObjEq(..) | CFormula::Rel(..) => 1,
            CFormula::Not(f) | CFormula::Quant(_, _, _, f) => 1 + f.size(),
            CFormula::And(fs) | CFormula::Or(fs) => {
                1 + fs.iter().map(CFormula::size).sum::<usize>()
            }
            CFormula::Imp(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Free variables with their sorts, inferred from use.
    pub fn free_vars(&self) -> BTreeSet<(String, Sort)> {
        fn walk(f: &CFormula, bound: &mut Vec<String>, out: &mut BTreeSet<(String, Sort)>) {
            let mut add = |vars: BTreeSet<String>, sort: Sort, bound: &Vec<String>| {
                for v in vars {
                    if !bound.contains(&v) {
                        out.insert((v, sort));
                    }
                }
            };
            let val_vars = |ts: &[&ValTerm]| {
                let mut s = BTreeSet::new();
                for t in ts {
                    t.collect_vars(&mut s);
                }
                s
            };
            match f {
                CFormula::Le(a, b) | CFormula::ValEq(a, b) => {
                    add(val_vars(&[a, b]), Sort::Value, bound)
                }
                CFormula::ObjEq(a, b) => {
                    let mut s = a.vars();
                    s.extend(b.vars());
                    add(s, Sort::Object, bound)
                }
                CFormula::Rel(_, args, g) => {
                    let mut s = BTreeSet::new();
                    for a in args {
                        a.collect_vars(&mut s);
                    }
                    add(s, Sort::Object, bound);
                    add(val_vars(&[g]), Sort::Value, bound);
                }
                CFormula::Not(g) => walk(g, bound, out),
                CFormula::And(fs) | CFormula::Or(fs) => {
                    for g in fs {
                        walk(g, bound, out);
                    }
                }
                CFormula::Imp(a, b) => {
                    walk(a, bound, out);
                    walk(b, bound, out);
                }
                CFormula::Quant(_, _, v, body) => {
                    bound.push(v.clone());
                    walk(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for ValTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValTerm::Var(v) => f.write_str(v),
            ValTerm::Zero => f.write_str("0"),
            ValTerm::One => f.write_str("1"),
            ValTerm::Inf => f.write_str("inf"),
            ValTerm::Mul(a, b) => write!(f, "(mul {a} {b})"),
            ValTerm::Inv(a) => write!(f, "(inv {a})"),
        }
    }
}

fn write_obj(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(v) => f.write_str(v),
        Term::App(name, args) if args.is_empty() => f.write_str(name),
        Term::App(name, args) => {
            write!(f, "({name}")?;
            for a in args {
                f.write_str(" ")?;
                write_obj(a, f)?;
            }
            f.write_str(")")
        }
    }
}

/// Parenthesized prefix form:
///
/// ```text
/// f  ::= (le v v) | (eq v v) | (oeq t t) | (rel R t* v)
///      | (not f) | (and f*) | (or f*) | (imp f f)
///      | (forall-obj x f) | (exists-obj x f) | (forall-val g f) | (exists-val g f)
/// v  ::= g | 0 | 1 | inf | (mul v v) | (inv v)
/// t  ::= x | c | (fn t+)
/// ```
impl fmt::Display for CFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CFormula::Le(a, b) => write!(f, "(le {a} {b})"),
            CFormula::ValEq(a, b) => write!(f, "(eq {a} {b})"),
            CFormula::ObjEq(a, b) => {
                f.write_str("(oeq ")?;
                write_obj(a, f)?;
                f.write_str(" ")?;
                write_obj(b, f)?;
                f.write_str(")")
            }
            CFormula::Rel(r, args, g) => {
                write!(f, "(rel {r}")?;
                for a in args {
                    f.write_str(" ")?;
                    write_obj(a, f)?;
                }
                write!(f, " {g})")
            }
            CFormula::Not(g) => write!(f, "(not {g})"),
            CFormula::And(fs) | CFormula::Or(fs) => {
                f.write_str(if matches!(self, CFormula::And(_)) {
                    "(and"
                } else {
                    "(or"
                })?;
                for g in fs {
                    write!(f, " {g}")?;
                }
                f.write_str(")")
            }
            CFormula::Imp(a, b) => write!(f, "(imp {a} {b})"),
            CFormula::Quant(q, s, v, body) => {
                let q = match q {
                    Quantifier::Forall => "forall",
                    Quantifier::Exists => "exists",
                };
                let s = match s {
                    Sort::Object => "obj",
                    Sort::Value => "val",
                };
                write!(f, "({q}-{s} {v} {body})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_printing() {
        let f = CFormula::exists(
            Sort::Value,
            "g1",
            CFormula::And(vec![
                CFormula::Rel("P".into(), vec![Term::var("x")], ValTerm::var("g1")),
                CFormula::val_eq(ValTerm::var("g"), ValTerm::inv(ValTerm::var("g1"))),
            ]),
        );
        assert_eq!(
            f.to_string(),
            "(exists-val g1 (and (rel P x g1) (eq g (inv g1))))"
        );
        let fv: Vec<_> = f.free_vars().into_iter().collect();
        assert_eq!(
            fv,
            vec![("g".into(), Sort::Value), ("x".into(), Sort::Object)]
        );
    }
}
