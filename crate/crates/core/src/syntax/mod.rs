//! Signatures, terms and formulas, the concrete text grammar, expansion of
//! derived connectives and capture-avoiding substitution.

mod ast;
mod parser;
mod printer;
mod signature;

use std::collections::BTreeSet;

use thiserror::Error;

pub use ast::{BinOp, Formula, Quantifier, Term};
pub use parser::{parse, parse_infer, parse_theory, parse_theory_infer};
pub use signature::{Signature, SymbolKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("lexical error at {line}:{column}: {message}")]
    Lex {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("syntax error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown symbol `{name}` at {line}:{column}")]
    UnknownSymbol {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("`{name}` expects {expected} argument(s), got {found} at {line}:{column}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        line: usize,
        column: usize,
    },
    #[error("quantifier binds signature symbol `{name}` at {line}:{column}")]
    BindsSymbol {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("`{0}` is used both as a variable and as a symbol, or as two kinds of symbol")]
    NameClash(String),
    #[error("invalid symbol name `{0}`")]
    InvalidName(String),
    #[error("declaration error on line {line}: {message}")]
    Decl { line: usize, message: String },
}

impl SyntaxError {
    pub(crate) fn at(self, line: usize, column: usize) -> SyntaxError {
        match self {
            SyntaxError::ArityMismatch {
                name,
                expected,
                found,
                ..
            } => SyntaxError::ArityMismatch {
                name,
                expected,
                found,
                line,
                column,
            },
            other => other,
        }
    }

    /// Rebases a single-line position onto line `line` of a larger file.
    pub(crate) fn on_line(self, line: usize) -> SyntaxError {
        match self {
            SyntaxError::Lex {
                column, message, ..
            } => SyntaxError::Lex {
                line,
                column,
                message,
            },
            SyntaxError::Parse {
                column, message, ..
            } => SyntaxError::Parse {
                line,
                column,
                message,
            },
            SyntaxError::UnknownSymbol { name, column, .. } => {
                SyntaxError::UnknownSymbol { name, line, column }
            }
            SyntaxError::ArityMismatch {
                name,
                expected,
                found,
                column,
                ..
            } => SyntaxError::ArityMismatch {
                name,
                expected,
                found,
                line,
                column,
            },
            SyntaxError::BindsSymbol { name, column, .. } => {
                SyntaxError::BindsSymbol { name, line, column }
            }
            other => other,
        }
    }
}

/// Rewrites every derived connective into `bot`, `one`, `/\`, `->`, `*`,
/// `^-1` and the quantifiers, following the defining equations:
///
/// ```text
/// phi^1      := phi
/// phi^n      := phi^(n-1) * phi
/// phi \/ psi := ((phi -> psi) -> psi) /\ ((psi -> phi) -> phi)
/// ~phi       := phi -> bot
/// phi <-> psi:= (phi -> psi) /\ (psi -> phi)
/// top        := ~bot
/// phi => psi := (psi -> phi) -> psi
/// phi ==> psi:= ((phi => psi) /\ ~~psi^-1) \/ (psi /\ ~~phi^-1)
/// delta(phi) := ~(phi ==> top)
/// phi ->l psi:= one -> (psi * phi^-1)
/// ```
pub fn expand_derived(phi: &Formula) -> Formula {
    use Formula as F;
    let neg = |f: F| F::imp(f, F::Bot);
    match phi {
        F::Bot | F::One | F::Atom(..) => phi.clone(),
        F::Top => neg(F::Bot),
        F::Not(g) => neg(expand_derived(g)),
        F::Inv(g) => F::inv(expand_derived(g)),
        F::Quant(q, v, g) => F::Quant(*q, v.clone(), Box::new(expand_derived(g))),
        F::Power(g, n) => {
            let base = expand_derived(g);
            let mut acc = base.clone();
            for _ in 1..*n {
                acc = F::tensor(acc, base.clone());
            }
            acc
        }
        F::Delta(g) => expand_derived(&F::not(F::dd_arrow((**g).clone(), F::Top))),
        F::Binary(op, l, r) => {
            let (a, b) = (expand_derived(l), expand_derived(r));
            match op {
                BinOp::And | BinOp::Imp | BinOp::Tensor => F::binary(*op, a, b),
                BinOp::Or => F::and(
                    F::imp(F::imp(a.clone(), b.clone()), b.clone()),
                    F::imp(F::imp(b, a.clone()), a),
                ),
                BinOp::Iff => F::and(F::imp(a.clone(), b.clone()), F::imp(b, a)),
                BinOp::DArrow => F::imp(F::imp(b.clone(), a), b),
                BinOp::DDArrow => {
                    let (l, r) = ((**l).clone(), (**r).clone());
                    let first = F::and(
                        F::binary(BinOp::DArrow, l.clone(), r.clone()),
                        F::not(F::not(F::inv(r.clone()))),
                    );
                    let second = F::and(r, F::not(F::not(F::inv(l))));
                    expand_derived(&F::or(first, second))
                }
                BinOp::LukImp => F::imp(F::One, F::tensor(b, F::inv(a))),
            }
        }
    }
}

pub fn free_vars(phi: &Formula) -> BTreeSet<String> {
    fn walk(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match f {
            Formula::Bot | Formula::One | Formula::Top => {}
            Formula::Atom(_, args) => {
                for a in args {
                    for v in a.vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
            }
            Formula::Binary(_, l, r) => {
                walk(l, bound, out);
                walk(r, bound, out);
            }
            Formula::Inv(g) | Formula::Not(g) | Formula::Power(g, _) | Formula::Delta(g) => {
                walk(g, bound, out)
            }
            Formula::Quant(_, v, g) => {
                bound.push(v.clone());
                walk(g, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(phi, &mut Vec::new(), &mut out);
    out
}

pub fn is_sentence(phi: &Formula) -> bool {
    free_vars(phi).is_empty()
}

pub fn substitute_term(t: &Term, var: &str, replacement: &Term) -> Term {
    match t {
        Term::Var(v) if v == var => replacement.clone(),
        Term::Var(_) => t.clone(),
        Term::App(f, args) => Term::App(
            f.clone(),
            args.iter()
                .map(|a| substitute_term(a, var, replacement))
                .collect(),
        ),
    }
}

fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|candidate| !avoid.contains(candidate))
        .expect("unbounded supply of names")
}

/// Replaces free occurrences of `var` by `replacement`, renaming bound
/// variables that would capture a variable of `replacement`.
pub fn substitute(phi: &Formula, var: &str, replacement: &Term) -> Formula {
    use Formula as F;
    let rec = |g: &Formula| substitute(g, var, replacement);
    match phi {
        F::Bot | F::One | F::Top => phi.clone(),
        F::Atom(p, args) => F::Atom(
            p.clone(),
            args.iter()
                .map(|a| substitute_term(a, var, replacement))
                .collect(),
        ),
        F::Binary(op, l, r) => F::binary(*op, rec(l), rec(r)),
        F::Inv(g) => F::inv(rec(g)),
        F::Not(g) => F::not(rec(g)),
        F::Power(g, n) => F::Power(Box::new(rec(g)), *n),
        F::Delta(g) => F::delta(rec(g)),
        F::Quant(q, v, body) => {
            if v == var {
                return phi.clone();
            }
            let body_fv = free_vars(body);
            if !body_fv.contains(var) {
                return phi.clone();
            }
            let t_vars = replacement.vars();
            if t_vars.contains(v) {
                let mut avoid: BTreeSet<String> = body_fv;
                avoid.extend(t_vars);
                avoid.extend(body.bound_vars());
                avoid.insert(var.to_string());
                let renamed = fresh_name(v, &avoid);
                let body = substitute(body, v, &Term::Var(renamed.clone()));
                F::Quant(*q, renamed, Box::new(rec(&body)))
            } else {
                F::Quant(*q, v.clone(), Box::new(rec(body)))
            }
        }
    }
}
