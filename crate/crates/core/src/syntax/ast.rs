use std::collections::BTreeSet;

/// A first-order term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// Function application; constants are nullary applications.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }
}

/// Binary connectives, core and derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    And,
    Imp,
    Tensor,
    Or,
    Iff,
    /// `=>`
    DArrow,
    /// `==>`, strict comparison
    DDArrow,
    /// `->l`, Lukasiewicz implication
    LukImp,
}

impl BinOp {
    pub const ALL: [BinOp; 8] = [
        BinOp::And,
        BinOp::Imp,
        BinOp::Tensor,
        BinOp::Or,
        BinOp::Iff,
        BinOp::DArrow,
        BinOp::DDArrow,
        BinOp::LukImp,
    ];

    pub fn is_core(self) -> bool {
        matches!(self, BinOp::And | BinOp::Imp | BinOp::Tensor)
    }

    pub fn token(self) -> &'static str {
        match self {
            BinOp::And => "/\\",
            BinOp::Imp => "->",
            BinOp::Tensor => "*",
            BinOp::Or => "\\/",
            BinOp::Iff => "<->",
            BinOp::DArrow => "=>",
            BinOp::DDArrow => "==>",
            BinOp::LukImp => "->l",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// A formula of first-order additive Goedel logic.
///
/// `Top`, `Not`, `Power`, `Delta` and the non-core [`BinOp`]s are derived
/// connectives; [`crate::syntax::expand_derived`] rewrites them into the core
/// language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Bot,
    One,
    Top,
    Atom(String, Vec<Term>),
    Binary(BinOp, Box<Formula>, Box<Formula>),
    Inv(Box<Formula>),
    Not(Box<Formula>),
    /// `phi^n`, `n >= 1`
    Power(Box<Formula>, u32),
    Delta(Box<Formula>),
    Quant(Quantifier, String, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom(pred.into(), args)
    }

    /// Nullary atom.
    pub fn prop(pred: impl Into<String>) -> Formula {
        Formula::Atom(pred.into(), Vec::new())
    }

    pub fn binary(op: BinOp, lhs: Formula, rhs: Formula) -> Formula {
        Formula::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Formula {
        Formula::binary(BinOp::And, lhs, rhs)
    }

    pub fn imp(lhs: Formula, rhs: Formula) -> Formula {
        Formula::binary(BinOp::Imp, lhs, rhs)
    }

    pub fn tensor(lhs: Formula, rhs: Formula) -> Formula {
        Formula::binary(BinOp::Tensor, lhs, rhs)
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Formula {
        Formula::binary(BinOp::Or, lhs, rhs)
    }

    pub fn dd_arrow(lhs: Formula, rhs: Formula) -> Formula {
        Formula::binary(BinOp::DDArrow, lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Formula {
        Formula::Not(Box::new(inner))
    }

    pub fn inv(inner: Formula) -> Formula {
        Formula::Inv(Box::new(inner))
    }

    pub fn delta(inner: Formula) -> Formula {
        Formula::Delta(Box::new(inner))
    }

    pub fn power(inner: Formula, n: u32) -> Formula {
        assert!(n >= 1, "power exponent must be at least 1");
        Formula::Power(Box::new(inner), n)
    }

    pub fn forall(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Forall, var.into(), Box::new(body))
    }

    pub fn exists(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Quant(Quantifier::Exists, var.into(), Box::new(body))
    }

    /// True when no derived connective occurs.
    pub fn is_core(&self) -> bool {
        match self {
            Formula::Bot | Formula::One | Formula::Atom(..) => true,
            Formula::Top | Formula::Not(_) | Formula::Power(..) | Formula::Delta(_) => false,
            Formula::Binary(op, l, r) => op.is_core() && l.is_core() && r.is_core(),
            Formula::Inv(f) | Formula::Quant(_, _, f) => f.is_core(),
        }
    }

    /// Nesting depth; atoms and constants have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Bot | Formula::One | Formula::Top | Formula::Atom(..) => 1,
            Formula::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
            Formula::Inv(f)
            | Formula::Not(f)
            | Formula::Power(f, _)
            | Formula::Delta(f)
            | Formula::Quant(_, _, f) => 1 + f.depth(),
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Bot | Formula::One | Formula::Top | Formula::Atom(..) => 0,
            Formula::Binary(_, l, r) => l.quantifier_depth().max(r.quantifier_depth()),
            Formula::Inv(f) | Formula::Not(f) | Formula::Power(f, _) | Formula::Delta(f) => {
                f.quantifier_depth()
            }
            Formula::Quant(_, _, f) => 1 + f.quantifier_depth(),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Bot | Formula::One | Formula::Top | Formula::Atom(..) => 1,
            Formula::Binary(_, l, r) => 1 + l.size() + r.size(),
            Formula::Inv(f)
            | Formula::Not(f)
            | Formula::Power(f, _)
            | Formula::Delta(f)
            | Formula::Quant(_, _, f) => 1 + f.size(),
        }
    }

    /// Visits every atom in the formula.
    pub fn for_each_atom<'a>(&'a self, visit: &mut impl FnMut(&'a str, &'a [Term])) {
        match self {
            Formula::Bot | Formula::One | Formula::Top => {}
            Formula::Atom(p, args) => visit(p, args),
            Formula::Binary(_, l, r) => {
                l.for_each_atom(visit);
                r.for_each_atom(visit);
            }
            Formula::Inv(f)
            | Formula::Not(f)
            | Formula::Power(f, _)
            | Formula::Delta(f)
            | Formula::Quant(_, _, f) => f.for_each_atom(visit),
        }
    }

    pub fn bound_vars(&self) -> BTreeSet<String> {
        fn walk(f: &Formula, out: &mut BTreeSet<String>) {
            match f {
                Formula::Bot | Formula::One | Formula::Top | Formula::Atom(..) => {}
                Formula::Binary(_, l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
                Formula::Inv(g) | Formula::Not(g) | Formula::Power(g, _) | Formula::Delta(g) => {
                    walk(g, out)
                }
                Formula::Quant(_, v, g) => {
                    out.insert(v.clone());
                    walk(g, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        walk(self, &mut out);
        out
    }
}
