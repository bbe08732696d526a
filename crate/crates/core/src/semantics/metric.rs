use std::fmt;

use super::eval::{satisfies, EvalError};
use super::structure::Structure;
use crate::group::{tv_inv, TruthValue};
use crate::syntax::{Formula, Term};

/// The similarity axioms for the binary predicate `e`:
/// reflexivity, symmetry and transitivity.
pub fn similarity_axioms(e: &str) -> Vec<Formula> {
    let at = |a: &str, b: &str| Formula::atom(e, vec![Term::var(a), Term::var(b)]);
    vec![
        Formula::forall("x", at("x", "x")),
        Formula::forall(
            "x",
            Formula::forall("y", Formula::imp(at("x", "y"), at("y", "x"))),
        ),
        Formula::forall(
            "x",
            Formula::forall(
                "y",
                Formula::forall(
                    "z",
                    Formula::imp(Formula::and(at("x", "y"), at("y", "z")), at("x", "z")),
                ),
            ),
        ),
    ]
}

fn equality(m: &Structure) -> Result<&str, EvalError> {
    m.signature().equality().ok_or(EvalError::NoEquality)
}

pub fn check_similarity(m: &Structure) -> Result<bool, EvalError> {
    let e = equality(m)?;
    for axiom in similarity_axioms(e) {
        if !satisfies(m, &axiom)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `d(a, b) = e(a, b)^-1`.
pub fn distance(m: &Structure, a: usize, b: usize) -> Result<TruthValue, EvalError> {
    let e = equality(m)?;
    let v = m
        .predicate_value(e, &[a, b])
        .ok_or_else(|| EvalError::UnknownSymbol(e.into()))?;
    Ok(tv_inv(v))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `d(a, a) != 0`.
    DiagonalNonzero(String),
    /// `d(a, b) = 0` for distinct `a`, `b`.
    Indiscernible(String, String),
    /// `d(a, b) != d(b, a)`.
    Asymmetric(String, String),
    /// `d(a, b) > max(d(a, c), d(b, c))`.
    Triangle(String, String, String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DiagonalNonzero(a) => write!(f, "diagonal d({a}, {a}) != 0"),
            Violation::Indiscernible(a, b) => write!(f, "indiscernible d({a}, {b}) = 0"),
            Violation::Asymmetric(a, b) => write!(f, "asymmetric d({a}, {b}) != d({b}, {a})"),
            Violation::Triangle(a, b, c) => {
                write!(f, "triangle d({a}, {b}) > max(d({a}, {c}), d({b}, {c}))")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UltrametricReport {
    pub violations: Vec<Violation>,
}

impl UltrametricReport {
    pub fn is_ultrametric(&self) -> bool {
        self.violations.is_empty()
    }

    /// Ignores only the indiscernibility clause.
    pub fn is_pseudo_ultrametric(&self) -> bool {
        self.violations
            .iter()
            .all(|v| matches!(v, Violation::Indiscernible(..)))
    }
}

/// Checks every clause of the ultrametric definition for `d = e^-1` and
/// lists each violating pair or triple.
pub fn check_ultrametric(m: &Structure) -> Result<UltrametricReport, EvalError> {
    let n = m.size();
    let mut d = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            d.push(distance(m, a, b)?);
        }
    }
    let dist = |a: usize, b: usize| &d[a * n + b];
    let name = |a: usize| m.element_name(a).to_string();
    let mut violations = Vec::new();
    for a in 0..n {
        if !dist(a, a).is_zero() {
            violations.push(Violation::DiagonalNonzero(name(a)));
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && dist(a, b).is_zero() {
                violations.push(Violation::Indiscernible(name(a), name(b)));
            }
            if a < b && dist(a, b) != dist(b, a) {
                violations.push(Violation::Asymmetric(name(a), name(b)));
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if dist(a, b) > dist(a, c).max(dist(b, c)) {
                    violations.push(Violation::Triangle(name(a), name(b), name(c)));
                }
            }
        }
    }
    Ok(UltrametricReport { violations })
}
