use std::collections::HashMap;

use super::ModelTheoryError;
use crate::group::{tv_inv, TruthValue};
use crate::semantics::{connective, delta_value, eval, not_value, tuples, Assignment, Structure};
use crate::syntax::{BinOp, Formula, Quantifier, Signature, Term};

/// Enumeration bounds for [`formula_family`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyConfig {
    /// Connective and quantifier nesting; atoms have depth 0.
    pub depth: usize,
    /// Variables `x1 .. xk` available to atoms and quantifiers.
    pub vars: usize,
    /// Resource bound on the number of kept formulas.
    pub max_formulas: usize,
}

impl FamilyConfig {
    /// `k` is the largest predicate arity, at least 1.
    pub fn new(sig: &Signature, depth: usize) -> Self {
        FamilyConfig {
            depth,
            vars: sig.max_predicate_arity().max(1),
            max_formulas: 20_000,
        }
    }
}

/// A formula with its free variables (bit `i` for `x{i+1}`) and its value
/// table in each structure, indexed by assignments of `x1 .. xk` in
/// mixed radix (`x1` least significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub formula: Formula,
    pub depth: usize,
    pub free: u64,
    pub tables: Vec<Vec<TruthValue>>,
}

impl Member {
    pub fn is_sentence(&self) -> bool {
        self.free == 0
    }
}

type Unary = fn(&TruthValue) -> TruthValue;

pub fn var_name(i: usize) -> String {
    format!("x{}", i + 1)
}

/// Assignment index of `tuple` (one element per variable).
pub fn assignment_index(tuple: &[usize], size: usize) -> usize {
    tuple.iter().rev().fold(0, |acc, &a| acc * size + a)
}

fn terms(sig: &Signature, vars: usize) -> Vec<(Term, u64)> {
    let mut base: Vec<(Term, u64)> = (0..vars)
        .map(|i| (Term::var(var_name(i)), 1u64 << i))
        .collect();
    base.extend(
        sig.functions()
            .filter(|(_, a)| *a == 0)
            .map(|(c, _)| (Term::constant(c), 0)),
    );
    let mut out = base.clone();
    for (f, arity) in sig.functions().filter(|(_, a)| *a > 0) {
        for t in tuples(base.len(), arity) {
            let args = t.iter().map(|&i| base[i].0.clone()).collect();
            let mask = t.iter().fold(0, |m, &i| m | base[i].1);
            out.push((Term::app(f, args), mask));
        }
    }
    out
}

struct Builder<'a> {
    structures: &'a [&'a Structure],
    config: FamilyConfig,
    members: Vec<Member>,
    seen: HashMap<(u64, Vec<Vec<TruthValue>>), usize>,
}

impl Builder<'_> {
    fn push(
        &mut self,
        formula: Formula,
        depth: usize,
        free: u64,
        tables: Vec<Vec<TruthValue>>,
        dedupe: bool,
    ) -> Result<(), ModelTheoryError> {
        let key = (free, tables);
        if dedupe && self.seen.contains_key(&key) {
            return Ok(());
        }
        self.seen.entry(key.clone()).or_insert(self.members.len());
        self.members.push(Member {
            formula,
            depth,
            free,
            tables: key.1,
        });
        if self.members.len() > self.config.max_formulas {
            return Err(ModelTheoryError::Resource(format!(
                "formula family exceeds {} members at depth {depth}",
                self.config.max_formulas
            )));
        }
        Ok(())
    }

    fn atom_tables(&self, phi: &Formula) -> Result<Vec<Vec<TruthValue>>, ModelTheoryError> {
        let k = self.config.vars;
        let mut out = Vec::new();
        for m in self.structures {
            let s = m.size();
            let mut table = Vec::with_capacity(s.pow(k as u32));
            for idx in 0..s.pow(k as u32) {
                let mut v = Assignment::new();
                let mut rest = idx;
                for i in 0..k {
                    v.set(&var_name(i), rest % s);
                    rest /= s;
                }
                table.push(eval(phi, m, &v)?);
            }
            out.push(table);
        }
        Ok(out)
    }

    fn binary(
        &self,
        op: BinOp,
        a: &Member,
        b: &Member,
    ) -> Result<Vec<Vec<TruthValue>>, ModelTheoryError> {
        a.tables
            .iter()
            .zip(&b.tables)
            .zip(self.structures)
            .map(|((ta, tb), m)| {
                ta.iter()
                    .zip(tb)
                    .map(|(x, y)| connective(op, x, y, m.backend()))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()
            .map_err(ModelTheoryError::Group)
    }

    fn quantify(&self, q: Quantifier, var: usize, a: &Member) -> Vec<Vec<TruthValue>> {
        a.tables
            .iter()
            .zip(self.structures)
            .map(|(t, m)| {
                let s = m.size();
                let stride = s.pow(var as u32);
                (0..t.len())
                    .map(|idx| {
                        let base = idx - (idx / stride % s) * stride;
                        let vals = (0..s).map(|b| &t[base + b * stride]);
                        match q {
                            Quantifier::Forall => vals.min(),
                            Quantifier::Exists => vals.max(),
                        }
                        .expect("nonempty universe")
                        .clone()
                    })
                    .collect()
            })
            .collect()
    }
}

impl Builder<'_> {
    fn atoms(&mut self, sig: &Signature) -> Result<(), ModelTheoryError> {
        let ts = terms(sig, self.config.vars);
        for (p, arity) in sig.predicates() {
            for t in tuples(ts.len(), arity) {
                let args = t.iter().map(|&i| ts[i].0.clone()).collect();
                let free = t.iter().fold(0, |m, &i| m | ts[i].1);
                let phi = Formula::atom(p, args);
                let tables = self.atom_tables(&phi)?;
                self.push(phi, 0, free, tables, false)?;
            }
        }
        for phi in [Formula::Bot, Formula::One, Formula::Top] {
            let tables = self.atom_tables(&phi)?;
            self.push(phi, 0, 0, tables, true)?;
        }
        Ok(())
    }

    /// One connective or quantifier over the current members. With
    /// `fresh_only` at least one argument has depth `depth - 1`.
    fn level(
        &mut self,
        depth: usize,
        fresh_only: bool,
        dedupe: bool,
    ) -> Result<(), ModelTheoryError> {
        let previous = self.members.len();
        let uses = |m: &Member| !fresh_only || m.depth == depth - 1;
        let parents: Vec<usize> = (0..previous).filter(|&i| uses(&self.members[i])).collect();
        for &i in &parents {
            let a = self.members[i].clone();
            let unary: [(Formula, Unary); 3] = [
                (Formula::inv(a.formula.clone()), tv_inv),
                (Formula::not(a.formula.clone()), not_value),
                (Formula::delta(a.formula.clone()), delta_value),
            ];
            for (phi, f) in unary {
                let tables = a.tables.iter().map(|t| t.iter().map(f).collect()).collect();
                self.push(phi, depth, a.free, tables, dedupe)?;
            }
            for var in 0..self.config.vars {
                if a.free & (1 << var) == 0 {
                    continue;
                }
                for q in [Quantifier::Forall, Quantifier::Exists] {
                    let tables = self.quantify(q, var, &a);
                    let phi = Formula::Quant(q, var_name(var), Box::new(a.formula.clone()));
                    self.push(phi, depth, a.free & !(1 << var), tables, dedupe)?;
                }
            }
        }
        for op in BinOp::ALL {
            for i in 0..previous {
                for j in 0..previous {
                    if !uses(&self.members[i]) && !uses(&self.members[j]) {
                        continue;
                    }
                    let (x, y) = (&self.members[i], &self.members[j]);
                    let tables = self.binary(op, x, y)?;
                    let phi = Formula::binary(op, x.formula.clone(), y.formula.clone());
                    let free = x.free | y.free;
                    self.push(phi, depth, free, tables, dedupe)?;
                }
            }
        }
        Ok(())
    }
}

/// Every formula over `sig` with variables `x1 .. xk` and nesting depth at
/// most `config.depth`, up to having the same free variables and the same
/// value tables in all of `structures`. Formulas that agree on these are
/// interchangeable in every larger formula, so the family represents all
/// such formulas. Atoms are all kept; deeper formulas are enumerated level
/// by level (unary connectives, quantifiers over free variables, then
/// binary connectives in `BinOp::ALL` order over index pairs) and only the
/// first of each class is kept.
pub fn formula_family(
    sig: &Signature,
    structures: &[&Structure],
    config: &FamilyConfig,
) -> Result<Vec<Member>, ModelTheoryError> {
    let mut b = Builder {
        structures,
        config: *config,
        members: Vec::new(),
        seen: HashMap::new(),
    };
    b.atoms(sig)?;
    for depth in 1..=config.depth {
        b.level(depth, true, true)?;
    }
    Ok(b.members)
}

/// The family of depth `config.depth - 1` followed by every formula made
/// from its members by one more connective or quantifier, without merging
/// equal tables at the last step. For depth 0 this is the atoms.
pub fn family_with_last_level(
    sig: &Signature,
    structures: &[&Structure],
    config: &FamilyConfig,
) -> Result<Vec<Member>, ModelTheoryError> {
    let mut b = Builder {
        structures,
        config: *config,
        members: Vec::new(),
        seen: HashMap::new(),
    };
    b.atoms(sig)?;
    for depth in 1..config.depth {
        b.level(depth, true, true)?;
    }
    if config.depth > 0 {
        b.level(config.depth, false, false)?;
    }
    Ok(b.members)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_follow_the_evaluator() {
        let m = Structure::parse(
            "backend rat\nuniverse a b\npred P a = 2\npred P b = inf\npred Q = 1/2\n",
        )
        .unwrap();
        let sig = m.signature().clone();
        let cfg = FamilyConfig {
            depth: 2,
            vars: 1,
            max_formulas: 20_000,
        };
        let fam = formula_family(&sig, &[&m], &cfg).unwrap();
        assert!(fam.len() > 10);
        for member in &fam {
            for a in 0..m.size() {
                let v = Assignment::new().with("x1", a);
                let expected = eval(&member.formula, &m, &v).unwrap();
                assert_eq!(member.tables[0][a], expected, "{}", member.formula);
            }
        }
    }

    #[test]
    fn budget_overflow_is_an_error() {
        let m =
            Structure::parse("backend rat\nuniverse a b\npred P a = 2\npred P b = 3\n").unwrap();
        let cfg = FamilyConfig {
            depth: 3,
            vars: 1,
            max_formulas: 50,
        };
        assert!(matches!(
            formula_family(m.signature(), &[&m], &cfg),
            Err(ModelTheoryError::Resource(_))
        ));
    }
}
