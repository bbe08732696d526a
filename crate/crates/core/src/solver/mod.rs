//! Finite-domain model finding.
//!
//! Sentences are grounded over `n` named elements, compiled into case
//! branches (a stratum per atom plus linear constraints on the exponents of
//! the ELEM atoms) and each branch is decided by Fourier-Motzkin elimination
//! over the rationals. A finite system of integer comparisons is satisfiable
//! in some totally ordered abelian group iff it is satisfiable over `Q`, so
//! an UNSAT branch is unsatisfiable over every such group. `NoneUpTo` only
//! speaks about domains up to the searched size.

mod compile;
mod fm;
mod ground;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

pub use compile::{
    compile, AtomId, AtomTable, Constraint, ConstraintSystem, GroundAtom, LinForm, Tag,
};
pub use fm::{fm_solve, integer_witness, FmOutcome, LinearSystem, Rel, Row, RowLimitExceeded};
pub use ground::{element_names, ground, ground_sentence, Grounding};

use crate::group::{Backend, GroupElem, TruthValue};
use crate::semantics::{
    failing_sentences, satisfies, tuples, EvalError, Structure, StructureBuilder,
};
use crate::syntax::{Formula, Signature};
use compile::Compiler;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("unsupported by solver: {0}")]
    Unsupported(String),
    #[error("not a sentence: {0}")]
    NotASentence(String),
    #[error("not ground: {0}")]
    NotGround(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    /// Maximum number of live case branches.
    pub branch_budget: usize,
    /// Maximum number of rows produced while eliminating one variable.
    pub row_limit: usize,
    /// Infeasible branches are dropped once more than this many are live.
    pub prune_above: usize,
    /// Backend of the returned structures.
    pub backend: Backend,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            branch_budget: 100_000,
            row_limit: 100_000,
            prune_above: 64,
            backend: Backend::Rat,
        }
    }
}

/// Work done at one domain size.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SizeStats {
    pub size: usize,
    pub groundings: usize,
    pub atoms: usize,
    /// Branches left after compiling the whole theory.
    pub branches: usize,
    /// Branches dropped early as infeasible.
    pub pruned: usize,
    /// Branches handed to elimination.
    pub solved: usize,
}

#[derive(Debug, Clone)]
pub struct Model {
    pub structure: Structure,
    pub stats: Vec<SizeStats>,
    /// The satisfied branch, printed over ground atoms.
    pub branch: String,
}

#[derive(Debug, Clone)]
pub enum ModelSearch {
    Found(Box<Model>),
    NoneUpTo { n_max: usize, stats: Vec<SizeStats> },
}

impl ModelSearch {
    pub fn model(&self) -> Option<&Structure> {
        match self {
            ModelSearch::Found(m) => Some(&m.structure),
            ModelSearch::NoneUpTo { .. } => None,
        }
    }

    pub fn stats(&self) -> &[SizeStats] {
        match self {
            ModelSearch::Found(m) => &m.stats,
            ModelSearch::NoneUpTo { stats, .. } => stats,
        }
    }
}

fn prune(
    systems: Vec<ConstraintSystem>,
    options: &SolverOptions,
) -> Result<(Vec<ConstraintSystem>, usize), SolverError> {
    let before = systems.len();
    let mut kept = Vec::new();
    for s in systems {
        let (ls, _) = s.linear_system();
        match fm_solve(&ls, options.row_limit) {
            Ok(FmOutcome::Sat(_)) => kept.push(s),
            Ok(FmOutcome::Unsat) => {}
            Err(e) => {
                return Err(SolverError::Resource(format!(
                    "elimination exceeded {} rows",
                    e.limit
                )))
            }
        }
    }
    let dropped = before - kept.len();
    Ok((kept, dropped))
}

/// Threads the branch set through every sentence of a ground theory and
/// returns the surviving branches in case-tag order.
pub fn compile_theory(
    sentences: &[Formula],
    atoms: &mut AtomTable,
    options: &SolverOptions,
) -> Result<(Vec<ConstraintSystem>, usize), SolverError> {
    let mut systems = vec![ConstraintSystem::default()];
    let mut pruned = 0;
    for phi in sentences {
        let mut c = Compiler {
            atoms,
            options,
            pruned: 0,
        };
        let mut next = Vec::new();
        for sys in systems {
            next.extend(c.require_inf(phi, sys)?);
            if next.len() > options.branch_budget {
                return Err(SolverError::Resource(format!(
                    "branch budget of {} exceeded",
                    options.branch_budget
                )));
            }
        }
        pruned += c.pruned;
        next.sort();
        next.dedup();
        if next.len() > options.prune_above {
            let (kept, dropped) = prune(next, options)?;
            pruned += dropped;
            next = kept;
        }
        systems = next;
        if systems.is_empty() {
            break;
        }
    }
    let n = atoms.len();
    systems.sort_by_cached_key(|s| s.tag_key(n));
    Ok((systems, pruned))
}

fn elem_value(k: &BigInt, backend: Backend) -> GroupElem {
    let g = GroupElem::power_of_two(k);
    match backend {
        Backend::Rat => g,
        Backend::Lex2 => GroupElem::lex2(BigRational::one(), g.as_rat().expect("rational").clone())
            .expect("positive"),
    }
}

fn build_structure(
    sig: &Signature,
    grounding: &Grounding,
    atoms: &AtomTable,
    values: &[Option<TruthValue>],
    backend: Backend,
) -> Result<Structure, SolverError> {
    let internal = |e: crate::semantics::StructureError| SolverError::Internal(e.to_string());
    let mut b = StructureBuilder::new(backend, &grounding.elements).map_err(internal)?;
    for (c, &i) in &grounding.constants {
        b.declare_function(c, 0).map_err(internal)?;
        b.set_function_idx(c, &[], i).map_err(internal)?;
    }
    let n = grounding.elements.len();
    for (p, arity) in sig.predicates() {
        b.declare_predicate(p, arity).map_err(internal)?;
        for t in tuples(n, arity) {
            let atom = GroundAtom {
                pred: p.to_string(),
                args: t.iter().map(|&i| grounding.elements[i].clone()).collect(),
            };
            let v = atoms
                .id(&atom)
                .and_then(|id| values[id].clone())
                .unwrap_or_else(|| TruthValue::one(backend));
            b.set_predicate_idx(p, &t, v).map_err(internal)?;
        }
    }
    if let Some(e) = sig.equality() {
        b.set_equality(e).map_err(internal)?;
    }
    b.build().map_err(internal)
}

/// Searches for a model of `theory` with `1..=n_max` elements. The first
/// satisfiable branch (in case-tag order, groundings in constant order) is
/// turned into a structure: ELEM atoms with exponent `k` get `2^k`
/// (`(1, 2^k)` in LEX2), atoms no branch mentions get `1`. Every returned
/// structure has been checked against every sentence by the evaluator.
pub fn find_model(
    theory: &[Formula],
    sig: &Signature,
    n_max: usize,
    options: &SolverOptions,
) -> Result<ModelSearch, SolverError> {
    let mut all_stats = Vec::new();
    for n in 1..=n_max {
        let groundings = ground(theory, sig, n)?;
        let mut stats = SizeStats {
            size: n,
            groundings: groundings.len(),
            ..SizeStats::default()
        };
        for g in &groundings {
            let mut atoms = AtomTable::new();
            let (systems, pruned) = compile_theory(&g.sentences, &mut atoms, options)?;
            stats.atoms = stats.atoms.max(atoms.len());
            stats.branches += systems.len();
            stats.pruned += pruned;
            for sys in &systems {
                stats.solved += 1;
                let (ls, vars) = sys.linear_system();
                let x = match fm_solve(&ls, options.row_limit) {
                    Ok(FmOutcome::Sat(x)) => x,
                    Ok(FmOutcome::Unsat) => continue,
                    Err(e) => {
                        return Err(SolverError::Resource(format!(
                            "elimination exceeded {} rows",
                            e.limit
                        )))
                    }
                };
                let ks = integer_witness(&ls, &x)
                    .ok_or_else(|| SolverError::Internal("inhomogeneous system".into()))?;
                let mut values: Vec<Option<TruthValue>> = vec![None; atoms.len()];
                for (&a, &t) in sys.tags() {
                    values[a] = Some(match t {
                        Tag::Zero => TruthValue::Zero,
                        Tag::Inf => TruthValue::Inf,
                        Tag::Elem => TruthValue::one(options.backend),
                    });
                }
                for (&a, k) in vars.iter().zip(&ks) {
                    values[a] = Some(TruthValue::Elem(elem_value(k, options.backend)));
                }
                let structure = build_structure(sig, g, &atoms, &values, options.backend)?;
                let failing = failing_sentences(&structure, theory)?;
                if !failing.is_empty() {
                    return Err(SolverError::Internal(format!(
                        "witness fails sentence {} `{}`",
                        failing[0] + 1,
                        theory[failing[0]]
                    )));
                }
                all_stats.push(stats);
                return Ok(ModelSearch::Found(Box::new(Model {
                    structure,
                    stats: all_stats,
                    branch: sys.display(&atoms).to_string(),
                })));
            }
        }
        all_stats.push(stats);
    }
    Ok(ModelSearch::NoneUpTo {
        n_max,
        stats: all_stats,
    })
}

/// `{1 ==> rho, eps ==> top} ∪ {rho^k ==> eps : 1 <= k <= n}`.
pub fn remark_theory(n: u32) -> Vec<Formula> {
    let rho = || Formula::prop("rho");
    let eps = || Formula::prop("eps");
    let mut t = vec![
        Formula::dd_arrow(Formula::One, rho()),
        Formula::dd_arrow(eps(), Formula::Top),
    ];
    t.extend((1..=n).map(|k| Formula::dd_arrow(Formula::power(rho(), k), eps())));
    t
}

pub fn remark_signature() -> Signature {
    Signature::new()
        .with_predicate("rho", 0)
        .with_predicate("eps", 0)
}

#[derive(Debug, Clone)]
pub struct RemarkReport {
    pub n: u32,
    /// Standard (rational) model found by the solver.
    pub standard: Structure,
    pub standard_valid: bool,
    /// The LEX2 structure `rho = (1, 2)`, `eps = (2, 1)`.
    pub lex: Structure,
    pub lex_checked: usize,
    pub lex_valid: bool,
}

impl RemarkReport {
    pub fn ok(&self) -> bool {
        self.standard_valid && self.lex_valid
    }
}

pub fn lex_remark_structure() -> Structure {
    let mut b = StructureBuilder::new(Backend::Lex2, &["m"]).expect("nonempty");
    let pair = |a: i64, c: i64| {
        TruthValue::Elem(
            GroupElem::lex2(
                BigRational::from_integer(a.into()),
                BigRational::from_integer(c.into()),
            )
            .expect("positive"),
        )
    };
    for (p, v) in [("rho", pair(1, 2)), ("eps", pair(2, 1))] {
        b.declare_predicate(p, 0).expect("fresh");
        b.set_predicate_idx(p, &[], v).expect("nullary");
    }
    b.build().expect("total")
}

/// Every finite fragment of the remark theory has a standard model, and
/// the lexicographic structure satisfies all of them at once.
pub fn remark_lab(n: u32) -> Result<RemarkReport, SolverError> {
    let theory = remark_theory(n);
    let sig = remark_signature();
    let search = find_model(&theory, &sig, 1, &SolverOptions::default())?;
    let ModelSearch::Found(model) = search else {
        return Err(SolverError::Internal(format!(
            "no standard model for the fragment of size {n}"
        )));
    };
    let standard = model.structure;
    let standard_valid = failing_sentences(&standard, &theory)?.is_empty();
    let lex = lex_remark_structure();
    let mut lex_checked = 0;
    let mut lex_valid = true;
    for phi in &theory {
        lex_checked += 1;
        if !satisfies(&lex, phi)? {
            lex_valid = false;
            break;
        }
    }
    Ok(RemarkReport {
        n,
        standard,
        standard_valid,
        lex,
        lex_checked,
        lex_valid,
    })
}
