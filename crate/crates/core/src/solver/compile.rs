use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::fm::{fm_solve, FmOutcome, LinearSystem, Rel, Row};
use super::{SolverError, SolverOptions};
use crate::syntax::{BinOp, Formula, Term};

pub type AtomId = usize;

/// A predicate applied to named elements: one unknown of the solver.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pred)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(", "))?;
        }
        Ok(())
    }
}

/// Interns ground atoms in order of first appearance.
#[derive(Debug, Clone, Default)]
pub struct AtomTable {
    atoms: Vec<GroundAtom>,
    index: HashMap<GroundAtom, AtomId>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, atom: GroundAtom) -> AtomId {
        if let Some(&id) = self.index.get(&atom) {
            return id;
        }
        let id = self.atoms.len();
        self.atoms.push(atom.clone());
        self.index.insert(atom, id);
        id
    }

    pub fn get(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id]
    }

    pub fn id(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.index.get(atom).copied()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &GroundAtom)> {
        self.atoms.iter().enumerate()
    }
}

/// Stratum of an unknown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    Zero,
    Elem,
    Inf,
}

/// Integer combination of exponents of ELEM-tagged atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinForm(BTreeMap<AtomId, i64>);

fn overflow() -> SolverError {
    SolverError::Resource("exponent coefficient overflow".into())
}

impl LinForm {
    pub fn var(id: AtomId) -> Self {
        LinForm(BTreeMap::from([(id, 1)]))
    }

    pub fn terms(&self) -> impl Iterator<Item = (AtomId, i64)> + '_ {
        self.0.iter().map(|(&a, &c)| (a, c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add(&self, other: &LinForm) -> Result<LinForm, SolverError> {
        let mut out = self.0.clone();
        for (&a, &c) in &other.0 {
            let e = out.entry(a).or_insert(0);
            *e = e.checked_add(c).ok_or_else(overflow)?;
            if *e == 0 {
                out.remove(&a);
            }
        }
        Ok(LinForm(out))
    }

    fn scale(&self, k: i64) -> Result<LinForm, SolverError> {
        if k == 0 {
            return Ok(LinForm::default());
        }
        let mut out = BTreeMap::new();
        for (&a, &c) in &self.0 {
            out.insert(a, c.checked_mul(k).ok_or_else(overflow)?);
        }
        Ok(LinForm(out))
    }

    fn sub(&self, other: &LinForm) -> Result<LinForm, SolverError> {
        self.add(&other.scale(-1)?)
    }

    pub fn eval(&self, exponents: &dyn Fn(AtomId) -> BigRational) -> BigRational {
        self.0.iter().fold(BigRational::zero(), |acc, (&a, &c)| {
            acc + exponents(a) * BigRational::from_integer(c.into())
        })
    }
}

/// `form rel 0`, with `rel` one of `<`, `<=`, `=`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub form: LinForm,
    pub rel: Rel,
}

impl Constraint {
    /// Divides by the gcd of the coefficients; equalities get a positive
    /// leading coefficient. `None` for a trivially true constraint, `Err`
    /// for a trivially false one.
    fn normalized(form: LinForm, rel: Rel) -> Result<Option<Constraint>, ()> {
        if form.is_zero() {
            return if rel == Rel::Lt { Err(()) } else { Ok(None) };
        }
        let g = form.0.values().fold(0i64, |g, &c| g.gcd(&c));
        let lead = *form.0.values().next().expect("nonzero form");
        let g = if rel == Rel::Eq && lead < 0 { -g } else { g };
        let form = LinForm(form.0.into_iter().map(|(a, c)| (a, c / g)).collect());
        Ok(Some(Constraint { form, rel }))
    }

    pub fn holds(&self, exponents: &dyn Fn(AtomId) -> BigRational) -> bool {
        let v = self.form.eval(exponents);
        match self.rel {
            Rel::Lt => v.is_negative(),
            Rel::Le => !v.is_positive(),
            Rel::Eq => v.is_zero(),
        }
    }
}

/// One case branch: stratum tags for the atoms it has split on and linear
/// constraints over the exponents of its ELEM atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConstraintSystem {
    tags: BTreeMap<AtomId, Tag>,
    base: Rc<BTreeSet<Constraint>>,
    delta: Vec<Constraint>,
}

impl ConstraintSystem {
    pub fn tags(&self) -> &BTreeMap<AtomId, Tag> {
        &self.tags
    }

    pub fn constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.base.iter().chain(&self.delta)
    }

    pub fn constraint_count(&self) -> usize {
        self.base.len() + self.delta.len()
    }

    fn contains(&self, c: &Constraint) -> bool {
        self.base.contains(c) || self.delta.contains(c)
    }

    /// Adds `form rel 0`; `false` when the branch becomes trivially
    /// inconsistent.
    fn add(&mut self, form: LinForm, rel: Rel) -> bool {
        match Constraint::normalized(form, rel) {
            Err(()) => false,
            Ok(None) => true,
            Ok(Some(c)) => {
                if !self.contains(&c) {
                    self.delta.push(c);
                }
                true
            }
        }
    }

    fn settle(&mut self) {
        if !self.delta.is_empty() {
            let delta = std::mem::take(&mut self.delta);
            Rc::make_mut(&mut self.base).extend(delta);
        }
    }

    /// Whether a valuation lies in the solution set: every tagged atom has
    /// its tag and the ELEM exponents satisfy every constraint.
    pub fn admits(&self, valuation: &dyn Fn(AtomId) -> (Tag, BigRational)) -> bool {
        self.tags.iter().all(|(&a, &t)| valuation(a).0 == t) && {
            let exps = |a| valuation(a).1;
            self.constraints().all(|c| c.holds(&exps))
        }
    }

    /// The exponent system over the ELEM-tagged atoms, which become
    /// variables in ascending atom order.
    pub fn linear_system(&self) -> (LinearSystem, Vec<AtomId>) {
        let vars: Vec<AtomId> = self
            .tags
            .iter()
            .filter(|(_, &t)| t == Tag::Elem)
            .map(|(&a, _)| a)
            .collect();
        let pos: HashMap<AtomId, usize> = vars.iter().enumerate().map(|(i, &a)| (a, i)).collect();
        let mut sys = LinearSystem::new(vars.len());
        for c in self.constraints() {
            let mut coeffs = vec![0i64; vars.len()];
            for (a, k) in c.form.terms() {
                coeffs[pos[&a]] = k;
            }
            sys.push(Row::new(&coeffs, 0, c.rel));
        }
        (sys, vars)
    }

    /// Tag tuple over atoms `0..atoms`, used to order branches.
    pub fn tag_key(&self, atoms: usize) -> Vec<u8> {
        (0..atoms)
            .map(|a| match self.tags.get(&a) {
                None => 0,
                Some(Tag::Zero) => 1,
                Some(Tag::Elem) => 2,
                Some(Tag::Inf) => 3,
            })
            .collect()
    }

    pub fn display<'a>(&'a self, atoms: &'a AtomTable) -> impl fmt::Display + 'a {
        DisplaySystem { sys: self, atoms }
    }
}

struct DisplaySystem<'a> {
    sys: &'a ConstraintSystem,
    atoms: &'a AtomTable,
}

impl fmt::Display for DisplaySystem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .sys
            .tags
            .iter()
            .map(|(&a, t)| {
                let t = match t {
                    Tag::Zero => "ZERO",
                    Tag::Elem => "ELEM",
                    Tag::Inf => "INF",
                };
                format!("{}:{t}", self.atoms.get(a))
            })
            .collect();
        for c in self.sys.constraints() {
            let terms: Vec<String> = c
                .form
                .terms()
                .map(|(a, k)| match k {
                    1 => format!("{}", self.atoms.get(a)),
                    -1 => format!("-{}", self.atoms.get(a)),
                    _ => format!("{k}*{}", self.atoms.get(a)),
                })
                .collect();
            let rel = match c.rel {
                Rel::Lt => "<",
                Rel::Le => "<=",
                Rel::Eq => "=",
            };
            parts.push(format!("{} {rel} 0", terms.join(" + ")));
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sym {
    Zero,
    Elem(LinForm),
    Inf,
}

impl Sym {
    fn stratum(&self) -> u8 {
        match self {
            Sym::Zero => 0,
            Sym::Elem(_) => 1,
            Sym::Inf => 2,
        }
    }

    fn inv(self) -> Result<Sym, SolverError> {
        Ok(match self {
            Sym::Zero => Sym::Inf,
            Sym::Inf => Sym::Zero,
            Sym::Elem(x) => Sym::Elem(x.scale(-1)?),
        })
    }

    fn mul(self, other: Sym) -> Result<Sym, SolverError> {
        Ok(match (self, other) {
            (Sym::Zero, Sym::Inf) | (Sym::Inf, Sym::Zero) => Sym::Elem(LinForm::default()),
            (Sym::Zero, _) | (_, Sym::Zero) => Sym::Zero,
            (Sym::Inf, _) | (_, Sym::Inf) => Sym::Inf,
            (Sym::Elem(x), Sym::Elem(y)) => Sym::Elem(x.add(&y)?),
        })
    }
}

type Branches = Vec<(ConstraintSystem, Sym)>;

pub(crate) struct Compiler<'a> {
    pub atoms: &'a mut AtomTable,
    pub options: &'a SolverOptions,
    pub pruned: usize,
}

fn ground_atom(pred: &str, args: &[Term]) -> Result<GroundAtom, SolverError> {
    let args = args
        .iter()
        .map(|t| match t {
            Term::App(c, a) if a.is_empty() => Ok(c.clone()),
            _ => Err(SolverError::NotGround(format!("{pred} has argument `{t}`"))),
        })
        .collect::<Result<_, _>>()?;
    Ok(GroundAtom {
        pred: pred.to_string(),
        args,
    })
}

impl Compiler<'_> {
    fn check(&mut self, mut out: Branches) -> Result<Branches, SolverError> {
        if out.len() > self.options.prune_above {
            let before = out.len();
            out = out
                .into_iter()
                .filter_map(
                    |(mut s, v)| match feasible(&mut s, self.options.row_limit) {
                        Ok(true) => Some(Ok((s, v))),
                        Ok(false) => None,
                        Err(e) => Some(Err(e)),
                    },
                )
                .collect::<Result<_, _>>()?;
            self.pruned += before - out.len();
        }
        if out.len() > self.options.branch_budget {
            return Err(SolverError::Resource(format!(
                "branch budget of {} exceeded ({} live branches)",
                self.options.branch_budget,
                out.len()
            )));
        }
        Ok(out)
    }

    fn compare(
        &self,
        a: &Sym,
        b: &Sym,
        sys: ConstraintSystem,
    ) -> Result<Vec<(ConstraintSystem, Ordering)>, SolverError> {
        let (Sym::Elem(x), Sym::Elem(y)) = (a, b) else {
            return Ok(vec![(sys, a.stratum().cmp(&b.stratum()))]);
        };
        let d = x.sub(y)?;
        if d.is_zero() {
            return Ok(vec![(sys, Ordering::Equal)]);
        }
        let neg = d.scale(-1)?;
        let lt = Constraint::normalized(d.clone(), Rel::Lt)
            .expect("nonzero")
            .expect("nonzero");
        let eq = Constraint::normalized(d.clone(), Rel::Eq)
            .expect("nonzero")
            .expect("nonzero");
        let gt = Constraint::normalized(neg.clone(), Rel::Lt)
            .expect("nonzero")
            .expect("nonzero");
        if sys.contains(&lt) {
            return Ok(vec![(sys, Ordering::Less)]);
        }
        if sys.contains(&eq) {
            return Ok(vec![(sys, Ordering::Equal)]);
        }
        if sys.contains(&gt) {
            return Ok(vec![(sys, Ordering::Greater)]);
        }
        let mut out = Vec::with_capacity(3);
        for (form, rel, ord) in [
            (d.clone(), Rel::Lt, Ordering::Less),
            (d, Rel::Eq, Ordering::Equal),
            (neg, Rel::Lt, Ordering::Greater),
        ] {
            let mut s = sys.clone();
            if s.add(form, rel) {
                out.push((s, ord));
            }
        }
        Ok(out)
    }

    fn apply(
        &self,
        op: BinOp,
        a: Sym,
        b: Sym,
        sys: ConstraintSystem,
    ) -> Result<Branches, SolverError> {
        if op == BinOp::Tensor {
            return Ok(vec![(sys, a.mul(b)?)]);
        }
        let mut out = Vec::new();
        for (s, ord) in self.compare(&a, &b, sys)? {
            let v = match op {
                BinOp::And => {
                    if ord.is_le() {
                        a.clone()
                    } else {
                        b.clone()
                    }
                }
                BinOp::Or => {
                    if ord.is_ge() {
                        a.clone()
                    } else {
                        b.clone()
                    }
                }
                BinOp::Imp => {
                    if ord.is_le() {
                        Sym::Inf
                    } else {
                        b.clone()
                    }
                }
                BinOp::Iff => match ord {
                    Ordering::Less => a.clone(),
                    Ordering::Equal => Sym::Inf,
                    Ordering::Greater => b.clone(),
                },
                BinOp::DArrow => {
                    if ord.is_lt() {
                        Sym::Inf
                    } else {
                        b.clone()
                    }
                }
                BinOp::DDArrow => {
                    if ord.is_lt() {
                        Sym::Inf
                    } else if a == Sym::Inf && b == Sym::Inf {
                        Sym::Zero
                    } else {
                        b.clone()
                    }
                }
                BinOp::LukImp => {
                    if ord.is_le() {
                        Sym::Inf
                    } else {
                        b.clone().mul(a.clone().inv()?)?
                    }
                }
                BinOp::Tensor => unreachable!("handled above"),
            };
            out.push((s, v));
        }
        Ok(out)
    }

    fn eval(&mut self, phi: &Formula, sys: ConstraintSystem) -> Result<Branches, SolverError> {
        use Formula as F;
        let out = match phi {
            F::Bot => vec![(sys, Sym::Zero)],
            F::Top => vec![(sys, Sym::Inf)],
            F::One => vec![(sys, Sym::Elem(LinForm::default()))],
            F::Atom(p, args) => {
                let id = self.atoms.intern(ground_atom(p, args)?);
                let value = |t: Tag| match t {
                    Tag::Zero => Sym::Zero,
                    Tag::Elem => Sym::Elem(LinForm::var(id)),
                    Tag::Inf => Sym::Inf,
                };
                match sys.tags.get(&id) {
                    Some(&t) => vec![(sys, value(t))],
                    None => [Tag::Zero, Tag::Elem, Tag::Inf]
                        .into_iter()
                        .map(|t| {
                            let mut s = sys.clone();
                            s.tags.insert(id, t);
                            (s, value(t))
                        })
                        .collect(),
                }
            }
            F::Binary(op, l, r) => {
                let mut out = Vec::new();
                for (s1, a) in self.eval(l, sys)? {
                    for (s2, b) in self.eval(r, s1)? {
                        out.extend(self.apply(*op, a.clone(), b, s2)?);
                    }
                    if out.len() > self.options.branch_budget {
                        out = self.check(out)?;
                    }
                }
                out
            }
            F::Inv(g) => self
                .eval(g, sys)?
                .into_iter()
                .map(|(s, v)| Ok((s, v.inv()?)))
                .collect::<Result<_, SolverError>>()?,
            F::Not(g) => self
                .eval(g, sys)?
                .into_iter()
                .map(|(s, v)| (s, if v == Sym::Zero { Sym::Inf } else { Sym::Zero }))
                .collect(),
            F::Delta(g) => self
                .eval(g, sys)?
                .into_iter()
                .map(|(s, v)| (s, if v == Sym::Inf { Sym::Inf } else { Sym::Zero }))
                .collect(),
            F::Power(g, n) => {
                let n = i64::from(*n);
                self.eval(g, sys)?
                    .into_iter()
                    .map(|(s, v)| {
                        Ok((
                            s,
                            match v {
                                Sym::Elem(x) if n > 0 => Sym::Elem(x.scale(n)?),
                                other => other,
                            },
                        ))
                    })
                    .collect::<Result<_, SolverError>>()?
            }
            F::Quant(..) => return Err(SolverError::NotGround(phi.to_string())),
        };
        self.check(out)
    }

    /// Branches of `sys` on which `phi` evaluates to `inf`.
    pub fn require_inf(
        &mut self,
        phi: &Formula,
        sys: ConstraintSystem,
    ) -> Result<Vec<ConstraintSystem>, SolverError> {
        let mut out: Vec<ConstraintSystem> = self
            .eval(phi, sys)?
            .into_iter()
            .filter(|(_, v)| *v == Sym::Inf)
            .map(|(s, _)| s)
            .collect();
        for s in out.iter_mut() {
            s.settle();
        }
        Ok(out)
    }
}

fn feasible(sys: &mut ConstraintSystem, row_limit: usize) -> Result<bool, SolverError> {
    sys.settle();
    let (ls, _) = sys.linear_system();
    match fm_solve(&ls, row_limit) {
        Ok(FmOutcome::Sat(_)) => Ok(true),
        Ok(FmOutcome::Unsat) => Ok(false),
        Err(e) => Err(SolverError::Resource(format!(
            "elimination exceeded {} rows",
            e.limit
        ))),
    }
}

/// The case branches on which the ground sentence `phi` evaluates to `inf`.
/// Their solution sets together are exactly the valuations of the atoms
/// that make `phi` true.
pub fn compile(
    phi: &Formula,
    atoms: &mut AtomTable,
    options: &SolverOptions,
) -> Result<Vec<ConstraintSystem>, SolverError> {
    let mut c = Compiler {
        atoms,
        options,
        pruned: 0,
    };
    c.require_inf(phi, ConstraintSystem::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Signature};

    fn branches(text: &str) -> (Vec<ConstraintSystem>, AtomTable) {
        let sig = Signature::new()
            .with_predicate("P", 0)
            .with_predicate("Q", 0);
        let f = parse(text, &sig).unwrap();
        let mut atoms = AtomTable::new();
        let out = compile(&f, &mut atoms, &SolverOptions::default()).unwrap();
        (out, atoms)
    }

    #[test]
    fn delta_has_one_branch() {
        let (b, atoms) = branches("delta(P)");
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].display(&atoms).to_string(), "{P:INF}");
    }

    #[test]
    fn bottom_has_none() {
        assert!(branches("bot").0.is_empty());
    }

    #[test]
    fn double_arrow_cases() {
        let (b, atoms) = branches("P ==> Q");
        let shown: Vec<String> = b.iter().map(|s| s.display(&atoms).to_string()).collect();
        for expected in [
            "{P:ELEM, Q:ELEM, P + -Q < 0}",
            "{P:ZERO, Q:ELEM}",
            "{P:ZERO, Q:INF}",
            "{P:ELEM, Q:INF}",
        ] {
            assert!(
                shown.iter().any(|s| s == expected),
                "{expected} missing from {shown:?}"
            );
        }
        assert_eq!(shown.len(), 4);
    }

    #[test]
    fn known_comparisons_do_not_split() {
        let (b, _) = branches("(P -> Q) /\\ (P -> Q) /\\ (P -> Q)");
        let (single, _) = branches("P -> Q");
        assert_eq!(b.len(), single.len());
    }
}
