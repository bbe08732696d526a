use std::collections::{BTreeMap, HashMap};

use super::formula::{CFormula, Sort, ValTerm};
use super::structure::ClassicalStructure;
use super::ClassicalError;
use crate::group::{tv_inv, tv_mul, TruthValue};
use crate::syntax::{Quantifier, Term};

/// Assignment for the two sorts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClassicalAssignment {
    pub objects: BTreeMap<String, usize>,
    pub values: BTreeMap<String, TruthValue>,
}

impl ClassicalAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_object(mut self, var: impl Into<String>, element: usize) -> Self {
        self.objects.insert(var.into(), element);
        self
    }

    pub fn with_value(mut self, var: impl Into<String>, value: TruthValue) -> Self {
        self.values.insert(var.into(), value);
        self
    }
}

type NodeId = usize;
type Slot = usize;
const UNBOUND: u32 = u32::MAX;

enum Ot {
    Var(Slot),
    App(String, Vec<Ot>),
}

enum Vt {
    Var(Slot),
    Const(TruthValue),
    Mul(Box<Vt>, Box<Vt>),
    Inv(Box<Vt>),
}

impl Vt {
    fn mentions(&self, s: Slot) -> bool {
        match self {
            Vt::Var(v) => *v == s,
            Vt::Const(_) => false,
            Vt::Mul(a, b) => a.mentions(s) || b.mentions(s),
            Vt::Inv(a) => a.mentions(s),
        }
    }

    fn as_var(&self) -> Option<Slot> {
        match self {
            Vt::Var(s) => Some(*s),
            _ => None,
        }
    }
}

enum Node {
    Le(Vt, Vt),
    VEq(Vt, Vt),
    OEq(Ot, Ot),
    Rel(usize, Vec<Ot>, Vt),
    Not(NodeId),
    And(Vec<NodeId>),
    Or(Vec<NodeId>),
    Imp(NodeId, NodeId),
    Quant(Quantifier, Sort, Slot, NodeId),
}

struct Program {
    nodes: Vec<Node>,
    free: Vec<Vec<Slot>>,
    slots: usize,
    inputs: Vec<(String, Sort, Slot)>,
    root: NodeId,
}

struct Compiler<'a> {
    c: &'a ClassicalStructure,
    rel_ids: HashMap<String, usize>,
    nodes: Vec<Node>,
    free: Vec<Vec<Slot>>,
    scope: Vec<(String, Sort, Slot)>,
    inputs: Vec<(String, Sort, Slot)>,
    slots: usize,
}

impl Compiler<'_> {
    fn new_slot(&mut self) -> Slot {
        self.slots += 1;
        self.slots - 1
    }

    fn resolve(&mut self, name: &str, sort: Sort) -> Result<Slot, ClassicalError> {
        let found = self
            .scope
            .iter()
            .rev()
            .chain(self.inputs.iter())
            .find(|(n, _, _)| n == name)
            .map(|&(_, s, slot)| (s, slot));
        match found {
            Some((s, slot)) if s == sort => Ok(slot),
            Some(_) => Err(ClassicalError::Sort(name.to_string())),
            None => {
                let slot = self.new_slot();
                self.inputs.push((name.to_string(), sort, slot));
                Ok(slot)
            }
        }
    }

    fn obj(&mut self, t: &Term, fv: &mut Vec<Slot>) -> Result<Ot, ClassicalError> {
        Ok(match t {
            Term::Var(v) => {
                let s = self.resolve(v, Sort::Object)?;
                fv.push(s);
                Ot::Var(s)
            }
            Term::App(f, args) => {
                if self.c.source().signature().function_arity(f) != Some(args.len()) {
                    return Err(ClassicalError::UnknownSymbol(f.clone()));
                }
                let args = args
                    .iter()
                    .map(|a| self.obj(a, fv))
                    .collect::<Result<_, _>>()?;
                Ot::App(f.clone(), args)
            }
        })
    }

    fn val(&mut self, t: &ValTerm, fv: &mut Vec<Slot>) -> Result<Vt, ClassicalError> {
        let backend = self.c.source().backend();
        Ok(match t {
            ValTerm::Var(v) => {
                let s = self.resolve(v, Sort::Value)?;
                fv.push(s);
                Vt::Var(s)
            }
            ValTerm::Zero => Vt::Const(TruthValue::Zero),
            ValTerm::One => Vt::Const(TruthValue::one(backend)),
            ValTerm::Inf => Vt::Const(TruthValue::Inf),
            ValTerm::Mul(a, b) => Vt::Mul(Box::new(self.val(a, fv)?), Box::new(self.val(b, fv)?)),
            ValTerm::Inv(a) => Vt::Inv(Box::new(self.val(a, fv)?)),
        })
    }

    fn push(&mut self, node: Node, mut fv: Vec<Slot>) -> NodeId {
        fv.sort_unstable();
        fv.dedup();
        self.nodes.push(node);
        self.free.push(fv);
        self.nodes.len() - 1
    }

    fn compile(&mut self, f: &CFormula) -> Result<NodeId, ClassicalError> {
        let mut fv = Vec::new();
        let node = match f {
            CFormula::Le(a, b) => Node::Le(self.val(a, &mut fv)?, self.val(b, &mut fv)?),
            CFormula::ValEq(a, b) => Node::VEq(self.val(a, &mut fv)?, self.val(b, &mut fv)?),
            CFormula::ObjEq(a, b) => Node::OEq(self.obj(a, &mut fv)?, self.obj(b, &mut fv)?),
            CFormula::Rel(r, args, g) => {
                let id = *self
                    .rel_ids
                    .get(r)
                    .ok_or_else(|| ClassicalError::UnknownSymbol(r.clone()))?;
                let (arity, _) = self.c.relation_table(r).expect("relation exists");
                if arity != args.len() {
                    return Err(ClassicalError::UnknownSymbol(r.clone()));
                }
                let args = args
                    .iter()
                    .map(|a| self.obj(a, &mut fv))
                    .collect::<Result<_, _>>()?;
                Node::Rel(id, args, self.val(g, &mut fv)?)
            }
            CFormula::Not(g) => {
                let g = self.compile(g)?;
                fv.extend(&self.free[g]);
                Node::Not(g)
            }
            CFormula::And(gs) | CFormula::Or(gs) => {
                let mut ids = Vec::with_capacity(gs.len());
                for g in gs {
                    let id = self.compile(g)?;
                    fv.extend(&self.free[id]);
                    ids.push(id);
                }
                if matches!(f, CFormula::And(_)) {
                    Node::And(ids)
                } else {
                    Node::Or(ids)
                }
            }
            CFormula::Imp(a, b) => {
                let a = self.compile(a)?;
                let b = self.compile(b)?;
                fv.extend(&self.free[a]);
                fv.extend(&self.free[b]);
                Node::Imp(a, b)
            }
            CFormula::Quant(q, sort, v, body) => {
                let slot = self.new_slot();
                self.scope.push((v.clone(), *sort, slot));
                let body = self.compile(body);
                self.scope.pop();
                let body = body?;
                fv.extend(self.free[body].iter().filter(|&&s| s != slot));
                Node::Quant(*q, *sort, slot, body)
            }
        };
        Ok(self.push(node, fv))
    }
}

fn compile(f: &CFormula, c: &ClassicalStructure) -> Result<Program, ClassicalError> {
    let rel_ids = c
        .source()
        .signature()
        .predicates()
        .enumerate()
        .map(|(i, (name, _))| (name.to_string(), i))
        .collect();
    let mut comp = Compiler {
        c,
        rel_ids,
        nodes: Vec::new(),
        free: Vec::new(),
        scope: Vec::new(),
        inputs: Vec::new(),
        slots: 0,
    };
    let root = comp.compile(f)?;
    Ok(Program {
        nodes: comp.nodes,
        free: comp.free,
        slots: comp.slots,
        inputs: comp.inputs,
        root,
    })
}

/// Tarskian evaluation with candidate generation: an existential value
/// quantifier first asks its body for a finite superset of the values that
/// can satisfy it (graph lookups, equations, order ranges) and only falls
/// back to scanning the whole value sort when no such set is available.
/// Quantifier results are memoized on the values of their free variables.
struct Evaluator<'a> {
    c: &'a ClassicalStructure,
    p: &'a Program,
    rels: Vec<&'a [u32]>,
    env: Vec<u32>,
    holds_memo: HashMap<(NodeId, Vec<u32>), bool>,
    cands_memo: HashMap<(NodeId, Slot, Vec<u32>), Option<Vec<u32>>>,
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn union(mut a: Vec<u32>, b: &[u32]) -> Vec<u32> {
    a.extend_from_slice(b);
    a.sort_unstable();
    a.dedup();
    a
}

impl<'a> Evaluator<'a> {
    fn key(&self, n: NodeId) -> Vec<u32> {
        self.p.free[n].iter().map(|&s| self.env[s]).collect()
    }

    fn all_bound(&self, n: NodeId) -> bool {
        self.p.free[n].iter().all(|&s| self.env[s] != UNBOUND)
    }

    fn obj(&self, t: &Ot) -> Option<usize> {
        match t {
            Ot::Var(s) => {
                let v = self.env[*s];
                (v != UNBOUND).then_some(v as usize)
            }
            Ot::App(f, args) => {
                let args = args
                    .iter()
                    .map(|a| self.obj(a))
                    .collect::<Option<Vec<_>>>()?;
                self.c.source().function_value(f, &args)
            }
        }
    }

    fn val(&self, t: &Vt) -> Option<TruthValue> {
        match t {
            Vt::Var(s) => {
                let v = self.env[*s];
                (v != UNBOUND).then(|| self.c.values()[v as usize].clone())
            }
            Vt::Const(v) => Some(v.clone()),
            Vt::Mul(a, b) => {
                let (a, b) = (self.val(a)?, self.val(b)?);
                Some(tv_mul(&a, &b, self.c.source().backend()).expect("single backend"))
            }
            Vt::Inv(a) => Some(tv_inv(&self.val(a)?)),
        }
    }

    fn compare(&self, a: &Vt, b: &Vt) -> std::cmp::Ordering {
        if let (Some(x), Some(y)) = (a.as_var(), b.as_var()) {
            return self.env[x].cmp(&self.env[y]);
        }
        self.val(a)
            .expect("bound")
            .cmp(&self.val(b).expect("bound"))
    }

    fn holds(&mut self, n: NodeId) -> bool {
        let p = self.p;
        match &p.nodes[n] {
            Node::Le(a, b) => self.compare(a, b).is_le(),
            Node::VEq(a, b) => self.compare(a, b).is_eq(),
            Node::OEq(a, b) => self.obj(a) == self.obj(b),
            Node::Rel(r, args, g) => {
                let args: Vec<usize> = args.iter().map(|a| self.obj(a).expect("bound")).collect();
                let idx =
                    self.rels[*r][crate::semantics::tuple_index(self.c.object_count(), &args)];
                match g.as_var() {
                    Some(s) => self.env[s] == idx,
                    None => self.val(g).expect("bound") == self.c.values()[idx as usize],
                }
            }
            Node::Not(g) => !self.holds(*g),
            Node::And(gs) => gs.iter().all(|&g| self.holds(g)),
            Node::Or(gs) => gs.iter().any(|&g| self.holds(g)),
            Node::Imp(a, b) => !self.holds(*a) || self.holds(*b),
            Node::Quant(q, sort, slot, body) => {
                let key = (n, self.key(n));
                if let Some(&r) = self.holds_memo.get(&key) {
                    return r;
                }
                let forall = *q == Quantifier::Forall;
                let domain: Vec<u32> = match (sort, q) {
                    (Sort::Object, _) => (0..self.c.object_count() as u32).collect(),
                    (Sort::Value, Quantifier::Forall) => match &p.nodes[*body] {
                        Node::Imp(a, _) => self.cands(*a, *slot),
                        _ => None,
                    }
                    .unwrap_or_else(|| (0..self.c.values().len() as u32).collect()),
                    (Sort::Value, Quantifier::Exists) => self
                        .cands(*body, *slot)
                        .unwrap_or_else(|| (0..self.c.values().len() as u32).collect()),
                };
                let saved = self.env[*slot];
                let mut result = forall;
                for d in domain {
                    self.env[*slot] = d;
                    if self.holds(*body) != forall {
                        result = !forall;
                        break;
                    }
                }
                self.env[*slot] = saved;
                self.holds_memo.insert(key, result);
                result
            }
        }
    }

    /// A sorted superset of the values of the unbound slot `h` for which
    /// node `n` can hold, or `None` when no restriction is known. Other
    /// unbound slots are treated as unknown.
    fn cands(&mut self, n: NodeId, h: Slot) -> Option<Vec<u32>> {
        let p = self.p;
        if !p.free[n].contains(&h) {
            if self.all_bound(n) && !self.holds(n) {
                return Some(Vec::new());
            }
            return None;
        }
        let in_sort = |this: &Self, v: Option<TruthValue>| -> Option<Vec<u32>> {
            let v = v?;
            Some(this.c.value_index(&v).into_iter().collect())
        };
        match &p.nodes[n] {
            Node::Rel(r, args, g) if g.as_var() == Some(h) => {
                let args = args
                    .iter()
                    .map(|a| self.obj(a))
                    .collect::<Option<Vec<usize>>>()?;
                Some(vec![
                    self.rels[*r][crate::semantics::tuple_index(self.c.object_count(), &args)],
                ])
            }
            Node::VEq(a, b) => {
                if a.as_var() == Some(h) && !b.mentions(h) {
                    in_sort(self, self.val(b))
                } else if b.as_var() == Some(h) && !a.mentions(h) {
                    in_sort(self, self.val(a))
                } else {
                    None
                }
            }
            Node::Le(a, b) => {
                let values = self.c.values();
                if a.as_var() == Some(h) && !b.mentions(h) {
                    let bound = self.val(b)?;
                    let end = values.partition_point(|v| *v <= bound) as u32;
                    Some((0..end).collect())
                } else if b.as_var() == Some(h) && !a.mentions(h) {
                    let bound = self.val(a)?;
                    let start = values.partition_point(|v| *v < bound) as u32;
                    Some((start..values.len() as u32).collect())
                } else {
                    None
                }
            }
            Node::And(gs) => {
                let mut acc: Option<Vec<u32>> = None;
                for &g in gs {
                    if let Some(v) = self.cands(g, h) {
                        acc = Some(match acc {
                            None => v,
                            Some(a) => intersect(&a, &v),
                        });
                        if acc.as_ref().is_some_and(Vec::is_empty) {
                            break;
                        }
                    }
                }
                acc
            }
            Node::Or(gs) => {
                let mut acc = Vec::new();
                for &g in gs {
                    acc = union(acc, &self.cands(g, h)?);
                }
                Some(acc)
            }
            Node::Imp(a, b) => {
                if !p.free[*a].contains(&h) && self.all_bound(*a) {
                    if self.holds(*a) {
                        self.cands(*b, h)
                    } else {
                        None
                    }
                } else {
                    None
                }
            }
            Node::Quant(Quantifier::Exists, sort, slot, body) => {
                let key = (n, h, self.key(n));
                if let Some(r) = self.cands_memo.get(&key) {
                    return r.clone();
                }
                let witnesses = match sort {
                    Sort::Object => Some((0..self.c.object_count() as u32).collect()),
                    Sort::Value => self.cands(*body, *slot),
                };
                let saved = self.env[*slot];
                let mut result = witnesses.as_ref().map(|_| Vec::new());
                for w in witnesses.unwrap_or_default() {
                    self.env[*slot] = w;
                    match self.cands(*body, h) {
                        Some(v) => result = result.map(|acc| union(acc, &v)),
                        None => {
                            result = None;
                            break;
                        }
                    }
                }
                self.env[*slot] = saved;
                self.cands_memo.insert(key, result.clone());
                result
            }
            Node::Quant(Quantifier::Forall, sort, slot, body) => {
                let key = (n, h, self.key(n));
                if let Some(r) = self.cands_memo.get(&key) {
                    return r.clone();
                }
                // h must lie in the candidates of every instance whose
                // guard holds; instances without information are skipped
                let (guard, inner, domain) = match (sort, &p.nodes[*body]) {
                    (Sort::Object, _) => (
                        None,
                        *body,
                        Some((0..self.c.object_count() as u32).collect()),
                    ),
                    (Sort::Value, Node::Imp(a, b)) if !p.free[*a].contains(&h) => {
                        (Some(*a), *b, self.cands(*a, *slot))
                    }
                    _ => (None, *body, None),
                };
                let saved = self.env[*slot];
                let mut result: Option<Vec<u32>> = None;
                for w in domain.unwrap_or_default() {
                    self.env[*slot] = w;
                    if let Some(a) = guard {
                        if !self.all_bound(a) {
                            result = None;
                            break;
                        }
                        if !self.holds(a) {
                            continue;
                        }
                    }
                    if let Some(v) = self.cands(inner, h) {
                        result = Some(match result {
                            None => v,
                            Some(acc) => intersect(&acc, &v),
                        });
                    }
                }
                self.env[*slot] = saved;
                self.cands_memo.insert(key, result.clone());
                result
            }
            _ => None,
        }
    }
}

/// Classical satisfaction of `psi` in `c` under `v`. Value quantifiers
/// range over the finite value sort of `c`; value terms are computed in the
/// full carrier.
pub fn eval_classical(
    psi: &CFormula,
    c: &ClassicalStructure,
    v: &ClassicalAssignment,
) -> Result<bool, ClassicalError> {
    let program = compile(psi, c)?;
    let rels = c
        .source()
        .signature()
        .predicates()
        .map(|(name, _)| c.relation_table(name).expect("relation exists").1)
        .collect();
    let mut env = vec![UNBOUND; program.slots];
    for (name, sort, slot) in &program.inputs {
        env[*slot] = match sort {
            Sort::Object => match v.objects.get(name) {
                Some(&o) if o < c.object_count() => o as u32,
                Some(&o) => return Err(ClassicalError::UnknownElement(o.to_string())),
                None => return Err(ClassicalError::Unbound(name.clone())),
            },
            Sort::Value => {
                let value = v
                    .values
                    .get(name)
                    .ok_or_else(|| ClassicalError::Unbound(name.clone()))?;
                c.value_index(value)
                    .ok_or_else(|| ClassicalError::ValueOutsideSort(value.to_string()))?
            }
        };
    }
    let mut e = Evaluator {
        c,
        p: &program,
        rels,
        env,
        holds_memo: HashMap::new(),
        cands_memo: HashMap::new(),
    };
    Ok(e.holds(program.root))
}
