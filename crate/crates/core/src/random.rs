//! Seeded generators for values, signatures, structures and sentences.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{tv_max, tv_min, Backend, GroupElem, TruthValue};
use crate::semantics::{tuples, Structure, StructureBuilder};
use crate::syntax::{BinOp, Formula, Quantifier, Signature, Term};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_elem<R: Rng>(rng: &mut R, backend: Backend) -> GroupElem {
    let pow = |rng: &mut R, base: i64| {
        GroupElem::ratio(base, 1)
            .unwrap()
            .pow(rng.gen_range(-1..=1))
    };
    match backend {
        Backend::Rat => pow(rng, 2).mul(&pow(rng, 3)).unwrap(),
        Backend::Lex2 => {
            let a = pow(rng, 2);
            let b = pow(rng, 2);
            GroupElem::lex2(a.as_rat().unwrap().clone(), b.as_rat().unwrap().clone()).unwrap()
        }
    }
}

/// `0` or `inf` with probability 1/8 each, otherwise a group element
/// `2^i 3^j` (RAT) or `(2^i, 2^j)` (LEX2) with `i, j` in `-1..=1`.
pub fn random_value<R: Rng>(rng: &mut R, backend: Backend) -> TruthValue {
    match rng.gen_range(0..8) {
        0 => TruthValue::Zero,
        1 => TruthValue::Inf,
        _ => TruthValue::Elem(small_elem(rng, backend)),
    }
}

/// Up to `max_predicates` predicates `P0, P1, ...` with arities in
/// `0..=max_arity`.
pub fn random_signature<R: Rng>(rng: &mut R, max_predicates: usize, max_arity: usize) -> Signature {
    let count = rng.gen_range(1..=max_predicates.max(1));
    let mut sig = Signature::new();
    for i in 0..count {
        sig.add_predicate(&format!("P{i}"), rng.gen_range(0..=max_arity))
            .expect("fresh name");
    }
    sig
}

/// A structure over `sig` with universe `m0 .. m{size-1}`. Function tables
/// are uniform; predicate values come from [`random_value`].
pub fn random_structure<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    size: usize,
    backend: Backend,
) -> Structure {
    let names: Vec<String> = (0..size).map(|i| format!("m{i}")).collect();
    let mut b = StructureBuilder::new(backend, &names).expect("nonempty universe");
    for (f, arity) in sig.functions() {
        b.declare_function(f, arity).expect("valid signature");
        for t in tuples(size, arity) {
            b.set_function_idx(f, &t, rng.gen_range(0..size))
                .expect("in range");
        }
    }
    for (p, arity) in sig.predicates() {
        b.declare_predicate(p, arity).expect("valid signature");
        for t in tuples(size, arity) {
            b.set_predicate_idx(p, &t, random_value(rng, backend))
                .expect("in range");
        }
    }
    if let Some(e) = sig.equality() {
        b.set_equality(e).expect("binary predicate");
    }
    b.build().expect("total tables")
}

/// A structure whose binary predicate `e` satisfies the similarity axioms:
/// random symmetric values are closed under max-min paths and the diagonal
/// is set to `inf`. Other predicates of `sig` are filled at random.
pub fn random_similarity_structure<R: Rng>(
    rng: &mut R,
    sig: &Signature,
    size: usize,
    backend: Backend,
) -> Structure {
    let e = sig.equality().expect("signature with equality").to_string();
    let mut m = vec![vec![TruthValue::Inf; size]; size];
    for a in 0..size {
        for b in a + 1..size {
            let v = random_value(rng, backend);
            m[a][b] = v.clone();
            m[b][a] = v;
        }
    }
    for c in 0..size {
        for a in 0..size {
            for b in 0..size {
                let through = tv_min(&m[a][c], &m[c][b]).expect("single backend");
                m[a][b] = tv_max(&m[a][b], &through).expect("single backend");
            }
        }
    }
    let names: Vec<String> = (0..size).map(|i| format!("m{i}")).collect();
    let mut b = StructureBuilder::new(backend, &names).expect("nonempty universe");
    b.set_equality(&e).expect("binary predicate");
    for (x, row) in m.into_iter().enumerate() {
        for (y, v) in row.into_iter().enumerate() {
            b.set_predicate_idx(&e, &[x, y], v).expect("in range");
        }
    }
    for (p, arity) in sig.predicates().filter(|(p, _)| *p != e) {
        b.declare_predicate(p, arity).expect("valid signature");
        for t in tuples(size, arity) {
            b.set_predicate_idx(p, &t, random_value(rng, backend))
                .expect("in range");
        }
    }
    b.build().expect("total tables")
}

/// Shape of generated sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SentenceShape {
    /// Maximum nesting depth, atoms at depth 1.
    pub depth: usize,
    pub quantifier_depth: usize,
    /// Allow derived connectives.
    pub derived: bool,
}

struct SentenceGen<'a, R> {
    rng: &'a mut R,
    sig: &'a Signature,
    shape: SentenceShape,
    counter: usize,
}

impl<R: Rng> SentenceGen<'_, R> {
    fn term(&mut self, vars: &[String]) -> Option<Term> {
        let constants: Vec<&str> = self
            .sig
            .functions()
            .filter(|(_, a)| *a == 0)
            .map(|(f, _)| f)
            .collect();
        let total = vars.len() + constants.len();
        if total == 0 {
            return None;
        }
        let i = self.rng.gen_range(0..total);
        Some(if i < vars.len() {
            Term::var(&vars[i])
        } else {
            Term::constant(constants[i - vars.len()])
        })
    }

    fn leaf(&mut self, vars: &[String]) -> Formula {
        let preds: Vec<(String, usize)> = self
            .sig
            .predicates()
            .map(|(p, a)| (p.to_string(), a))
            .collect();
        let usable: Vec<&(String, usize)> = preds
            .iter()
            .filter(|(_, a)| {
                *a == 0 || !vars.is_empty() || self.sig.functions().any(|(_, k)| k == 0)
            })
            .collect();
        if !usable.is_empty() && self.rng.gen_range(0..5) > 0 {
            let (p, arity) = usable.choose(self.rng).expect("nonempty");
            let args = (0..*arity)
                .map(|_| self.term(vars).expect("usable"))
                .collect();
            return Formula::atom(p.clone(), args);
        }
        match self.rng.gen_range(0..3) {
            0 => Formula::Bot,
            1 => Formula::One,
            _ if self.shape.derived => Formula::Top,
            _ => Formula::One,
        }
    }

    fn formula(&mut self, depth: usize, qleft: usize, vars: &mut Vec<String>) -> Formula {
        if depth <= 1 || self.rng.gen_range(0..6) == 0 {
            return self.leaf(vars);
        }
        let core_ops = [BinOp::And, BinOp::Imp, BinOp::Tensor];
        let choice = self.rng.gen_range(0..10);
        if qleft > 0 && choice < 3 {
            let x = format!("x{}", self.counter);
            self.counter += 1;
            let q = if self.rng.gen() {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            vars.push(x.clone());
            let body = self.formula(depth - 1, qleft - 1, vars);
            vars.pop();
            return Formula::Quant(q, x, Box::new(body));
        }
        if choice == 3 {
            return Formula::inv(self.formula(depth - 1, qleft, vars));
        }
        if self.shape.derived && choice == 4 {
            let inner = self.formula(depth - 1, qleft, vars);
            return match self.rng.gen_range(0..3) {
                0 => Formula::not(inner),
                1 => Formula::delta(inner),
                _ => Formula::power(inner, self.rng.gen_range(1..=3)),
            };
        }
        let op = if self.shape.derived {
            *BinOp::ALL.choose(self.rng).expect("nonempty")
        } else {
            *core_ops.choose(self.rng).expect("nonempty")
        };
        let l = self.formula(depth - 1, qleft, vars);
        let r = self.formula(depth - 1, qleft, vars);
        Formula::binary(op, l, r)
    }
}

/// A random sentence over `sig` within `shape`.
pub fn random_sentence<R: Rng>(rng: &mut R, sig: &Signature, shape: SentenceShape) -> Formula {
    let mut g = SentenceGen {
        rng,
        sig,
        shape,
        counter: 0,
    };
    g.formula(shape.depth, shape.quantifier_depth, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::check_similarity;
    use crate::syntax::is_sentence;

    #[test]
    fn sentences_respect_shape() {
        let mut r = rng(7);
        for _ in 0..500 {
            let sig = random_signature(&mut r, 2, 2);
            let shape = SentenceShape {
                depth: 4,
                quantifier_depth: 2,
                derived: false,
            };
            let f = random_sentence(&mut r, &sig, shape);
            assert!(is_sentence(&f), "{f}");
            assert!(f.is_core(), "{f}");
            assert!(f.depth() <= 4 && f.quantifier_depth() <= 2, "{f}");
        }
    }

    #[test]
    fn generation_is_reproducible() {
        let make = |seed| {
            let mut r = rng(seed);
            let sig = random_signature(&mut r, 2, 2);
            random_structure(&mut r, &sig, 3, Backend::Rat).to_string()
        };
        assert_eq!(make(11), make(11));
    }

    #[test]
    fn similarity_structures_satisfy_axioms() {
        let mut r = rng(3);
        let mut sig = Signature::new();
        sig.set_equality("e").unwrap();
        for size in 1..=4 {
            let m = random_similarity_structure(&mut r, &sig, size, Backend::Rat);
            assert!(check_similarity(&m).unwrap());
        }
    }
}
