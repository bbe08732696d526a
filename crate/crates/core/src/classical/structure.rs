use std::collections::{BTreeMap, HashMap, HashSet};

use crate::group::{GroupElem, TruthValue};
use crate::semantics::{tuples, Structure};

/// The two-sorted companion of a finite structure. Objects are the universe
/// of the source structure; the value sort is the finite set
///
/// ```text
/// {0, inf} ∪ { words of length <= bound over the realized group values and their inverses }
/// ```
///
/// ordered as in the carrier. Each predicate becomes the graph of its table.
#[derive(Debug, Clone)]
pub struct ClassicalStructure {
    source: Structure,
    bound: usize,
    values: Vec<TruthValue>,
    index: HashMap<TruthValue, u32>,
    relations: BTreeMap<String, (usize, Vec<u32>)>,
}

fn closure(generators: &[GroupElem], bound: usize, identity: GroupElem) -> HashSet<GroupElem> {
    let mut seen: HashSet<GroupElem> = HashSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    for _ in 0..bound {
        let mut next = Vec::new();
        for x in &frontier {
            for s in generators {
                let y = x.mul(s).expect("single backend");
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen
}

/// Builds the classical companion of `m` with closure bound `bound`.
pub fn to_classical(m: &Structure, bound: usize) -> ClassicalStructure {
    let mut gens: Vec<GroupElem> = Vec::new();
    let mut gen_seen = HashSet::new();
    for v in m.atomic_values() {
        if let TruthValue::Elem(g) = v {
            for h in [g.clone(), g.inv()] {
                if !h.is_identity() && gen_seen.insert(h.clone()) {
                    gens.push(h);
                }
            }
        }
    }
    let mut values: Vec<TruthValue> = closure(&gens, bound, m.backend().identity())
        .into_iter()
        .map(TruthValue::Elem)
        .collect();
    values.push(TruthValue::Zero);
    values.push(TruthValue::Inf);
    values.sort();
    let index: HashMap<TruthValue, u32> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i as u32))
        .collect();
    let n = m.size();
    let mut relations = BTreeMap::new();
    for (name, arity) in m.signature().predicates() {
        let table = tuples(n, arity)
            .map(|t| index[m.predicate_value(name, &t).expect("total table")])
            .collect();
        relations.insert(name.to_string(), (arity, table));
    }
    ClassicalStructure {
        source: m.clone(),
        bound,
        values,
        index,
        relations,
    }
}

impl ClassicalStructure {
    pub fn source(&self) -> &Structure {
        &self.source
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// The value sort in ascending order.
    pub fn values(&self) -> &[TruthValue] {
        &self.values
    }

    pub fn value_index(&self, v: &TruthValue) -> Option<u32> {
        self.index.get(v).copied()
    }

    pub fn contains_value(&self, v: &TruthValue) -> bool {
        self.index.contains_key(v)
    }

    pub fn object_count(&self) -> usize {
        self.source.size()
    }

    /// The unique `g` with `R(args, g)`.
    pub fn relation_value(&self, name: &str, args: &[usize]) -> Option<&TruthValue> {
        self.relation_index(name, args)
            .map(|i| &self.values[i as usize])
    }

    pub(crate) fn relation_index(&self, name: &str, args: &[usize]) -> Option<u32> {
        let (arity, table) = self.relations.get(name)?;
        (*arity == args.len())
            .then(|| table[crate::semantics::tuple_index(self.object_count(), args)])
    }

    pub(crate) fn relation_table(&self, name: &str) -> Option<(usize, &[u32])> {
        self.relations.get(name).map(|(a, t)| (*a, t.as_slice()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(s: &str) -> TruthValue {
        s.parse().unwrap()
    }

    #[test]
    fn closure_at_depth_two() {
        let m = Structure::parse("backend rat\nuniverse u\npred P = 2\n").unwrap();
        let c = to_classical(&m, 2);
        for v in ["0", "1", "2", "1/2", "4", "1/4", "inf"] {
            assert!(c.contains_value(&tv(v)), "{v}");
        }
        assert_eq!(c.values().len(), 7);
        assert_eq!(c.values().first(), Some(&TruthValue::Zero));
        assert_eq!(c.values().last(), Some(&TruthValue::Inf));
    }

    #[test]
    fn graphs_are_functional() {
        let m = Structure::parse(
            "backend rat\nuniverse a b\npred R a a = 1\npred R a b = 3\npred R b a = 0\npred R b b = inf\n",
        )
        .unwrap();
        let c = to_classical(&m, 1);
        for t in tuples(2, 2) {
            assert_eq!(c.relation_value("R", &t), m.predicate_value("R", &t));
        }
        assert!(c.relation_value("R", &[0]).is_none());
    }
}
