use std::collections::{BTreeMap, BTreeSet};

use super::SolverError;
use crate::semantics::tuples;
use crate::syntax::{free_vars, substitute, BinOp, Formula, Quantifier, Signature, Term};

/// Names `e1 .. en`, with the prefix extended until it clashes with no name
/// in `avoid`.
pub fn element_names(n: usize, avoid: &BTreeSet<String>) -> Vec<String> {
    let mut prefix = String::from("e");
    loop {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        if names.iter().all(|x| !avoid.contains(x)) {
            return names;
        }
        prefix.push('e');
    }
}

/// Replaces each quantifier by the left-nested conjunction (`forall`) or
/// disjunction (`exists`) of its instances over `elements`.
pub fn ground_sentence(phi: &Formula, elements: &[String]) -> Formula {
    use Formula as F;
    match phi {
        F::Bot | F::One | F::Top | F::Atom(..) => phi.clone(),
        F::Binary(op, l, r) => F::binary(
            *op,
            ground_sentence(l, elements),
            ground_sentence(r, elements),
        ),
        F::Inv(g) => F::inv(ground_sentence(g, elements)),
        F::Not(g) => F::not(ground_sentence(g, elements)),
        F::Delta(g) => F::delta(ground_sentence(g, elements)),
        F::Power(g, n) => F::Power(Box::new(ground_sentence(g, elements)), *n),
        F::Quant(q, x, body) => {
            let op = match q {
                Quantifier::Forall => BinOp::And,
                Quantifier::Exists => BinOp::Or,
            };
            elements
                .iter()
                .map(|e| {
                    ground_sentence(&substitute(body, x, &Term::constant(e.clone())), elements)
                })
                .reduce(|acc, inst| F::binary(op, acc, inst))
                .expect("nonempty domain")
        }
    }
}

fn rename_constants_term(t: &Term, map: &BTreeMap<String, String>) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(c, args) if args.is_empty() => match map.get(c) {
            Some(e) => Term::constant(e.clone()),
            None => t.clone(),
        },
        Term::App(f, args) => Term::app(
            f.clone(),
            args.iter().map(|a| rename_constants_term(a, map)).collect(),
        ),
    }
}

fn rename_constants(phi: &Formula, map: &BTreeMap<String, String>) -> Formula {
    use Formula as F;
    let rec = |g: &Formula| rename_constants(g, map);
    match phi {
        F::Bot | F::One | F::Top => phi.clone(),
        F::Atom(p, args) => F::Atom(
            p.clone(),
            args.iter().map(|a| rename_constants_term(a, map)).collect(),
        ),
        F::Binary(op, l, r) => F::binary(*op, rec(l), rec(r)),
        F::Inv(g) => F::inv(rec(g)),
        F::Not(g) => F::not(rec(g)),
        F::Delta(g) => F::delta(rec(g)),
        F::Power(g, n) => F::Power(Box::new(rec(g)), *n),
        F::Quant(q, x, body) => F::Quant(*q, x.clone(), Box::new(rec(body))),
    }
}

/// One way of grounding a theory over `elements`: an interpretation of the
/// constants and the resulting quantifier-free sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grounding {
    pub elements: Vec<String>,
    /// Constant name to element index.
    pub constants: BTreeMap<String, usize>,
    pub sentences: Vec<Formula>,
}

/// Grounds `theory` over `n` elements, once per interpretation of the
/// constants of `sig` (`n^k` groundings for `k` constants).
pub fn ground(
    theory: &[Formula],
    sig: &Signature,
    n: usize,
) -> Result<Vec<Grounding>, SolverError> {
    if n == 0 {
        return Err(SolverError::Unsupported("empty domain".into()));
    }
    if let Some((f, a)) = sig.functions().find(|(_, a)| *a > 0) {
        return Err(SolverError::Unsupported(format!(
            "function symbol `{f}` of arity {a}"
        )));
    }
    for phi in theory {
        if let Some(x) = free_vars(phi).into_iter().next() {
            return Err(SolverError::NotASentence(format!(
                "free variable `{x}` in `{phi}`"
            )));
        }
    }
    let mut avoid: BTreeSet<String> = sig
        .functions()
        .chain(sig.predicates())
        .map(|(s, _)| s.to_string())
        .collect();
    for phi in theory {
        avoid.extend(phi.bound_vars());
    }
    let elements = element_names(n, &avoid);
    let constants: Vec<String> = sig.functions().map(|(c, _)| c.to_string()).collect();
    let mut out = Vec::new();
    for choice in tuples(n, constants.len()) {
        let names: BTreeMap<String, String> = constants
            .iter()
            .zip(&choice)
            .map(|(c, &i)| (c.clone(), elements[i].clone()))
            .collect();
        let sentences = theory
            .iter()
            .map(|phi| ground_sentence(&rename_constants(phi, &names), &elements))
            .collect();
        out.push(Grounding {
            elements: elements.clone(),
            constants: constants.iter().cloned().zip(choice).collect(),
            sentences,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn quantifiers_become_min_max() {
        let sig = Signature::new()
            .with_predicate("P", 1)
            .with_predicate("Q", 0);
        let names = element_names(2, &BTreeSet::new());
        let f = parse("forall x. P(x)", &sig).unwrap();
        assert_eq!(
            ground_sentence(&f, &names).to_string(),
            parse(
                "P(e1) /\\ P(e2)",
                &sig.clone().with_function("e1", 0).with_function("e2", 0)
            )
            .unwrap()
            .to_string()
        );
        let f = parse("exists x. P(x)", &sig).unwrap();
        assert_eq!(
            ground_sentence(&f, &names[..1]),
            Formula::atom("P", vec![Term::constant("e1")])
        );
        let q = parse("Q", &sig).unwrap();
        assert_eq!(ground_sentence(&q, &names), q);
    }

    #[test]
    fn constants_are_enumerated() {
        let sig = Signature::new()
            .with_predicate("P", 1)
            .with_function("c", 0)
            .with_function("d", 0);
        let f = parse("P(c) -> P(d)", &sig).unwrap();
        let gs = ground(&[f], &sig, 2).unwrap();
        assert_eq!(gs.len(), 4);
        assert_eq!(
            gs[1].constants,
            BTreeMap::from([("c".to_string(), 0), ("d".to_string(), 1)])
        );
        assert_eq!(gs[1].sentences[0].to_string(), "P(e1) -> P(e2)");
    }

    #[test]
    fn names_avoid_the_signature() {
        let avoid = BTreeSet::from(["e1".to_string()]);
        assert_eq!(element_names(2, &avoid), vec!["ee1", "ee2"]);
    }

    #[test]
    fn functions_are_unsupported() {
        let sig = Signature::new()
            .with_predicate("P", 1)
            .with_function("f", 1);
        let f = parse("forall x. P(f(x))", &sig).unwrap();
        assert!(matches!(
            ground(&[f], &sig, 1),
            Err(SolverError::Unsupported(_))
        ));
    }
}
