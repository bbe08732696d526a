use agl_core::group::{tv_max, tv_min};
use agl_core::random::{
    random_sentence, random_similarity_structure, random_structure, random_value, rng,
    SentenceShape,
};
use agl_core::semantics::{check_ultrametric, distance, eval, eval_sentence, Assignment};
use agl_core::syntax::expand_derived;
use agl_core::{Backend, BinOp, Formula, Quantifier, Signature, StructureBuilder, Term};
use rand::Rng;

#[test]
fn derived_tables_match_expansions() {
    let mut r = rng(41);
    let p = || Formula::prop("P");
    let q = || Formula::prop("Q");
    let mut nodes: Vec<Formula> = BinOp::ALL
        .iter()
        .filter(|op| !op.is_core())
        .map(|&op| Formula::binary(op, p(), q()))
        .collect();
    nodes.extend([
        Formula::not(p()),
        Formula::not(Formula::not(p())),
        Formula::delta(p()),
        Formula::power(p(), 3),
        Formula::Top,
    ]);
    for i in 0..10_000 {
        let backend = if i % 2 == 0 {
            Backend::Rat
        } else {
            Backend::Lex2
        };
        let mut b = StructureBuilder::new(backend, &["m"]).unwrap();
        for name in ["P", "Q"] {
            b.declare_predicate(name, 0).unwrap();
            b.set_predicate_idx(name, &[], random_value(&mut r, backend))
                .unwrap();
        }
        let m = b.build().unwrap();
        let node = &nodes[i % nodes.len()];
        assert_eq!(
            eval_sentence(node, &m).unwrap(),
            eval_sentence(&expand_derived(node), &m).unwrap(),
            "{node} in {m}"
        );
    }
}

#[test]
fn random_derived_sentences_match_expansions() {
    let mut r = rng(43);
    for _ in 0..1_000 {
        let sig = Signature::new()
            .with_predicate("P", 1)
            .with_predicate("Q", 0)
            .with_predicate("R", 2);
        let size = r.gen_range(1..=3);
        let m = random_structure(&mut r, &sig, size, Backend::Rat);
        let shape = SentenceShape {
            depth: 4,
            quantifier_depth: 2,
            derived: true,
        };
        let phi = random_sentence(&mut r, &sig, shape);
        assert_eq!(
            eval_sentence(&phi, &m).unwrap(),
            eval_sentence(&expand_derived(&phi), &m).unwrap(),
            "{phi}"
        );
    }
}

#[test]
fn similarity_gives_pseudo_ultrametric() {
    let mut r = rng(47);
    let mut sig = Signature::new();
    sig.set_equality("e").unwrap();
    for _ in 0..200 {
        let size = r.gen_range(1..=5);
        let backend = if r.gen() { Backend::Rat } else { Backend::Lex2 };
        let m = random_similarity_structure(&mut r, &sig, size, backend);
        for a in 0..size {
            for b in 0..size {
                for c in 0..size {
                    let d = |x, y| distance(&m, x, y).unwrap();
                    assert!(d(a, b) <= tv_max(&d(a, c), &d(b, c)).unwrap());
                }
            }
        }
        assert!(check_ultrametric(&m).unwrap().is_pseudo_ultrametric());
    }
}

#[test]
fn lattice_laws_and_quantifier_extrema() {
    let mut r = rng(53);
    let sig = Signature::new()
        .with_predicate("P", 1)
        .with_predicate("Q", 1);
    let x = || vec![Term::var("x")];
    for _ in 0..500 {
        let size = r.gen_range(1..=4);
        let m = random_structure(&mut r, &sig, size, Backend::Rat);
        let (p, q) = (Formula::atom("P", x()), Formula::atom("Q", x()));
        for a in 0..size {
            let v = Assignment::new().with("x", a);
            let vp = eval(&p, &m, &v).unwrap();
            let vq = eval(&q, &m, &v).unwrap();
            let conj = eval(&Formula::and(p.clone(), q.clone()), &m, &v).unwrap();
            let disj = eval(&Formula::or(p.clone(), q.clone()), &m, &v).unwrap();
            assert_eq!(conj, tv_min(&vp, &vq).unwrap());
            assert!(conj <= disj);
        }
        let values: Vec<_> = (0..size)
            .map(|a| eval(&p, &m, &Assignment::new().with("x", a)).unwrap())
            .collect();
        let ex = eval_sentence(
            &Formula::Quant(Quantifier::Exists, "x".into(), Box::new(p.clone())),
            &m,
        )
        .unwrap();
        let all = eval_sentence(
            &Formula::Quant(Quantifier::Forall, "x".into(), Box::new(p.clone())),
            &m,
        )
        .unwrap();
        assert_eq!(&ex, values.iter().max().unwrap());
        assert_eq!(&all, values.iter().min().unwrap());
    }
}
