use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use agl_core::random::{random_sentence, rng, SentenceShape};
use agl_core::semantics::{eval_sentence, failing_sentences, StructureBuilder};
use agl_core::solver::{
    compile, find_model, fm_solve, remark_lab, AtomTable, FmOutcome, GroundAtom, LinearSystem,
    ModelSearch, Rel, Row, SolverOptions, Tag,
};
use agl_core::{Backend, Signature, TruthValue};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

const ATOMS: [&str; 3] = ["P", "Q", "R"];

fn grid() -> Vec<(TruthValue, Tag, i64)> {
    vec![
        (TruthValue::Zero, Tag::Zero, 0),
        (TruthValue::ratio(1, 2).unwrap(), Tag::Elem, -1),
        (TruthValue::ratio(1, 1).unwrap(), Tag::Elem, 0),
        (TruthValue::ratio(2, 1).unwrap(), Tag::Elem, 1),
        (TruthValue::Inf, Tag::Inf, 0),
    ]
}

fn nullary_sig() -> Signature {
    ATOMS
        .iter()
        .fold(Signature::new(), |s, p| s.with_predicate(p, 0))
}

#[test]
fn branch_union_matches_eval_on_grid() {
    let sig = nullary_sig();
    let grid = grid();
    let mut r = rng(2024);
    let opts = SolverOptions::default();
    for i in 0..400 {
        let shape = SentenceShape {
            depth: 4,
            quantifier_depth: 0,
            derived: i % 2 == 0,
        };
        let phi = random_sentence(&mut r, &sig, shape);
        let mut atoms = AtomTable::new();
        let systems = compile(&phi, &mut atoms, &opts).unwrap();
        let ids: Vec<Option<usize>> = ATOMS
            .iter()
            .map(|p| {
                atoms.id(&GroundAtom {
                    pred: p.to_string(),
                    args: vec![],
                })
            })
            .collect();
        for a in 0..grid.len() {
            for b in 0..grid.len() {
                for c in 0..grid.len() {
                    let pick = [a, b, c];
                    let mut builder = StructureBuilder::new(Backend::Rat, &["m"]).unwrap();
                    for (p, &k) in ATOMS.iter().zip(&pick) {
                        builder.declare_predicate(p, 0).unwrap();
                        builder
                            .set_predicate_idx(p, &[], grid[k].0.clone())
                            .unwrap();
                    }
                    let m = builder.build().unwrap();
                    let truth = eval_sentence(&phi, &m).unwrap().is_inf();
                    let by_atom: BTreeMap<usize, usize> = ids
                        .iter()
                        .zip(&pick)
                        .filter_map(|(id, &k)| id.map(|id| (id, k)))
                        .collect();
                    let valuation = |id: usize| {
                        let (_, tag, e) = &grid[by_atom[&id]];
                        (*tag, BigRational::from_integer((*e).into()))
                    };
                    let covered = systems.iter().any(|s| s.admits(&valuation));
                    assert_eq!(covered, truth, "{phi} at {pick:?}");
                }
            }
        }
    }
}

fn grid_point(rows: &[Row], n: usize) -> bool {
    let steps: Vec<BigRational> = (-6..=6)
        .map(|k| BigRational::new(k.into(), 2.into()))
        .collect();
    let mut idx = vec![0usize; n];
    loop {
        let x: Vec<BigRational> = idx.iter().map(|&i| steps[i].clone()).collect();
        if rows.iter().all(|r| r.satisfied_by(&x)) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            idx[k] += 1;
            if idx[k] < steps.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn fm_agrees_with_grid_search() {
    let mut r = rng(99);
    let mut sat = 0;
    for _ in 0..600 {
        let n = r.gen_range(1..=3);
        let mut sys = LinearSystem::new(n);
        for _ in 0..r.gen_range(1..=4) {
            let coeffs: Vec<i64> = (0..n).map(|_| r.gen_range(-3..=3)).collect();
            let rel = [Rel::Lt, Rel::Le, Rel::Eq][r.gen_range(0..3)];
            sys.push(Row::new(&coeffs, r.gen_range(-3..=3), rel));
        }
        let found = grid_point(&sys.rows, n);
        match fm_solve(&sys, 10_000).unwrap() {
            FmOutcome::Sat(x) => {
                sat += 1;
                assert!(sys.satisfied_by(&x), "{sys:?}");
            }
            FmOutcome::Unsat => assert!(!found, "grid point for UNSAT {sys:?}"),
        }
    }
    assert!(sat > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fm_witnesses_are_solutions(
        rows in prop::collection::vec((prop::collection::vec(-3i64..=3, 3), -3i64..=3, 0usize..3), 1..6)
    ) {
        let mut sys = LinearSystem::new(3);
        for (c, k, rel) in &rows {
            sys.push(Row::new(c, *k, [Rel::Lt, Rel::Le, Rel::Eq][*rel]));
        }
        if let FmOutcome::Sat(x) = fm_solve(&sys, 10_000).unwrap() {
            prop_assert!(sys.satisfied_by(&x));
        } else {
            prop_assert!(!grid_point(&sys.rows, 3));
        }
    }
}

#[test]
fn every_witness_is_a_model() {
    let mut r = rng(5);
    let mut found = 0;
    for i in 0..120 {
        let mut sig = Signature::new()
            .with_predicate("P", 1)
            .with_predicate("Q", 0);
        if i % 3 == 0 {
            sig = sig.with_function("c", 0);
        }
        let shape = SentenceShape {
            depth: 3,
            quantifier_depth: 1,
            derived: true,
        };
        let theory: Vec<_> = (0..r.gen_range(1..=3))
            .map(|_| random_sentence(&mut r, &sig, shape))
            .collect();
        match find_model(&theory, &sig, 2, &SolverOptions::default()).unwrap() {
            ModelSearch::Found(m) => {
                found += 1;
                assert!(failing_sentences(&m.structure, &theory).unwrap().is_empty());
            }
            ModelSearch::NoneUpTo { .. } => {}
        }
    }
    assert!(found > 0);
}

#[test]
fn remark_fragments() {
    let r = remark_lab(100).unwrap();
    assert!(r.ok());
    let eps = r.standard.predicate_value("eps", &[]).unwrap().to_string();
    assert_eq!(eps, format!("{}", num_bigint::BigInt::from(2).pow(101)));
    assert_eq!(
        r.standard.predicate_value("rho", &[]).unwrap().to_string(),
        "2"
    );
}

#[test]
fn remark_large_fragment_is_fast() {
    let start = Instant::now();
    let r = remark_lab(10_000).unwrap();
    assert!(r.ok());
    assert_eq!(r.lex_checked, 10_002);
    assert!(
        start.elapsed() < Duration::from_secs(60),
        "{:?}",
        start.elapsed()
    );
}
