use agl_core::model_theory::{
    bounded_elementary_equiv, check_embedding, generated_subgroup, is_exhaustive,
    search_embeddings, EmbeddingCandidate, GeneratedSubgroup,
};
use agl_core::random::{random_structure, rng};
use agl_core::semantics::tuples;
use agl_core::{Backend, GroupElem, Signature, Structure, StructureBuilder, TruthValue};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::seq::SliceRandom;

const PRIMES: [i64; 3] = [2, 3, 5];

fn elem(exps: &[i64]) -> GroupElem {
    exps.iter()
        .zip(PRIMES)
        .fold(GroupElem::ratio(1, 1).unwrap(), |acc, (&e, p)| {
            acc.mul(&GroupElem::ratio(p, 1).unwrap().pow(e)).unwrap()
        })
}

fn brute_member(gens: &[Vec<i64>], target: &[i64], r: i64) -> bool {
    let mut coeffs = vec![-r; gens.len()];
    loop {
        let sum: Vec<i64> = (0..target.len())
            .map(|i| gens.iter().zip(&coeffs).map(|(g, c)| g[i] * c).sum())
            .collect();
        if sum == target {
            return true;
        }
        let mut k = 0;
        loop {
            if k == coeffs.len() {
                return false;
            }
            coeffs[k] += 1;
            if coeffs[k] <= r {
                break;
            }
            coeffs[k] = -r;
            k += 1;
        }
    }
}

/// Unique rational solution of `sum c_j gens[j] = target` when the
/// generators are independent: `Some(Some(c))`, `Some(None)` when
/// inconsistent, `None` when dependent.
fn unique_solution(gens: &[Vec<i64>], target: &[i64]) -> Option<Option<Vec<BigRational>>> {
    let q = |x: i64| BigRational::from_integer(x.into());
    let cols = gens.len();
    let mut a: Vec<Vec<BigRational>> = (0..target.len())
        .map(|i| gens.iter().map(|g| q(g[i])).chain([q(target[i])]).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..a.len()).find(|&i| !a[i][col].is_zero()) else {
            return None;
        };
        a.swap(row, p);
        let lead = a[row][col].clone();
        for x in a[row].iter_mut() {
            *x /= &lead;
        }
        for i in 0..a.len() {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                let pivot_row = a[row].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(row);
        row += 1;
    }
    if a[row..].iter().any(|r| !r[cols].is_zero()) {
        return Some(None);
    }
    Some(Some(pivots.iter().map(|&r| a[r][cols].clone()).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn membership_matches_naive_search(
        gens in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 1..=3),
        target in prop::collection::vec(-3i64..=3, 3),
    ) {
        let g = GeneratedSubgroup::new(&gens.iter().map(|v| elem(v)).collect::<Vec<_>>()).unwrap();
        let fast = g.member(&elem(&target)).unwrap();
        if brute_member(&gens, &target, 4) {
            prop_assert!(fast);
        }
        match unique_solution(&gens, &target) {
            Some(sol) => prop_assert_eq!(fast, sol.is_some_and(|c| c.iter().all(|x| x.is_integer()))),
            None => prop_assert_eq!(fast, brute_member(&gens, &target, 12)),
        }
    }
}

fn st(text: &str) -> Structure {
    Structure::parse(&format!("backend rat\n{text}")).unwrap()
}

#[test]
fn exhaustive_examples() {
    let two = GeneratedSubgroup::parse("2").unwrap();
    let two_three = GeneratedSubgroup::parse("2, 3").unwrap();
    assert!(is_exhaustive(&st("universe a\npred P a = 2\n"), &two).unwrap());
    assert!(!is_exhaustive(&st("universe a\npred P a = 2\n"), &two_three).unwrap());
    assert!(is_exhaustive(&st("universe a b\npred P a = 4\npred P b = 1/2\n"), &two).unwrap());
    let gr = generated_subgroup(&st("universe a b\npred P a = 0\npred P b = inf\n")).unwrap();
    assert_eq!(gr.rank(), 0);
}

fn permuted_scaled(m: &Structure, perm: &[usize], square: bool) -> Structure {
    let names: Vec<String> = (0..m.size()).map(|i| format!("n{i}")).collect();
    let mut b = StructureBuilder::new(m.backend(), &names).unwrap();
    for (p, arity) in m.signature().predicates() {
        b.declare_predicate(p, arity).unwrap();
        for t in tuples(m.size(), arity) {
            let v = m.predicate_value(p, &t).unwrap().clone();
            let v = match v {
                TruthValue::Elem(g) if square => TruthValue::Elem(g.pow(2)),
                other => other,
            };
            let image: Vec<usize> = t.iter().map(|&a| perm[a]).collect();
            b.set_predicate_idx(p, &image, v).unwrap();
        }
    }
    b.build().unwrap()
}

#[test]
fn isomorphic_copies_are_equivalent() {
    let mut r = rng(17);
    for i in 0..30 {
        let sig = Signature::new()
            .with_predicate("P", 1)
            .with_predicate("Q", 0);
        let size = 1 + i % 3;
        let m = random_structure(&mut r, &sig, size, Backend::Rat);
        let mut perm: Vec<usize> = (0..size).collect();
        perm.shuffle(&mut r);
        let n = permuted_scaled(&m, &perm, i % 2 == 0);
        let depth = 1;
        let there = search_embeddings(&m, &n, depth).unwrap();
        let back = search_embeddings(&n, &m, depth).unwrap();
        assert!(!there.is_empty() && !back.is_empty(), "{m}\n{n}");
        let inverse = there
            .iter()
            .any(|c| back.iter().any(|d| d.t == c.t.inverse()));
        assert!(inverse);
        assert!(bounded_elementary_equiv(&m, &n, depth).unwrap(), "{m}\n{n}");
        for c in &there {
            assert!(check_embedding(&m, &n, c, depth).unwrap());
        }
    }
}

#[test]
fn transport_is_monotone_in_depth() {
    let mut r = rng(23);
    for _ in 0..20 {
        let sig = Signature::new().with_predicate("P", 1);
        let m = random_structure(&mut r, &sig, 2, Backend::Rat);
        let n = random_structure(&mut r, &sig, 3, Backend::Rat);
        for c in search_embeddings(&m, &n, 2).unwrap() {
            for d in 0..2 {
                assert!(check_embedding(&m, &n, &c, d).unwrap());
            }
        }
        let cand = EmbeddingCandidate {
            h: vec![0, 1],
            t: agl_core::model_theory::ValueMap::Identity,
        };
        if check_embedding(&m, &n, &cand, 2).unwrap() {
            assert!(check_embedding(&m, &n, &cand, 1).unwrap());
        }
    }
}

#[test]
fn larger_source_has_no_embedding() {
    let m = st("universe a b\npred P a = 1\npred P b = 1\n");
    let n = st("universe c\npred P c = 1\n");
    assert!(search_embeddings(&m, &n, 1).unwrap().is_empty());
    assert_eq!(search_embeddings(&n, &m, 1).unwrap().len(), 2);
}
