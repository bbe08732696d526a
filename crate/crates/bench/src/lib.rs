//! Seeded inputs shared by the benchmarks.

use agl_core::random::{random_sentence, random_signature, random_structure, rng, SentenceShape};
use agl_core::solver::{LinearSystem, Rel, Row};
use agl_core::{Backend, Formula, Structure};
use rand::Rng;

/// `count` sentence/structure pairs over small random signatures.
pub fn sample_pairs(seed: u64, count: usize, size: usize, shape: SentenceShape) -> Vec<(Formula, Structure)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let sig = random_signature(&mut r, 2, 2);
            let m = random_structure(&mut r, &sig, size, Backend::Rat);
            (random_sentence(&mut r, &sig, shape), m)
        })
        .collect()
}

/// A satisfiable chain `x0 < x1 < ... < x{n-1}` with random extra rows
/// `xi - xj <= c` that keep it satisfiable.
pub fn chain_system(seed: u64, n: usize, extra: usize) -> LinearSystem {
    let mut r = rng(seed);
    let mut sys = LinearSystem::new(n);
    for i in 1..n {
        let mut c = vec![0; n];
        c[i - 1] = 1;
        c[i] = -1;
        sys.push(Row::new(&c, 0, Rel::Lt));
    }
    for _ in 0..extra {
        let i = r.gen_range(0..n);
        let j = r.gen_range(0..n);
        if i == j {
            continue;
        }
        let mut c = vec![0; n];
        c[i] = 1;
        c[j] = -1;
        sys.push(Row::new(&c, -(n as i64), Rel::Le));
    }
    sys
}
