use agl_bench::{chain_system, sample_pairs};
use agl_core::classical::check_translation;
use agl_core::random::SentenceShape;
use agl_core::semantics::eval_sentence;
use agl_core::solver::{fm_solve, remark_lab};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn bench_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("eval");
    for size in [2, 4, 8] {
        let shape = SentenceShape { depth: 6, quantifier_depth: 2, derived: true };
        let pairs = sample_pairs(7, 32, size, shape);
        group.bench_with_input(BenchmarkId::from_parameter(size), &pairs, |b, pairs| {
            b.iter(|| {
                for (phi, m) in pairs {
                    black_box(eval_sentence(phi, m).unwrap());
                }
            })
        });
    }
    group.finish();
}

fn bench_fm(c: &mut Criterion) {
    let mut group = c.benchmark_group("fm_solve");
    for n in [4, 8, 12] {
        let sys = chain_system(11, n, 2 * n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &sys, |b, sys| {
            b.iter(|| black_box(fm_solve(sys, 100_000).unwrap()))
        });
    }
    group.finish();
}

fn bench_translation(c: &mut Criterion) {
    let shape = SentenceShape { depth: 4, quantifier_depth: 2, derived: false };
    let pairs = sample_pairs(13, 16, 3, shape);
    c.bench_function("check_translation", |b| {
        b.iter(|| {
            for (phi, m) in &pairs {
                black_box(check_translation(phi, m, None).unwrap());
            }
        })
    });
}

fn bench_remark(c: &mut Criterion) {
    let mut group = c.benchmark_group("remark_lab");
    group.sample_size(10);
    for n in [10, 100, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| black_box(remark_lab(n).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, bench_eval, bench_fm, bench_translation, bench_remark);
criterion_main!(benches);
