use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use mvdyn_core::freeprod::{mobius_to_u1n, voiculescu_lift, BallMobius};
use mvdyn_core::reps::{build_truncated_fock, check_ck_relations, decide_tensor_vs_semicrossed};
use mvdyn_core::{decide_conjugate, decide_partition, decide_piecewise, FiniteSystem};
use num_complex::Complex64;

fn sys(size: usize, tables: Vec<Vec<usize>>) -> FiniteSystem {
    FiniteSystem::new(size, tables).unwrap()
}

fn deciders(c: &mut Criterion) {
    let pa = sys(4, vec![vec![1, 0, 2, 3], vec![0, 1, 3, 2]]);
    let pb = sys(4, vec![vec![1, 0, 3, 2], vec![0, 1, 2, 3]]);
    let dks = sys(2, vec![vec![0, 1], vec![1, 0]]);
    let dkt = sys(2, vec![vec![0, 0], vec![1, 1]]);
    // Six points, three maps, no partition witness: the search runs to the end.
    let x = sys(6, vec![vec![1, 2, 0, 4, 5, 3], vec![0, 0, 1, 3, 3, 4], vec![5, 4, 3, 2, 1, 0]]);
    let y = sys(6, vec![vec![1, 2, 0, 4, 5, 3], vec![0, 0, 1, 3, 4, 4], vec![5, 4, 3, 2, 1, 0]]);

    c.bench_function("partition/permuted-pair", |b| b.iter(|| decide_partition(black_box(&pa), black_box(&pb))));
    c.bench_function("partition/doubly-covered", |b| b.iter(|| decide_partition(black_box(&dks), black_box(&dkt))));
    c.bench_function("piecewise/doubly-covered", |b| b.iter(|| decide_piecewise(black_box(&dks), black_box(&dkt))));
    c.bench_function("partition/six-points-negative", |b| b.iter(|| decide_partition(black_box(&x), black_box(&y))));
    c.bench_function("conjugate/six-points-recolor", |b| b.iter(|| decide_conjugate(black_box(&x), black_box(&y), true)));
}

fn representations(c: &mut Criterion) {
    let du = Arc::new(sys(4, vec![vec![1, 2, 2, 2], vec![1, 3, 3, 3]]));
    c.bench_function("tensor-vs-semicrossed/duncan", |b| b.iter(|| decide_tensor_vs_semicrossed(black_box(&du))));
    let g = sys(2, vec![vec![0, 1], vec![1, 0]]).restrict(&[0, 1]).unwrap().colored_graph();
    c.bench_function("fock/depth-6", |b| {
        b.iter(|| check_ck_relations(&build_truncated_fock(black_box(&g), 6).unwrap()))
    });
    let m = BallMobius::involution(vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.2), Complex64::new(0.1, 0.0)]).unwrap();
    let x = mobius_to_u1n(&m);
    let lambda = vec![Complex64::new(0.2, 0.0), Complex64::new(0.1, 0.3), Complex64::new(-0.4, 0.1)];
    c.bench_function("lift/degree-25-eval", |b| {
        b.iter(|| voiculescu_lift(black_box(&x), 25).iter().map(|s| s.eval_character(&lambda)).sum::<Complex64>())
    });
}

criterion_group!(benches, deciders, representations);
criterion_main!(benches);
