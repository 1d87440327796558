use ck_core::analysis::compare;
use ck_core::suites::{cells, standard_grid};
use ck_core::{EvalOptions, Execution, KernelKind, Representation, Space};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("compare");
    group.sample_size(10);
    let cases = [
        ("hyperbolic3-heat", Space::Negative, 3, KernelKind::Heat, vec![Representation::Raise, Representation::Gruet]),
        ("sphere2-poisson", Space::Positive, 2, KernelKind::Poisson, vec![Representation::Closed, Representation::Doubling]),
    ];
    let opts = EvalOptions::default();
    for (name, space, n, kind, reps) in &cases {
        let (p, r) = standard_grid(*space, *kind);
        let grid = cells(&p, &r);
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), name), &grid, |b, g| {
                b.iter(|| black_box(compare(*space, *n, *kind, g, reps, &opts, exec)))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
