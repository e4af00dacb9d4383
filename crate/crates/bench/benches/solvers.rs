use criterion::{criterion_group, criterion_main, Criterion};
use nesta_bench::SparseFixture;
use nesta_core::reference::fista_solve;
use nesta_core::{nesta_continuation, nesta_solve, ContinuationConfig, SolverConfig};

fn solvers(c: &mut Criterion) {
    let f = SparseFixture::new(4096, 60.0, 7).unwrap();
    let problem = f.problem().unwrap();
    let cfg = SolverConfig::default();
    let ct = ContinuationConfig { steps: 5, mu0: None };
    let lambda = nesta_continuation(&problem, &cfg, &ct).unwrap().qp_lambda();

    let mut g = c.benchmark_group("solve n=4096");
    g.sample_size(10);
    g.bench_function("nesta", |b| b.iter(|| nesta_solve(&problem, &cfg).unwrap()));
    g.bench_function("nesta+ct", |b| b.iter(|| nesta_continuation(&problem, &cfg, &ct).unwrap()));
    g.bench_function("fista", |b| b.iter(|| fista_solve(&f.a, &f.b, lambda, 1e-8, 20_000).unwrap()));
    g.finish();
}

criterion_group!(benches, solvers);
criterion_main!(benches);
