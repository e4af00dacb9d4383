use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use nesta_core::LinearMap;

fn transforms(c: &mut Criterion) {
    let mut g = c.benchmark_group("apply+adjoint");
    for n in [1024usize, 4096, 16384] {
        let ops = [
            ("dct", LinearMap::subsampled_dct(n, n / 8, 1).unwrap()),
            ("hadamard", LinearMap::permuted_subsampled_hadamard(n, n / 8, 1).unwrap()),
        ];
        for (name, a) in &ops {
            let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
            let mut y = vec![0.0; a.out_dim()];
            let mut back = vec![0.0; n];
            g.bench_with_input(BenchmarkId::new(*name, n), &n, |bch, _| {
                bch.iter(|| {
                    a.apply_into(black_box(&x), &mut y).unwrap();
                    a.adjoint_into(&y, &mut back).unwrap();
                })
            });
        }
    }
    for side in [64usize, 128] {
        let n = side * side;
        let a = LinearMap::partial_fourier2d(side, side, n / 5, 1).unwrap();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let mut y = vec![0.0; a.out_dim()];
        let mut back = vec![0.0; n];
        g.bench_with_input(BenchmarkId::new("fourier2d", n), &n, |bch, _| {
            bch.iter(|| {
                a.apply_into(black_box(&x), &mut y).unwrap();
                a.adjoint_into(&y, &mut back).unwrap();
            })
        });
    }
    g.finish();
}

criterion_group!(benches, transforms);
criterion_main!(benches);
