use super::*;
use crate::rng::Rng64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn randn(n: usize, seed: u64) -> Vec<f64> {
    let mut r = Rng64::new(seed);
    (0..n).map(|_| r.gaussian()).collect()
}

fn adjoint_rel_err(op: &LinearMap, seed: u64) -> f64 {
    let x = randn(op.in_dim(), seed);
    let y = randn(op.out_dim(), seed ^ 0xABCD);
    let lhs = dot(&op.apply(&x).unwrap(), &y);
    let rhs = dot(&x, &op.adjoint(&y).unwrap());
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300)
}

fn isometry_err(op: &LinearMap, seed: u64) -> f64 {
    let y = randn(op.out_dim(), seed);
    let back = op.apply(&op.adjoint(&y).unwrap()).unwrap();
    crate::vecops::dist2(&back, &y) / norm2(&y)
}

/// Dense Sylvester Hadamard matrix scaled by 1/√n.
fn dense_hadamard(n: usize) -> Vec<Vec<f64>> {
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if (i & j).count_ones() % 2 == 0 { s } else { -s })
                .collect()
        })
        .collect()
}

#[test]
fn zero_maps_to_zero() {
    let ops = vec![
        LinearMap::subsampled_dct(32, 8, 1).unwrap(),
        LinearMap::permuted_subsampled_hadamard(32, 8, 1).unwrap(),
        LinearMap::partial_fourier2d(4, 8, 9, 1).unwrap(),
        LinearMap::finite_difference_2d(4, 5).unwrap(),
        LinearMap::dct_frame(16, 2).unwrap(),
    ];
    for op in &ops {
        let y = op.apply(&vec![0.0; op.in_dim()]).unwrap();
        assert!(y.iter().all(|&v| v == 0.0), "{:?}", op.kind());
    }
}

#[test]
fn dimension_mismatch_reports_lengths() {
    let op = LinearMap::subsampled_dct(16, 4, 0).unwrap();
    assert_eq!(
        op.apply(&[1.0; 15]).unwrap_err(),
        Error::DimensionMismatch { expected: 16, actual: 15 }
    );
    assert_eq!(
        op.adjoint(&[1.0; 5]).unwrap_err(),
        Error::DimensionMismatch { expected: 4, actual: 5 }
    );
}

#[test]
fn full_mask_dct_round_trips() {
    let op = LinearMap::subsampled_dct(64, 64, 3).unwrap();
    let x = randn(64, 4);
    let y = op.apply(&x).unwrap();
    assert!((norm2(&y) - norm2(&x)).abs() < 1e-12);
    let back = op.adjoint(&y).unwrap();
    assert!(crate::vecops::dist2(&back, &x) < 1e-10);
}

#[test]
fn subsampled_dct_rows_match_dense_formula() {
    let n = 8;
    let op = LinearMap::subsampled_dct(n, 5, 17).unwrap();
    let (_, mask) = op.transform_factorization().unwrap();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = op.apply(&e).unwrap();
        for (r, &k) in mask.indices().iter().enumerate() {
            let s = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            let want = s * (PI * k as f64 * (2 * j + 1) as f64 / (2 * n) as f64).cos();
            assert!((col[r] - want).abs() <= 1e-12);
        }
    }
}

#[test]
fn subsampled_dct_is_row_orthonormal() {
    let op = LinearMap::subsampled_dct(64, 8, 5).unwrap();
    assert!(op.is_partial_isometry());
    for s in 0..20 {
        assert!(isometry_err(&op, s) <= 1e-10);
    }
}

#[test]
fn subsampled_dct_rejects_m_above_n() {
    assert!(LinearMap::subsampled_dct(8, 9, 0).is_err());
    assert!(LinearMap::subsampled_dct(8, 0, 0).is_err());
}

#[test]
fn hadamard_n2_closed_form() {
    let op = LinearMap::hadamard_with(vec![0, 1], 2, 0).unwrap();
    let y = op.apply(&[1.0, 0.0]).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((y[0] - h).abs() < 1e-15 && (y[1] - h).abs() < 1e-15);
}

#[test]
fn hadamard_n8_matches_dense_permuted_matrix() {
    let n = 8;
    for m in [3, 8] {
        let op = LinearMap::permuted_subsampled_hadamard(n, m, 21).unwrap();
        let (basis, mask) = op.transform_factorization().unwrap();
        let OrthoBasis::Hadamard(h) = basis else { panic!() };
        let perm = h.permutation();
        let hd = dense_hadamard(n);
        // (H P)[r, c] = H[r, q] where perm[q] = c.
        for c in 0..n {
            let q = perm.iter().position(|&p| p == c).unwrap();
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            let col = op.apply(&e).unwrap();
            for (i, &r) in mask.indices().iter().enumerate() {
                assert!((col[i] - hd[r][q]).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn full_hadamard_is_orthogonal() {
    let op = LinearMap::permuted_subsampled_hadamard(16, 16, 2).unwrap();
    let x = randn(16, 1);
    let back = op.adjoint(&op.apply(&x).unwrap()).unwrap();
    assert!(crate::vecops::dist2(&back, &x) <= 1e-12);
}

#[test]
fn hadamard_requires_power_of_two() {
    assert!(LinearMap::permuted_subsampled_hadamard(12, 4, 0).is_err());
}

#[test]
fn fourier_dc_of_constant_image() {
    let (rows, cols) = (8, 6);
    let op = LinearMap::partial_fourier2d(rows, cols, 10, 4).unwrap();
    let (_, mask) = op.transform_factorization().unwrap();
    assert_eq!(mask.indices()[0], 0, "DC is always kept");
    let c = 2.5;
    let y = op.apply(&vec![c; rows * cols]).unwrap();
    assert!((y[0] - c * ((rows * cols) as f64).sqrt()).abs() < 1e-12);
    assert!(y[1..].iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn fourier_adjoint_identity() {
    let op = LinearMap::partial_fourier2d(16, 16, 80, 8).unwrap();
    for s in 0..50 {
        assert!(adjoint_rel_err(&op, s) <= 1e-10);
    }
}

#[test]
fn fourier_mask_yields_partial_isometry() {
    let (rows, cols) = (32, 32);
    let op = LinearMap::partial_fourier2d(rows, cols, rows * cols / 10, 8).unwrap();
    assert_eq!(op.out_dim(), 102);
    for s in 0..10 {
        assert!(isometry_err(&op, s) <= 1e-10);
    }
}

#[test]
fn fourier_mask_is_conjugate_closed() {
    let op = LinearMap::partial_fourier2d(8, 8, 21, 3).unwrap();
    let (basis, mask) = op.transform_factorization().unwrap();
    let OrthoBasis::Fourier2d(f) = basis else { panic!() };
    let layout = f.layout();
    let mut reals = 0;
    for &i in mask.indices() {
        match layout[i] {
            SpectralRow::Real(_) => {
                reals += 1;
                // A kept real part brings its imaginary part, except for at most
                // one pair used to fill an odd slot.
                if !mask.indices().contains(&(i + 1)) {
                    reals += 100;
                }
            }
            SpectralRow::Imag(_) => assert!(mask.indices().contains(&(i - 1))),
            SpectralRow::SelfConjugate(_) => {}
        }
    }
    assert!(reals < 200);
}

/// Mean radial frequency of the kept rows.
fn mean_radius(op: &LinearMap, side: usize) -> f64 {
    let (basis, mask) = op.transform_factorization().unwrap();
    let OrthoBasis::Fourier2d(f) = basis else { panic!() };
    let signed = |i: usize| if i <= side / 2 { i as f64 } else { i as f64 - side as f64 };
    let total: f64 = mask
        .indices()
        .iter()
        .map(|&i| match f.layout()[i] {
            SpectralRow::SelfConjugate(k) | SpectralRow::Real(k) | SpectralRow::Imag(k) => {
                signed(k / side).hypot(signed(k % side))
            }
        })
        .sum();
    total / mask.len() as f64
}

#[test]
fn variable_density_mask_favours_low_frequencies() {
    let side = 32;
    let m = side * side / 10;
    let uniform = LinearMap::partial_fourier2d(side, side, m, 4).unwrap();
    let vd = LinearMap::partial_fourier2d_variable_density(side, side, m, 2.0, 4).unwrap();
    assert_eq!(vd.out_dim(), m);
    let (r_vd, r_u) = (mean_radius(&vd, side), mean_radius(&uniform, side));
    assert!(r_vd < 0.75 * r_u, "{r_vd} vs {r_u}");
    for s in 0..10 {
        assert!(isometry_err(&vd, s) <= 1e-10);
        assert!(adjoint_rel_err(&vd, s) <= 1e-10);
    }
    let again = LinearMap::partial_fourier2d_variable_density(side, side, m, 2.0, 4).unwrap();
    assert_eq!(
        vd.transform_factorization().unwrap().1.indices(),
        again.transform_factorization().unwrap().1.indices()
    );
    assert!(LinearMap::partial_fourier2d_variable_density(side, side, m, -1.0, 4).is_err());
}

#[test]
fn fourier_rejects_too_many_measurements() {
    assert!(LinearMap::partial_fourier2d(4, 4, 17, 0).is_err());
    assert!(LinearMap::partial_fourier2d(4, 4, 16, 0).is_ok());
}

#[test]
fn dense_adjoint_is_transpose() {
    let (r, c) = (16, 16);
    let data = randn(r * c, 9);
    let op = LinearMap::dense(r, c, data.clone()).unwrap();
    let y = randn(r, 10);
    let got = op.adjoint(&y).unwrap();
    for j in 0..c {
        let mut want = 0.0;
        for i in 0..r {
            want += data[i * c + j] * y[i];
        }
        assert!((got[j] - want).abs() < 1e-12);
    }
}

#[test]
fn finite_difference_adjoint_identity_and_divergence() {
    let (rows, cols) = (7, 5);
    let op = LinearMap::finite_difference_2d(rows, cols).unwrap();
    for s in 0..20 {
        assert!(adjoint_rel_err(&op, s) <= 1e-10);
    }
    // Constant dual field: interior pixels cancel, boundary pixels carry ±1.
    let u = vec![1.0; 2 * rows * cols];
    let g = op.adjoint(&u).unwrap();
    for i in 0..rows {
        for j in 0..cols {
            let mut want = 0.0;
            if i == 0 {
                want -= 1.0;
            }
            if i == rows - 1 {
                want += 1.0;
            }
            if j == 0 {
                want -= 1.0;
            }
            if j == cols - 1 {
                want += 1.0;
            }
            assert_eq!(g[i * cols + j], want, "({i},{j})");
        }
    }
}

#[test]
fn finite_difference_norm_bound() {
    let op = LinearMap::finite_difference_2d(16, 16).unwrap();
    let est = estimate_norm_sq(&op, 200, 1);
    assert!(est <= 8.0 && est > 7.0);
    assert_eq!(op.norm_sq(), 8.0);
}

#[test]
fn identity_dictionary() {
    let n = 6;
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        data[i * n + i] = 1.0;
    }
    let w = LinearMap::dictionary(n, n, data).unwrap();
    assert!(w.is_partial_isometry());
    assert_eq!(w.norm_sq(), 1.0);
    let x = randn(n, 2);
    assert_eq!(w.adjoint(&x).unwrap(), x);
}

#[test]
fn power_iteration_matches_dense_svd() {
    let (r, c) = (32, 16);
    let data = randn(r * c, 33);
    let op = LinearMap::dictionary(r, c, data.clone()).unwrap();
    let m = nalgebra::DMatrix::from_row_slice(r, c, &data);
    let smax = m.singular_values().max();
    let est = estimate_norm_sq(&op, POWER_ITERATIONS, 1).sqrt();
    assert!((est - smax).abs() <= 1e-6, "est {est} svd {smax}");
    assert!((op.norm_sq() - NORM_SAFETY * est * est).abs() < 1e-9);
}

#[test]
fn dct_frames_are_tight() {
    for red in [1, 2] {
        let w = LinearMap::dct_frame(32, red).unwrap();
        assert_eq!(w.in_dim(), 32 * red);
        for s in 0..10 {
            assert!(isometry_err(&w, s) <= 1e-12);
            assert!(adjoint_rel_err(&w, s) <= 1e-10);
        }
    }
    // Redundancy 2 is not an orthonormal basis: W*W ≠ I.
    let w = LinearMap::dct_frame(32, 2).unwrap();
    let a = randn(64, 1);
    let back = w.adjoint(&w.apply(&a).unwrap()).unwrap();
    assert!(crate::vecops::dist2(&back, &a) > 0.1);
}

#[test]
fn composition_of_partial_isometries() {
    let a = Arc::new(LinearMap::permuted_subsampled_hadamard(32, 10, 4).unwrap());
    let w = Arc::new(LinearMap::dct_frame(32, 2).unwrap());
    let aw = LinearMap::compose(a, w).unwrap();
    assert!(aw.is_partial_isometry());
    assert_eq!((aw.in_dim(), aw.out_dim()), (64, 10));
    for s in 0..5 {
        assert!(isometry_err(&aw, s) <= 1e-10);
        assert!(adjoint_rel_err(&aw, s) <= 1e-10);
    }
}

#[test]
fn construction_is_reproducible() {
    let x = randn(256, 0);
    let a1 = LinearMap::subsampled_dct(256, 40, 99).unwrap().apply(&x).unwrap();
    let a2 = LinearMap::subsampled_dct(256, 40, 99).unwrap().apply(&x).unwrap();
    assert_eq!(a1, a2);
    let h1 = LinearMap::permuted_subsampled_hadamard(256, 40, 99).unwrap().apply(&x).unwrap();
    let h2 = LinearMap::permuted_subsampled_hadamard(256, 40, 99).unwrap().apply(&x).unwrap();
    assert_eq!(h1, h2);
    let f1 = LinearMap::partial_fourier2d(16, 16, 40, 99).unwrap().apply(&x).unwrap();
    let f2 = LinearMap::partial_fourier2d(16, 16, 40, 99).unwrap().apply(&x).unwrap();
    assert_eq!(f1, f2);
}

#[test]
fn counted_calls() {
    let op = LinearMap::subsampled_dct(16, 4, 0).unwrap();
    let c = CallCounter::new();
    let y = op.apply_counted(&[1.0; 16], &c).unwrap();
    op.adjoint_counted(&y, &c).unwrap();
    assert_eq!(c.get(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adjoint_identity_holds(kind in 0usize..4, log_n in 3u32..9, frac in 0.05f64..1.0, seed in any::<u64>()) {
        let n = 1usize << log_n;
        let m = ((n as f64 * frac).ceil() as usize).clamp(1, n);
        let op = match kind {
            0 => LinearMap::subsampled_dct(n, m, seed).unwrap(),
            1 => LinearMap::permuted_subsampled_hadamard(n, m, seed).unwrap(),
            2 => LinearMap::partial_fourier2d(1 << (log_n / 2), 1 << (log_n - log_n / 2), m, seed).unwrap(),
            _ => LinearMap::finite_difference_2d(1 << (log_n / 2), 1 << (log_n - log_n / 2)).unwrap(),
        };
        prop_assert!(adjoint_rel_err(&op, seed) <= 1e-10);
        if op.is_partial_isometry() {
            prop_assert!(isometry_err(&op, seed) <= 1e-10);
        }
    }
}
