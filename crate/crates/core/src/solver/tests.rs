use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::*;
use crate::operators::LinearMap;
use crate::rng::Rng64;
use crate::smoothing::Regularizer;
use crate::vecops::{dist2, norm2};

fn sparse_instance(n: usize, m: usize, s: usize, sigma: f64, seed: u64) -> (ProblemInstance, Vec<f64>) {
    let a = Arc::new(LinearMap::subsampled_dct(n, m, seed).unwrap());
    let mut rng = Rng64::stream(seed, 7);
    let mut x = vec![0.0; n];
    for i in rng.sample(n, s) {
        x[i] = rng.sign() * (1.0 + rng.uniform());
    }
    let mut b = a.apply(&x).unwrap();
    for v in b.iter_mut() {
        *v += sigma * rng.gaussian();
    }
    let eps = (m as f64 + 2.0 * (2.0 * m as f64).sqrt()).sqrt() * sigma;
    (ProblemInstance::new(a, b, eps, Regularizer::L1).unwrap(), x)
}

fn orthonormal_rows(m: usize, n: usize, seed: u64) -> Vec<f64> {
    let g = DMatrix::from_row_slice(n, m, &Rng64::new(seed).gaussian_vec(n * m, 1.0));
    let q = g.qr().q();
    let mut rows = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            rows[i * n + j] = q[(j, i)];
        }
    }
    rows
}

#[test]
fn weights_at_first_iterations() {
    assert_eq!(step_weights(0), (0.5, 2.0 / 3.0));
    assert_eq!(step_weights(1), (1.0, 0.5));
    let mut prev = f64::INFINITY;
    for k in 0..1000 {
        let (_, tau) = step_weights(k);
        assert!(tau > 0.0 && tau <= 1.0 && tau < prev);
        prev = tau;
    }
}

#[test]
fn stopping_delta_examples() {
    assert_eq!(stopping_delta(3.0, &[3.0; 10]), 0.0);
    assert!((stopping_delta(2.2, &[1.0, 3.0]) - 0.1).abs() < 1e-15);
    assert_eq!(stopping_delta(1.0, &[]), f64::INFINITY);
}

#[test]
fn stopping_delta_matches_direct_recomputation() {
    let mut rng = Rng64::new(4);
    let stream: Vec<f64> = (0..200).map(|_| 1.0 + rng.uniform()).collect();
    for k in 1..stream.len() {
        let lo = k.saturating_sub(HISTORY_LEN);
        let window = &stream[lo..k];
        let mut sum = 0.0;
        for v in window {
            sum += v;
        }
        let mean = sum / window.len() as f64;
        let want = (stream[k] - mean).abs() / mean;
        assert!((stopping_delta(stream[k], window) - want).abs() <= 1e-15);
    }
}

#[test]
fn feasible_point_is_returned_unchanged() {
    let (p, _) = sparse_instance(64, 16, 3, 0.1, 1);
    let x = p.a.adjoint(&p.b).unwrap();
    let (y, lambda) = project_feasible(&x, &p.a, &p.b, p.epsilon, 50.0).unwrap();
    assert_eq!(lambda, 0.0);
    assert_eq!(y, x);
}

#[test]
fn projection_closed_form_on_identity() {
    let eye = LinearMap::dense(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let b = [3.0, 0.0];
    let q = [0.0, 0.0];
    let (y, lambda) = project_feasible(&q, &eye, &b, 1.0, 1.0).unwrap();
    // λ = L(‖b − q‖/ε − 1) = 2
    assert!((lambda - 2.0).abs() < 1e-14);
    assert!((dist2(&y, &b) - 1.0).abs() < 1e-14);
    assert!((y[0] - 2.0).abs() < 1e-14 && y[1] == 0.0);
}

/// Solves `(L I + λ AᵀA) y = L q + λ Aᵀb` densely, bisecting on `λ` until
/// `‖b − Ay‖ = ε`.
fn dense_kkt_projection(rows: &[f64], m: usize, n: usize, q: &[f64], b: &[f64], eps: f64, l: f64) -> Vec<f64> {
    let a = DMatrix::from_row_slice(m, n, rows);
    let ata = a.transpose() * &a;
    let qv = DVector::from_column_slice(q);
    let bv = DVector::from_column_slice(b);
    let atb = a.transpose() * &bv;
    let solve = |lam: f64| {
        let lhs = DMatrix::identity(n, n) * l + &ata * lam;
        let rhs = &qv * l + &atb * lam;
        lhs.lu().solve(&rhs).unwrap()
    };
    let resid = |y: &DVector<f64>| (&bv - &a * y).norm();
    let (mut lo, mut hi) = (0.0, 1.0);
    while resid(&solve(hi)) > eps {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if resid(&solve(mid)) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    solve(0.5 * (lo + hi)).as_slice().to_vec()
}

#[test]
fn projection_matches_dense_kkt_solve() {
    let (m, n) = (8, 16);
    let rows = orthonormal_rows(m, n, 3);
    let a = LinearMap::dense(m, n, rows.clone()).unwrap();
    assert!(a.is_partial_isometry());
    for seed in 0..5 {
        let mut rng = Rng64::new(100 + seed);
        let q = rng.gaussian_vec(n, 1.0);
        let b = rng.gaussian_vec(m, 2.0);
        let l = 0.5 + 10.0 * rng.uniform();
        let eps = 0.3;
        let (y, lambda) = project_feasible(&q, &a, &b, eps, l).unwrap();
        assert!(lambda > 0.0);
        let want = dense_kkt_projection(&rows, m, n, &q, &b, eps, l);
        assert!(dist2(&y, &want) <= 1e-8, "{}", dist2(&y, &want));
        let r = dist2(&a.apply(&y).unwrap(), &b);
        assert!(r <= eps * (1.0 + 1e-8));
    }
}

#[test]
fn projection_rejects_unsupported_inputs() {
    let eye = LinearMap::dense(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(matches!(
        project_feasible(&[0.0, 0.0], &eye, &[1.0, 1.0], 0.0, 1.0),
        Err(Error::Unsupported(_))
    ));
    let skew = LinearMap::dense(2, 2, vec![1.0, 1.0, 0.0, 1.0]).unwrap();
    assert!(matches!(
        project_feasible(&[0.0, 0.0], &skew, &[1.0, 1.0], 0.5, 1.0),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn stationary_start_converges_immediately() {
    let a = Arc::new(LinearMap::subsampled_dct(64, 16, 2).unwrap());
    let p = ProblemInstance::new(a, vec![0.0; 16], 1.0, Regularizer::L1).unwrap();
    let r = nesta_solve(&p, &SolverConfig::default()).unwrap();
    assert!(r.converged);
    assert!(r.iterations <= 3, "{}", r.iterations);
    assert!(r.x.iter().all(|&v| v == 0.0));
}

#[test]
fn iterates_obey_structural_invariants() {
    let (p, _) = sparse_instance(128, 32, 4, 0.05, 5);
    let cfg = SolverConfig {
        mu: 0.05,
        max_iter: 300,
        path: SolverPath::Plain,
        ..Default::default()
    };
    let mut grads: Vec<Vec<f64>> = Vec::new();
    let mut worst_feas: f64 = 0.0;
    let mut prev: Option<(Vec<f64>, Vec<f64>, f64)> = None;
    let a = p.a.clone();
    let b = p.b.clone();
    let eps = p.epsilon;
    solve_with(&p, &cfg, None, &mut |v: &IterationView| {
        // x_k is the convex combination built from the previous y, z.
        if let Some((y, z, tau)) = &prev {
            for i in 0..v.x.len() {
                assert_eq!(v.x[i], tau * z[i] + (1.0 - tau) * y[i]);
            }
        }
        grads.push(v.grad.to_vec());
        let ry = dist2(&a.apply(v.y).unwrap(), &b);
        worst_feas = worst_feas.max(ry / eps);
        if let Some(z) = v.z {
            let rz = dist2(&a.apply(z).unwrap(), &b);
            worst_feas = worst_feas.max(rz / eps);
            let mut cum = vec![0.0; v.x.len()];
            for (i, g) in grads.iter().enumerate() {
                let (alpha, _) = step_weights(i);
                for (c, gi) in cum.iter_mut().zip(g) {
                    *c += alpha * gi;
                }
            }
            assert!(dist2(&cum, v.cum_grad) <= 1e-12 * (1.0 + norm2(&cum)));
            prev = Some((v.y.to_vec(), z.to_vec(), step_weights(v.k).1));
        }
    })
    .unwrap();
    assert!(worst_feas <= 1.0 + 1e-8, "{worst_feas}");
    assert!(grads.len() > 10);
}

#[test]
fn full_mask_transform_path_tracks_plain_path() {
    let n = 64;
    let a = Arc::new(LinearMap::subsampled_dct(n, n, 3).unwrap());
    let mut rng = Rng64::new(9);
    let b = rng.gaussian_vec(n, 1.0);
    let p = ProblemInstance::new(a.clone(), b, 0.5, Regularizer::L1).unwrap();
    let base = SolverConfig {
        mu: 0.1,
        max_iter: 60,
        ..Default::default()
    };
    let mut plain_y = Vec::new();
    let cfg = SolverConfig { path: SolverPath::Plain, ..base.clone() };
    solve_with(&p, &cfg, None, &mut |v| plain_y.push(v.y.to_vec())).unwrap();
    let mut fast_y = Vec::new();
    let cfg = SolverConfig { path: SolverPath::TransformDomain, ..base };
    solve_with(&p, &cfg, None, &mut |v| {
        // with R = I, A* maps the U domain back to signals
        fast_y.push(a.adjoint(v.y).unwrap());
    })
    .unwrap();
    assert_eq!(plain_y.len(), fast_y.len());
    for (u, v) in plain_y.iter().zip(&fast_y) {
        assert!(dist2(u, v) <= 1e-12 * (1.0 + norm2(u)), "{}", dist2(u, v));
    }
}

#[test]
fn transform_path_agrees_with_plain_path() {
    let (p, _) = sparse_instance(1024, 256, 20, 0.05, 8);
    let cfg = SolverConfig { mu: 0.05, ..Default::default() };
    let plain = nesta_solve(&p, &cfg).unwrap();
    let fast = solve_in_transform_domain(&p, &cfg).unwrap();
    assert!(plain.converged && fast.converged);
    let rel = (plain.objective - fast.objective).abs() / plain.objective;
    assert!(rel <= 1e-8, "{rel}");
    assert_eq!(fast.path, SolverPath::TransformDomain);
    // two U/U* calls per iteration plus the final mapping back
    assert_eq!(fast.calls_a, 2 * fast.iterations as u64 + 1);
    assert!(plain.calls_a <= 4 * plain.iterations as u64 + 1);
}

#[test]
fn noiseless_equality_constraint_in_transform_domain() {
    let (p, x0) = sparse_instance(256, 96, 6, 0.0, 12);
    assert_eq!(p.epsilon, 0.0);
    assert!(matches!(nesta_solve(&p, &SolverConfig::default()), Err(Error::Unsupported(_))));
    let cc = ContinuationConfig::default();
    let cfg = SolverConfig { mu: 1e-3, delta: 1e-9, ..Default::default() };
    let r = nesta_continuation(&p, &cfg, &cc).unwrap();
    assert!(r.residual <= 1e-10, "{}", r.residual);
    assert!(dist2(&r.x, &x0) / norm2(&x0) <= 1e-2);
}

#[test]
fn degenerate_schedule_equals_single_solve() {
    let (p, _) = sparse_instance(256, 64, 8, 0.1, 21);
    let cfg = SolverConfig { path: SolverPath::Plain, ..Default::default() };
    let single = nesta_solve(&p, &cfg).unwrap();
    for steps in [1, 3, 7] {
        let cc = ContinuationConfig { steps, mu0: Some(cfg.mu) };
        let cont = nesta_continuation(&p, &cfg, &cc).unwrap();
        assert_eq!(cont.x, single.x);
        assert_eq!(cont.calls_a, single.calls_a);
        assert_eq!(cont.per_step.len(), 1);
    }
}

#[test]
fn continuation_schedule_is_geometric() {
    let (p, _) = sparse_instance(256, 64, 8, 0.1, 22);
    let cfg = SolverConfig::default();
    let cc = ContinuationConfig { steps: 5, mu0: None };
    let r = nesta_continuation(&p, &cfg, &cc).unwrap();
    let mu0 = r.mu0.unwrap();
    let atb = p.a.adjoint(&p.b).unwrap();
    assert!((mu0 - 0.9 * crate::vecops::norm_inf(&atb)).abs() <= 1e-12 * mu0);
    let gamma = (cfg.mu / mu0).powf(1.0 / 5.0);
    assert_eq!(r.per_step.len(), 5);
    for (t, s) in r.per_step.iter().enumerate() {
        let want = mu0 * gamma.powi(t as i32 + 1);
        assert!((s.mu - want).abs() <= 1e-12 * want);
        let dwant = 0.1 * (cfg.delta / 0.1f64).powf((t + 1) as f64 / 5.0);
        assert!((s.delta - dwant).abs() <= 1e-12 * dwant);
    }
    assert_eq!(r.per_step.last().unwrap().mu, cfg.mu);
    assert_eq!(r.per_step.last().unwrap().delta, cfg.delta);
}

#[test]
fn config_validation() {
    let (p, _) = sparse_instance(64, 16, 2, 0.1, 2);
    let bad = SolverConfig { mu: 0.0, ..Default::default() };
    assert!(nesta_solve(&p, &bad).is_err());
    let bad = SolverConfig { x0: Some(vec![0.0; 3]), ..Default::default() };
    assert!(matches!(nesta_solve(&p, &bad), Err(Error::DimensionMismatch { .. })));
    let cc = ContinuationConfig { steps: 4, mu0: Some(0.001) };
    assert!(nesta_continuation(&p, &SolverConfig::default(), &cc).is_err());
    assert!("transform-domain".parse::<SolverPath>().is_ok());
    assert!("nope".parse::<SolverPath>().is_err());
}
