//! Reference machinery for the penalized problem
//!
//! ```text
//! minimize λ‖x‖₁ + ½‖b − A x‖₂²
//! ```
//!
//! FISTA, the closed-form solution on a known support, and KKT residuals.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{CallCounter, LinearMap};
use crate::smoothing::Regularizer;
use crate::solver::{solve_with, ContinuationConfig, ProblemInstance, SolveResult, SolverConfig};
use crate::vecops::{dist2, norm1, norm_inf};

/// Soft threshold `sign(x)·max(|x| − t, 0)`.
pub fn shrink(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// `λ‖x‖₁ + ½‖b − Ax‖²` given `Ax`.
pub fn qp_objective(x: &[f64], ax: &[f64], b: &[f64], lambda: f64) -> f64 {
    let r = dist2(ax, b);
    lambda * norm1(x) + 0.5 * r * r
}

/// Consecutive objective increases tolerated before reporting divergence.
pub const DIVERGENCE_WINDOW: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FistaResult {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Objective after every iteration.
    pub history: Vec<f64>,
    pub iterations: usize,
    pub calls_a: u64,
    /// Stopped by the tolerance or the callback rather than the cap.
    pub converged: bool,
}

/// State after one FISTA iteration.
#[derive(Debug)]
pub struct FistaView<'a> {
    pub k: usize,
    pub x: &'a [f64],
    pub ax: &'a [f64],
    pub objective: f64,
    pub calls_a: u64,
}

/// Plain FISTA, or the monotone variant that keeps the better of the prox
/// point and the previous iterate (same rate and per-iteration cost, but
/// the objective never increases).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FistaVariant {
    #[default]
    Standard,
    Monotone,
}

/// FISTA with step `1/‖A‖²`, stopping when the relative objective change
/// falls below `tol`.
pub fn fista_solve(a: &LinearMap, b: &[f64], lambda: f64, tol: f64, max_iter: usize) -> Result<FistaResult> {
    fista_solve_until(a, b, lambda, tol, max_iter, FistaVariant::Standard, &mut |_| false)
}

/// Monotone FISTA, used for long-run reference solutions.
pub fn fista_reference(a: &LinearMap, b: &[f64], lambda: f64, tol: f64, max_iter: usize) -> Result<FistaResult> {
    fista_solve_until(a, b, lambda, tol, max_iter, FistaVariant::Monotone, &mut |_| false)
}

/// As [`fista_solve`], additionally stopping as soon as `stop` returns true.
///
/// Two operator calls per iteration: `A*` for the gradient and `A` on the
/// prox point; `A y` follows from linearity. The tolerance test compares
/// the prox-point objective with the previous iterate's.
pub fn fista_solve_until(
    a: &LinearMap,
    b: &[f64],
    lambda: f64,
    tol: f64,
    max_iter: usize,
    variant: FistaVariant,
    stop: &mut dyn FnMut(&FistaView) -> bool,
) -> Result<FistaResult> {
    Error::check_len(a.out_dim(), b.len())?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    fista_core(a, b, lambda, a.norm_sq(), tol, max_iter, variant, stop)
}

#[allow(clippy::too_many_arguments)]
fn fista_core(
    a: &LinearMap,
    b: &[f64],
    lambda: f64,
    l: f64,
    tol: f64,
    max_iter: usize,
    variant: FistaVariant,
    stop: &mut dyn FnMut(&FistaView) -> bool,
) -> Result<FistaResult> {
    let calls = CallCounter::new();
    let n = a.in_dim();
    let mut x = vec![0.0; n];
    let mut ax = vec![0.0; b.len()];
    let mut y = x.clone();
    let mut ay = ax.clone();
    let mut t = 1.0f64;
    let mut f_old = qp_objective(&x, &ax, b, lambda);
    let f_start = f_old;
    let mut history = Vec::new();
    let mut increases = 0;
    let mut converged = false;

    for k in 0..max_iter {
        let r: Vec<f64> = ay.iter().zip(b).map(|(u, v)| u - v).collect();
        let g = a.adjoint_counted(&r, &calls)?;
        let z: Vec<f64> = y
            .iter()
            .zip(&g)
            .map(|(yi, gi)| shrink(yi - gi / l, lambda / l))
            .collect();
        let az = a.apply_counted(&z, &calls)?;
        let fz = qp_objective(&z, &az, b, lambda);
        if !fz.is_finite() {
            return Err(Error::NonFinite { iteration: k });
        }
        let change = if f_old == 0.0 { 0.0 } else { (fz - f_old).abs() / f_old };
        // rises below the starting objective are ordinary momentum ripples
        if fz > f_old * (1.0 + 1e-12) && fz > f_start {
            increases += 1;
            if variant == FistaVariant::Standard && increases >= DIVERGENCE_WINDOW {
                return Err(Error::Diverged { iterations: k + 1 });
            }
        } else {
            increases = 0;
        }

        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let keep_old = variant == FistaVariant::Monotone && fz > f_old;
        // y = x⁺ + (t/t⁺)(z − x⁺) + ((t − 1)/t⁺)(x⁺ − x), with x⁺ = z for the
        // plain variant.
        let (cz, cx) = if keep_old {
            (t / t_new, 1.0 - t / t_new)
        } else {
            let beta = (t - 1.0) / t_new;
            (1.0 + beta, -beta)
        };
        for i in 0..n {
            y[i] = cz * z[i] + cx * x[i];
        }
        for i in 0..ay.len() {
            ay[i] = cz * az[i] + cx * ax[i];
        }
        if !keep_old {
            x = z;
            ax = az;
            f_old = fz;
        }
        t = t_new;
        history.push(f_old);

        let view = FistaView {
            k,
            x: &x,
            ax: &ax,
            objective: f_old,
            calls_a: calls.get(),
        };
        if stop(&view) || change < tol {
            converged = true;
            break;
        }
    }
    Ok(FistaResult {
        objective: f_old,
        iterations: history.len(),
        history,
        x,
        calls_a: calls.get(),
        converged,
    })
}

/// Minimizer of the penalized problem restricted to `support` with the
/// given signs: `x[I] = (A_I* A_I)⁻¹(A_I* b − λ s)`, zero elsewhere.
pub fn oracle_solution(a: &LinearMap, b: &[f64], support: &[usize], signs: &[f64], lambda: f64) -> Result<Vec<f64>> {
    Error::check_len(a.out_dim(), b.len())?;
    Error::check_len(support.len(), signs.len())?;
    let n = a.in_dim();
    let s = support.len();
    if let Some(&bad) = support.iter().find(|&&i| i >= n) {
        return Err(Error::invalid(format!("support index {bad} out of range")));
    }
    let mut cols = DMatrix::zeros(a.out_dim(), s);
    let mut e = vec![0.0; n];
    for (j, &i) in support.iter().enumerate() {
        e[i] = 1.0;
        let col = a.apply(&e)?;
        e[i] = 0.0;
        cols.set_column(j, &DVector::from_vec(col));
    }
    let gram = cols.transpose() * &cols;
    let rhs = cols.transpose() * DVector::from_column_slice(b) - DVector::from_column_slice(signs) * lambda;
    let sol = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => {
            let qr = gram.col_piv_qr();
            let r = qr.r();
            let d = r.diagonal();
            let top = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if d.iter().any(|v| v.abs() <= 1e-12 * top) {
                return Err(Error::RankDeficient { support: s });
            }
            qr.solve(&rhs).ok_or(Error::RankDeficient { support: s })?
        }
    };
    let mut x = vec![0.0; n];
    for (j, &i) in support.iter().enumerate() {
        x[i] = sol[j];
    }
    Ok(x)
}

/// Optimality residuals of the penalized problem, relative to `λ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KktReport {
    /// `‖A_I*(b − Ax) − λ sgn(x_I)‖∞ / λ`
    pub support_residual: f64,
    /// `‖A_{Iᶜ}*(b − Ax)‖∞ / λ`
    pub offsupport_ratio: f64,
    pub support_size: usize,
}

impl KktReport {
    /// Both conditions hold to within `tol`.
    pub fn is_optimal(&self, tol: f64) -> bool {
        self.support_residual <= tol && self.offsupport_ratio <= 1.0 + tol
    }
}

/// Support threshold relative to `‖x‖∞`.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

/// KKT residuals with support `{i : |x_i| > 1e-8‖x‖∞}`.
pub fn kkt_check(x: &[f64], a: &LinearMap, b: &[f64], lambda: f64) -> Result<KktReport> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::invalid(format!("lambda must be positive, got {lambda}")));
    }
    let ax = a.apply(x)?;
    let r: Vec<f64> = b.iter().zip(&ax).map(|(u, v)| u - v).collect();
    let c = a.adjoint(&r)?;
    let cut = SUPPORT_THRESHOLD * norm_inf(x);
    let mut on: f64 = 0.0;
    let mut off: f64 = 0.0;
    let mut support = 0;
    for (xi, ci) in x.iter().zip(&c) {
        if xi.abs() > cut && *xi != 0.0 {
            support += 1;
            on = on.max((ci - lambda * xi.signum()).abs());
        } else {
            off = off.max(ci.abs());
        }
    }
    Ok(KktReport {
        support_residual: on / lambda,
        offsupport_ratio: off / lambda,
        support_size: support,
    })
}

/// Noise radius `√(m + 2√(2m))·σ`.
pub fn epsilon0(m: usize, sigma: f64) -> f64 {
    let m = m as f64;
    (m + 2.0 * (2.0 * m).sqrt()).sqrt() * sigma
}

#[derive(Clone, Debug, PartialEq)]
pub struct HandshakeConfig {
    pub nesta: SolverConfig,
    pub continuation: ContinuationConfig,
    pub fista_tol: f64,
    pub fista_max_iter: usize,
}

impl Default for HandshakeConfig {
    fn default() -> Self {
        HandshakeConfig {
            nesta: SolverConfig {
                delta: 1e-10,
                ..Default::default()
            },
            continuation: ContinuationConfig {
                steps: 5,
                mu0: None,
            },
            fista_tol: 1e-14,
            fista_max_iter: 200_000,
        }
    }
}

/// Matched pair of penalized and constrained problems.
#[derive(Clone, Debug)]
pub struct Handshake {
    pub epsilon0: f64,
    pub lambda: f64,
    pub epsilon1: f64,
    /// Constrained solve at `ε0` that produced `λ`.
    pub seed_solve: SolveResult,
    /// Long-run FISTA solution at `λ`.
    pub fista: FistaResult,
}

/// Two-step matching of `λ` and `ε`: solve the constrained problem at
/// `ε0 = √(m + 2√(2m))·σ`, take `λ` as the reciprocal of its terminal
/// projection multiplier, then run FISTA at `λ` and set
/// `ε1 = ‖A x_λ − b‖₂`.
pub fn lambda_epsilon_handshake(a: &Arc<LinearMap>, b: &[f64], sigma: f64, cfg: &HandshakeConfig) -> Result<Handshake> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    let eps0 = epsilon0(a.out_dim(), sigma);
    let problem = ProblemInstance::new(a.clone(), b.to_vec(), eps0, Regularizer::L1)?;
    let seed_solve = solve_with(&problem, &cfg.nesta, Some(&cfg.continuation), &mut |_| {})?;
    let lambda = seed_solve.qp_lambda();
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "constraint inactive at eps0 = {eps0}; no matching lambda"
        )));
    }
    let fista = fista_reference(a, b, lambda, cfg.fista_tol, cfg.fista_max_iter)?;
    let epsilon1 = dist2(&a.apply(&fista.x)?, b);
    Ok(Handshake {
        epsilon0: eps0,
        lambda,
        epsilon1,
        seed_solve,
        fista,
    })
}
