//! Smoothed accelerated solver for
//!
//! ```text
//! minimize f(x)  subject to  ‖b − A x‖₂ ≤ ε
//! ```
//!
//! Each iteration evaluates `∇f_μ(x_k)` and builds three sequences:
//!
//! ```text
//! y_k     = argmin_{feasible} (L/2)‖y − x_k + ∇f_μ(x_k)/L‖²
//! z_k     = argmin_{feasible} (L/2)‖z − x_c + Σ_{i≤k} α_i ∇f_μ(x_i)/L‖²
//! x_{k+1} = τ_k z_k + (1 − τ_k) y_k
//! ```
//!
//! with `α_k = (k+1)/2`, `τ_k = 2/(k+3)`, `L = L_μ` and `x_c` the starting
//! point. `y_k` is returned. The loop stops when the relative change of
//! `f_μ(x_k)` against the mean of the previous ten values drops below `δ`.
//!
//! With continuation, `μ` decreases geometrically from `μ₀` to the target
//! over `T` stages, each warm-started and re-centred at the previous
//! solution with a tolerance that tightens from `0.1` towards `δ`.
//!
//! Two code paths exist. The plain path works on signals and needs
//! `A A* = I`. The transform-domain path applies when `A = R·U` for an
//! orthonormal `U`: iterates are `x̂ = U x`, projections are diagonal and an
//! iteration costs two applications of `U` or `U*`.

mod engine;
mod projection;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::LinearMap;
use crate::smoothing::{Regularizer, SmoothedObjective};
use engine::{run_stage, Geometry, Plain, Transformed};

pub use projection::project_feasible;

/// Length of the objective history used by the stopping rule.
pub const HISTORY_LEN: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverPath {
    /// Transform domain when `A = R·U`, otherwise plain.
    #[default]
    Auto,
    Plain,
    TransformDomain,
}

impl fmt::Display for SolverPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverPath::Auto => "auto",
            SolverPath::Plain => "plain",
            SolverPath::TransformDomain => "transform-domain",
        })
    }
}

impl FromStr for SolverPath {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "auto" => Ok(SolverPath::Auto),
            "plain" => Ok(SolverPath::Plain),
            "transform-domain" | "transform" => Ok(SolverPath::TransformDomain),
            other => Err(format!("unknown solver path {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Final smoothing parameter.
    pub mu: f64,
    /// Stopping tolerance on the relative objective change.
    pub delta: f64,
    /// Iteration cap per solve (per stage under continuation).
    pub max_iter: usize,
    /// Starting point and prox centre; `A*b` when `None`.
    pub x0: Option<Vec<f64>>,
    pub path: SolverPath,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mu: 0.02,
            delta: 1e-7,
            max_iter: 10_000,
            x0: None,
            path: SolverPath::Auto,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::invalid(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::invalid(format!("delta must be positive, got {}", self.delta)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContinuationConfig {
    /// Number of stages `T`.
    pub steps: usize,
    /// Initial smoothing; `0.9 ×` the peak dual-space magnitude of the
    /// starting point when `None`.
    pub mu0: Option<f64>,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig { steps: 4, mu0: None }
    }
}

impl ContinuationConfig {
    /// `(μ_t, δ_t)` for `t = 1..=T`. The last stage uses exactly
    /// `(mu_f, delta)`. Collapses to that single stage when `mu0 ≤ mu_f`.
    pub fn schedule(&self, mu0: f64, mu_f: f64, delta: f64) -> Vec<(f64, f64)> {
        let t_max = self.steps;
        if mu0 <= mu_f || t_max <= 1 {
            return vec![(mu_f, delta)];
        }
        let gamma = (mu_f / mu0).powf(1.0 / t_max as f64);
        (1..=t_max)
            .map(|t| {
                if t == t_max {
                    (mu_f, delta)
                } else {
                    let frac = t as f64 / t_max as f64;
                    (mu0 * gamma.powi(t as i32), 0.1 * (delta / 0.1).powf(frac))
                }
            })
            .collect()
    }
}

/// `A`, `b`, the noise radius and the regularizer of one recovery problem.
#[derive(Clone, Debug)]
pub struct ProblemInstance {
    pub a: Arc<LinearMap>,
    pub b: Vec<f64>,
    pub epsilon: f64,
    pub regularizer: Regularizer,
}

impl ProblemInstance {
    pub fn new(a: Arc<LinearMap>, b: Vec<f64>, epsilon: f64, regularizer: Regularizer) -> Result<Self> {
        Error::check_len(a.out_dim(), b.len())?;
        if let Some(n) = regularizer.signal_dim() {
            Error::check_len(a.in_dim(), n)?;
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::invalid(format!("epsilon must be finite and >= 0, got {epsilon}")));
        }
        Ok(ProblemInstance {
            a,
            b,
            epsilon,
            regularizer,
        })
    }

    pub fn signal_dim(&self) -> usize {
        self.a.in_dim()
    }

    /// `‖b − A x‖₂`, uncounted.
    pub fn residual_norm(&self, x: &[f64]) -> Result<f64> {
        let ax = self.a.apply(x)?;
        Ok(crate::vecops::dist2(&ax, &self.b))
    }
}

/// Summary of one continuation stage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub mu: f64,
    pub delta: f64,
    pub iterations: usize,
    pub f_mu: f64,
    pub calls_a: u64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveResult {
    pub x: Vec<f64>,
    /// `f_μ(x)` at the final smoothing level.
    pub f_final: f64,
    /// Unsmoothed `f(x)`.
    pub objective: f64,
    /// `‖b − A x‖₂`.
    pub residual: f64,
    pub iterations: usize,
    /// Applications of `A`, `A*` (or `U`, `U*` in the transform domain).
    pub calls_a: u64,
    /// Applications of an analysis dictionary.
    pub calls_w: u64,
    pub converged: bool,
    pub per_step: Vec<StepRecord>,
    /// Multiplier of the final `y` projection.
    pub lambda_epsilon: f64,
    /// `μ₀` used by continuation.
    pub mu0: Option<f64>,
    pub path: SolverPath,
    /// `f_μ(x_k)` for every iteration, all stages concatenated.
    pub trace: Vec<f64>,
}

impl SolveResult {
    /// Weight `λ` of the penalized problem `λ‖x‖₁ + ½‖b − Ax‖²` matched to
    /// this solution: the reciprocal of the terminal projection multiplier.
    pub fn qp_lambda(&self) -> f64 {
        1.0 / self.lambda_epsilon
    }
}

/// Read-only view of one iteration, handed to observers.
///
/// On the transform-domain path all vectors are in the `U` domain.
#[derive(Debug)]
pub struct IterationView<'a> {
    pub stage: usize,
    pub k: usize,
    pub mu: f64,
    pub lipschitz: f64,
    pub center: &'a [f64],
    pub x: &'a [f64],
    pub grad: &'a [f64],
    pub f_mu: f64,
    pub y: &'a [f64],
    /// `None` on the iteration that triggers the stopping rule.
    pub z: Option<&'a [f64]>,
    pub cum_grad: &'a [f64],
    pub lambda_y: f64,
    pub residual_y: f64,
    pub residual_z: Option<f64>,
    pub calls_a: u64,
}

/// `(α_k, τ_k) = ((k+1)/2, 2/(k+3))`.
pub fn step_weights(k: usize) -> (f64, f64) {
    let k = k as f64;
    ((k + 1.0) / 2.0, 2.0 / (k + 3.0))
}

/// Relative change of `f_k` against the mean of `history`; `+∞` for an
/// empty history.
pub fn stopping_delta(f_k: f64, history: &[f64]) -> f64 {
    if history.is_empty() {
        return f64::INFINITY;
    }
    let mean = history.iter().sum::<f64>() / history.len() as f64;
    if mean == 0.0 {
        return if f_k == 0.0 { 0.0 } else { f64::INFINITY };
    }
    ((f_k - mean) / mean).abs()
}

/// Fixed-μ solve on the plain path.
pub fn nesta_solve(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<SolveResult> {
    let cfg = SolverConfig {
        path: SolverPath::Plain,
        ..cfg.clone()
    };
    solve_with(problem, &cfg, None, &mut |_| {})
}

/// Fixed-μ solve in the `U` domain of `A = R·U`.
pub fn solve_in_transform_domain(problem: &ProblemInstance, cfg: &SolverConfig) -> Result<SolveResult> {
    let cfg = SolverConfig {
        path: SolverPath::TransformDomain,
        ..cfg.clone()
    };
    solve_with(problem, &cfg, None, &mut |_| {})
}

/// Continuation solve on the path selected by `cfg.path`.
pub fn nesta_continuation(
    problem: &ProblemInstance,
    cfg: &SolverConfig,
    ccfg: &ContinuationConfig,
) -> Result<SolveResult> {
    solve_with(problem, cfg, Some(ccfg), &mut |_| {})
}

/// General entry point: optional continuation and a per-iteration observer.
pub fn solve_with(
    problem: &ProblemInstance,
    cfg: &SolverConfig,
    ccfg: Option<&ContinuationConfig>,
    observer: &mut dyn FnMut(&IterationView),
) -> Result<SolveResult> {
    cfg.validate()?;
    if let Some(x0) = &cfg.x0 {
        Error::check_len(problem.signal_dim(), x0.len())?;
    }
    let a = problem.a.as_ref();
    let path = match cfg.path {
        SolverPath::Auto if a.transform_factorization().is_some() => SolverPath::TransformDomain,
        SolverPath::Auto => SolverPath::Plain,
        p => p,
    };
    match path {
        SolverPath::TransformDomain => {
            let (basis, mask) = a.transform_factorization().ok_or_else(|| {
                Error::Unsupported("operator is not a subsampled orthonormal transform".into())
            })?;
            if !(problem.epsilon.is_finite() && problem.epsilon >= 0.0) {
                return Err(Error::invalid("epsilon must be finite and >= 0"));
            }
            let geom = Transformed {
                basis,
                mask,
                b: &problem.b,
                epsilon: problem.epsilon,
                calls: Default::default(),
                w_calls: Default::default(),
            };
            let start = match &cfg.x0 {
                Some(x0) => geom.forward(x0),
                None => mask.extend(&problem.b),
            };
            drive(&geom, problem, cfg, ccfg, start, path, observer)
        }
        _ => {
            projection::check_projection_args(a, &problem.b, problem.epsilon, 1.0)?;
            let geom = Plain::new(a, &problem.b, problem.epsilon)?;
            let start = cfg.x0.clone().unwrap_or_else(|| geom.atb.clone());
            drive(&geom, problem, cfg, ccfg, start, SolverPath::Plain, observer)
        }
    }
}

fn drive(
    geom: &dyn Geometry,
    problem: &ProblemInstance,
    cfg: &SolverConfig,
    ccfg: Option<&ContinuationConfig>,
    start: Vec<f64>,
    path: SolverPath,
    observer: &mut dyn FnMut(&IterationView),
) -> Result<SolveResult> {
    let reg = &problem.regularizer;
    let (schedule, mu0) = match ccfg {
        None => (vec![(cfg.mu, cfg.delta)], None),
        Some(c) => {
            if c.steps == 0 {
                return Err(Error::invalid("continuation needs at least one step"));
            }
            let mu0 = match c.mu0 {
                Some(m) if m < cfg.mu => {
                    return Err(Error::invalid(format!(
                        "mu0 = {m} is below the target mu = {}",
                        cfg.mu
                    )))
                }
                Some(m) => m,
                None => 0.9 * reg.coefficient_peak(&geom.to_signal(&start)?)?,
            };
            (c.schedule(mu0, cfg.mu, cfg.delta), Some(mu0))
        }
    };

    let mut current = start;
    let mut per_step = Vec::with_capacity(schedule.len());
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut lambda = 0.0;
    let mut obj = SmoothedObjective::new(reg.clone(), cfg.mu)?;
    for (stage, &(mu, delta)) in schedule.iter().enumerate() {
        obj = obj.with_mu(mu)?;
        let out = run_stage(geom, &obj, &current, delta, cfg.max_iter, stage, observer)?;
        iterations += out.iterations;
        converged = out.converged;
        lambda = out.lambda;
        per_step.push(StepRecord {
            mu,
            delta,
            iterations: out.iterations,
            f_mu: out.f,
            calls_a: geom.calls_a(),
            converged: out.converged,
        });
        trace.extend(out.trace);
        current = out.y;
    }

    let x = geom.to_signal(&current)?;
    let f_final = obj.value(&x)?;
    let objective = reg.value(&x)?;
    let residual = problem.residual_norm(&x)?;
    Ok(SolveResult {
        x,
        f_final,
        objective,
        residual,
        iterations,
        calls_a: geom.calls_a(),
        calls_w: geom.calls_w(),
        converged,
        per_step,
        lambda_epsilon: lambda,
        mu0,
        path,
        trace,
    })
}

#[cfg(test)]
mod tests;
