//! Smoothed regularizers.
//!
//! Each regularizer is written as `f(x) = max_{u ∈ Q} ⟨u, W* x⟩` and smoothed
//! with the dual prox term `½‖u‖²`:
//!
//! ```text
//! f_μ(x) = max_{u ∈ Q} ⟨u, W* x⟩ − (μ/2)‖u‖²,    ∇f_μ(x) = W u_μ(x)
//! ```
//!
//! For the ℓ1 norm (`W = I`, `Q` the unit ℓ∞ ball) this is the Huber
//! function. For total variation `W* = D` stacks forward differences and `Q`
//! is a product of per-pixel unit disks. `∇f_μ` is Lipschitz with constant
//! `‖W‖²/μ`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::operators::{forward_difference, forward_difference_adjoint, CallCounter, LinearMap};
use crate::vecops::norm_inf;

/// `‖D‖² ≤ 8` for stacked 2-D forward differences.
pub const TV_NORM_SQ: f64 = 8.0;

#[derive(Clone, Debug)]
pub enum Regularizer {
    /// `‖x‖₁`
    L1,
    /// `‖W* x‖₁`; `W` maps coefficients to signals.
    Analysis(Arc<LinearMap>),
    /// Isotropic total variation of a row-major `rows × cols` image.
    Tv { rows: usize, cols: usize },
}

impl Regularizer {
    /// Squared norm of the analysis operator.
    pub fn norm_sq(&self) -> f64 {
        match self {
            Regularizer::L1 => 1.0,
            Regularizer::Analysis(w) => w.norm_sq(),
            Regularizer::Tv { .. } => TV_NORM_SQ,
        }
    }

    /// Required signal length, if fixed.
    pub fn signal_dim(&self) -> Option<usize> {
        match self {
            Regularizer::L1 => None,
            Regularizer::Analysis(w) => Some(w.out_dim()),
            Regularizer::Tv { rows, cols } => Some(rows * cols),
        }
    }

    pub fn check_signal(&self, x: &[f64]) -> Result<()> {
        match self.signal_dim() {
            Some(n) => Error::check_len(n, x.len()),
            None => Ok(()),
        }
    }

    /// The unsmoothed regularizer `f(x)`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_signal(x)?;
        Ok(match self {
            Regularizer::L1 => x.iter().map(|v| v.abs()).sum(),
            Regularizer::Analysis(w) => w.adjoint(x)?.iter().map(|v| v.abs()).sum(),
            Regularizer::Tv { rows, cols } => {
                gradient_magnitudes(x, *rows, *cols).iter().sum()
            }
        })
    }

    /// Largest dual-space magnitude of `x`: `‖x‖∞`, `‖W* x‖∞`, or the
    /// largest per-pixel gradient norm.
    pub fn coefficient_peak(&self, x: &[f64]) -> Result<f64> {
        self.check_signal(x)?;
        Ok(match self {
            Regularizer::L1 => norm_inf(x),
            Regularizer::Analysis(w) => norm_inf(&w.adjoint(x)?),
            Regularizer::Tv { rows, cols } => gradient_magnitudes(x, *rows, *cols)
                .into_iter()
                .fold(0.0, f64::max),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regularizer::L1 => "l1",
            Regularizer::Analysis(_) => "analysis",
            Regularizer::Tv { .. } => "tv",
        }
    }
}

/// A regularizer together with its smoothing parameter.
#[derive(Clone, Debug)]
pub struct SmoothedObjective {
    reg: Regularizer,
    mu: f64,
}

impl SmoothedObjective {
    pub fn new(reg: Regularizer, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(SmoothedObjective { reg, mu })
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        Self::new(self.reg.clone(), mu)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn regularizer(&self) -> &Regularizer {
        &self.reg
    }

    pub fn norm_sq(&self) -> f64 {
        self.reg.norm_sq()
    }

    /// `L_μ = ‖W‖²/μ`.
    pub fn lipschitz(&self) -> f64 {
        self.reg.norm_sq() / self.mu
    }

    pub fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.value_grad_counted(x, &CallCounter::new())
    }

    /// As [`value_grad`](Self::value_grad), adding dictionary applications
    /// (two per call for the analysis form) to `w_calls`.
    pub fn value_grad_counted(&self, x: &[f64], w_calls: &CallCounter) -> Result<(f64, Vec<f64>)> {
        match &self.reg {
            Regularizer::L1 => l1_value_grad(x, self.mu),
            Regularizer::Analysis(w) => {
                w_calls.add(2);
                analysis_value_grad(x, w, self.mu)
            }
            Regularizer::Tv { rows, cols } => tv_value_grad(x, *rows, *cols, self.mu),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value_grad(x)?.0)
    }

    /// The maximizing dual variable `u_μ(x)`.
    pub fn dual_variable(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.reg.check_signal(x)?;
        Ok(match &self.reg {
            Regularizer::L1 => huber_dual(x, self.mu).1,
            Regularizer::Analysis(w) => huber_dual(&w.adjoint(x)?, self.mu).1,
            Regularizer::Tv { rows, cols } => tv_dual(x, *rows, *cols, self.mu).1,
        })
    }

    pub fn coefficient_peak(&self, x: &[f64]) -> Result<f64> {
        self.reg.coefficient_peak(x)
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("smoothing parameter must be positive, got {mu}")))
    }
}

/// Huber value and clipped dual `u = clip(c/μ, −1, 1)`.
fn huber_dual(c: &[f64], mu: f64) -> (f64, Vec<f64>) {
    let mut value = 0.0;
    let u = c
        .iter()
        .map(|&t| {
            if t.abs() < mu {
                value += t * t / (2.0 * mu);
                t / mu
            } else {
                value += t.abs() - 0.5 * mu;
                t.signum()
            }
        })
        .collect();
    (value, u)
}

/// Huber-smoothed ℓ1 norm and its gradient.
pub fn l1_value_grad(x: &[f64], mu: f64) -> Result<(f64, Vec<f64>)> {
    check_mu(mu)?;
    Ok(huber_dual(x, mu))
}

/// Smoothed `‖W* x‖₁`; two applications of `W`.
pub fn analysis_value_grad(x: &[f64], w: &LinearMap, mu: f64) -> Result<(f64, Vec<f64>)> {
    check_mu(mu)?;
    let c = w.adjoint(x)?;
    let (value, u) = huber_dual(&c, mu);
    Ok((value, w.apply(&u)?))
}

fn gradient_magnitudes(x: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let n = rows * cols;
    let mut d = vec![0.0; 2 * n];
    forward_difference(x, rows, cols, &mut d);
    (0..n).map(|i| d[i].hypot(d[n + i])).collect()
}

fn tv_dual(x: &[f64], rows: usize, cols: usize, mu: f64) -> (f64, Vec<f64>) {
    let n = rows * cols;
    let mut d = vec![0.0; 2 * n];
    forward_difference(x, rows, cols, &mut d);
    let mut value = 0.0;
    for i in 0..n {
        let g = d[i].hypot(d[n + i]);
        let scale = if g < mu {
            value += g * g / (2.0 * mu);
            1.0 / mu
        } else {
            value += g - 0.5 * mu;
            1.0 / g
        };
        d[i] *= scale;
        d[n + i] *= scale;
    }
    (value, d)
}

/// Smoothed isotropic total variation of a row-major image.
pub fn tv_value_grad(x: &[f64], rows: usize, cols: usize, mu: f64) -> Result<(f64, Vec<f64>)> {
    check_mu(mu)?;
    Error::check_len(rows * cols, x.len())?;
    let (value, u) = tv_dual(x, rows, cols, mu);
    let mut grad = vec![0.0; rows * cols];
    forward_difference_adjoint(&u, rows, cols, &mut grad);
    Ok((value, grad))
}
