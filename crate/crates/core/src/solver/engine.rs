//! The accelerated three-sequence loop, generic over the variable domain.

use std::collections::VecDeque;

use super::projection::{project_cached, project_diagonal, Projected};
use super::{step_weights, stopping_delta, IterationView, HISTORY_LEN};
use crate::error::{Error, Result};
use crate::operators::{CallCounter, LinearMap, OrthoBasis, SamplingMask};
use crate::smoothing::SmoothedObjective;

/// Where the iterates live and how projections are computed.
pub(crate) trait Geometry {
    /// `(f_μ, ∇f_μ)` with respect to the iterate variables.
    fn value_grad(&self, x: &[f64], obj: &SmoothedObjective) -> Result<(f64, Vec<f64>)>;
    fn project(&self, q: &[f64], l_mu: f64) -> Result<Projected>;
    /// Maps iterate variables to the signal domain.
    fn to_signal(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn calls_a(&self) -> u64;
    fn calls_w(&self) -> u64;
}

/// Iterates are signals; projections use `A` and a cached `A*b`.
pub(crate) struct Plain<'a> {
    pub a: &'a LinearMap,
    pub b: &'a [f64],
    pub atb: Vec<f64>,
    pub epsilon: f64,
    pub calls: CallCounter,
    pub w_calls: CallCounter,
}

impl<'a> Plain<'a> {
    pub fn new(a: &'a LinearMap, b: &'a [f64], epsilon: f64) -> Result<Self> {
        let calls = CallCounter::new();
        let atb = a.adjoint_counted(b, &calls)?;
        Ok(Plain {
            a,
            b,
            atb,
            epsilon,
            calls,
            w_calls: CallCounter::new(),
        })
    }
}

impl Geometry for Plain<'_> {
    fn value_grad(&self, x: &[f64], obj: &SmoothedObjective) -> Result<(f64, Vec<f64>)> {
        obj.value_grad_counted(x, &self.w_calls)
    }

    fn project(&self, q: &[f64], l_mu: f64) -> Result<Projected> {
        project_cached(q, self.a, self.b, &self.atb, self.epsilon, l_mu, &self.calls)
    }

    fn to_signal(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(x.to_vec())
    }

    fn calls_a(&self) -> u64 {
        self.calls.get()
    }

    fn calls_w(&self) -> u64 {
        self.w_calls.get()
    }
}

/// Iterates are `x̂ = U x`; the constraint only touches sampled
/// coordinates, so projections are diagonal and free of `U` calls.
pub(crate) struct Transformed<'a> {
    pub basis: &'a OrthoBasis,
    pub mask: &'a SamplingMask,
    pub b: &'a [f64],
    pub epsilon: f64,
    pub calls: CallCounter,
    pub w_calls: CallCounter,
}

impl Transformed<'_> {
    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.calls.add(1);
        let mut out = vec![0.0; self.basis.dim()];
        self.basis.forward(x, &mut out);
        out
    }
}

impl Geometry for Transformed<'_> {
    fn value_grad(&self, xh: &[f64], obj: &SmoothedObjective) -> Result<(f64, Vec<f64>)> {
        let x = self.to_signal(xh)?;
        let (f, g) = obj.value_grad_counted(&x, &self.w_calls)?;
        Ok((f, self.forward(&g)))
    }

    fn project(&self, q: &[f64], l_mu: f64) -> Result<Projected> {
        Ok(project_diagonal(q, self.mask, self.b, self.epsilon, l_mu))
    }

    fn to_signal(&self, xh: &[f64]) -> Result<Vec<f64>> {
        Error::check_len(self.basis.dim(), xh.len())?;
        self.calls.add(1);
        let mut out = vec![0.0; xh.len()];
        self.basis.inverse(xh, &mut out);
        Ok(out)
    }

    fn calls_a(&self) -> u64 {
        self.calls.get()
    }

    fn calls_w(&self) -> u64 {
        self.w_calls.get()
    }
}

pub(crate) struct StageOutcome {
    pub y: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
    pub lambda: f64,
    pub trace: Vec<f64>,
}

/// One fixed-μ solve started and prox-centred at `start`.
pub(crate) fn run_stage(
    geom: &dyn Geometry,
    obj: &SmoothedObjective,
    start: &[f64],
    delta: f64,
    max_iter: usize,
    stage: usize,
    observer: &mut dyn FnMut(&IterationView),
) -> Result<StageOutcome> {
    let l_mu = obj.lipschitz();
    let center = start;
    let mut x = start.to_vec();
    let mut cum_grad = vec![0.0; x.len()];
    let mut history: VecDeque<f64> = VecDeque::with_capacity(HISTORY_LEN);
    let mut trace = Vec::new();
    let mut last: Option<(Projected, f64)> = None;

    for k in 0..max_iter {
        let (f, grad) = geom.value_grad(&x, obj)?;
        if !f.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite { iteration: k });
        }
        trace.push(f);

        let q: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - gi / l_mu).collect();
        let y = geom.project(&q, l_mu)?;

        let change = stopping_delta(f, history.make_contiguous());
        if change < delta {
            observer(&IterationView {
                stage,
                k,
                mu: obj.mu(),
                lipschitz: l_mu,
                center,
                x: &x,
                grad: &grad,
                f_mu: f,
                y: &y.point,
                z: None,
                cum_grad: &cum_grad,
                lambda_y: y.lambda,
                residual_y: y.residual,
                residual_z: None,
                calls_a: geom.calls_a(),
            });
            return Ok(StageOutcome {
                y: y.point,
                f,
                iterations: k + 1,
                converged: true,
                lambda: y.lambda,
                trace,
            });
        }
        if history.len() == HISTORY_LEN {
            history.pop_front();
        }
        history.push_back(f);

        let (alpha, tau) = step_weights(k);
        for (c, g) in cum_grad.iter_mut().zip(&grad) {
            *c += alpha * g;
        }
        let qz: Vec<f64> = center
            .iter()
            .zip(&cum_grad)
            .map(|(ci, gi)| ci - gi / l_mu)
            .collect();
        let z = geom.project(&qz, l_mu)?;

        observer(&IterationView {
            stage,
            k,
            mu: obj.mu(),
            lipschitz: l_mu,
            center,
            x: &x,
            grad: &grad,
            f_mu: f,
            y: &y.point,
            z: Some(&z.point),
            cum_grad: &cum_grad,
            lambda_y: y.lambda,
            residual_y: y.residual,
            residual_z: Some(z.residual),
            calls_a: geom.calls_a(),
        });

        for ((xi, zi), yi) in x.iter_mut().zip(&z.point).zip(&y.point) {
            *xi = tau * zi + (1.0 - tau) * yi;
        }
        last = Some((y, f));
    }

    let (y, f) = last.ok_or_else(|| Error::invalid("max_iter must be at least 1"))?;
    Ok(StageOutcome {
        lambda: y.lambda,
        y: y.point,
        f,
        iterations: max_iter,
        converged: false,
        trace,
    })
}
