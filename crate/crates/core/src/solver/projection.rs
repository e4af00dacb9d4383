//! Closed-form projections onto `{x : ‖b − A x‖₂ ≤ ε}` for the quadratic
//! subproblem
//!
//! ```text
//! minimize (L/2)‖y − q‖²  subject to  ‖b − A y‖₂ ≤ ε
//! ```
//!
//! With `A A* = I` the multiplier is `λ = max(0, L(‖b − Aq‖/ε − 1))` and
//! the minimizer `y = (I − λ/(λ+L) A*A)(q + (λ/L) A*b)`.

use crate::error::{Error, Result};
use crate::operators::{CallCounter, LinearMap, SamplingMask};
use crate::vecops::norm2;

/// Outcome of one projection.
#[derive(Clone, Debug)]
pub(crate) struct Projected {
    pub point: Vec<f64>,
    pub lambda: f64,
    /// `‖b − A point‖₂`
    pub residual: f64,
}

fn multiplier(residual: f64, epsilon: f64, l_mu: f64) -> f64 {
    if residual <= epsilon {
        0.0
    } else {
        (l_mu * (residual / epsilon - 1.0)).max(0.0)
    }
}

/// Projection with a cached `A*b`. One application of `A` when `q` is
/// feasible, otherwise one of `A` and one of `A*`.
pub(crate) fn project_cached(
    q: &[f64],
    a: &LinearMap,
    b: &[f64],
    atb: &[f64],
    epsilon: f64,
    l_mu: f64,
    calls: &CallCounter,
) -> Result<Projected> {
    let aq = a.apply_counted(q, calls)?;
    let r: Vec<f64> = b.iter().zip(&aq).map(|(bi, ai)| bi - ai).collect();
    let res = norm2(&r);
    let lambda = multiplier(res, epsilon, l_mu);
    if lambda == 0.0 {
        return Ok(Projected {
            point: q.to_vec(),
            lambda,
            residual: res,
        });
    }
    let s = lambda / l_mu;
    let c = lambda / (lambda + l_mu);
    // A w = A q + s b because A A* = I.
    let aw: Vec<f64> = aq.iter().zip(b).map(|(ai, bi)| ai + s * bi).collect();
    let back = a.adjoint_counted(&aw, calls)?;
    let point = q
        .iter()
        .zip(atb)
        .zip(&back)
        .map(|((qi, ai), wi)| qi + s * ai - c * wi)
        .collect();
    Ok(Projected {
        point,
        lambda,
        residual: l_mu * res / (lambda + l_mu),
    })
}

/// Projects `q` onto `{y : ‖b − A y‖₂ ≤ ε}` in the metric `(L/2)‖y − q‖²`
/// for a partial isometry `A`, returning the point and the multiplier `λ`.
///
/// Uses at most three operator applications (`Aq`, `A*b`, and one `A*`).
pub fn project_feasible(
    q: &[f64],
    a: &LinearMap,
    b: &[f64],
    epsilon: f64,
    l_mu: f64,
) -> Result<(Vec<f64>, f64)> {
    check_projection_args(a, b, epsilon, l_mu)?;
    Error::check_len(a.in_dim(), q.len())?;
    let atb = a.adjoint(b)?;
    let p = project_cached(q, a, b, &atb, epsilon, l_mu, &CallCounter::new())?;
    Ok((p.point, p.lambda))
}

pub(crate) fn check_projection_args(a: &LinearMap, b: &[f64], epsilon: f64, l_mu: f64) -> Result<()> {
    Error::check_len(a.out_dim(), b.len())?;
    if !a.is_partial_isometry() {
        return Err(Error::Unsupported(
            "closed-form projection needs an operator with orthonormal rows".into(),
        ));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::invalid(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    if epsilon == 0.0 {
        return Err(Error::Unsupported(
            "epsilon = 0 is only supported in the transform domain".into(),
        ));
    }
    if !(l_mu > 0.0 && l_mu.is_finite()) {
        return Err(Error::invalid(format!("Lipschitz constant must be positive, got {l_mu}")));
    }
    Ok(())
}

/// Diagonal projection in the transform domain: only coordinates kept by
/// `mask` are constrained, against `b`. `ε = 0` pins them to `b`.
pub(crate) fn project_diagonal(
    q: &[f64],
    mask: &SamplingMask,
    b: &[f64],
    epsilon: f64,
    l_mu: f64,
) -> Projected {
    let res = mask
        .indices()
        .iter()
        .zip(b)
        .map(|(&i, bi)| (bi - q[i]) * (bi - q[i]))
        .sum::<f64>()
        .sqrt();
    let mut point = q.to_vec();
    if res <= epsilon {
        return Projected {
            point,
            lambda: 0.0,
            residual: res,
        };
    }
    if epsilon == 0.0 {
        for (&i, &bi) in mask.indices().iter().zip(b) {
            point[i] = bi;
        }
        return Projected {
            point,
            lambda: f64::INFINITY,
            residual: 0.0,
        };
    }
    let lambda = multiplier(res, epsilon, l_mu);
    let denom = lambda + l_mu;
    for (&i, &bi) in mask.indices().iter().zip(b) {
        point[i] = (l_mu * q[i] + lambda * bi) / denom;
    }
    Projected {
        point,
        lambda,
        residual: l_mu * res / denom,
    }
}
