//! Problem generators, accuracy metrics, cross-solver stopping criteria and
//! the benchmark protocol.

mod demos;
mod protocol;

pub use demos::{
    analysis_demo, gen_multitone, tv_demo, AnalysisDemoReport, AnalysisDemoSpec, FormulationReport, TvDemoReport, TvDemoSpec,
};
pub use protocol::{
    format_summary_table, run_experiment, run_trial, summarize, ExperimentReport, ExperimentSpec, SignalModel,
    SolverName, StopRule, SummaryRow, TrialRecord, CSV_HEADER, DNC_CALLS,
};

use crate::error::{Error, Result};
use crate::operators::LinearMap;
use crate::reference::{fista_solve_until, FistaVariant};
use crate::rng::Rng64;
use crate::vecops::{dist2, norm1, norm2};

/// `s`-sparse signal on uniformly drawn positions; each nonzero is a random
/// sign times `10^{α·u}` with `u` uniform on `[0, 1)` and `α = db/20`.
pub fn gen_sparse_signal(n: usize, s: usize, dynamic_range_db: f64, seed: u64) -> Result<Vec<f64>> {
    if s > n {
        return Err(Error::invalid(format!("sparsity {s} exceeds length {n}")));
    }
    let alpha = dynamic_range_db / 20.0;
    let mut rng = Rng64::new(seed);
    let mut x = vec![0.0; n];
    for i in rng.sample(n, s) {
        let sign = rng.sign();
        x[i] = sign * 10f64.powf(alpha * rng.uniform());
    }
    Ok(x)
}

/// Power-law signal: the `i`-th largest magnitude is `i^{−p}`, with random
/// signs at randomly permuted positions.
pub fn gen_compressible_signal(n: usize, decay_p: f64, seed: u64) -> Result<Vec<f64>> {
    if decay_p.is_nan() || decay_p <= 0.0 {
        return Err(Error::invalid(format!("decay must be positive, got {decay_p}")));
    }
    let mut rng = Rng64::new(seed);
    let perm = rng.permutation(n);
    let mut x = vec![0.0; n];
    for (i, &pos) in perm.iter().enumerate() {
        x[pos] = rng.sign() * ((i + 1) as f64).powf(-decay_p);
    }
    Ok(x)
}

/// Layout of the random-squares phantom.
#[derive(Clone, Debug, PartialEq)]
pub struct SquaresSpec {
    pub count: usize,
    pub min_width: usize,
    pub max_width: usize,
}

impl SquaresSpec {
    /// `side/8` squares with widths between `side/32` and `side/8`.
    pub fn for_side(side: usize) -> Self {
        SquaresSpec {
            count: side / 8,
            min_width: (side / 32).max(1),
            max_width: (side / 8).max(1),
        }
    }
}

/// Random non-overlapping squares on a zero background, amplitudes
/// log-uniform on `[1, 10^{db/20}]` with both endpoints attained.
pub fn gen_squares_image(side: usize, dynamic_range_db: f64, seed: u64) -> Result<Vec<f64>> {
    gen_squares_image_with(side, dynamic_range_db, seed, &SquaresSpec::for_side(side))
}

pub fn gen_squares_image_with(side: usize, dynamic_range_db: f64, seed: u64, spec: &SquaresSpec) -> Result<Vec<f64>> {
    if spec.min_width == 0 || spec.min_width > spec.max_width || spec.max_width > side {
        return Err(Error::invalid("square widths must satisfy 1 <= min <= max <= side"));
    }
    let alpha = dynamic_range_db / 20.0;
    let mut rng = Rng64::new(seed);
    let mut img = vec![0.0; side * side];
    // occupied, including a one-pixel margin so squares never touch
    let mut taken = vec![false; side * side];
    let mut placed = 0;
    let mut attempts = 0;
    while placed < spec.count && attempts < 1000 * spec.count.max(1) {
        attempts += 1;
        let w = spec.min_width + rng.below(spec.max_width - spec.min_width + 1);
        let r0 = rng.below(side - w + 1);
        let c0 = rng.below(side - w + 1);
        let (ra, rb) = (r0.saturating_sub(1), (r0 + w + 1).min(side));
        let (ca, cb) = (c0.saturating_sub(1), (c0 + w + 1).min(side));
        if (ra..rb).any(|r| (ca..cb).any(|c| taken[r * side + c])) {
            continue;
        }
        let u = match placed {
            0 => 0.0,
            1 => 1.0,
            _ => rng.uniform(),
        };
        let amp = 10f64.powf(alpha * u);
        for r in r0..r0 + w {
            for c in c0..c0 + w {
                img[r * side + c] = amp;
            }
        }
        for r in ra..rb {
            for c in ca..cb {
                taken[r * side + c] = true;
            }
        }
        placed += 1;
    }
    Ok(img)
}

/// `(‖x‖₁ − ‖x_ref‖₁)/‖x_ref‖₁`
pub fn rel_l1_err(x: &[f64], x_ref: &[f64]) -> f64 {
    let r = norm1(x_ref);
    (norm1(x) - r) / r
}

/// `‖x − x_ref‖∞`
pub fn linf_err(x: &[f64], x_ref: &[f64]) -> f64 {
    x.iter().zip(x_ref).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// `‖x − x_ref‖₂/‖x_ref‖₂`
pub fn rel_l2_err(x: &[f64], x_ref: &[f64]) -> f64 {
    dist2(x, x_ref) / norm2(x_ref)
}

/// At least as sparse in ℓ1 as the reference with a residual at most 5%
/// larger.
pub fn crit1_holds(l1_hat: f64, res_hat: f64, l1_ref: f64, res_ref: f64) -> bool {
    l1_hat <= l1_ref && res_hat <= 1.05 * res_ref
}

/// Composite objective `λ‖x‖₁ + ½‖Ax − b‖²` no larger than the reference's.
pub fn crit2_holds(l1_hat: f64, res_hat: f64, l1_ref: f64, res_ref: f64, lambda: f64) -> bool {
    lambda * l1_hat + 0.5 * res_hat * res_hat <= lambda * l1_ref + 0.5 * res_ref * res_ref
}

pub fn crit1_met(x_hat: &[f64], x_ref: &[f64], a: &LinearMap, b: &[f64]) -> Result<bool> {
    let rh = dist2(&a.apply(x_hat)?, b);
    let rr = dist2(&a.apply(x_ref)?, b);
    Ok(crit1_holds(norm1(x_hat), rh, norm1(x_ref), rr))
}

pub fn crit2_met(x_hat: &[f64], x_ref: &[f64], a: &LinearMap, b: &[f64], lambda: f64) -> Result<bool> {
    let rh = dist2(&a.apply(x_hat)?, b);
    let rr = dist2(&a.apply(x_ref)?, b);
    Ok(crit2_holds(norm1(x_hat), rh, norm1(x_ref), rr, lambda))
}

/// Operator calls at which a FISTA run first meets each criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CritCalls {
    pub crit1: Option<u64>,
    pub crit2: Option<u64>,
}

/// Runs plain FISTA at `lambda` and records when its iterates first meet
/// each criterion against `x_ref`, giving up after `max_calls`.
pub fn first_criteria_calls(
    a: &LinearMap,
    b: &[f64],
    lambda: f64,
    x_ref: &[f64],
    max_calls: u64,
) -> Result<CritCalls> {
    let l1_ref = norm1(x_ref);
    let res_ref = dist2(&a.apply(x_ref)?, b);
    let mut out = CritCalls { crit1: None, crit2: None };
    fista_solve_until(
        a,
        b,
        lambda,
        0.0,
        (max_calls / 2) as usize,
        FistaVariant::Standard,
        &mut |v| {
            let l1 = norm1(v.x);
            let res = dist2(v.ax, b);
            if out.crit1.is_none() && crit1_holds(l1, res, l1_ref, res_ref) {
                out.crit1 = Some(v.calls_a);
            }
            if out.crit2.is_none() && crit2_holds(l1, res, l1_ref, res_ref, lambda) {
                out.crit2 = Some(v.calls_a);
            }
            out.crit1.is_some() && out.crit2.is_some()
        },
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests;
