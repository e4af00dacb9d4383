//! Property suite shared by the `selftest` subcommand and the acceptance
//! tests. Each check reports a measured value against a tolerance.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::Result;
use crate::experiment::{first_criteria_calls, gen_sparse_signal};
use crate::operators::{LinearMap, OrthoBasis, SamplingMask};
use crate::reference::{epsilon0, lambda_epsilon_handshake, HandshakeConfig};
use crate::rng::Rng64;
use crate::smoothing::{Regularizer, SmoothedObjective};
use crate::solver::{
    nesta_continuation, solve_with, ContinuationConfig, ProblemInstance, SolverConfig, SolverPath,
};
use crate::vecops::{dist2, dot, norm2};

pub const ADJOINT_TOL: f64 = 1e-10;
pub const ISOMETRY_TOL: f64 = 1e-10;
pub const GRADIENT_TOL: f64 = 1e-6;
pub const FEASIBILITY_TOL: f64 = 1e-8;
pub const DENSE_ORACLE_TOL: f64 = 1e-12;
pub const CRIT_AGREEMENT_TOL: f64 = 0.10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "ok  " } else { "FAIL" };
        write!(f, "{tag} {:<44} {:.3e} (tol {:.1e})", self.name, self.value, self.tolerance)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.failures().count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Runs every check.
pub fn run_suite(seed: u64) -> Result<SelftestReport> {
    let mut checks = Vec::new();
    checks.extend(adjoint_checks(seed)?);
    checks.extend(isometry_checks(seed)?);
    checks.extend(gradient_checks(seed)?);
    checks.push(projection_feasibility_check(seed)?);
    checks.extend(dense_oracle_checks(seed)?);
    checks.push(crit_agreement_check(seed)?);
    checks.push(convergence_bound_check(&BoundInstance::small(seed))?);
    Ok(SelftestReport { checks })
}

fn sample_operators(seed: u64) -> Result<Vec<(&'static str, LinearMap)>> {
    let mut rng = Rng64::new(seed);
    let dense_data = rng.gaussian_vec(12 * 20, 1.0);
    let dict_data = rng.gaussian_vec(16 * 40, 0.25);
    Ok(vec![
        ("subsampled dct", LinearMap::subsampled_dct(256, 40, seed)?),
        ("permuted hadamard", LinearMap::permuted_subsampled_hadamard(256, 40, seed)?),
        ("partial fourier 2d", LinearMap::partial_fourier2d(16, 12, 50, seed)?),
        ("dense", LinearMap::dense(12, 20, dense_data)?),
        ("dictionary", LinearMap::dictionary(16, 40, dict_data)?),
        ("dct frame", LinearMap::dct_frame(64, 2)?),
        ("finite difference", LinearMap::finite_difference_2d(9, 7)?),
    ])
}

/// Worst relative mismatch of `⟨A x, y⟩ = ⟨x, A* y⟩` over random pairs.
pub fn adjoint_identity_error(op: &LinearMap, pairs: usize, seed: u64) -> Result<f64> {
    let mut rng = Rng64::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let x = rng.gaussian_vec(op.in_dim(), 1.0);
        let y = rng.gaussian_vec(op.out_dim(), 1.0);
        let lhs = dot(&op.apply(&x)?, &y);
        let rhs = dot(&x, &op.adjoint(&y)?);
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300));
    }
    Ok(worst)
}

/// Worst `‖A A* y − y‖/‖y‖` over random `y`.
pub fn isometry_error(op: &LinearMap, trials: usize, seed: u64) -> Result<f64> {
    let mut rng = Rng64::new(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let y = rng.gaussian_vec(op.out_dim(), 1.0);
        let back = op.apply(&op.adjoint(&y)?)?;
        worst = worst.max(dist2(&back, &y) / norm2(&y));
    }
    Ok(worst)
}

pub fn adjoint_checks(seed: u64) -> Result<Vec<Check>> {
    sample_operators(seed)?
        .into_iter()
        .map(|(name, op)| {
            let e = adjoint_identity_error(&op, 20, seed ^ 0xA5)?;
            Ok(Check::at_most(format!("adjoint identity: {name}"), e, ADJOINT_TOL))
        })
        .collect()
}

pub fn isometry_checks(seed: u64) -> Result<Vec<Check>> {
    sample_operators(seed)?
        .into_iter()
        .filter(|(_, op)| op.is_partial_isometry())
        .map(|(name, op)| {
            let e = isometry_error(&op, 20, seed ^ 0x5A)?;
            Ok(Check::at_most(format!("partial isometry: {name}"), e, ISOMETRY_TOL))
        })
        .collect()
}

/// Worst absolute gap between `grad` and central differences of `f`.
pub fn finite_difference_error(f: impl Fn(&[f64]) -> Result<f64>, x: &[f64], grad: &[f64]) -> Result<f64> {
    let h = 1e-6;
    let mut xp = x.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let fp = f(&xp)?;
        xp[i] = x[i] - h;
        let fm = f(&xp)?;
        xp[i] = x[i];
        worst = worst.max(((fp - fm) / (2.0 * h) - grad[i]).abs());
    }
    Ok(worst)
}

pub fn gradient_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = Rng64::new(seed ^ 0x6AD);
    let dict = rng.gaussian_vec(24 * 48, 1.0 / 24f64.sqrt());
    let cases = [
        ("huber gradient", Regularizer::L1, 32, 0.1),
        (
            "analysis gradient",
            Regularizer::Analysis(Arc::new(LinearMap::dictionary(24, 48, dict)?)),
            24,
            0.05,
        ),
        ("tv gradient", Regularizer::Tv { rows: 6, cols: 7 }, 42, 0.2),
    ];
    cases
        .into_iter()
        .map(|(name, reg, n, mu)| {
            let obj = SmoothedObjective::new(reg, mu)?;
            let x = rng.gaussian_vec(n, 1.0);
            let (_, g) = obj.value_grad(&x)?;
            let e = finite_difference_error(|v| obj.value(v), &x, &g)?;
            Ok(Check::at_most(name, e, GRADIENT_TOL))
        })
        .collect()
}

/// Largest `‖b − A v‖/ε − 1` over the `y` and `z` iterates of a logged
/// continuation solve.
pub fn projection_feasibility_check(seed: u64) -> Result<Check> {
    let (n, m) = (512, 96);
    let a = Arc::new(LinearMap::subsampled_dct(n, m, seed)?);
    let x = gen_sparse_signal(n, 12, 60.0, seed ^ 1)?;
    let mut b = a.apply(&x)?;
    let noise = Rng64::new(seed ^ 2).gaussian_vec(m, 0.05);
    b.iter_mut().zip(&noise).for_each(|(v, e)| *v += e);
    let eps = epsilon0(m, 0.05);
    let problem = ProblemInstance::new(a.clone(), b.clone(), eps, Regularizer::L1)?;
    let cfg = SolverConfig {
        path: SolverPath::Plain,
        ..Default::default()
    };
    let mut worst = f64::NEG_INFINITY;
    let mut failure = None;
    solve_with(&problem, &cfg, Some(&ContinuationConfig::default()), &mut |v| {
        for p in std::iter::once(v.y).chain(v.z) {
            match a.apply(p) {
                Ok(ap) => worst = worst.max(dist2(&ap, &b) / eps - 1.0),
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Check::at_most("projection feasibility (every iterate)", worst, FEASIBILITY_TOL))
}

fn dense_dct2(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|k| {
            let s = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            (0..n)
                .map(|j| s * (std::f64::consts::PI * k as f64 * (2 * j + 1) as f64 / (2 * n) as f64).cos())
                .collect()
        })
        .collect()
}

fn dense_hadamard(n: usize) -> Vec<Vec<f64>> {
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|i| (0..n).map(|j| if (i & j).count_ones() % 2 == 0 { s } else { -s }).collect())
        .collect()
}

fn dense_dct4(n: usize) -> Vec<Vec<f64>> {
    let s = (2.0 / n as f64).sqrt();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| s * (std::f64::consts::PI * (2 * k + 1) as f64 * (2 * j + 1) as f64 / (4 * n) as f64).cos())
                .collect()
        })
        .collect()
}

/// Worst entrywise gap between `x ↦ U x` and a dense matrix.
fn dense_gap(apply: impl Fn(&[f64]) -> Vec<f64>, dense: &[Vec<f64>]) -> f64 {
    let n = dense.len();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = apply(&e);
        for (i, row) in dense.iter().enumerate() {
            worst = worst.max((col[i] - row[j]).abs());
        }
    }
    worst
}

pub fn dense_oracle_checks(seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in [4usize, 8, 16] {
        let dct = LinearMap::subsampled(
            OrthoBasis::Dct(crate::operators::DctBasis::new(n)),
            SamplingMask::full(n),
        )?;
        let gap = dense_gap(|x| dct.apply(x).expect("length n"), &dense_dct2(n));
        checks.push(Check::at_most(format!("dense oracle: dct-ii n={n}"), gap, DENSE_ORACLE_TOL));

        let had = LinearMap::hadamard_with((0..n).collect(), n, seed)?;
        let gap = dense_gap(|x| had.apply(x).expect("length n"), &dense_hadamard(n));
        checks.push(Check::at_most(format!("dense oracle: hadamard n={n}"), gap, DENSE_ORACLE_TOL));

        let dct4 = crate::operators::Dct4Basis::new(n);
        let gap = dense_gap(
            |x| {
                let mut out = vec![0.0; n];
                dct4.apply(x, &mut out);
                out
            },
            &dense_dct4(n),
        );
        checks.push(Check::at_most(format!("dense oracle: dct-iv n={n}"), gap, DENSE_ORACLE_TOL));
    }
    Ok(checks)
}

/// Relative gap between the calls at which plain FISTA first meets each
/// cross-solver criterion against a continuation reference, on a matched
/// `(λ, ε1)` instance.
pub fn crit_agreement(n: usize, m: usize, s: usize, db: f64, sigma: f64, seed: u64) -> Result<(u64, u64, f64)> {
    let a = Arc::new(LinearMap::subsampled_dct(n, m, seed)?);
    let x = gen_sparse_signal(n, s, db, seed ^ 3)?;
    let mut b = a.apply(&x)?;
    let noise = Rng64::new(seed ^ 4).gaussian_vec(m, sigma);
    b.iter_mut().zip(&noise).for_each(|(v, e)| *v += e);
    let hs = lambda_epsilon_handshake(&a, &b, sigma, &HandshakeConfig::default())?;
    let problem = ProblemInstance::new(a.clone(), b.clone(), hs.epsilon1, Regularizer::L1)?;
    let x_n = nesta_continuation(&problem, &SolverConfig::default(), &ContinuationConfig::default())?.x;
    let calls = first_criteria_calls(&a, &b, hs.lambda, &x_n, crate::experiment::DNC_CALLS)?;
    let c1 = calls.crit1.unwrap_or(u64::MAX);
    let c2 = calls.crit2.unwrap_or(u64::MAX);
    let gap = if c1 == u64::MAX || c2 == u64::MAX {
        f64::INFINITY
    } else {
        c1.abs_diff(c2) as f64 / c1.max(c2) as f64
    };
    Ok((c1, c2, gap))
}

pub fn crit_agreement_check(seed: u64) -> Result<Check> {
    let (_, _, gap) = crit_agreement(1024, 256, 51, 20.0, 0.1, seed)?;
    Ok(Check::at_most("crit1/crit2 agreement (relative calls)", gap, CRIT_AGREEMENT_TOL))
}

/// Instance for the accelerated-rate bound at a fixed smoothing level.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundInstance {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub mu: f64,
    /// Iterations of the run that supplies `x*`.
    pub reference_iters: usize,
    /// Iterations checked against the bound.
    pub checked_iters: usize,
    pub seed: u64,
}

impl BoundInstance {
    pub fn small(seed: u64) -> Self {
        BoundInstance {
            n: 128,
            m: 48,
            s: 6,
            mu: 0.02,
            reference_iters: 5000,
            checked_iters: 1000,
            seed,
        }
    }
}

/// Outcome of [`convergence_bound`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub checked: usize,
    pub violations: usize,
    /// Largest `(f_μ(y_k) − f_μ(x*)) / bound_k`.
    pub worst_ratio: f64,
    pub f_star: f64,
}

/// Checks `f_μ(y_k) − f_μ(x*) ≤ 4 L_μ ½‖x* − x_c‖² / (k+1)²` at every
/// iteration of a fixed-μ run, with `x*` from a much longer run of the same
/// solver and `x_c = A* b` the prox center.
pub fn convergence_bound(inst: &BoundInstance) -> Result<BoundReport> {
    let a = Arc::new(LinearMap::subsampled_dct(inst.n, inst.m, inst.seed)?);
    let x = gen_sparse_signal(inst.n, inst.s, 40.0, inst.seed ^ 5)?;
    let sigma = 0.01;
    let mut b = a.apply(&x)?;
    let noise = Rng64::new(inst.seed ^ 6).gaussian_vec(inst.m, sigma);
    b.iter_mut().zip(&noise).for_each(|(v, e)| *v += e);
    let problem = ProblemInstance::new(a, b, epsilon0(inst.m, sigma), Regularizer::L1)?;
    let cfg = |max_iter| SolverConfig {
        mu: inst.mu,
        delta: f64::MIN_POSITIVE,
        max_iter,
        path: SolverPath::Plain,
        ..Default::default()
    };
    let obj = SmoothedObjective::new(Regularizer::L1, inst.mu)?;

    let star = solve_with(&problem, &cfg(inst.reference_iters), None, &mut |_| {})?;
    let f_star = obj.value(&star.x)?;

    let mut ys: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut center = Vec::new();
    solve_with(&problem, &cfg(inst.checked_iters), None, &mut |v| {
        if center.is_empty() {
            center = v.center.to_vec();
        }
        ys.push((v.k, v.y.to_vec()));
    })?;
    let pp = 0.5 * dist2(&star.x, &center).powi(2);
    let l = obj.lipschitz();
    let mut violations = 0;
    let mut worst_ratio = f64::NEG_INFINITY;
    for (k, y) in &ys {
        let bound = 4.0 * l * pp / ((k + 1) as f64).powi(2);
        let gap = obj.value(y)? - f_star;
        if gap > bound {
            violations += 1;
        }
        worst_ratio = worst_ratio.max(gap / bound);
    }
    Ok(BoundReport {
        checked: ys.len(),
        violations,
        worst_ratio,
        f_star,
    })
}

pub fn convergence_bound_check(inst: &BoundInstance) -> Result<Check> {
    let r = convergence_bound(inst)?;
    Ok(Check::at_most(
        format!("convergence bound violations (n={})", inst.n),
        r.violations as f64,
        0.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_display_and_report() {
        let r = SelftestReport {
            checks: vec![Check::at_most("a", 1e-12, 1e-10), Check::at_most("b", 1.0, 0.5)],
        };
        assert!(!r.all_passed());
        assert_eq!(r.failures().count(), 1);
        let text = r.to_string();
        assert!(text.lines().next().unwrap().starts_with("ok"));
        assert!(text.ends_with("2 checks, 1 failed"));
    }

    #[test]
    fn operator_checks_pass() {
        for c in adjoint_checks(7).unwrap().iter().chain(&isometry_checks(7).unwrap()) {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn gradient_and_oracle_checks_pass() {
        for c in gradient_checks(3).unwrap().iter().chain(&dense_oracle_checks(3).unwrap()) {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn broken_gradient_is_caught() {
        let x = [0.3, -1.2, 2.0];
        let g = [1.0, 1.0, 1.0];
        let e = finite_difference_error(|v| Ok(v.iter().map(|t| t * t).sum()), &x, &g).unwrap();
        assert!(e > 1.0);
    }

    #[test]
    fn feasibility_and_bound_hold() {
        let c = projection_feasibility_check(1).unwrap();
        assert!(c.passed, "{c}");
        let r = convergence_bound(&BoundInstance::small(2)).unwrap();
        assert_eq!(r.violations, 0, "{r:?}");
        assert_eq!(r.checked, 1000);
    }
}
