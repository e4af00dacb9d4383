//! Total-variation reconstruction from partial Fourier data, and the
//! analysis/synthesis comparison with a cosine frame.

use std::sync::Arc;

use serde::Serialize;

use super::{gen_squares_image_with, rel_l2_err, SquaresSpec};
use crate::error::{Error, Result};
use crate::operators::LinearMap;
use crate::reference::epsilon0;
use crate::rng::Rng64;
use crate::smoothing::Regularizer;
use crate::solver::{nesta_continuation, ContinuationConfig, ProblemInstance, SolveResult, SolverConfig, SolverPath};
use crate::vecops::{dist2, norm1, norm2};

#[derive(Clone, Debug, PartialEq)]
pub struct TvDemoSpec {
    pub side: usize,
    pub dynamic_range_db: f64,
    pub sigma: f64,
    /// Fraction of real Fourier measurements, `m = round(ratio·n)`.
    pub sampling_ratio: f64,
    /// Low-frequency preference of the sampling pattern, see
    /// [`LinearMap::partial_fourier2d_variable_density`]; `0` is uniform.
    pub density_decay: f64,
    pub seed: u64,
    pub squares: SquaresSpec,
    pub solver: SolverConfig,
    pub continuation: ContinuationConfig,
}

impl Default for TvDemoSpec {
    fn default() -> Self {
        TvDemoSpec {
            side: 128,
            dynamic_range_db: 40.0,
            sigma: 0.1,
            sampling_ratio: 0.1,
            density_decay: 2.0,
            seed: 0,
            squares: SquaresSpec::for_side(128),
            solver: SolverConfig {
                mu: 0.2,
                delta: 1e-5,
                max_iter: 4000,
                ..Default::default()
            },
            continuation: ContinuationConfig { steps: 5, mu0: None },
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TvDemoReport {
    pub side: usize,
    pub m: usize,
    pub epsilon: f64,
    pub rel_l2_err: f64,
    pub truth: Vec<f64>,
    pub result: SolveResult,
}

/// Reconstructs a random-squares phantom from noisy partial Fourier data by
/// TV minimization with continuation.
pub fn tv_demo(spec: &TvDemoSpec) -> Result<TvDemoReport> {
    let n = spec.side * spec.side;
    if !(spec.sampling_ratio > 0.0 && spec.sampling_ratio <= 1.0) {
        return Err(Error::invalid("sampling ratio must lie in (0, 1]"));
    }
    let m = ((spec.sampling_ratio * n as f64).round() as usize).max(1);
    let mut rng = Rng64::new(spec.seed);
    let image_seed = rng.next_u64();
    let op_seed = rng.next_u64();
    let noise_seed = rng.next_u64();
    let truth = gen_squares_image_with(spec.side, spec.dynamic_range_db, image_seed, &spec.squares)?;
    let a = Arc::new(LinearMap::partial_fourier2d_variable_density(
        spec.side,
        spec.side,
        m,
        spec.density_decay,
        op_seed,
    )?);
    let mut b = a.apply(&truth)?;
    let mut noise = Rng64::new(noise_seed);
    b.iter_mut().for_each(|v| *v += spec.sigma * noise.gaussian());
    let epsilon = epsilon0(m, spec.sigma);
    let problem = ProblemInstance::new(
        a,
        b,
        epsilon,
        Regularizer::Tv {
            rows: spec.side,
            cols: spec.side,
        },
    )?;
    let result = nesta_continuation(&problem, &spec.solver, &spec.continuation)?;
    Ok(TvDemoReport {
        side: spec.side,
        m,
        epsilon,
        rel_l2_err: rel_l2_err(&result.x, &truth),
        truth,
        result,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisDemoSpec {
    /// Signal length, a power of two.
    pub n: usize,
    pub m: usize,
    /// Frame redundancy, 1 (orthonormal) or 2.
    pub redundancy: usize,
    pub tones: usize,
    pub sigma: f64,
    pub seed: u64,
    pub solver: SolverConfig,
    pub continuation: ContinuationConfig,
}

impl Default for AnalysisDemoSpec {
    fn default() -> Self {
        AnalysisDemoSpec {
            n: 1024,
            m: 256,
            redundancy: 2,
            tones: 5,
            sigma: 0.01,
            seed: 0,
            solver: SolverConfig {
                mu: 0.02,
                delta: 1e-7,
                path: SolverPath::Plain,
                ..Default::default()
            },
            continuation: ContinuationConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulationReport {
    /// `‖W* x‖₁` for analysis, `‖α‖₁` for synthesis.
    pub l1: f64,
    pub residual: f64,
    pub calls_a: u64,
    pub calls_w: u64,
    pub iterations: usize,
    pub converged: bool,
    pub rel_l2_err: f64,
}

impl FormulationReport {
    pub fn w_calls_per_iteration(&self) -> f64 {
        self.calls_w as f64 / self.iterations.max(1) as f64
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisDemoReport {
    pub analysis: FormulationReport,
    pub synthesis: FormulationReport,
    /// `‖x_analysis − W α‖₂/‖x_analysis‖₂`
    pub rel_gap: f64,
    pub x_analysis: Vec<f64>,
    pub x_synthesis: Vec<f64>,
}

/// Multitone signal: a sum of cosines at random off-grid frequencies.
pub fn gen_multitone(n: usize, tones: usize, seed: u64) -> Vec<f64> {
    let mut rng = Rng64::new(seed);
    let mut x = vec![0.0; n];
    for _ in 0..tones {
        let freq = rng.uniform() * n as f64 / 4.0;
        let phase = rng.uniform() * std::f64::consts::TAU;
        let amp = 0.5 + rng.uniform();
        for (t, v) in x.iter_mut().enumerate() {
            *v += amp * (std::f64::consts::PI * freq * t as f64 / n as f64 + phase).cos();
        }
    }
    x
}

/// Solves the analysis problem `min ‖W* x‖₁` and the synthesis problem
/// `min ‖α‖₁` with `x = W α` on the same permuted-Hadamard measurements.
pub fn analysis_demo(spec: &AnalysisDemoSpec) -> Result<AnalysisDemoReport> {
    let mut rng = Rng64::new(spec.seed);
    let signal_seed = rng.next_u64();
    let op_seed = rng.next_u64();
    let noise_seed = rng.next_u64();
    let truth = gen_multitone(spec.n, spec.tones, signal_seed);
    let a = Arc::new(LinearMap::permuted_subsampled_hadamard(spec.n, spec.m, op_seed)?);
    let w = Arc::new(LinearMap::dct_frame(spec.n, spec.redundancy)?);
    let mut b = a.apply(&truth)?;
    let mut noise = Rng64::new(noise_seed);
    b.iter_mut().for_each(|v| *v += spec.sigma * noise.gaussian());
    let epsilon = epsilon0(spec.m, spec.sigma);

    let analysis_problem = ProblemInstance::new(a.clone(), b.clone(), epsilon, Regularizer::Analysis(w.clone()))?;
    let an = nesta_continuation(&analysis_problem, &spec.solver, &spec.continuation)?;

    let aw = Arc::new(LinearMap::compose(a.clone(), w.clone())?);
    let synthesis_problem = ProblemInstance::new(aw, b, epsilon, Regularizer::L1)?;
    let sy = nesta_continuation(&synthesis_problem, &spec.solver, &spec.continuation)?;
    let x_synthesis = w.apply(&sy.x)?;

    let analysis = FormulationReport {
        l1: an.objective,
        residual: an.residual,
        calls_a: an.calls_a,
        calls_w: an.calls_w,
        iterations: an.iterations,
        converged: an.converged,
        rel_l2_err: rel_l2_err(&an.x, &truth),
    };
    // every application of A·W or its adjoint applies W once
    let synthesis = FormulationReport {
        l1: norm1(&sy.x),
        residual: sy.residual,
        calls_a: sy.calls_a,
        calls_w: sy.calls_a,
        iterations: sy.iterations,
        converged: sy.converged,
        rel_l2_err: rel_l2_err(&x_synthesis, &truth),
    };
    Ok(AnalysisDemoReport {
        rel_gap: dist2(&an.x, &x_synthesis) / norm2(&an.x),
        analysis,
        synthesis,
        x_analysis: an.x,
        x_synthesis,
    })
}
