//! Config files to solver inputs.

use std::path::PathBuf;

use nesta_core::config::{Config, ConfigError, Section};
use nesta_core::experiment::{AnalysisDemoSpec, ExperimentSpec, SquaresSpec, TvDemoSpec};
use nesta_core::operators::OperatorSpec;
use nesta_core::rng::Rng64;
use nesta_core::{ContinuationConfig, SolverConfig};

type Result<T> = std::result::Result<T, ConfigError>;

const SOLVER_KEYS: &[&str] = &["mu", "delta", "max_iter", "path", "continuation", "steps", "mu0", "x0"];

/// `[solver]` with the given defaults. Continuation is on unless
/// `continuation = false`.
pub fn solver_section(
    sec: &Section,
    base: &SolverConfig,
    base_ct: &ContinuationConfig,
) -> Result<(SolverConfig, Option<ContinuationConfig>)> {
    sec.ensure_only(SOLVER_KEYS)?;
    let cfg = SolverConfig {
        mu: sec.get_or("mu", base.mu)?,
        delta: sec.get_or("delta", base.delta)?,
        max_iter: sec.get_or("max_iter", base.max_iter)?,
        path: sec.get_or("path", base.path)?,
        x0: None,
    };
    let ct = sec.get_bool("continuation", true)?.then_some(()).map(|_| -> Result<_> {
        Ok(ContinuationConfig {
            steps: sec.get_or("steps", base_ct.steps)?,
            mu0: if sec.contains("mu0") { sec.get_auto("mu0")? } else { base_ct.mu0 },
        })
    });
    Ok((cfg, ct.transpose()?))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Regularization {
    L1,
    Tv,
    Analysis { redundancy: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    /// Measurements read from a binary vector file.
    File(PathBuf),
    Generated(SignalSettings),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SignalSettings {
    pub model: String,
    pub s: usize,
    pub dynamic_range_db: f64,
    pub sigma: f64,
    pub decay: f64,
    pub tones: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveSettings {
    pub operator: OperatorSpec,
    pub regularizer: Regularization,
    pub epsilon: f64,
    pub data: DataSource,
    pub solver: SolverConfig,
    pub continuation: Option<ContinuationConfig>,
    pub x0: Option<PathBuf>,
}

/// ```text
/// [operator]
/// kind = dct
/// n = 4096
/// m = 512
/// seed = 1
///
/// [problem]
/// regularizer = l1          # l1 | tv | analysis
/// epsilon = 0.25
/// data = b.bin              # optional; otherwise [signal] is generated
///
/// [signal]
/// model = sparse            # sparse | compressible | squares | multitone
/// s = 100
/// dynamic_range_db = 20
/// sigma = 0.01
/// seed = 2
///
/// [solver]
/// mu = 0.02
/// delta = 1e-7
/// ```
pub fn solve_settings(cfg: &Config, seed: Option<u64>) -> Result<SolveSettings> {
    cfg.ensure_sections(&["", "operator", "problem", "signal", "solver"])?;
    let mut operator = OperatorSpec::from_section(cfg.require("operator")?)?;
    cfg.require("operator")?
        .ensure_only(&["kind", "n", "m", "rows", "cols", "seed", "density_decay"])?;

    let pr = cfg.require("problem")?;
    pr.ensure_only(&["regularizer", "epsilon", "data", "redundancy"])?;
    let regularizer = match pr.raw("regularizer").unwrap_or("l1") {
        "l1" => Regularization::L1,
        "tv" => Regularization::Tv,
        "analysis" => Regularization::Analysis {
            redundancy: pr.get_or("redundancy", 2)?,
        },
        other => {
            return Err(ConfigError::InvalidValue {
                key: pr.qualified("regularizer"),
                value: other.to_string(),
                reason: "expected l1, tv or analysis".into(),
            })
        }
    };
    let epsilon: f64 = pr.get("epsilon")?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(ConfigError::InvalidValue {
            key: pr.qualified("epsilon"),
            value: epsilon.to_string(),
            reason: "must be finite and >= 0".into(),
        });
    }

    let data = match pr.raw("data") {
        Some(path) => DataSource::File(PathBuf::from(path)),
        None => {
            let sg = cfg.section_or_empty("signal");
            sg.ensure_only(&["model", "s", "dynamic_range_db", "sigma", "decay", "tones", "seed"])?;
            let default_model = match regularizer {
                Regularization::L1 => "sparse",
                Regularization::Tv => "squares",
                Regularization::Analysis { .. } => "multitone",
            };
            let model = sg.raw("model").unwrap_or(default_model).to_string();
            if !["sparse", "compressible", "squares", "multitone"].contains(&model.as_str()) {
                return Err(ConfigError::InvalidValue {
                    key: sg.qualified("model"),
                    value: model,
                    reason: "expected sparse, compressible, squares or multitone".into(),
                });
            }
            DataSource::Generated(SignalSettings {
                s: if model == "sparse" { sg.get("s")? } else { sg.get_or("s", 0)? },
                model,
                dynamic_range_db: sg.get_or("dynamic_range_db", 20.0)?,
                sigma: sg.get_or("sigma", 0.0)?,
                decay: sg.get_or("decay", 1.0)?,
                tones: sg.get_or("tones", 5)?,
                seed: sg.get_or("seed", 0)?,
            })
        }
    };

    let sv = cfg.section_or_empty("solver");
    let (solver, continuation) = solver_section(&sv, &SolverConfig::default(), &ContinuationConfig::default())?;
    let x0 = sv.raw("x0").map(PathBuf::from);

    let mut out = SolveSettings {
        operator: operator.clone(),
        regularizer,
        epsilon,
        data,
        solver,
        continuation,
        x0,
    };
    if let Some(seed) = seed {
        operator.seed = Rng64::stream(seed, 0).next_u64();
        out.operator = operator;
        if let DataSource::Generated(sig) = &mut out.data {
            sig.seed = Rng64::stream(seed, 1).next_u64();
        }
    }
    Ok(out)
}

/// `[tv]` keys override [`TvDemoSpec::default`]; `[solver]` as for solve.
pub fn tv_settings(cfg: Option<&Config>, seed: Option<u64>) -> Result<TvDemoSpec> {
    let mut spec = TvDemoSpec::default();
    if let Some(cfg) = cfg {
        cfg.ensure_sections(&["", "tv", "solver"])?;
        let tv = cfg.section_or_empty("tv");
        tv.ensure_only(&[
            "side",
            "dynamic_range_db",
            "sigma",
            "sampling_ratio",
            "density_decay",
            "seed",
            "squares",
            "min_width",
            "max_width",
        ])?;
        spec.side = tv.get_or("side", spec.side)?;
        let defaults = SquaresSpec::for_side(spec.side);
        spec.squares = SquaresSpec {
            count: tv.get_or("squares", defaults.count)?,
            min_width: tv.get_or("min_width", defaults.min_width)?,
            max_width: tv.get_or("max_width", defaults.max_width)?,
        };
        spec.dynamic_range_db = tv.get_or("dynamic_range_db", spec.dynamic_range_db)?;
        spec.sigma = tv.get_or("sigma", spec.sigma)?;
        spec.sampling_ratio = tv.get_or("sampling_ratio", spec.sampling_ratio)?;
        spec.density_decay = tv.get_or("density_decay", spec.density_decay)?;
        spec.seed = tv.get_or("seed", spec.seed)?;
        let (solver, ct) = solver_section(&cfg.section_or_empty("solver"), &spec.solver, &spec.continuation)?;
        spec.solver = solver;
        spec.continuation = ct.unwrap_or(ContinuationConfig { steps: 1, mu0: None });
    }
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    Ok(spec)
}

/// `[analysis]` keys override [`AnalysisDemoSpec::default`].
pub fn analysis_settings(cfg: Option<&Config>, seed: Option<u64>) -> Result<AnalysisDemoSpec> {
    let mut spec = AnalysisDemoSpec::default();
    if let Some(cfg) = cfg {
        cfg.ensure_sections(&["", "analysis", "solver"])?;
        let an = cfg.section_or_empty("analysis");
        an.ensure_only(&["n", "m", "redundancy", "tones", "sigma", "seed"])?;
        spec.n = an.get_or("n", spec.n)?;
        spec.m = an.get_or("m", spec.m)?;
        spec.redundancy = an.get_or("redundancy", spec.redundancy)?;
        spec.tones = an.get_or("tones", spec.tones)?;
        spec.sigma = an.get_or("sigma", spec.sigma)?;
        spec.seed = an.get_or("seed", spec.seed)?;
        let (solver, ct) = solver_section(&cfg.section_or_empty("solver"), &spec.solver, &spec.continuation)?;
        spec.solver = solver;
        spec.continuation = ct.unwrap_or(ContinuationConfig { steps: 1, mu0: None });
    }
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    Ok(spec)
}

pub fn experiment_settings(cfg: &Config, seed: Option<u64>) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::from_config(cfg)?;
    if let Some(seed) = seed {
        spec.seed = seed;
    }
    Ok(spec)
}
