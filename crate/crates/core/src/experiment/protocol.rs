//! Multi-trial benchmark: matched `λ`/`ε` instances, a roster of solvers
//! stopped by a common criterion, and `mean (min–max)` summaries.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{crit1_holds, crit2_holds, gen_compressible_signal, gen_sparse_signal, linf_err, rel_l1_err};
use crate::config::{Config, ConfigError, Section};
use crate::error::{Error, Result};
use crate::operators::{parse_kind, LinearMap, OperatorKind};
use crate::reference::{fista_solve_until, lambda_epsilon_handshake, FistaVariant, HandshakeConfig};
use crate::rng::Rng64;
use crate::smoothing::Regularizer;
use crate::solver::{nesta_continuation, nesta_solve, ContinuationConfig, ProblemInstance, SolverConfig};
use crate::vecops::{dist2, norm1};

/// Operator-call budget beyond which a run is declared DNC.
pub const DNC_CALLS: u64 = 20_000;

pub const CSV_HEADER: &str = "trial,solver,calls_A,rel_l1_err,linf_err,converged,wall_time";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SolverName {
    #[serde(rename = "NESTA")]
    Nesta,
    #[serde(rename = "NESTA+Ct")]
    NestaCt,
    #[serde(rename = "FISTA")]
    Fista,
}

impl fmt::Display for SolverName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverName::Nesta => "NESTA",
            SolverName::NestaCt => "NESTA+Ct",
            SolverName::Fista => "FISTA",
        })
    }
}

impl FromStr for SolverName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nesta" => Ok(SolverName::Nesta),
            "nesta+ct" | "nesta-ct" => Ok(SolverName::NestaCt),
            "fista" => Ok(SolverName::Fista),
            other => Err(format!("unknown solver {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StopRule {
    Crit1,
    Crit2,
}

impl FromStr for StopRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "crit1" | "1" => Ok(StopRule::Crit1),
            "crit2" | "2" => Ok(StopRule::Crit2),
            other => Err(format!("unknown stop rule {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignalModel {
    /// `s` nonzeros with the configured dynamic range.
    Sparse,
    /// Power-law magnitudes `i^{−decay}` scaled by `10^{db/20}`.
    Compressible { decay: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub dynamic_ranges_db: Vec<f64>,
    pub sigma: f64,
    pub operator: OperatorKind,
    pub seed: u64,
    pub trials: usize,
    pub roster: Vec<SolverName>,
    pub stop_rule: StopRule,
    pub signal: SignalModel,
    pub nesta: SolverConfig,
    pub continuation: ContinuationConfig,
    pub handshake: HandshakeConfig,
    pub max_calls: u64,
}

const EXPERIMENT_KEYS: &[&str] = &[
    "preset",
    "n",
    "m",
    "s",
    "dynamic_range_db",
    "sigma",
    "operator",
    "seed",
    "trials",
    "roster",
    "stop_rule",
    "signal",
    "decay",
    "max_calls",
];
const NESTA_KEYS: &[&str] = &["mu", "delta", "max_iter", "steps", "mu0"];
const REFERENCE_KEYS: &[&str] = &["tol", "max_iter"];

impl ExperimentSpec {
    /// Reads `[experiment]`, optional `[nesta]` and `[reference]` sections.
    ///
    /// ```text
    /// [experiment]
    /// preset = dense-support        # s = m/5; sparse-support gives s = m/100
    /// n = 4096
    /// m = 512
    /// dynamic_range_db = 20, 40, 60, 80, 100
    /// sigma = 0.1
    /// operator = dct
    /// seed = 1
    /// trials = 10
    /// roster = NESTA, NESTA+Ct, FISTA
    /// stop_rule = crit1
    /// ```
    pub fn from_config(cfg: &Config) -> std::result::Result<Self, ConfigError> {
        cfg.ensure_sections(&["", "experiment", "nesta", "reference"])?;
        let ex = cfg.require("experiment")?;
        ex.ensure_only(EXPERIMENT_KEYS)?;
        let n: usize = ex.get("n")?;
        let m: usize = ex.get("m")?;
        let s = match (ex.get_opt::<usize>("s")?, ex.raw("preset")) {
            (Some(s), _) => s,
            (None, Some("dense-support")) => m / 5,
            (None, Some("sparse-support")) => (m / 100).max(1),
            (None, Some(other)) => {
                return Err(ConfigError::InvalidValue {
                    key: ex.qualified("preset"),
                    value: other.to_string(),
                    reason: "expected dense-support or sparse-support".into(),
                })
            }
            (None, None) => return Err(ConfigError::MissingKey("s".into())),
        };
        let op_name = ex.raw("operator").unwrap_or("dct");
        let operator = parse_kind(op_name)
            .filter(|k| matches!(k, OperatorKind::SubsampledDct | OperatorKind::PermutedSubsampledHadamard))
            .ok_or_else(|| ConfigError::InvalidValue {
                key: ex.qualified("operator"),
                value: op_name.to_string(),
                reason: "expected dct or hadamard".into(),
            })?;
        let signal = match ex.raw("signal").unwrap_or("sparse") {
            "sparse" => SignalModel::Sparse,
            "compressible" => SignalModel::Compressible {
                decay: ex.get_or("decay", 1.0)?,
            },
            other => {
                return Err(ConfigError::InvalidValue {
                    key: ex.qualified("signal"),
                    value: other.to_string(),
                    reason: "expected sparse or compressible".into(),
                })
            }
        };

        let ne = cfg.section_or_empty("nesta");
        ne.ensure_only(NESTA_KEYS)?;
        let nesta = SolverConfig {
            mu: ne.get_or("mu", 0.02)?,
            delta: ne.get_or("delta", 1e-7)?,
            max_iter: ne.get_or("max_iter", 10_000)?,
            ..Default::default()
        };
        let continuation = ContinuationConfig {
            steps: ne.get_or("steps", 4)?,
            mu0: ne.get_opt("mu0")?,
        };
        let re = cfg.section_or_empty("reference");
        re.ensure_only(REFERENCE_KEYS)?;
        let mut handshake = HandshakeConfig::default();
        handshake.fista_tol = re.get_or("tol", handshake.fista_tol)?;
        handshake.fista_max_iter = re.get_or("max_iter", handshake.fista_max_iter)?;
        handshake.nesta.mu = nesta.mu;

        let spec = ExperimentSpec {
            n,
            m,
            s,
            dynamic_ranges_db: ex.get_list("dynamic_range_db")?,
            sigma: ex.get("sigma")?,
            operator,
            seed: ex.get_or("seed", 0)?,
            trials: ex.get_or("trials", 10)?,
            roster: ex.get_list("roster")?,
            stop_rule: ex.get_or("stop_rule", StopRule::Crit1)?,
            signal,
            nesta,
            continuation,
            handshake,
            max_calls: ex.get_or("max_calls", DNC_CALLS)?,
        };
        spec.check(ex)?;
        Ok(spec)
    }

    fn check(&self, ex: &Section) -> std::result::Result<(), ConfigError> {
        let bad = |key: &str, value: String, reason: &str| ConfigError::InvalidValue {
            key: ex.qualified(key),
            value,
            reason: reason.into(),
        };
        if self.roster.is_empty() {
            return Err(bad("roster", String::new(), "roster is empty"));
        }
        if !(self.s <= self.m && self.m <= self.n && self.m > 0) {
            return Err(bad("m", self.m.to_string(), "need s <= m <= n"));
        }
        if self.trials == 0 {
            return Err(bad("trials", "0".into(), "need at least one trial"));
        }
        if self.dynamic_ranges_db.is_empty() {
            return Err(bad("dynamic_range_db", String::new(), "no dynamic range given"));
        }
        if self.sigma.is_nan() || self.sigma <= 0.0 {
            return Err(bad("sigma", self.sigma.to_string(), "noise level must be positive"));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.roster.is_empty() {
            return Err(Error::invalid("roster is empty"));
        }
        if !(self.s <= self.m && self.m <= self.n && self.m > 0 && self.trials > 0 && self.sigma > 0.0) {
            return Err(Error::invalid("need s <= m <= n, trials >= 1 and sigma > 0"));
        }
        Ok(())
    }
}

/// One solver on one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub dynamic_range_db: f64,
    pub solver: SolverName,
    pub calls_a: u64,
    pub rel_l1_err: f64,
    pub linf_err: f64,
    pub converged: bool,
    pub wall_time: f64,
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{},{:.6}",
            self.trial, self.solver, self.calls_a, self.rel_l1_err, self.linf_err, self.converged, self.wall_time
        )
    }

    /// Equal in everything except timing.
    pub fn same_outcome(&self, other: &TrialRecord) -> bool {
        TrialRecord {
            wall_time: 0.0,
            ..self.clone()
        } == TrialRecord {
            wall_time: 0.0,
            ..other.clone()
        }
    }
}

struct Instance {
    a: Arc<LinearMap>,
    b: Vec<f64>,
}

fn build_instance(spec: &ExperimentSpec, db: f64, trial: usize) -> Result<Instance> {
    let mut rng = Rng64::stream(spec.seed, trial as u64);
    let op_seed = rng.next_u64();
    let signal_seed = rng.next_u64();
    let noise_seed = rng.next_u64();
    let a = Arc::new(match spec.operator {
        OperatorKind::PermutedSubsampledHadamard => LinearMap::permuted_subsampled_hadamard(spec.n, spec.m, op_seed)?,
        _ => LinearMap::subsampled_dct(spec.n, spec.m, op_seed)?,
    });
    let x = match spec.signal {
        SignalModel::Sparse => gen_sparse_signal(spec.n, spec.s, db, signal_seed)?,
        SignalModel::Compressible { decay } => {
            let scale = 10f64.powf(db / 20.0);
            let mut x = gen_compressible_signal(spec.n, decay, signal_seed)?;
            x.iter_mut().for_each(|v| *v *= scale);
            x
        }
    };
    let mut b = a.apply(&x)?;
    let mut noise = Rng64::new(noise_seed);
    for v in b.iter_mut() {
        *v += spec.sigma * noise.gaussian();
    }
    Ok(Instance { a, b })
}

/// Runs every roster solver on trial `trial` at dynamic range `db`.
pub fn run_trial(spec: &ExperimentSpec, db: f64, trial: usize) -> Vec<TrialRecord> {
    match run_trial_inner(spec, db, trial) {
        Ok(records) => records,
        Err(e) => spec
            .roster
            .iter()
            .map(|&solver| failed_record(trial, db, solver, &e))
            .collect(),
    }
}

fn failed_record(trial: usize, db: f64, solver: SolverName, e: &Error) -> TrialRecord {
    TrialRecord {
        trial,
        dynamic_range_db: db,
        solver,
        calls_a: 0,
        rel_l1_err: f64::NAN,
        linf_err: f64::NAN,
        converged: false,
        wall_time: 0.0,
        error: Some(e.to_string()),
    }
}

fn run_trial_inner(spec: &ExperimentSpec, db: f64, trial: usize) -> Result<Vec<TrialRecord>> {
    let inst = build_instance(spec, db, trial)?;
    let hs = lambda_epsilon_handshake(&inst.a, &inst.b, spec.sigma, &spec.handshake)?;
    let x_ref = &hs.fista.x;
    let problem = ProblemInstance::new(inst.a.clone(), inst.b.clone(), hs.epsilon1, Regularizer::L1)?;

    let started = Instant::now();
    let ct = nesta_continuation(&problem, &spec.nesta, &spec.continuation)?;
    let ct_time = started.elapsed().as_secs_f64();
    let x_n = &ct.x;
    let l1_n = norm1(x_n);
    let res_n = ct.residual;

    let record = |solver, calls_a: u64, x: &[f64], converged: bool, wall_time| TrialRecord {
        trial,
        dynamic_range_db: db,
        solver,
        calls_a,
        rel_l1_err: rel_l1_err(x, x_ref),
        linf_err: linf_err(x, x_ref),
        converged: converged && calls_a <= spec.max_calls,
        wall_time,
        error: None,
    };

    let mut out = Vec::with_capacity(spec.roster.len());
    for &solver in &spec.roster {
        let rec = match solver {
            SolverName::NestaCt => Ok(record(solver, ct.calls_a, x_n, ct.converged, ct_time)),
            SolverName::Nesta => {
                let started = Instant::now();
                nesta_solve(&problem, &spec.nesta)
                    .map(|r| record(solver, r.calls_a, &r.x, r.converged, started.elapsed().as_secs_f64()))
            }
            SolverName::Fista => {
                let started = Instant::now();
                let lambda = hs.lambda;
                let rule = spec.stop_rule;
                fista_solve_until(
                    &inst.a,
                    &inst.b,
                    lambda,
                    0.0,
                    (spec.max_calls / 2) as usize,
                    FistaVariant::Standard,
                    &mut |v| {
                        let l1 = norm1(v.x);
                        let res = dist2(v.ax, &inst.b);
                        match rule {
                            StopRule::Crit1 => crit1_holds(l1, res, l1_n, res_n),
                            StopRule::Crit2 => crit2_holds(l1, res, l1_n, res_n, lambda),
                        }
                    },
                )
                .map(|f| record(solver, f.calls_a, &f.x, f.converged, started.elapsed().as_secs_f64()))
            }
        };
        out.push(rec.unwrap_or_else(|e| failed_record(trial, db, solver, &e)));
    }
    Ok(out)
}

/// `mean (min–max)` of `calls_A` over the converged trials of one cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dynamic_range_db: f64,
    pub solver: SolverName,
    pub mean: f64,
    pub min: u64,
    pub max: u64,
    pub dnc: usize,
    pub trials: usize,
}

impl SummaryRow {
    pub fn cell(&self) -> String {
        if self.dnc == self.trials {
            return "DNC".to_string();
        }
        let base = format!("{:.0} ({}–{})", self.mean, self.min, self.max);
        if self.dnc > 0 {
            format!("{base} [{} DNC]", self.dnc)
        } else {
            base
        }
    }
}

pub fn summarize(records: &[TrialRecord], dbs: &[f64], roster: &[SolverName]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for &db in dbs {
        for &solver in roster {
            let cell: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.solver == solver && r.dynamic_range_db == db)
                .collect();
            let ok: Vec<u64> = cell.iter().filter(|r| r.converged).map(|r| r.calls_a).collect();
            let mean = if ok.is_empty() {
                f64::NAN
            } else {
                ok.iter().sum::<u64>() as f64 / ok.len() as f64
            };
            rows.push(SummaryRow {
                dynamic_range_db: db,
                solver,
                mean,
                min: ok.iter().copied().min().unwrap_or(0),
                max: ok.iter().copied().max().unwrap_or(0),
                dnc: cell.len() - ok.len(),
                trials: cell.len(),
            });
        }
    }
    rows
}

/// Solvers as rows, dynamic ranges as columns.
pub fn format_summary_table(rows: &[SummaryRow], dbs: &[f64], roster: &[SolverName]) -> String {
    let mut header = vec!["solver".to_string()];
    header.extend(dbs.iter().map(|d| format!("{d} dB")));
    let mut table = vec![header];
    for &solver in roster {
        let mut line = vec![solver.to_string()];
        for &db in dbs {
            let cell = rows
                .iter()
                .find(|r| r.solver == solver && r.dynamic_range_db == db)
                .map(SummaryRow::cell)
                .unwrap_or_default();
            line.push(cell);
        }
        table.push(line);
    }
    let widths: Vec<usize> = (0..table[0].len())
        .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentReport {
    /// Per-trial CSV for one dynamic range.
    pub fn csv(&self, db: f64) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in self.records.iter().filter(|r| r.dynamic_range_db == db) {
            out.push_str(&r.csv_line());
            out.push('\n');
        }
        out
    }

    /// Whitespace-separated `dynamic_range_db solver mean min max dnc`.
    pub fn plot_data(&self) -> String {
        let mut out = String::from("# dynamic_range_db solver mean min max dnc\n");
        for r in &self.summary {
            out.push_str(&format!(
                "{} {} {:.1} {} {} {}\n",
                r.dynamic_range_db, r.solver, r.mean, r.min, r.max, r.dnc
            ));
        }
        out
    }
}

/// Runs all trials for every dynamic range on at most `jobs` threads.
/// Trial `t` draws from stream `t` of `spec.seed`, so results do not
/// depend on `jobs`.
pub fn run_experiment(spec: &ExperimentSpec, jobs: usize) -> Result<ExperimentReport> {
    spec.validate()?;
    let tasks: Vec<(f64, usize)> = spec
        .dynamic_ranges_db
        .iter()
        .flat_map(|&db| (0..spec.trials).map(move |t| (db, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let records: Vec<TrialRecord> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(db, t)| run_trial(spec, db, t))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    });
    let summary = summarize(&records, &spec.dynamic_ranges_db, &spec.roster);
    Ok(ExperimentReport { records, summary })
}
