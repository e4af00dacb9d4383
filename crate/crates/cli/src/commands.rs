use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context as _, Result};
use serde_json::{json, Value};

use nesta_core::config::Config;
use nesta_core::experiment::{
    self, format_summary_table, gen_compressible_signal, gen_multitone, gen_sparse_signal, gen_squares_image,
    rel_l1_err, rel_l2_err, run_experiment,
};
use nesta_core::io::{read_vector, write_pgm, write_vector};
use nesta_core::rng::Rng64;
use nesta_core::selftest::run_suite;
use nesta_core::{nesta_continuation, nesta_solve, LinearMap, ProblemInstance, Regularizer, SolveResult};

use crate::settings::{self, DataSource, Regularization, SignalSettings};

pub struct Context {
    pub seed: Option<u64>,
    pub jobs: usize,
    pub out: PathBuf,
    pub verbose: u8,
}

impl Context {
    fn out_dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(&self.out)
    }

    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.out_dir()?.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn write_vec(&self, name: &str, v: &[f64]) -> Result<()> {
        let path = self.out_dir()?.join(name);
        write_vector(&path, v).with_context(|| format!("writing {}", path.display()))
    }

    fn write_json(&self, name: &str, v: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(v)?;
        text.push('\n');
        self.write(name, text)?;
        Ok(())
    }

    fn log(&self, level: u8, msg: impl std::fmt::Display) {
        if self.verbose >= level {
            eprintln!("{msg}");
        }
    }
}

pub enum Status {
    Done,
    /// The solver stopped at its iteration cap, or a check failed.
    Unfinished,
}

fn load(path: &Path) -> Result<Config> {
    Config::load(path).with_context(|| format!("reading config {}", path.display()))
}

/// Solver summary without the iterate and trace.
fn result_json(r: &SolveResult) -> Result<Value> {
    let mut v = serde_json::to_value(r)?;
    if let Value::Object(map) = &mut v {
        map.remove("x");
        map.remove("trace");
    }
    Ok(v)
}

fn log_steps(ctx: &Context, r: &SolveResult) {
    if let Some(mu0) = r.mu0 {
        ctx.log(1, format_args!("mu0 = {mu0:.6e}"));
    }
    for (t, s) in r.per_step.iter().enumerate() {
        ctx.log(2, format_args!("stage {t}: {s:?}"));
    }
    ctx.log(
        1,
        format_args!(
            "iterations {} calls_A {} converged {} residual {:.6e}",
            r.iterations, r.calls_a, r.converged, r.residual
        ),
    );
}

fn status(converged: bool) -> Status {
    if converged {
        Status::Done
    } else {
        Status::Unfinished
    }
}

fn generate(sig: &SignalSettings, a: &LinearMap, reg: &Regularization) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.in_dim();
    let mut rng = Rng64::new(sig.seed);
    let signal_seed = rng.next_u64();
    let noise_seed = rng.next_u64();
    let truth = match sig.model.as_str() {
        "sparse" => gen_sparse_signal(n, sig.s, sig.dynamic_range_db, signal_seed)?,
        "compressible" => gen_compressible_signal(n, sig.decay, signal_seed)?,
        "multitone" => gen_multitone(n, sig.tones, signal_seed),
        "squares" => {
            let side = (n as f64).sqrt().round() as usize;
            if side * side != n {
                bail!("squares signal needs a square image, got length {n}");
            }
            if let Regularization::Tv = reg {
            } else {
                bail!("squares signal is only meaningful with regularizer = tv");
            }
            gen_squares_image(side, sig.dynamic_range_db, signal_seed)?
        }
        other => bail!("unknown signal model {other}"),
    };
    let mut b = a.apply(&truth)?;
    let noise = Rng64::new(noise_seed).gaussian_vec(b.len(), sig.sigma);
    b.iter_mut().zip(&noise).for_each(|(v, e)| *v += e);
    Ok((truth, b))
}

pub fn solve(ctx: &Context, config: &Path) -> Result<Status> {
    let s = settings::solve_settings(&load(config)?, ctx.seed)?;
    let a = Arc::new(s.operator.build()?);
    let regularizer = match &s.regularizer {
        Regularization::L1 => Regularizer::L1,
        Regularization::Tv => {
            if s.operator.rows == 0 {
                bail!("regularizer = tv needs a fourier2d operator with rows and cols");
            }
            Regularizer::Tv {
                rows: s.operator.rows,
                cols: s.operator.cols,
            }
        }
        Regularization::Analysis { redundancy } => {
            Regularizer::Analysis(Arc::new(LinearMap::dct_frame(a.in_dim(), *redundancy)?))
        }
    };
    let (truth, b) = match &s.data {
        DataSource::File(path) => {
            let path = config.parent().unwrap_or(Path::new(".")).join(path);
            let b = read_vector(&path).with_context(|| format!("reading {}", path.display()))?;
            (None, b)
        }
        DataSource::Generated(sig) => {
            let (truth, b) = generate(sig, &a, &s.regularizer)?;
            (Some(truth), b)
        }
    };
    let mut solver = s.solver.clone();
    if let Some(x0) = &s.x0 {
        let path = config.parent().unwrap_or(Path::new(".")).join(x0);
        solver.x0 = Some(read_vector(&path).with_context(|| format!("reading {}", path.display()))?);
    }

    let problem = ProblemInstance::new(a, b.clone(), s.epsilon, regularizer)?;
    let r = match &s.continuation {
        Some(ct) => nesta_continuation(&problem, &solver, ct)?,
        None => nesta_solve(&problem, &solver)?,
    };
    log_steps(ctx, &r);

    let mut summary = result_json(&r)?;
    summary["epsilon"] = json!(s.epsilon);
    if let Some(truth) = &truth {
        summary["rel_l2_err"] = json!(rel_l2_err(&r.x, truth));
        summary["rel_l1_err"] = json!(rel_l1_err(&r.x, truth));
        ctx.write_vec("truth.bin", truth)?;
        ctx.write_vec("measurements.bin", &b)?;
    }
    ctx.write_json("result.json", &summary)?;
    ctx.write_vec("solution.bin", &r.x)?;
    ctx.write_vec("trace.bin", &r.trace)?;
    println!(
        "f={:.9e} objective={:.9e} residual={:.6e} calls_A={} converged={}",
        r.f_final, r.objective, r.residual, r.calls_a, r.converged
    );
    Ok(status(r.converged))
}

pub fn bench(ctx: &Context, config: &Path) -> Result<Status> {
    let spec = settings::experiment_settings(&load(config)?, ctx.seed)?;
    let rep = run_experiment(&spec, ctx.jobs)?;
    for &db in &spec.dynamic_ranges_db {
        ctx.write(&format!("trials_{db}db.csv"), rep.csv(db))?;
    }
    for r in rep.records.iter().filter(|r| r.error.is_some()) {
        ctx.log(1, format_args!("{} trial {} at {} dB: {:?}", r.solver, r.trial, r.dynamic_range_db, r.error));
    }
    let table = format_summary_table(&rep.summary, &spec.dynamic_ranges_db, &spec.roster);
    ctx.write("summary.txt", &table)?;
    ctx.write("plot.dat", rep.plot_data())?;
    print!("{table}");
    Ok(Status::Done)
}

pub fn tv_demo(ctx: &Context, config: Option<&Path>) -> Result<Status> {
    let cfg = config.map(load).transpose()?;
    let spec = settings::tv_settings(cfg.as_ref(), ctx.seed)?;
    let rep = experiment::tv_demo(&spec)?;
    log_steps(ctx, &rep.result);
    let side = rep.side;
    let mut summary = result_json(&rep.result)?;
    summary["side"] = json!(side);
    summary["m"] = json!(rep.m);
    summary["epsilon"] = json!(rep.epsilon);
    summary["rel_l2_err"] = json!(rep.rel_l2_err);
    ctx.write_json("tv.json", &summary)?;
    ctx.write_vec("tv_reconstruction.bin", &rep.result.x)?;
    ctx.write_vec("tv_truth.bin", &rep.truth)?;
    write_pgm(ctx.out_dir()?.join("tv_reconstruction.pgm"), &rep.result.x, side, side)?;
    write_pgm(ctx.out_dir()?.join("tv_truth.pgm"), &rep.truth, side, side)?;
    println!(
        "{side}x{side} m={} rel_l2={:.4e} calls_A={} mu0={}",
        rep.m,
        rep.rel_l2_err,
        rep.result.calls_a,
        rep.result.mu0.map_or("-".to_string(), |v| format!("{v:.4e}"))
    );
    Ok(status(rep.result.converged))
}

pub fn analysis_demo(ctx: &Context, config: Option<&Path>) -> Result<Status> {
    let cfg = config.map(load).transpose()?;
    let spec = settings::analysis_settings(cfg.as_ref(), ctx.seed)?;
    let rep = experiment::analysis_demo(&spec)?;
    let formulations = [("analysis", &rep.analysis), ("synthesis", &rep.synthesis)];
    let mut summary = json!({ "redundancy": spec.redundancy, "rel_gap": rep.rel_gap });
    for (name, f) in formulations {
        let mut v = serde_json::to_value(f)?;
        v["w_calls_per_iteration"] = json!(f.w_calls_per_iteration());
        summary[name] = v;
        println!(
            "{name:<9} l1={:.6e} residual={:.4e} calls_A={} calls_W={} W/iter={:.2} rel_l2={:.4e}",
            f.l1,
            f.residual,
            f.calls_a,
            f.calls_w,
            f.w_calls_per_iteration(),
            f.rel_l2_err
        );
    }
    println!("gap={:.4e}", rep.rel_gap);
    ctx.write_json("analysis.json", &summary)?;
    ctx.write_vec("x_analysis.bin", &rep.x_analysis)?;
    ctx.write_vec("x_synthesis.bin", &rep.x_synthesis)?;
    Ok(status(rep.analysis.converged && rep.synthesis.converged))
}

pub fn selftest(ctx: &Context) -> Result<Status> {
    let rep = run_suite(ctx.seed.unwrap_or(0))?;
    println!("{rep}");
    Ok(if rep.all_passed() { Status::Done } else { Status::Unfinished })
}
