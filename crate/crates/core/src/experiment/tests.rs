use super::*;
use crate::config::Config;
use crate::smoothing::Regularizer;

#[test]
fn zero_db_gives_unit_magnitudes() {
    let x = gen_sparse_signal(100, 10, 0.0, 1).unwrap();
    assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 10);
    assert!(x.iter().filter(|v| **v != 0.0).all(|v| v.abs() == 1.0));
}

#[test]
fn eighty_db_magnitudes_span_four_decades() {
    let x = gen_sparse_signal(20_000, 10_000, 80.0, 2).unwrap();
    let mags: Vec<f64> = x.iter().filter(|v| **v != 0.0).map(|v| v.abs()).collect();
    assert_eq!(mags.len(), 10_000);
    let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = mags.iter().cloned().fold(0.0, f64::max);
    assert!(lo >= 1.0 && hi <= 1e4);
    let ratio = hi / lo;
    assert!(ratio >= 10f64.powf(0.9 * 4.0) && ratio <= 1e4, "{ratio}");
}

#[test]
fn sparse_signal_rejects_s_above_n() {
    assert!(gen_sparse_signal(4, 5, 20.0, 0).is_err());
}

#[test]
fn compressible_profile_is_exact_power_law() {
    let n = 500;
    let x = gen_compressible_signal(n, 1.0, 3).unwrap();
    let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    for (i, m) in mags.iter().enumerate() {
        assert_eq!(*m, ((i + 1) as f64).powf(-1.0));
    }
    let harmonic: f64 = (1..=n).map(|i| 1.0 / i as f64).sum();
    assert!((norm1(&x) - harmonic).abs() < 1e-10);
}

#[test]
fn squares_image_amplitude_range() {
    let img = gen_squares_image(64, 40.0, 5).unwrap();
    let nz: Vec<f64> = img.iter().cloned().filter(|v| *v != 0.0).collect();
    let lo = nz.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = nz.iter().cloned().fold(0.0, f64::max);
    assert!((hi / lo - 100.0).abs() < 1e-9);
}

#[test]
fn no_squares_means_zero_tv() {
    let spec = SquaresSpec {
        count: 0,
        min_width: 2,
        max_width: 4,
    };
    let img = gen_squares_image_with(16, 20.0, 1, &spec).unwrap();
    assert!(img.iter().all(|v| *v == 0.0));
    let tv = Regularizer::Tv { rows: 16, cols: 16 };
    assert_eq!(tv.value(&img).unwrap(), 0.0);
}

#[test]
fn isolated_unit_square_total_variation() {
    // Forward differences see a jump of 1 on the 2w pixels bordering the
    // square from the top and left inside, and on 2w pixels outside to the
    // right and bottom; the corner pixel inside has both components.
    for w in [1usize, 2, 3, 5] {
        let side = 16;
        let mut img = vec![0.0; side * side];
        for r in 4..4 + w {
            for c in 4..4 + w {
                img[r * side + c] = 1.0;
            }
        }
        let tv = Regularizer::Tv { rows: side, cols: side }.value(&img).unwrap();
        let want = 4.0 * w as f64 - 2.0 + 2f64.sqrt();
        assert!((tv - want).abs() < 1e-12, "w={w}: {tv} vs {want}");
    }
}

#[test]
fn crit1_cases() {
    let a = LinearMap::subsampled_dct(16, 8, 0).unwrap();
    let x = gen_sparse_signal(16, 3, 20.0, 1).unwrap();
    let b = a.apply(&x).unwrap();
    let b_noisy: Vec<f64> = b.iter().map(|v| v + 0.01).collect();
    assert!(crit1_met(&x, &x, &a, &b_noisy).unwrap());
    let x_big: Vec<f64> = x.iter().map(|v| v * 1e6).collect();
    let big = a.apply(&x_big).unwrap();
    assert!(!crit1_met(&[0.0; 16], &x_big, &a, &big).unwrap());
    assert!(crit1_holds(1.0, 1.05, 1.0, 1.0));
    assert!(!crit1_holds(1.0, 1.0500001, 1.0, 1.0));
    assert!(!crit1_holds(1.0 + 1e-12, 1.0, 1.0, 1.0));
}

#[test]
fn crit2_cases() {
    let a = LinearMap::subsampled_dct(16, 8, 0).unwrap();
    let x = gen_sparse_signal(16, 3, 20.0, 1).unwrap();
    let b: Vec<f64> = a.apply(&x).unwrap().iter().map(|v| v + 0.05).collect();
    assert!(crit2_met(&x, &x, &a, &b, 0.1).unwrap());
    // huge λ: only the ℓ1 term matters
    assert!(crit2_holds(1.0, 100.0, 1.001, 0.0, 1e9));
    assert!(!crit2_holds(1.001, 0.0, 1.0, 100.0, 1e9));
    // perturbing the reference away from the data and growing its norm
    let mut worse = x.clone();
    worse.iter_mut().for_each(|v| *v *= 1.5);
    worse[0] += 1.0;
    assert!(!crit2_met(&worse, &x, &a, &b, 0.1).unwrap());
}

const SPEC: &str = "\
[experiment]
preset = dense-support
n = 256
m = 64
dynamic_range_db = 20
sigma = 0.1
seed = 3
trials = 2
roster = NESTA, NESTA+Ct, FISTA
stop_rule = crit1

[nesta]
mu = 0.02

[reference]
tol = 1e-12
";

#[test]
fn spec_from_config() {
    let cfg: Config = SPEC.parse().unwrap();
    let spec = ExperimentSpec::from_config(&cfg).unwrap();
    assert_eq!(spec.s, 64 / 5);
    assert_eq!(spec.roster, vec![SolverName::Nesta, SolverName::NestaCt, SolverName::Fista]);
    assert_eq!(spec.max_calls, DNC_CALLS);
    assert_eq!(spec.handshake.fista_tol, 1e-12);

    let sparse = SPEC.replace("dense-support", "sparse-support");
    let spec = ExperimentSpec::from_config(&sparse.parse().unwrap()).unwrap();
    assert_eq!(spec.s, 1);
}

#[test]
fn spec_rejects_empty_roster_and_unknown_keys() {
    let cfg: Config = SPEC.replace("roster = NESTA, NESTA+Ct, FISTA", "roster =").parse().unwrap();
    let err = ExperimentSpec::from_config(&cfg).unwrap_err();
    assert!(err.to_string().contains("experiment.roster"), "{err}");

    let cfg: Config = SPEC.replace("seed = 3", "sede = 3").parse().unwrap();
    let err = ExperimentSpec::from_config(&cfg).unwrap_err();
    assert_eq!(err.to_string(), "unknown key: experiment.sede");
}

#[test]
fn summary_cell_format() {
    let mk = |calls, converged| TrialRecord {
        trial: 0,
        dynamic_range_db: 20.0,
        solver: SolverName::NestaCt,
        calls_a: calls,
        rel_l1_err: 0.0,
        linf_err: 0.0,
        converged,
        wall_time: 0.0,
        error: None,
    };
    let rows = summarize(&[mk(475, true), mk(485, true), mk(477, true)], &[20.0], &[SolverName::NestaCt]);
    assert_eq!(rows[0].cell(), "479 (475–485)");
    let rows = summarize(&[mk(100, true), mk(0, false)], &[20.0], &[SolverName::NestaCt]);
    assert_eq!(rows[0].cell(), "100 (100–100) [1 DNC]");
    let rows = summarize(&[mk(0, false)], &[20.0], &[SolverName::NestaCt]);
    assert_eq!(rows[0].cell(), "DNC");
}

#[test]
fn single_trial_summary_is_degenerate_and_runs_are_deterministic() {
    let mut cfg: Config = SPEC.parse().unwrap();
    cfg.set("experiment", "trials", "1");
    cfg.set("experiment", "roster", "NESTA");
    let spec = ExperimentSpec::from_config(&cfg).unwrap();
    let r1 = run_experiment(&spec, 1).unwrap();
    assert_eq!(r1.summary.len(), 1);
    let row = &r1.summary[0];
    assert_eq!(row.mean, row.min as f64);
    assert_eq!(row.min, row.max);
    let r2 = run_experiment(&spec, 2).unwrap();
    assert!(r1.records[0].same_outcome(&r2.records[0]));
    assert!(r1.records[0].converged, "{:?}", r1.records[0]);
}

#[test]
fn report_outputs() {
    let cfg: Config = SPEC.parse().unwrap();
    let spec = ExperimentSpec::from_config(&cfg).unwrap();
    let rep = run_experiment(&spec, 2).unwrap();
    assert_eq!(rep.records.len(), 6);
    assert!(rep.records.iter().all(|r| r.error.is_none()), "{:?}", rep.records);
    let csv = rep.csv(20.0);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 7);
    assert!(rep.plot_data().lines().count() == 4);
    let table = format_summary_table(&rep.summary, &spec.dynamic_ranges_db, &spec.roster);
    assert!(table.starts_with("solver"));
    assert_eq!(table.lines().count(), 4);
}
