use semilab_core::lab::{
    self, checkpoint_csv, read_report, report_json, run_experiment, write_report, ExperimentConfig, ExperimentKind,
};
use semilab_core::LabError;

const BASE: &str = r#"
experiment = "hartree_vs_vlasov"
hbar_ladder = [0.4, 0.2, 0.1]
seed = 3

[kernel]
a = 0.5
delta_cells = 2.0

[grid]
length_x = 8.0
length_xi = 8.0
n_xi = 32

[evolution]
dt = 0.02
t_final = 0.1
record_every = 2

[initial_data]
kind = "gaussian"
center = [0.2, 0.3]
variance = 0.25
"#;

fn synthetic(exponent: f64, noise: f64) -> ExperimentConfig {
    let text = format!("{BASE}\n[synthetic]\nconstant = 0.5\nexponent = {exponent}\nnoise = {noise}\n")
        .replace("[0.4, 0.2, 0.1]", "[0.2, 0.1, 0.05, 0.025]");
    ExperimentConfig::from_toml(&text).unwrap()
}

#[test]
fn synthetic_ladders_recover_their_exponent() {
    for s in [1.0, 0.75] {
        let run = run_experiment(&synthetic(s, 0.0)).unwrap();
        let fit = run.fit("trace_error").unwrap();
        assert!((fit.slope - s).abs() < 1e-6);
        assert!(run.fits["trace_error"].valid);
    }
}

#[test]
fn noisy_synthetic_runs_are_seeded() {
    let a = report_json(&run_experiment(&synthetic(1.0, 0.2)).unwrap()).unwrap();
    let b = report_json(&run_experiment(&synthetic(1.0, 0.2)).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fits_need_three_points() {
    let cfg = ExperimentConfig::from_toml(&BASE.replace("[0.4, 0.2, 0.1]", "[0.4, 0.2]")).unwrap();
    let run = run_experiment(&cfg).unwrap();
    assert!(run.points.iter().all(|p| p.ok()));
    let rec = &run.fits["trace_error"];
    assert!(rec.fit.is_none());
    assert!(rec.refused.as_deref().unwrap().contains("at least 3"));
}

#[test]
fn failed_points_are_recorded_and_the_run_continues() {
    let text = BASE.replace("n_xi = 32", "n_xi = 32\nn_x = [32, 64, 16]");
    let run = run_experiment(&ExperimentConfig::from_toml(&text).unwrap()).unwrap();
    assert!(run.points[0].ok() && run.points[1].ok());
    assert!(run.points[2].failure.as_deref().unwrap().contains("aliasing"));
}

#[test]
fn small_run_reports_and_reads_back() {
    let cfg = ExperimentConfig::from_toml(BASE).unwrap();
    let run = run_experiment(&cfg).unwrap();
    for p in &run.points {
        let m = p.metrics.as_ref().unwrap();
        assert_eq!(m.checkpoints.len(), 4);
        assert!(m.checkpoints[0].trace_error < 1e-6);
        for c in &m.checkpoints {
            assert!(c.density_l1 <= c.trace_error * (1.0 + 1e-10) + 1e-10);
        }
        assert!(m.self_convergence.is_some());
    }
    let csv = checkpoint_csv(&run);
    assert!(csv.starts_with("hbar,n_x,t,trace_error,l2_error,density_l1\n"));

    let dir = tempfile::tempdir().unwrap();
    write_report(&run, dir.path()).unwrap();
    let back = read_report(dir.path()).unwrap();
    assert_eq!(back, run);
    let json = std::fs::read_to_string(dir.path().join(lab::REPORT_FILE)).unwrap();
    assert!(json.contains("\"schema\": 1"));
    assert!(!json.contains("wallclock"));
    for f in [lab::TIMING_FILE, lab::CHECKPOINT_CSV, lab::CHECKPOINT_DAT, lab::RATES_DAT] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn tracked_norms_add_columns() {
    let text = BASE.replace("seed = 3", "seed = 3\nnorms_to_track = [3.0, \"inf\"]");
    let run = run_experiment(&ExperimentConfig::from_toml(&text).unwrap()).unwrap();
    assert!(checkpoint_csv(&run).starts_with("hbar,n_x,t,trace_error,l2_error,lp_3,lp_inf,density_l1\n"));
    let m = run.points[0].metrics.as_ref().unwrap();
    assert!(m.lp_errors["inf"] > 0.0 && m.lp_errors["3"] > 0.0);
    assert!(run.fits.contains_key("lp_inf"));
}

#[test]
fn bound_check_experiments_produce_checks() {
    let text = BASE.replace("hartree_vs_vlasov", "bound_check:gaussian_decomposition");
    let cfg = ExperimentConfig::from_toml(&text).unwrap();
    assert_eq!(cfg.experiment, ExperimentKind::BoundCheck("gaussian_decomposition".into()));
    let run = run_experiment(&cfg).unwrap();
    assert!(run.points.is_empty());
    assert_eq!(run.checks.len(), 1);
    assert!(run.checks[0].verdict.bounded);
}

#[test]
fn memory_budget_is_enforced() {
    let text = BASE.replace("seed = 3", "seed = 3\nmemory_budget_mb = 0.01");
    assert!(matches!(ExperimentConfig::from_toml(&text), Err(LabError::Config(_))));
}

#[test]
fn shipped_configs_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
