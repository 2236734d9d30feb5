use std::collections::BTreeMap;
use std::time::Instant;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::run_check;
use super::config::{ExperimentConfig, ExperimentKind, SlopeBand};
use super::fit::{rate_fit, RateFit};
use crate::dynamics::{
    b_t_operator, moment_monitor_step, ForceModel, KernelSpec, MomentEnvelope, MomentMonitor, QuantumSolver, VlasovSolver,
};
use crate::error::{LabError, Result};
use crate::estimates::{exchange_energy, BoundCheck};
use crate::linalg;
use crate::phasespace::{lp_norm, spatial_density, PhaseSpaceField};
use crate::quantize::{left_multiply, momentum_power, psd_repair, weyl_quantize, DensityOperator, MidpointSource};
use crate::schatten::{semiclassical_norm, singular_values};
use crate::C64;

/// Report format version.
pub const SCHEMA: u32 = 1;

const L1_TRACE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: f64,
    pub trace_error: f64,
    pub l2_error: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lp_errors: BTreeMap<String, f64>,
    pub density_l1: f64,
}

/// Result of re-running a ladder point at half the spatial resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfConvergence {
    pub n_half: usize,
    pub trace_error_half: f64,
    pub delta: f64,
    pub budget: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMetrics {
    pub trace_error: f64,
    pub l2_error: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lp_errors: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exchange_size: Option<f64>,
    /// Extra final-time quantities (gaps to the classical state, `‖B_t‖_{𝓛¹}`).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, f64>,
    pub psd_clipped: f64,
    /// `Tr((|x|² + |p̂|²)ρ⁰)`.
    pub initial_moment: f64,
    pub checkpoints: Vec<Checkpoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<MomentEnvelope>,
    /// Absent when the gate is disabled or the half-resolution grid cannot carry the state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub self_convergence: Option<SelfConvergence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    pub hbar: f64,
    pub n_x: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<PointMetrics>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
    /// Seconds; stored outside the numerical report.
    #[serde(skip)]
    pub wallclock: f64,
}

impl LadderPoint {
    pub fn ok(&self) -> bool {
        self.metrics.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<RateFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refused: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<SlopeBand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub within_band: Option<bool>,
    /// Every fitted point passed the self-convergence gate.
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderRun {
    pub schema: u32,
    pub experiment: ExperimentKind,
    pub config: ExperimentConfig,
    pub synthetic: bool,
    pub points: Vec<LadderPoint>,
    pub fits: BTreeMap<String, FitRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<BoundCheck>,
    #[serde(skip)]
    pub wallclock: f64,
}

impl LadderRun {
    /// `(ℏ, value)` over successful points for a metric name used in `fits`.
    pub fn series(&self, metric: &str) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter_map(|p| p.metrics.as_ref().and_then(|m| metric_value(m, metric)).map(|v| (p.hbar, v)))
            .collect()
    }

    pub fn fit(&self, metric: &str) -> Option<RateFit> {
        self.fits.get(metric).and_then(|f| f.fit)
    }
}

fn metric_value(m: &PointMetrics, metric: &str) -> Option<f64> {
    match metric {
        "trace_error" => Some(m.trace_error),
        "l2_error" => Some(m.l2_error),
        "exchange_size" => m.exchange_size,
        other => match other.strip_prefix("lp_") {
            Some(p) => m.lp_errors.get(p).copied(),
            None => m.extras.get(other).copied(),
        },
    }
}

/// Pool size from `LAB_THREADS`, defaulting to the available cores.
pub fn lab_threads() -> usize {
    std::env::var("LAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|v| *v > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Runs every ladder point (or the bound check) described by `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<LadderRun> {
    cfg.validate()?;
    let start = Instant::now();
    let mut run = LadderRun {
        schema: SCHEMA,
        experiment: cfg.experiment.clone(),
        config: cfg.clone(),
        synthetic: cfg.synthetic.is_some(),
        points: Vec::new(),
        fits: BTreeMap::new(),
        checks: Vec::new(),
        wallclock: 0.0,
    };
    match &cfg.experiment {
        ExperimentKind::BoundCheck(name) => run.checks = run_check(name, cfg)?,
        ExperimentKind::ClassicalStability => run.checks = run_check("classical_stability", cfg)?,
        _ => {
            run.points = if cfg.synthetic.is_some() {
                synthetic_points(cfg)
            } else {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(lab_threads())
                    .build()
                    .map_err(|e| LabError::Config(e.to_string()))?;
                pool.install(|| {
                    cfg.hbar_ladder
                        .par_iter()
                        .enumerate()
                        .map(|(i, &h)| ladder_point(cfg, i, h))
                        .collect()
                })
            };
            run.fits = fit_all(cfg, &run.points);
        }
    }
    run.wallclock = start.elapsed().as_secs_f64();
    Ok(run)
}

fn synthetic_points(cfg: &ExperimentConfig) -> Vec<LadderPoint> {
    let s = cfg.synthetic.expect("synthetic");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = |h: f64| {
        let z: f64 = StandardNormal.sample(&mut rng);
        s.constant * h.powf(s.exponent) * (1.0 + s.noise * z)
    };
    cfg.hbar_ladder
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let trace = draw(h);
            let l2 = draw(h);
            let lp: BTreeMap<String, f64> = cfg.norms_to_track.iter().map(|p| (p.label(), draw(h))).collect();
            let cp = Checkpoint {
                t: cfg.evolution.t_final,
                trace_error: trace,
                l2_error: l2,
                lp_errors: lp.clone(),
                density_l1: 0.0,
            };
            LadderPoint {
                hbar: h,
                n_x: cfg.grid.n_for(i, h),
                metrics: Some(PointMetrics {
                    trace_error: trace,
                    l2_error: l2,
                    lp_errors: lp,
                    exchange_size: None,
                    extras: BTreeMap::new(),
                    psd_clipped: 0.0,
                    initial_moment: 0.0,
                    checkpoints: vec![cp],
                    moments: None,
                    self_convergence: None,
                }),
                failure: None,
                wallclock: 0.0,
            }
        })
        .collect()
}

fn ladder_point(cfg: &ExperimentConfig, index: usize, hbar: f64) -> LadderPoint {
    let start = Instant::now();
    let n_x = cfg.grid.n_for(index, hbar);
    let outcome = evolve_point(cfg, hbar, n_x, None).map(|mut m| {
        if cfg.self_convergence {
            m.self_convergence = gate(cfg, hbar, n_x, m.trace_error).ok();
        }
        m
    });
    let (metrics, failure) = match outcome {
        Ok(m) => (Some(m), None),
        Err(e) => (None, Some(e.to_string())),
    };
    LadderPoint { hbar, n_x, metrics, failure, wallclock: start.elapsed().as_secs_f64() }
}

fn gate(cfg: &ExperimentConfig, hbar: f64, n_x: usize, fine: f64) -> Result<SelfConvergence> {
    let fine_grid = cfg.grid.grid(n_x)?;
    let k = cfg.kernel.spec(&fine_grid.x).resolved(&fine_grid.x)?;
    let half = evolve_point(cfg, hbar, n_x / 2, Some(k))?;
    let delta = (half.trace_error - fine).abs();
    let budget = cfg.grid_budget * fine;
    Ok(SelfConvergence { n_half: n_x / 2, trace_error_half: half.trace_error, delta, budget, passed: delta <= budget })
}

struct Distances {
    trace: f64,
    l2: f64,
    lp: BTreeMap<String, f64>,
}

fn distances(a: &Array2<C64>, b: &Array2<C64>, hbar: f64, cfg: &ExperimentConfig) -> Result<Distances> {
    let sv = singular_values(&(a - b))?;
    Ok(Distances {
        trace: sv.iter().sum(),
        l2: semiclassical_norm(&sv, hbar, 2.0),
        lp: cfg.norms_to_track.iter().map(|p| (p.label(), semiclassical_norm(&sv, hbar, p.0))).collect(),
    })
}

fn trace_gap(a: &Array2<C64>, b: &Array2<C64>) -> Result<f64> {
    Ok(singular_values(&(a - b))?.iter().sum())
}

fn quantize(f: &PhaseSpaceField, hbar: f64) -> Result<DensityOperator> {
    weyl_quantize(f, hbar, MidpointSource::SpectralInterpolated)
}

/// `Tr((|x|² + |p̂|²)ρ)`.
fn phase_moment(rho: &DensityOperator) -> f64 {
    let xs = rho.grid_x.points();
    let pos: f64 = xs.iter().enumerate().map(|(i, x)| x * x * rho.matrix[[i, i]].re).sum();
    let kin = linalg::trace(&left_multiply(&rho.matrix, &momentum_power(&rho.grid_x, rho.hbar, 2.0))).re;
    pos + kin
}

/// Co-evolves the configured pair and measures their distance at every checkpoint.
fn evolve_point(cfg: &ExperimentConfig, hbar: f64, n_x: usize, kernel: Option<KernelSpec>) -> Result<PointMetrics> {
    let grid = cfg.grid.grid(n_x)?;
    let k = match kernel {
        Some(k) => k,
        None => cfg.kernel.spec(&grid.x).resolved(&grid.x)?,
    };
    let ev = cfg.evolution.at(hbar);
    ev.validate()?;
    let mut f = cfg.initial_data.sample(grid);
    let (rho0, psd_clipped) = psd_repair(&quantize(&f, hbar)?)?;
    let initial_moment = phase_moment(&rho0);

    let exp = &cfg.experiment;
    let want_hartree = matches!(exp, ExperimentKind::HartreeVsVlasov | ExperimentKind::HartreeVsHf);
    let want_hf = matches!(exp, ExperimentKind::HfVsVlasov | ExperimentKind::HartreeVsHf);
    let mut vlasov = VlasovSolver::new(grid, k)?;
    let mut hartree = if want_hartree { Some((QuantumSolver::hartree(grid.x, hbar, k)?, rho0.clone())) } else { None };
    let mut hf = if want_hf { Some((QuantumSolver::hartree_fock(grid.x, hbar, k)?, rho0.clone())) } else { None };

    let mut monitor = MomentMonitor { p: 1.0, n: 2.0, entries: Vec::new() };
    let mut checkpoints = Vec::new();
    let steps = ev.steps();
    let dx = grid.x.spacing();
    let mut last_opf = None;
    for step in 0..=steps {
        if step > 0 {
            vlasov.step(&mut f, ev.dt)?;
            if let Some((s, r)) = hartree.as_mut() {
                s.step(r, ev.dt)?;
            }
            if let Some((s, r)) = hf.as_mut() {
                s.step(r, ev.dt)?;
            }
        }
        if step % ev.record_every != 0 && step != steps {
            continue;
        }
        let t = step as f64 * ev.dt;
        monitor.entries.push(moment_monitor_step(&f, k, monitor.p, monitor.n)?);
        let opf = quantize(&f, hbar)?;
        let (a, b): (&DensityOperator, &DensityOperator) = match exp {
            ExperimentKind::HartreeVsVlasov => (&hartree.as_ref().expect("hartree").1, &opf),
            ExperimentKind::HfVsVlasov => (&hf.as_ref().expect("hf").1, &opf),
            _ => (&hf.as_ref().expect("hf").1, &hartree.as_ref().expect("hartree").1),
        };
        let d = distances(&a.matrix, &b.matrix, hbar, cfg)?;
        let density_l1 = lp_norm(a.density().iter().zip(b.density().iter()).map(|(u, v)| u - v), dx, 1.0);
        if density_l1 > d.trace * (1.0 + L1_TRACE_SLACK) + L1_TRACE_SLACK {
            return Err(LabError::Config(format!(
                "density L¹ distance {density_l1:e} exceeds trace distance {:e} at t={t}",
                d.trace
            )));
        }
        checkpoints.push(Checkpoint { t, trace_error: d.trace, l2_error: d.l2, lp_errors: d.lp, density_l1 });
        last_opf = Some(opf);
    }

    let opf = last_opf.expect("final checkpoint");
    let last = checkpoints.last().expect("final checkpoint").clone();
    let mut extras = BTreeMap::new();
    if let ExperimentKind::HartreeVsHf = exp {
        extras.insert("hartree_vlasov_gap".into(), trace_gap(&hartree.as_ref().expect("hartree").1.matrix, &opf.matrix)?);
        extras.insert("hf_vlasov_gap".into(), trace_gap(&hf.as_ref().expect("hf").1.matrix, &opf.matrix)?);
    }
    let rho_f: Vec<f64> = spatial_density(&f).to_vec();
    let bt = b_t_operator(&opf, &rho_f, &ForceModel::from(k))?;
    let bt_h = bt.mapv(|z| z * C64::new(0.0, 1.0));
    extras.insert("b_t_trace".into(), singular_values(&bt_h)?.iter().sum());
    let quantum = hf.as_ref().or(hartree.as_ref()).map(|(_, r)| r).expect("quantum state");
    let exchange_size = Some(exchange_energy(quantum, &k)?);

    Ok(PointMetrics {
        trace_error: last.trace_error,
        l2_error: last.l2_error,
        lp_errors: last.lp_errors,
        exchange_size,
        extras,
        psd_clipped,
        initial_moment,
        checkpoints,
        moments: Some(monitor.envelope()),
        self_convergence: None,
    })
}

fn fit_all(cfg: &ExperimentConfig, points: &[LadderPoint]) -> BTreeMap<String, FitRecord> {
    let mut metrics: Vec<String> = vec!["trace_error".into(), "l2_error".into()];
    metrics.extend(cfg.norms_to_track.iter().map(|p| format!("lp_{}", p.label())));
    if let Some(m) = points.iter().find_map(|p| p.metrics.as_ref()) {
        if m.exchange_size.is_some() {
            metrics.push("exchange_size".into());
        }
        metrics.extend(m.extras.keys().cloned());
    }
    let synthetic = cfg.synthetic.is_some();
    let trace_default = match cfg.experiment {
        ExperimentKind::HartreeVsVlasov | ExperimentKind::HfVsVlasov => Some(SlopeBand { target: 1.0, band: 0.25 }),
        _ => None,
    };
    let all_gated = synthetic
        || points.iter().filter_map(|p| p.metrics.as_ref()).all(|m| m.self_convergence.as_ref().is_some_and(|g| g.passed));
    metrics
        .into_iter()
        .map(|name| {
            let series: Vec<(f64, f64)> = points
                .iter()
                .filter_map(|p| p.metrics.as_ref().and_then(|m| metric_value(m, &name)).map(|v| (p.hbar, v)))
                .collect();
            let band = match name.as_str() {
                "trace_error" => cfg.trace_band.or(trace_default),
                "l2_error" => cfg.l2_band,
                _ => None,
            };
            let rec = match rate_fit(&series) {
                Ok(fit) => FitRecord {
                    within_band: band.map(|b| (fit.slope - b.target).abs() <= b.band),
                    fit: Some(fit),
                    refused: None,
                    band,
                    valid: all_gated,
                },
                Err(e) => FitRecord { fit: None, refused: Some(e.to_string()), band, within_band: None, valid: false },
            };
            (name, rec)
        })
        .collect()
}
