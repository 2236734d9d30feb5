//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Numerical shortfalls print FAIL and keep the exit status at zero; an error or
//! panic inside an implementation exits non-zero. `ACCEPTANCE_ONLY=3,4` restricts
//! the run to the listed criteria.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semilab_core::dynamics::{
    b_t_operator, moment_monitor_step, ExternalPotential, ForceModel, MomentMonitor, QuantumSolver, VlasovSolver,
};
use semilab_core::lab::{self, ExperimentConfig, LadderRun};
use semilab_core::linalg;
use semilab_core::phasespace::{lp_norm, phase_derivative, spatial_density, PhaseSpaceField, PhaseSpaceGrid};
use semilab_core::quantize::{
    psd_repair, quantum_grad_x, quantum_grad_xi, weyl_multiply_identities_check, weyl_quantize, wigner_transform,
    DensityOperator, MidpointSource,
};
use semilab_core::schatten::{alt_oracle, holder_oracle, mixing_oracle, random, raw_norm, semiclassical_norm, singular_values};
use semilab_core::{KernelSpec, Result, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn config(name: &str) -> Result<ExperimentConfig> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    ExperimentConfig::load(path)
}

fn gaussian(x0: f64, k0: f64, var: f64) -> impl Fn(f64, f64) -> f64 {
    move |x, k| (-((x - x0).powi(2) + (k - k0).powi(2)) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var)
}

fn quantize(f: &PhaseSpaceField, hbar: f64) -> Result<DensityOperator> {
    weyl_quantize(f, hbar, MidpointSource::SpectralInterpolated)
}

fn frob(a: &Array2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rel(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    frob(&(a - b)) / frob(a).max(1e-300)
}

fn c1_identities() -> Result<Outcome> {
    let start = Instant::now();
    let hbar = 0.05;
    let grid = PhaseSpaceGrid::one_d(256, 8.0, 128, 8.0)?;
    let f = PhaseSpaceField::from_fn_1d(grid, gaussian(0.3, 0.5, 0.25));
    let rho = quantize(&f, hbar)?;

    let back = wigner_transform(&rho, grid.xi)?;
    let roundtrip = back.values.iter().zip(f.values.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

    let l2_op = semiclassical_norm(&singular_values(&rho.matrix)?, hbar, 2.0);
    let l2_f = lp_norm(f.values.iter().copied(), grid.cell_volume(), 2.0);
    let isometry = (l2_op - l2_f).abs() / l2_f;

    let gx = rel(&quantize(&phase_derivative(&f, &[1, 0]), hbar)?.matrix, &quantum_grad_x(&rho)?);
    let gxi = rel(&quantize(&phase_derivative(&f, &[0, 1]), hbar)?.matrix, &quantum_grad_xi(&rho));
    let gradients = gx.max(gxi);

    let mut lemma: f64 = 0.0;
    for (n, n1) in [(0, 0), (0, 2), (2, 0), (2, 2)] {
        lemma = lemma.max(weyl_multiply_identities_check(&f, hbar, n, n1)?.max());
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = roundtrip <= 1e-6 && isometry <= 1e-6 && gradients <= 1e-6 && lemma <= 1e-6 && secs < 60.0;
    outcome(
        pass,
        format!(
            "roundtrip {roundtrip:.2e}, isometry {isometry:.2e}, gradients {gradients:.2e}, multiplication identities {lemma:.2e}, {secs:.1}s"
        ),
    )
}

fn random_exponent(rng: &mut ChaCha8Rng) -> f64 {
    if rng.random_bool(0.15) {
        f64::INFINITY
    } else {
        rng.random_range(1.0..6.0)
    }
}

fn c2_oracles() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let slack = 1e-10;
    let mut violations = [0usize; 3];
    let mut worst = [f64::NEG_INFINITY; 3];
    let mut record = |k: usize, (lhs, rhs): (f64, f64)| {
        let excess = (lhs - rhs) / rhs.max(1.0);
        worst[k] = worst[k].max(excess);
        if excess > slack {
            violations[k] += 1;
        }
    };
    for &n in &[4usize, 8, 16] {
        for _ in 0..200 {
            let (q, r) = loop {
                let q = random_exponent(&mut rng);
                let r = random_exponent(&mut rng);
                if 1.0 / q + 1.0 / r <= 1.0 {
                    break (q, r);
                }
            };
            let p = 1.0 / (1.0 / q + 1.0 / r);
            let a = random::gaussian_matrix(&mut rng, n);
            let b = random::gaussian_matrix(&mut rng, n);
            record(0, holder_oracle(&a, &b, p, q, r)?);
        }
        for _ in 0..200 {
            let q: f64 = rng.random_range(1.0..4.0);
            let r = rng.random_range((1.0 / q).max(0.5)..3.0);
            let a = random::psd(&mut rng, n);
            let b = random::psd(&mut rng, n);
            record(1, alt_oracle(&a, &b, q, r)?);
        }
        for _ in 0..200 {
            let p = rng.random_range(1.0..5.0);
            let r = rng.random_range(0.0..3.0);
            let a = random::psd(&mut rng, n);
            let b = random::psd(&mut rng, n);
            record(2, mixing_oracle(&a, &b, p, r)?);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        violations.iter().all(|v| *v == 0) && secs < 60.0,
        format!(
            "violations Hölder {} / ALT {} / mixing {} of 600 each (worst relative excess {:.1e}, {:.1e}, {:.1e}), {secs:.1}s",
            violations[0], violations[1], violations[2], worst[0], worst[1], worst[2]
        ),
    )
}

fn quantum_norms(rho: &DensityOperator) -> Result<[f64; 4]> {
    let vals = linalg::eigvalsh(&rho.matrix)?;
    let sv: Vec<f64> = vals.iter().map(|v| v.abs()).collect();
    Ok([rho.trace(), raw_norm(&sv, 1.0), raw_norm(&sv, 2.0), raw_norm(&sv, f64::INFINITY)])
}

fn c3_conservation() -> Result<Outcome> {
    let (steps, dt) = (1000, 0.001);
    let hbar = 0.2;
    let grid = PhaseSpaceGrid::one_d(64, 8.0, 64, 8.0)?;
    let k = KernelSpec::power(1, 0.5, 1.0).resolved(&grid.x)?;
    let f0 = PhaseSpaceField::from_fn_1d(grid, gaussian(0.3, 0.5, 0.25));
    let rho0 = psd_repair(&quantize(&f0, hbar)?)?.0;
    let mut details = Vec::new();
    let mut pass = true;
    for (label, mut solver) in [
        ("Hartree", QuantumSolver::hartree(grid.x, hbar, k)?),
        ("HF", QuantumSolver::hartree_fock(grid.x, hbar, k)?),
    ] {
        let mut rho = rho0.clone();
        let mut prev = quantum_norms(&rho)?;
        let start = prev;
        let mut drift: f64 = 0.0;
        let mut min_eig: f64 = 0.0;
        for step in 1..=steps {
            solver.step(&mut rho, dt)?;
            let now = quantum_norms(&rho)?;
            for i in 0..4 {
                drift = drift.max((now[i] - prev[i]).abs() / start[i]);
            }
            if step % 100 == 0 {
                min_eig = min_eig.min(linalg::eigvalsh(&rho.matrix)?[0]);
            }
            prev = now;
        }
        pass &= drift <= 1e-8 && min_eig >= -1e-8;
        details.push(format!("{label} drift {drift:.1e} min eig {min_eig:.1e}"));
    }

    let vgrid = PhaseSpaceGrid::one_d(128, 8.0, 128, 8.0)?;
    let vk = KernelSpec::power(1, 0.5, 1.0).resolved(&vgrid.x)?;
    let mut f = PhaseSpaceField::from_fn_1d(vgrid, gaussian(0.0, 0.0, 0.25));
    let cell = vgrid.cell_volume();
    let norms = |f: &PhaseSpaceField| {
        [
            f.mass(),
            lp_norm(f.values.iter().copied(), cell, 1.0),
            lp_norm(f.values.iter().copied(), cell, 2.0),
            lp_norm(f.values.iter().copied(), cell, f64::INFINITY),
        ]
    };
    let mut solver = VlasovSolver::new(vgrid, vk)?;
    let start = norms(&f);
    let mut prev = start;
    let mut drift: f64 = 0.0;
    for _ in 0..steps {
        solver.step(&mut f, dt)?;
        let now = norms(&f);
        for i in 0..4 {
            drift = drift.max((now[i] - prev[i]).abs() / start[i]);
        }
        prev = now;
    }
    pass &= drift <= 1e-8;
    details.push(format!("Vlasov drift {drift:.1e}"));
    outcome(pass, format!("{} over {steps} steps", details.join(", ")))
}

fn strang_slope(errors: &[(f64, f64)]) -> Result<f64> {
    Ok(lab::rate_fit(errors)?.slope)
}

fn c4_strang() -> Result<Outcome> {
    let t_final = 0.2;
    let dts = [1e-2, 5e-3, 2.5e-3, 1e-3];
    let dt_ref = 1e-3 / 16.0;
    let hbar = 0.2;
    let grid = PhaseSpaceGrid::one_d(64, 8.0, 64, 8.0)?;
    let k = KernelSpec::power(1, 0.5, 1.0).resolved(&grid.x)?;
    let f0 = PhaseSpaceField::from_fn_1d(grid, gaussian(0.3, 0.5, 0.25));
    let rho0 = psd_repair(&quantize(&f0, hbar)?)?.0;

    let vlasov = |dt: f64| -> Result<PhaseSpaceField> {
        let mut s = VlasovSolver::new(grid, k)?;
        let mut f = f0.clone();
        for _ in 0..(t_final / dt).round() as usize {
            s.step(&mut f, dt)?;
        }
        Ok(f)
    };
    let quantum = |hf: bool, dt: f64| -> Result<DensityOperator> {
        let mut s = if hf { QuantumSolver::hartree_fock(grid.x, hbar, k)? } else { QuantumSolver::hartree(grid.x, hbar, k)? };
        let mut r = rho0.clone();
        for _ in 0..(t_final / dt).round() as usize {
            s.step(&mut r, dt)?;
        }
        Ok(r)
    };

    let fref = vlasov(dt_ref)?;
    let cell = grid.cell_volume();
    let mut ev = Vec::new();
    for &dt in &dts {
        let f = vlasov(dt)?;
        ev.push((dt, lp_norm(f.values.iter().zip(fref.values.iter()).map(|(a, b)| a - b), cell, 1.0)));
    }
    let mut slopes = vec![("Vlasov", strang_slope(&ev)?)];
    for (label, hf) in [("Hartree", false), ("HF", true)] {
        let rref = quantum(hf, dt_ref)?;
        let mut e = Vec::new();
        for &dt in &dts {
            let r = quantum(hf, dt)?;
            e.push((dt, singular_values(&(&r.matrix - &rref.matrix))?.iter().sum()));
        }
        slopes.push((label, strang_slope(&e)?));
    }
    let pass = slopes.iter().all(|(_, s)| (s - 2.0).abs() <= 0.2);
    let detail = slopes.iter().map(|(l, s)| format!("{l} slope {s:.3}")).collect::<Vec<_>>().join(", ");
    outcome(pass, detail)
}

fn hartree_run() -> Result<&'static LadderRun> {
    static RUN: OnceLock<LadderRun> = OnceLock::new();
    if let Some(r) = RUN.get() {
        return Ok(r);
    }
    let run = lab::run_experiment(&config("hartree_vs_vlasov.toml")?)?;
    Ok(RUN.get_or_init(|| run))
}

fn hf_run() -> Result<&'static LadderRun> {
    static RUN: OnceLock<LadderRun> = OnceLock::new();
    if let Some(r) = RUN.get() {
        return Ok(r);
    }
    let run = lab::run_experiment(&config("hartree_vs_hf.toml")?)?;
    Ok(RUN.get_or_init(|| run))
}

fn failures(run: &LadderRun) -> Result<()> {
    if let Some(p) = run.points.iter().find(|p| !p.ok()) {
        return Err(semilab_core::LabError::Config(format!(
            "ladder point ħ={} failed: {}",
            p.hbar,
            p.failure.clone().unwrap_or_default()
        )));
    }
    Ok(())
}

fn series_text(s: &[(f64, f64)]) -> String {
    s.iter().map(|(h, v)| format!("{h}:{v:.3e}")).collect::<Vec<_>>().join(" ")
}

fn c5_trace_rate() -> Result<Outcome> {
    let start = Instant::now();
    let run = hartree_run()?;
    failures(run)?;
    let fit = run.fit("trace_error").expect("trace fit");
    let gates = run.points.iter().filter_map(|p| p.metrics.as_ref()?.self_convergence.as_ref()).filter(|g| g.passed).count();
    outcome(
        (0.75..=1.25).contains(&fit.slope) && fit.r2 >= 0.98,
        format!(
            "slope {:.3} r² {:.4} [{}], grid gate {gates}/{} passed, {:.0}s",
            fit.slope,
            fit.r2,
            series_text(&run.series("trace_error")),
            run.points.len(),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn c6_l2_rate() -> Result<Outcome> {
    let run = hartree_run()?;
    failures(run)?;
    let fit = run.fit("l2_error").expect("l2 fit");
    outcome(
        fit.slope >= 0.6 && fit.r2 >= 0.95,
        format!("slope {:.3} r² {:.4} [{}]", fit.slope, fit.r2, series_text(&run.series("l2_error"))),
    )
}

fn c7_exchange() -> Result<Outcome> {
    let start = Instant::now();
    let run = hf_run()?;
    failures(run)?;
    let fit = run.fit("exchange_size").expect("exchange fit");
    let mut ordered = true;
    let mut rows = Vec::new();
    for p in &run.points {
        let m = p.metrics.as_ref().expect("metrics");
        let (gap, h, f) = (m.trace_error, m.extras["hartree_vlasov_gap"], m.extras["hf_vlasov_gap"]);
        ordered &= gap < h && gap < f;
        rows.push(format!("ħ={}: HF-H {gap:.3e} H-V {h:.3e} HF-V {f:.3e}", p.hbar));
    }
    outcome(
        (fit.slope - 0.5).abs() <= 0.25 && ordered,
        format!(
            "Tr(Xρ) slope {:.3} r² {:.4}; gap ordering {}; {}; {:.0}s",
            fit.slope,
            fit.r2,
            if ordered { "holds" } else { "violated" },
            rows.join("; "),
            start.elapsed().as_secs_f64()
        ),
    )
}

fn quadratic(x: f64) -> f64 {
    0.5 * x * x - 0.3 * x
}

fn quadratic_dv(x: f64) -> f64 {
    x - 0.3
}

fn c8_bt() -> Result<Outcome> {
    let run = hartree_run()?;
    failures(run)?;
    let scaled: Vec<(f64, f64)> = run.series("b_t_trace").into_iter().map(|(h, b)| (h, b / (h * h))).collect();
    let max = scaled.iter().map(|s| s.1).fold(f64::MIN, f64::max);
    let min = scaled.iter().map(|s| s.1).fold(f64::MAX, f64::min);

    let grid = PhaseSpaceGrid::one_d(256, 8.0, 128, 8.0)?;
    let f = PhaseSpaceField::from_fn_1d(grid, gaussian(0.3, 0.5, 0.25));
    let op = quantize(&f, 0.05)?;
    let rho_f: Vec<f64> = spatial_density(&f).to_vec();
    let ext = ForceModel::External(ExternalPotential { v: quadratic, dv: quadratic_dv });
    let zero = b_t_operator(&op, &rho_f, &ext)?.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let slope = run.fit("b_t_trace").map(|f| f.slope).unwrap_or(f64::NAN);
    outcome(
        max / min < 4.0 && zero <= 1e-12,
        format!(
            "‖B_t‖/ħ² max/min {:.3} [{}], ‖B_t‖ slope {slope:.3}; quadratic potential max |B| {zero:.1e}",
            max / min,
            series_text(&scaled)
        ),
    )
}

fn c9_commutator() -> Result<Outcome> {
    let cfg = config("commutator.toml")?;
    let check = lab::run_check("commutator_trace", &cfg)?.remove(0);
    let cov = check.notes["translation_covariance"];
    let zs = cfg.check.z_list.len();
    outcome(
        check.verdict.bounded && check.spread() < 10.0 && cov <= 1e-10,
        format!(
            "ratio max/min {:.3} over {} ħ values × {zs} z points, covariance {cov:.1e}",
            check.spread(),
            cfg.hbar_ladder.len()
        ),
    )
}

fn c10_stability() -> Result<Outcome> {
    let cfg = config("stability.toml")?;
    let checks = lab::run_check("classical_stability", &cfg)?;
    let mut pass = true;
    let mut rows = Vec::new();
    for c in checks.iter().filter(|c| c.name.starts_with("classical_stability_l1")) {
        let eps = c.notes["perturbation"];
        if eps == 0.0 {
            let worst = c.points.iter().fold(0.0f64, |m, p| m.max(p.lhs));
            pass &= worst <= 1e-12;
            rows.push(format!("identical max {worst:.1e}"));
        } else {
            pass &= c.verdict.bounded;
            rows.push(format!("ε={eps}: max ratio {:.3}", c.verdict.max_ratio));
        }
    }
    outcome(pass && rows.len() == 4, rows.join(", "))
}

fn c11_moments() -> Result<Outcome> {
    let grid = PhaseSpaceGrid::one_d(128, 8.0, 128, 8.0)?;
    let k = KernelSpec::power(1, 0.5, 1.0).resolved(&grid.x)?;
    let mut f = PhaseSpaceField::from_fn_1d(grid, gaussian(0.3, 0.5, 0.25));
    let mut solver = VlasovSolver::new(grid, k)?;
    let mut monitor = MomentMonitor { p: 1.0, n: 2.0, entries: vec![moment_monitor_step(&f, k, 1.0, 2.0)?] };
    for step in 1..=100 {
        solver.step(&mut f, 0.01)?;
        if step % 5 == 0 {
            monitor.entries.push(moment_monitor_step(&f, k, 1.0, 2.0)?);
        }
    }
    let env = monitor.envelope();
    let margin = env.growth.iter().zip(&env.fitted).map(|(g, e)| e - g).fold(f64::INFINITY, f64::min);
    outcome(
        env.holds,
        format!(
            "{} checkpoints, final log-growth {:.4e} vs envelope {:.4e}, min margin {margin:.2e}",
            env.t.len(),
            env.growth.last().copied().unwrap_or(0.0),
            env.fitted.last().copied().unwrap_or(0.0)
        ),
    )
}

fn c12_determinism() -> Result<Outcome> {
    let mut synthetic = config("synthetic.toml")?;
    if let Some(s) = synthetic.synthetic.as_mut() {
        s.noise = 0.1;
    }
    let mut check = config("commutator.toml")?;
    check.hbar_ladder.truncate(2);
    let mut same = Vec::new();
    for cfg in [config("smoke.toml")?, synthetic, check] {
        let a = lab::report_json(&lab::run_experiment(&cfg)?)?;
        let b = lab::report_json(&lab::run_experiment(&cfg)?)?;
        same.push((cfg.experiment.to_string(), a == b, a.len()));
    }
    outcome(
        same.iter().all(|s| s.1),
        same.iter().map(|(n, ok, len)| format!("{n}: {} ({len} bytes)", if *ok { "identical" } else { "DIFFERENT" })).collect::<Vec<_>>().join(", "),
    )
}

type Criterion = (u32, &'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "exact identities", c1_identities),
        (2, "operator inequality oracles", c2_oracles),
        (3, "conservation", c3_conservation),
        (4, "Strang order", c4_strang),
        (5, "trace-norm rate", c5_trace_rate),
        (6, "𝓛² rate", c6_l2_rate),
        (7, "exchange scaling", c7_exchange),
        (8, "B_t smallness", c8_bt),
        (9, "commutator bound", c9_commutator),
        (10, "classical stability", c10_stability),
        (11, "moment propagation", c11_moments),
        (12, "determinism", c12_determinism),
    ];
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    let mut broken = 0;
    let mut failed = 0;
    for (id, name, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(Ok(o)) => {
                failed += usize::from(!o.pass);
                println!("criterion {id:>2} {}: {name}: {} ({secs:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            }
            Ok(Err(e)) => {
                broken += 1;
                println!("criterion {id:>2} ERROR: {name}: {e}");
            }
            Err(_) => {
                broken += 1;
                println!("criterion {id:>2} ERROR: {name}: panicked");
            }
        }
    }
    println!("acceptance: {failed} failed, {broken} errored");
    if broken > 0 {
        std::process::exit(1);
    }
}
