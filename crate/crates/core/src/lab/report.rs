use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::LadderRun;
use crate::error::{LabError, Result};

pub const REPORT_FILE: &str = "report.json";
pub const TIMING_FILE: &str = "timing.json";
pub const CHECKPOINT_CSV: &str = "checkpoints.csv";
pub const CHECKPOINT_DAT: &str = "checkpoints.dat";
pub const RATES_DAT: &str = "rates.dat";
pub const CHECKS_CSV: &str = "checks.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Timing {
    total: f64,
    points: Vec<f64>,
}

/// Report JSON; contains no wallclock fields.
pub fn report_json(run: &LadderRun) -> Result<String> {
    let mut s = serde_json::to_string_pretty(run)?;
    s.push('\n');
    Ok(s)
}

fn lp_labels(run: &LadderRun) -> Vec<String> {
    run.config.norms_to_track.iter().map(|p| p.label()).collect()
}

/// Per-checkpoint CSV: `hbar,n_x,t,trace_error,l2_error[,lp_<p>...],density_l1`.
pub fn checkpoint_csv(run: &LadderRun) -> String {
    let labels = lp_labels(run);
    let mut s = String::from("hbar,n_x,t,trace_error,l2_error");
    for l in &labels {
        let _ = write!(s, ",lp_{l}");
    }
    s.push_str(",density_l1\n");
    for p in &run.points {
        let Some(m) = &p.metrics else { continue };
        for c in &m.checkpoints {
            let _ = write!(s, "{},{},{},{},{}", p.hbar, p.n_x, c.t, c.trace_error, c.l2_error);
            for l in &labels {
                let _ = write!(s, ",{}", c.lp_errors.get(l).copied().unwrap_or(f64::NAN));
            }
            let _ = writeln!(s, ",{}", c.density_l1);
        }
    }
    s
}

/// Gnuplot columns `t hbar metric...`, one block per ladder point.
pub fn checkpoint_dat(run: &LadderRun) -> String {
    let labels = lp_labels(run);
    let mut s = String::from("# t hbar trace_error l2_error");
    for l in &labels {
        let _ = write!(s, " lp_{l}");
    }
    s.push_str(" density_l1\n");
    for p in &run.points {
        let Some(m) = &p.metrics else { continue };
        for c in &m.checkpoints {
            let _ = write!(s, "{} {} {} {}", c.t, p.hbar, c.trace_error, c.l2_error);
            for l in &labels {
                let _ = write!(s, " {}", c.lp_errors.get(l).copied().unwrap_or(f64::NAN));
            }
            let _ = writeln!(s, " {}", c.density_l1);
        }
        s.push_str("\n\n");
    }
    s
}

/// Gnuplot columns `hbar metric...` at the final time.
pub fn rates_dat(run: &LadderRun) -> String {
    let names: Vec<&String> = run.fits.keys().collect();
    let mut s = String::from("# hbar");
    for n in &names {
        let _ = write!(s, " {n}");
    }
    s.push('\n');
    for p in run.points.iter().filter(|p| p.ok()) {
        let _ = write!(s, "{}", p.hbar);
        for n in &names {
            let v = run.series(n).into_iter().find(|(h, _)| *h == p.hbar).map(|(_, v)| v).unwrap_or(f64::NAN);
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    s
}

pub fn checks_csv(run: &LadderRun) -> String {
    let mut s = String::from("name,axis,param,z,lhs,rhs_shape,ratio\n");
    for c in &run.checks {
        let axis = serde_json::to_value(c.axis).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        for p in &c.points {
            let z = p.z.map(|z| z.to_string()).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{},{},{},{}", c.name, axis, p.param, z, p.lhs, p.rhs_shape, p.ratio);
        }
    }
    s
}

/// Writes the JSON report, timings, CSV and gnuplot data into `dir`.
pub fn write_report(run: &LadderRun, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(REPORT_FILE), report_json(run)?)?;
    let timing = Timing { total: run.wallclock, points: run.points.iter().map(|p| p.wallclock).collect() };
    fs::write(dir.join(TIMING_FILE), serde_json::to_string_pretty(&timing)? + "\n")?;
    if !run.points.is_empty() {
        fs::write(dir.join(CHECKPOINT_CSV), checkpoint_csv(run))?;
        fs::write(dir.join(CHECKPOINT_DAT), checkpoint_dat(run))?;
        fs::write(dir.join(RATES_DAT), rates_dat(run))?;
    }
    if !run.checks.is_empty() {
        fs::write(dir.join(CHECKS_CSV), checks_csv(run))?;
    }
    Ok(())
}

/// Reads a report directory back, merging wallclock times when present.
pub fn read_report(dir: &Path) -> Result<LadderRun> {
    let text = fs::read_to_string(dir.join(REPORT_FILE))?;
    let mut run: LadderRun = serde_json::from_str(&text)?;
    if run.schema != super::run::SCHEMA {
        return Err(LabError::Format(format!("unsupported report schema {}", run.schema)));
    }
    if let Ok(t) = fs::read_to_string(dir.join(TIMING_FILE)) {
        let timing: Timing = serde_json::from_str(&t)?;
        run.wallclock = timing.total;
        for (p, w) in run.points.iter_mut().zip(timing.points) {
            p.wallclock = w;
        }
    }
    Ok(run)
}

/// Human-readable summary of a run.
pub fn summary(run: &LadderRun) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment {}", run.experiment);
    for p in &run.points {
        match (&p.metrics, &p.failure) {
            (Some(m), _) => {
                let gate = m
                    .self_convergence
                    .as_ref()
                    .map(|g| format!(" gate {} (Δ={:.3e}, budget {:.3e})", if g.passed { "ok" } else { "FAIL" }, g.delta, g.budget))
                    .unwrap_or_default();
                let _ = writeln!(
                    s,
                    "  ħ={:<8} n={:<5} trace {:.4e}  𝓛² {:.4e}{gate}",
                    p.hbar, p.n_x, m.trace_error, m.l2_error
                );
            }
            (None, Some(e)) => {
                let _ = writeln!(s, "  ħ={:<8} n={:<5} failed: {e}", p.hbar, p.n_x);
            }
            (None, None) => {}
        }
    }
    for (name, f) in &run.fits {
        match (&f.fit, &f.refused) {
            (Some(fit), _) => {
                let band = match (f.band, f.within_band) {
                    (Some(b), Some(w)) => format!(" band {}±{} {}", b.target, b.band, if w { "in" } else { "out" }),
                    _ => String::new(),
                };
                let _ = writeln!(
                    s,
                    "  fit {name}: slope {:.4} r² {:.4}{band}{}",
                    fit.slope,
                    fit.r2,
                    if f.valid { "" } else { " (not grid-validated)" }
                );
            }
            (None, Some(e)) => {
                let _ = writeln!(s, "  fit {name}: refused ({e})");
            }
            _ => {}
        }
    }
    for c in &run.checks {
        let _ = writeln!(
            s,
            "  check {}: {} max/min ratio {:.4e}/{:.4e} fitted C {:.4e}",
            c.name,
            if c.verdict.bounded { "bounded" } else { "UNBOUNDED" },
            c.verdict.max_ratio,
            c.verdict.min_ratio,
            c.fitted_c
        );
    }
    s
}
