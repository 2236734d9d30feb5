use super::config::{ExperimentConfig, CHECK_NAMES};
use crate::error::{LabError, Result};
use crate::estimates::{
    classical_stability_check, commutator_covariance, commutator_lp_check, commutator_trace_check,
    exchange_bound_check, gaussian_decomposition_check, kinetic_interpolation_check, weighted_weyl_bound_check,
    BoundCheck, StabilityOptions,
};
use crate::phasespace::PhaseSpaceField;
use crate::quantize::{psd_repair, weyl_quantize, DensityOperator, MidpointSource};
use crate::KernelSpec;

/// PSD-repaired quantized initial data at every ladder point.
pub fn ladder_states(cfg: &ExperimentConfig) -> Result<Vec<DensityOperator>> {
    cfg.hbar_ladder
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let f = initial_field(cfg, i, h)?;
            Ok(psd_repair(&weyl_quantize(&f, h, MidpointSource::SpectralInterpolated)?)?.0)
        })
        .collect()
}

fn initial_field(cfg: &ExperimentConfig, index: usize, hbar: f64) -> Result<PhaseSpaceField> {
    Ok(cfg.initial_data.sample(cfg.grid.grid(cfg.grid.n_for(index, hbar))?))
}

/// Kernel resolved on the coarsest ladder grid.
fn coarse_kernel(cfg: &ExperimentConfig) -> Result<KernelSpec> {
    let g = cfg.grid.grid(cfg.grid.n_for(0, cfg.hbar_ladder[0]))?;
    cfg.kernel.spec(&g.x).resolved(&g.x)
}

/// Runs one named bound check on the states described by `cfg`.
pub fn run_check(name: &str, cfg: &ExperimentConfig) -> Result<Vec<BoundCheck>> {
    let c = &cfg.check;
    match name {
        "gaussian_decomposition" => {
            let g = cfg.grid.grid(cfg.grid.n_for(0, cfg.hbar_ladder[0]))?;
            let mut k = cfg.kernel.spec(&g.x);
            k.delta = Some(k.delta.unwrap_or(0.0));
            Ok(vec![gaussian_decomposition_check(&k, &c.radii)?])
        }
        "commutator_trace" => {
            let states = ladder_states(cfg)?;
            let k = coarse_kernel(cfg)?;
            let mut check = commutator_trace_check(&states, &k, &c.z_list, c.eps, c.factor)?;
            let mut cov: f64 = 0.0;
            for rho in &states {
                for &z in &c.z_list {
                    cov = cov.max(commutator_covariance(rho, &k, z, 3)?);
                }
            }
            check.notes.insert("translation_covariance".into(), cov);
            Ok(vec![check])
        }
        "commutator_lp" => {
            let states = ladder_states(cfg)?;
            let k = coarse_kernel(cfg)?;
            Ok(vec![commutator_lp_check(&states, &k, &c.z_list, c.p, c.n_weight, c.eps, c.factor)?])
        }
        "kinetic_interpolation" => Ok(vec![kinetic_interpolation_check(&ladder_states(cfg)?, c.n1, c.factor)?]),
        "weighted_weyl" => {
            let ladder = cfg
                .hbar_ladder
                .iter()
                .enumerate()
                .map(|(i, &h)| Ok((h, initial_field(cfg, i, h)?)))
                .collect::<Result<Vec<_>>>()?;
            weighted_weyl_bound_check(&ladder, c.n, c.n1, c.factor)
        }
        "exchange_bound" => {
            let states = ladder_states(cfg)?;
            Ok(vec![exchange_bound_check(&states, &coarse_kernel(cfg)?, c.factor)?])
        }
        "classical_stability" => {
            let f2 = initial_field(cfg, 0, cfg.hbar_ladder[0])?;
            let k = coarse_kernel(cfg)?;
            let opts = StabilityOptions {
                dt: cfg.evolution.dt,
                t_final: cfg.evolution.t_final,
                record_every: cfg.evolution.record_every,
                lp: c.lp,
            };
            let mut out = Vec::new();
            let mut magnitudes = vec![0.0];
            magnitudes.extend(c.perturbations.iter().copied());
            for eps in magnitudes {
                let f1 = cfg.initial_data.shifted(eps).sample(f2.grid);
                let r = classical_stability_check(&f1, &f2, &k, &opts)?;
                let label = |n: &str| if eps == 0.0 { format!("{n}_identical") } else { format!("{n}_eps_{eps}") };
                out.push(BoundCheck { name: label(&r.l1.name), ..r.l1.with_note("perturbation", eps) });
                if let Some(lp) = r.lp {
                    out.push(BoundCheck { name: label(&lp.name), ..lp.with_note("perturbation", eps) });
                }
            }
            Ok(out)
        }
        other => Err(LabError::Config(format!("unknown check '{other}', expected one of {CHECK_NAMES:?}"))),
    }
}
