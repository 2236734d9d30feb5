use serde::{Deserialize, Serialize};

use super::{BoundCheck, BoundPoint, LadderAxis};
use crate::dynamics::{Convolver, KernelSpec, VlasovSolver};
use crate::error::{LabError, Result};
use crate::phasespace::{lorentz_norm, lp_norm, phase_derivative, spatial_density, PhaseSpaceField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityOptions {
    pub dt: f64,
    pub t_final: f64,
    pub record_every: usize,
    /// Lebesgue exponent of the `L^p` variant; `None` skips it.
    pub lp: Option<f64>,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self { dt: 0.01, t_final: 1.0, record_every: 5, lp: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub l1: BoundCheck,
    pub lp: Option<BoundCheck>,
    /// `‖∇K_δ‖_{L^{b,∞}}` over the sampled convolution support.
    pub c_theory: f64,
    pub delta: f64,
}

/// `x ↦ ‖∂_ξ f(x, ·)‖_{L^p_ξ}`.
fn xi_gradient_profile(f: &PhaseSpaceField, p: f64) -> Vec<f64> {
    let g = phase_derivative(f, &[0, 1]);
    let dxi = f.grid.xi.spacing();
    g.values.rows().into_iter().map(|r| lp_norm(r.iter().copied(), dxi, p)).collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, a| m.max(a.abs()))
}

/// Weak-strong stability of two Vlasov solutions with the same kernel.
///
/// Both states are evolved with the Strang solver. The `L¹` distance is compared with
/// `‖f₁⁰ - f₂⁰‖_{L¹} exp(C ∫_0^t ‖∇_ξ f₂‖_{L^{b',1}_x L¹_ξ})`, where `C` is the ratio
/// `sup_z ∫|∇K(z-y)| g(y) dy / ‖g‖_{L^{b',1}}` realized by `g = ‖∂_ξ f₂⁰‖_{L¹_ξ}` at `t = 0`.
/// The `L^p` variant uses `1/q = 1/p - 1/b` and the same construction with
/// `‖∂_ξ f₂‖_{L^{q,1}_x L^p_ξ}`.
pub fn classical_stability_check(
    f1: &PhaseSpaceField,
    f2: &PhaseSpaceField,
    k: &KernelSpec,
    opts: &StabilityOptions,
) -> Result<StabilityReport> {
    if f1.grid != f2.grid {
        return Err(LabError::GridMismatch("stability pair on different grids".into()));
    }
    if !(opts.dt > 0.0 && opts.t_final > 0.0 && opts.record_every > 0) {
        return Err(LabError::Config(format!("invalid stability options {opts:?}")));
    }
    let grid = f1.grid;
    let gx = grid.x;
    let dx = gx.spacing();
    let cell = grid.cell_volume();
    let kr = k.resolved(&gx)?;
    let flat = kr.is_flat();
    let (b, bp) = if flat { (f64::INFINITY, 1.0) } else { (kr.b(), kr.b_prime()) };
    if !flat && !(b > 1.0) {
        return Err(LabError::Exponent(format!("b={b} must exceed 1")));
    }
    let q = opts.lp.map(|p| {
        if flat {
            p
        } else {
            1.0 / (1.0 / p - 1.0 / b)
        }
    });
    if let (Some(p), Some(q)) = (opts.lp, q) {
        if !(p >= 1.0 && q > 0.0 && q.is_finite()) {
            return Err(LabError::Exponent(format!("L^p variant needs 1 ≤ p < b, got p={p}, b={b}")));
        }
    }

    let grads: Vec<f64> = (-(gx.n_points as isize)..gx.n_points as isize).map(|j| kr.grad_1d(j as f64 * dx)).collect();
    let c_theory = if flat { 0.0 } else { lorentz_norm(&grads, dx, b, f64::INFINITY) };
    let abs_grad = Convolver::new(&gx, 0.0, |s| kr.grad_1d(s).abs());

    let mut s1 = VlasovSolver::new(grid, kr)?;
    let mut s2 = VlasovSolver::new(grid, kr)?;
    let (mut a, mut c) = (f1.clone(), f2.clone());
    let diff = |a: &PhaseSpaceField, c: &PhaseSpaceField, p: f64| {
        lp_norm(a.values.iter().zip(c.values.iter()).map(|(u, v)| u - v), cell, p)
    };
    let g_l1 = |f: &PhaseSpaceField| -> (f64, Vec<f64>) {
        let g = xi_gradient_profile(f, 1.0);
        (if flat { 0.0 } else { lorentz_norm(&g, dx, bp, 1.0) }, g)
    };
    let g_lp = |f: &PhaseSpaceField, p: f64, q: f64| -> (f64, Vec<f64>) {
        let h = xi_gradient_profile(f, p);
        (lorentz_norm(&h, dx, q, 1.0), h)
    };

    let d0 = diff(&a, &c, 1.0);
    let (gn0, g0) = g_l1(&c);
    let c_fit = if gn0 > 0.0 { sup(&abs_grad.apply(&g0)) / gn0 } else { 0.0 };

    let lp_setup = match (opts.lp, q) {
        (Some(p), Some(q)) => {
            let (hn0, h0) = g_lp(&c, p, q);
            let conv = Convolver::new(&gx, 0.0, |s| kr.grad_1d(s).abs().powf(p));
            let hp: Vec<f64> = h0.iter().map(|v| v.powf(p)).collect();
            let s_p = sup(&conv.apply(&hp)).powf(1.0 / p);
            let rho_l1 = lp_norm(
                spatial_density(&a).iter().zip(spatial_density(&c).iter()).map(|(u, v)| u - v),
                dx,
                1.0,
            );
            let dp0 = diff(&a, &c, p);
            let cp = if hn0 > 0.0 && dp0 > 0.0 { rho_l1 * s_p / (dp0 * hn0) } else { 0.0 };
            Some((p, q, cp, dp0, hn0))
        }
        _ => None,
    };

    let steps = (opts.t_final / opts.dt).round() as usize;
    let mut t = 0.0;
    let (mut int1, mut prev1) = (0.0, gn0);
    let (mut intp, mut prevp) = (0.0, lp_setup.map(|s| s.4).unwrap_or(0.0));
    let mut pts1 = vec![BoundPoint::new(0.0, d0, d0)];
    let mut ptsp = lp_setup.map(|s| vec![BoundPoint::new(0.0, s.3, s.3)]).unwrap_or_default();
    let mut theory_holds = true;
    for step in 1..=steps {
        s1.step(&mut a, opts.dt)?;
        s2.step(&mut c, opts.dt)?;
        t += opts.dt;
        let (gn, _) = g_l1(&c);
        int1 += 0.5 * opts.dt * (gn + prev1);
        prev1 = gn;
        if let Some((p, q, _, _, _)) = lp_setup {
            let (hn, _) = g_lp(&c, p, q);
            intp += 0.5 * opts.dt * (hn + prevp);
            prevp = hn;
        }
        if step % opts.record_every == 0 || step == steps {
            let dt1 = diff(&a, &c, 1.0);
            pts1.push(BoundPoint::new(t, dt1, d0 * (c_fit * int1).exp()));
            theory_holds &= dt1 <= d0 * (c_theory * int1).exp() * (1.0 + 1e-8);
            if let Some((p, _, cp, dp0, _)) = lp_setup {
                ptsp.push(BoundPoint::new(t, diff(&a, &c, p), dp0 * (cp * intp).exp()));
            }
        }
    }
    let l1 = BoundCheck::enveloped("classical_stability_l1", LadderAxis::Time, pts1, c_fit, 1e-8)
        .with_note("c_theory", c_theory)
        .with_note("theory_envelope_holds", if theory_holds { 1.0 } else { 0.0 })
        .with_note("b", b)
        .with_note("b_prime", bp);
    let lp = lp_setup.map(|(p, q, cp, _, _)| {
        BoundCheck::enveloped("classical_stability_lp", LadderAxis::Time, ptsp, cp, 1e-8)
            .with_note("p", p)
            .with_note("q", q)
    });
    Ok(StabilityReport { l1, lp, c_theory, delta: kr.delta.unwrap_or(0.0) })
}
