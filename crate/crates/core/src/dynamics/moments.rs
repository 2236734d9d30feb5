use serde::{Deserialize, Serialize};

use super::vlasov::{Field, ForceModel};
use crate::error::Result;
use crate::phasespace::{check_tail, lp_norm, phase_derivative, spatial_density, PhaseSpaceField};
use crate::spectral::{derivative_multiplier, Plan};
use crate::C64;

/// One checkpoint of the weighted-derivative monitors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub t: f64,
    pub m_x: f64,
    pub m_xi: f64,
    pub m_2: f64,
    pub e_sup: f64,
    pub grad_e_sup: f64,
    pub rho_l1: f64,
    pub rho_linf: f64,
    pub grad_rho_sup: f64,
    /// `J = C_t (1 + ln(1 + ‖∇ρ_f‖_∞))` with `C_t = ‖ρ_f‖_{L¹} + ‖ρ_f‖_{L^∞}`.
    pub j: f64,
    /// `n(‖E‖_∞ + 1) + 1 + ‖∇E‖_∞`, the rate in the differential inequality before `J` enters.
    pub lambda: f64,
}

/// Time series of monitor entries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentMonitor {
    pub p: f64,
    pub n: f64,
    pub entries: Vec<MomentEntry>,
}

/// Weight `m_n = 1 + |ξ|^{np} + |x|^{np}`; `n = 0` selects the unweighted functional.
fn weight(x: f64, xi: f64, n: f64, p: f64) -> f64 {
    if n == 0.0 {
        1.0
    } else {
        1.0 + xi.abs().powf(n * p) + x.abs().powf(n * p)
    }
}

fn weighted_integral(g: &PhaseSpaceField, n: f64, p: f64) -> f64 {
    let grid = g.grid;
    let x = grid.x.points();
    let xi = grid.xi.points();
    let mut acc = 0.0;
    for ((i, k), v) in g.values.indexed_iter() {
        acc += v.abs().powf(p) * weight(x[i], xi[k], n, p);
    }
    acc * grid.cell_volume()
}

fn spectral_dx(v: &[f64], len: f64) -> Vec<f64> {
    let plan = Plan::new(v.len());
    let mult = derivative_multiplier(&crate::spectral::wavenumbers(v.len(), len), 1);
    let mut buf: Vec<C64> = v.iter().map(|&r| C64::new(r, 0.0)).collect();
    plan.apply(&mut buf, &mult);
    buf.into_iter().map(|z| z.re).collect()
}

pub(crate) fn monitor_entry(f: &PhaseSpaceField, field: &Field, p: f64, n: f64) -> Result<MomentEntry> {
    check_tail(f)?;
    let grid = f.grid;
    let fx = phase_derivative(f, &[1, 0]);
    let fxi = phase_derivative(f, &[0, 1]);
    let fxx = phase_derivative(f, &[2, 0]);
    let fxxi = phase_derivative(f, &[1, 1]);
    let fxixi = phase_derivative(f, &[0, 2]);
    let rho = spatial_density(f);
    let rho = rho.as_slice().expect("contiguous");
    let e = field.force(rho);
    let grad_e = match field {
        Field::Mean(m) => m.force(&spectral_dx(rho, grid.x.length)),
        Field::External(pot, x) => {
            let h = 1e-5;
            x.iter().map(|&xv| -((pot.dv)(xv + h) - (pot.dv)(xv - h)) / (2.0 * h)).collect()
        }
    };
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let dx = grid.x.spacing();
    let rho_l1 = lp_norm(rho.iter().copied(), dx, 1.0);
    let rho_linf = sup(rho);
    let grad_rho_sup = sup(&spectral_dx(rho, grid.x.length));
    let e_sup = sup(&e);
    let grad_e_sup = sup(&grad_e);
    Ok(MomentEntry {
        t: f.time,
        m_x: weighted_integral(&fx, n, p),
        m_xi: weighted_integral(&fxi, n, p),
        m_2: weighted_integral(&fxx, n, p) + weighted_integral(&fxxi, n, p) + weighted_integral(&fxixi, n, p),
        e_sup,
        grad_e_sup,
        rho_l1,
        rho_linf,
        grad_rho_sup,
        j: (rho_l1 + rho_linf) * (1.0 + (1.0 + grad_rho_sup).ln()),
        lambda: n * (e_sup + 1.0) + 1.0 + grad_e_sup,
    })
}

/// Monitor values for one state.
pub fn moment_monitor_step(f: &PhaseSpaceField, force: impl Into<ForceModel>, p: f64, n: f64) -> Result<MomentEntry> {
    let field = Field::new(&force.into(), &f.grid.x)?;
    monitor_entry(f, &field, p, n)
}

/// Grönwall comparison for `log(M_x + M_ξ)` along a recorded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEnvelope {
    pub t: Vec<f64>,
    /// `log M(t) - log M(0)`.
    pub growth: Vec<f64>,
    /// `p(1+n) C_J ∫_0^t J`, with `C_J` fitted so that `(1+n) C_J J(0) = λ(0)`.
    pub fitted: Vec<f64>,
    /// `p ∫_0^t λ`.
    pub direct: Vec<f64>,
    pub fitted_constant: f64,
    pub holds: bool,
}

fn trapezoid(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; t.len()];
    for i in 1..t.len() {
        out[i] = out[i - 1] + 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
    }
    out
}

impl MomentMonitor {
    pub fn envelope(&self) -> MomentEnvelope {
        let e = &self.entries;
        let t: Vec<f64> = e.iter().map(|m| m.t).collect();
        let m0 = e.first().map(|m| m.m_x + m.m_xi).unwrap_or(0.0);
        let growth: Vec<f64> = e.iter().map(|m| ((m.m_x + m.m_xi) / m0).ln()).collect();
        let c = e.first().map(|m| m.lambda / ((1.0 + self.n) * m.j)).unwrap_or(0.0);
        let jint = trapezoid(&t, &e.iter().map(|m| m.j).collect::<Vec<_>>());
        let lint = trapezoid(&t, &e.iter().map(|m| m.lambda).collect::<Vec<_>>());
        let fitted: Vec<f64> = jint.iter().map(|v| self.p * (1.0 + self.n) * c * v).collect();
        let direct: Vec<f64> = lint.iter().map(|v| self.p * v).collect();
        let holds = growth.iter().zip(&fitted).all(|(g, f)| *g <= *f + 1e-12);
        MomentEnvelope { t, growth, fitted, direct, fitted_constant: c, holds }
    }
}
