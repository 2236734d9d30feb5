use ndarray::Array2;

use super::commutator::abs_momentum_trace;
use super::{BoundCheck, BoundPoint, LadderAxis};
use crate::error::{LabError, Result};
use crate::linalg;
use crate::phasespace::{lp_norm, phase_derivative, weighted_sobolev_norm, PhaseSpaceField, WeightSpec};
use crate::quantize::{
    diag_abs, momentum_power, momentum_prefactor, quantum_grad_xi, right_multiply, weyl_quantize, weyl_times_momentum,
    DensityOperator, MidpointSource,
};
use crate::C64;

fn l2_weighted(f: &PhaseSpaceField, w: impl Fn(f64, f64) -> f64) -> f64 {
    let x = f.grid.x.points();
    let xi = f.grid.xi.points();
    let s: f64 = f.values.indexed_iter().map(|((i, k), v)| (v * w(x[i], xi[k])).powi(2)).sum();
    (s * f.grid.cell_volume()).sqrt()
}

fn d(f: &PhaseSpaceField, nx: u32, nxi: u32) -> PhaseSpaceField {
    if nx == 0 && nxi == 0 {
        f.clone()
    } else {
        phase_derivative(f, &[nx, nxi])
    }
}

fn bracket(v: f64, k: f64) -> f64 {
    (1.0 + v * v).powf(0.5 * k)
}

fn sup(f: &PhaseSpaceField) -> f64 {
    f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn l2_op(m: &Array2<C64>, h: f64) -> f64 {
    (m.iter().map(|z| z.norm_sqr()).sum::<f64>() / h).sqrt()
}

fn scale_columns(m: &Array2<C64>, w: &[f64]) -> Array2<C64> {
    Array2::from_shape_fn(m.dim(), |(i, j)| m[[i, j]] * w[j])
}

/// Weighted Weyl bounds over a ladder of `(ℏ, symbol)` pairs, one symbol sampled per ℏ
/// on a grid that resolves it.
///
/// Returns, in order: the `𝓛²` bounds for `op(g)|p|^n`, `op(g)|x|^n` and
/// `op(g)|p|^{n1}|x|^n`, then (for `n ≥ 2`) the weighted trace bound for
/// `Tr(|op(g)||p|^{n1})` and the `L^p` bound for `diag|∇_ξ op(g)|`, `p = 1 + n1`.
/// The first check carries the largest relative gap between the direct product and the
/// identity expansion as the note `route_difference`.
pub fn weighted_weyl_bound_check(ladder: &[(f64, PhaseSpaceField)], n: u32, n1: u32, factor: f64) -> Result<Vec<BoundCheck>> {
    if n % 2 != 0 || n1 % 2 != 0 {
        return Err(LabError::Exponent(format!("weights n={n}, n1={n1} must be even")));
    }
    let (nf, n1f) = (n as f64, n1 as f64);
    let mut pts: [Vec<BoundPoint>; 5] = Default::default();
    let mut route = 0.0f64;
    for (hbar, g) in ladder {
        let hbar = *hbar;
        let rho = weyl_quantize(g, hbar, MidpointSource::SpectralInterpolated)?;
        let h = rho.h();
        let x = rho.grid_x.points();
        let xn: Vec<f64> = x.iter().map(|v| v.abs().powf(nf)).collect();

        let mp = right_multiply(&rho.matrix, &momentum_power(&rho.grid_x, hbar, nf));
        let lhs = l2_op(&mp, h);
        let alt = l2_op(&weyl_times_momentum(g, hbar, n)?, h);
        if lhs > 0.0 {
            route = route.max((lhs - alt).abs() / lhs);
        }
        let rhs = momentum_prefactor(1, n)
            * (l2_weighted(g, |_, k| k.abs().powf(nf)) + (0.5 * hbar).powf(nf) * l2_weighted(&d(g, n, 0), |_, _| 1.0));
        pts[0].push(BoundPoint::new(hbar, lhs, rhs));

        let lhs = l2_op(&scale_columns(&rho.matrix, &xn), h);
        let rhs = (9.0 / 4.0f64).powf(nf)
            * (l2_weighted(g, |y, _| y.abs().powf(nf)) + hbar.powf(nf) * l2_weighted(&d(g, 0, n), |_, _| 1.0));
        pts[1].push(BoundPoint::new(hbar, lhs, rhs));

        let mixed = scale_columns(&right_multiply(&rho.matrix, &momentum_power(&rho.grid_x, hbar, n1f)), &xn);
        let lhs = l2_op(&mixed, h);
        let rhs = l2_weighted(g, |y, k| 1.0 + y.abs().powf(nf) * k.abs().powf(n1f))
            + hbar.powf(n1f) * l2_weighted(&d(g, n1, 0), |y, _| y.abs().powf(nf))
            + hbar.powf(nf) * l2_weighted(&d(g, 0, n), |_, k| k.abs().powf(n1f))
            + hbar.powf(nf + n1f) * l2_weighted(&d(g, n1, n), |_, _| 1.0);
        pts[2].push(BoundPoint::new(hbar, lhs, rhs));

        if n >= 2 {
            let kk = nf + n1f;
            let (vals, vecs) = linalg::eigh(&rho.matrix)?;
            let lhs = abs_momentum_trace(&vals, &vecs, &rho, n1f);
            let rhs = l2_weighted(g, |y, k| bracket(k, kk) * bracket(y, nf))
                + hbar.powf(kk) * l2_weighted(&d(g, n + n1, 0), |y, _| bracket(y, nf))
                + hbar.powf(nf) * l2_weighted(&d(g, 0, n), |_, k| bracket(k, kk))
                + hbar.powf(kk + nf) * l2_weighted(&d(g, n + n1, n), |_, _| 1.0);
            pts[3].push(BoundPoint::new(hbar, lhs, rhs));

            pts[4].push(gradient_point(g, &rho, n, n1)?);
        }
    }
    let names = ["weyl_momentum_l2", "weyl_position_l2", "weyl_mixed_l2", "weyl_moment_trace", "weyl_gradient_diag"];
    let mut out = Vec::new();
    for (name, p) in names.iter().zip(pts) {
        if !p.is_empty() {
            out.push(BoundCheck::graded(*name, LadderAxis::Hbar, p, factor));
        }
    }
    if let Some(first) = out.first_mut() {
        first.notes.insert("route_difference".into(), route);
        first.notes.insert("prefactor".into(), momentum_prefactor(1, n));
    }
    Ok(out)
}

/// `‖diag|∇_ξ op(g)|‖_{L^p}` against `‖∇_ξ g‖_{W^{1,∞}} + ‖∇_ξ g‖_{H^σ_σ}`, `σ = 2n + n1`.
fn gradient_point(g: &PhaseSpaceField, rho: &DensityOperator, n: u32, n1: u32) -> Result<BoundPoint> {
    let p = 1.0 + n1 as f64;
    let diag = diag_abs(&quantum_grad_xi(rho), rho.grid_x.spacing())?;
    let lhs = lp_norm(diag.iter().copied(), rho.grid_x.spacing(), p);
    let gxi = d(g, 0, 1);
    let w1 = sup(&gxi) + sup(&d(&gxi, 1, 0)) + sup(&d(&gxi, 0, 1));
    let sigma = 2 * n + n1;
    let hs = weighted_sobolev_norm(&gxi, &WeightSpec { sobolev_order: sigma, weight_power: sigma as f64, lebesgue_p: 2.0 })?;
    Ok(BoundPoint::new(rho.hbar, lhs, w1 + hs))
}
