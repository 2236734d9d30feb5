use ndarray::Array2;
use rand::Rng;

use super::{BoundCheck, BoundPoint, LadderAxis};
use crate::dynamics::{kernel_matrix, KernelSpec};
use crate::error::Result;
use crate::lab::rate_fit;
use crate::linalg;
use crate::phasespace::Grid1D;
use crate::quantize::{left_multiply, momentum_power, DensityOperator};
use crate::schatten::random;
use crate::C64;

/// `Tr(Xρ) = ∬ K(x-y)|ρ(x,y)|² dx dy`.
pub fn exchange_energy(rho: &DensityOperator, k: &KernelSpec) -> Result<f64> {
    if k.is_zero() {
        return Ok(0.0);
    }
    let km = kernel_matrix(k, &rho.grid_x)?;
    Ok(rho.matrix.iter().zip(km.iter()).map(|(m, kv)| kv * m.norm_sqr()).sum())
}

fn hs2(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// `‖|p|^{s/2} ρ‖²_{𝓛²}` in one dimension.
fn momentum_weighted_l2(rho: &DensityOperator, s: f64) -> f64 {
    let w = momentum_power(&rho.grid_x, rho.hbar, 0.5 * s);
    hs2(&left_multiply(&rho.matrix, &w)) / rho.h()
}

/// `‖|x|^{s/2} ρ‖²_{𝓛²}` in one dimension.
fn position_weighted_l2(rho: &DensityOperator, s: f64) -> f64 {
    let x = rho.grid_x.points();
    let m = Array2::from_shape_fn(rho.matrix.dim(), |(i, j)| rho.matrix[[i, j]] * x[i].abs().powf(0.5 * s));
    hs2(&m) / rho.h()
}

/// `(‖|p|^{a/2}ρ‖²_{𝓛²}, ‖ρ‖_{𝓛^∞} Tr(|p|^a ρ))`.
fn controlling_sides(rho: &DensityOperator, a: f64) -> Result<(f64, f64)> {
    let lhs = momentum_weighted_l2(rho, a);
    let op = linalg::eigvalsh(&rho.matrix)?.iter().fold(0.0f64, |m, v| m.max(v.abs())) / rho.h();
    let tr = linalg::trace(&left_multiply(&rho.matrix, &momentum_power(&rho.grid_x, rho.hbar, a))).re;
    Ok((lhs, op * tr))
}

/// Largest `lhs - rhs` of the weighted `𝓛²` control inequality over random density matrices
/// of the given sizes; nonpositive (up to rounding) when the inequality holds.
pub fn controlling_l2m_check(rng: &mut impl Rng, count: usize, sizes: &[usize], hbar: f64, a: f64) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..count {
        let n = sizes[i % sizes.len()];
        let grid = Grid1D::new(n, 1.0)?;
        let rho = DensityOperator::new(grid, hbar, random::density_matrix(rng, n))?;
        let (l, r) = controlling_sides(&rho, a)?;
        worst = worst.max((l - r) / r.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Exchange energy against `h^s ‖|p|^{a/2}ρ‖²_{𝓛²}` (`s = d - a`, `a ≥ 0`), or against
/// `h^d ‖|x|^{|a|/2}ρ‖²_{𝓛²}` for `a < 0`. Notes carry the fitted ℏ-slope of `Tr(Xρ)`,
/// the target exponent and the worst control-inequality residual on the same states.
pub fn exchange_bound_check(states: &[DensityOperator], k: &KernelSpec, factor: f64) -> Result<BoundCheck> {
    k.validate()?;
    let d = k.d as f64;
    let target = if k.a >= 0.0 { d - k.a } else { d };
    let mut points = Vec::new();
    let mut control = f64::NEG_INFINITY;
    for rho in states {
        let lhs = exchange_energy(rho, k)?;
        let rhs = if k.a >= 0.0 {
            rho.h().powf(target) * momentum_weighted_l2(rho, k.a)
        } else {
            rho.h().powf(target) * position_weighted_l2(rho, k.a.abs())
        };
        if k.a >= 0.0 {
            let (l, r) = controlling_sides(rho, k.a)?;
            control = control.max((l - r) / r.max(f64::MIN_POSITIVE));
        }
        points.push(BoundPoint::new(rho.hbar, lhs, rhs));
    }
    let mut check = BoundCheck::graded("exchange_energy", LadderAxis::Hbar, points, factor).with_note("target_s", target);
    let fit_points: Vec<(f64, f64)> = check.points.iter().map(|p| (2.0 * std::f64::consts::PI * p.param, p.lhs)).collect();
    if let Ok(fit) = rate_fit(&fit_points) {
        check = check.with_note("slope", fit.slope).with_note("r2", fit.r2);
    }
    if control.is_finite() {
        check = check.with_note("control_residual", control);
    }
    Ok(check)
}
