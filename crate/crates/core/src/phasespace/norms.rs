use ndarray::{ArrayD, Axis};

use super::field::{PhaseSpaceField, WeightSpec};
use crate::error::{LabError, Result};
use crate::spectral;
use crate::C64;

/// Discrete `L^p` norm of samples with uniform cell measure.
pub fn lp_norm(values: impl IntoIterator<Item = f64>, cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        values.into_iter().map(f64::abs).sum::<f64>() * cell
    } else if p == 2.0 {
        (values.into_iter().map(|v| v * v).sum::<f64>() * cell).sqrt()
    } else {
        (values.into_iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}

/// `‖f‖_{L^p(R^{2d})}` for each requested `p`.
pub fn phase_norms(f: &PhaseSpaceField, p_list: &[f64]) -> Vec<(f64, f64)> {
    let cell = f.grid.cell_volume();
    p_list.iter().map(|&p| (p, lp_norm(f.values.iter().copied(), cell, p))).collect()
}

/// Spectrum of the field over all `2d` phase-space axes.
fn full_spectrum(f: &PhaseSpaceField) -> ArrayD<C64> {
    let mut spec = f.full_view().mapv(|v| C64::new(v, 0.0));
    for ax in 0..spec.ndim() {
        let plan = spectral::Plan::new(spec.len_of(Axis(ax)));
        let mut buf = Vec::new();
        for mut lane in spec.lanes_mut(Axis(ax)) {
            buf.clear();
            buf.extend(lane.iter().copied());
            plan.forward(&mut buf);
            lane.iter_mut().zip(&buf).for_each(|(d, s)| *d = *s);
        }
    }
    spec
}

/// Errors when more than 1% of the L² mass sits above 2/3 of Nyquist.
pub fn check_tail(f: &PhaseSpaceField) -> Result<()> {
    let frac = spectral::tail_fraction(&full_spectrum(f), 2.0 / 3.0);
    if frac > 0.01 {
        Err(LabError::Resolution(format!(
            "{:.3}% of the L² mass lies above 2/3 Nyquist",
            100.0 * frac
        )))
    } else {
        Ok(())
    }
}

/// Mixed spectral derivative `∂^α f`, with `α` indexed over `(x_1..x_d, ξ_1..ξ_d)`.
pub fn phase_derivative(f: &PhaseSpaceField, alpha: &[u32]) -> PhaseSpaceField {
    let g = f.grid;
    let mut arr = f.full_view().mapv(|v| C64::new(v, 0.0));
    for (ax, &order) in alpha.iter().enumerate() {
        if order == 0 {
            continue;
        }
        let axis_grid = if ax < g.dim { g.x } else { g.xi };
        let mult = spectral::derivative_multiplier(&axis_grid.wavenumbers(), order);
        spectral::apply_along_axis(&mut arr.view_mut(), ax, &mult);
    }
    PhaseSpaceField::from_full(g, arr.mapv(|z| z.re), f.time)
}

fn multi_indices(dims: usize, order: u32) -> Vec<Vec<u32>> {
    if dims == 1 {
        return vec![vec![order]];
    }
    let mut out = Vec::new();
    for first in 0..=order {
        for mut rest in multi_indices(dims - 1, order - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Pointwise Frobenius norm of the order-`σ` derivative tensor.
pub fn derivative_tensor_magnitude(f: &PhaseSpaceField, sigma: u32) -> ndarray::Array2<f64> {
    if sigma == 0 {
        return f.values.mapv(f64::abs);
    }
    let dims = 2 * f.grid.dim;
    let mut acc = ndarray::Array2::<f64>::zeros(f.values.dim());
    for alpha in multi_indices(dims, sigma) {
        let mult = factorial(sigma) / alpha.iter().map(|&a| factorial(a)).product::<f64>();
        let d = phase_derivative(f, &alpha);
        acc.zip_mut_with(&d.values, |a, v| *a += mult * v * v);
    }
    acc.mapv_into(f64::sqrt)
}

fn bracket_weight(f: &PhaseSpaceField, k: f64) -> ndarray::Array2<f64> {
    let g = f.grid;
    let x2: Vec<f64> = (0..g.nx_total()).map(|i| g.x_coords(i).iter().map(|v| v * v).sum()).collect();
    let k2: Vec<f64> = (0..g.nxi_total()).map(|j| g.xi_coords(j).iter().map(|v| v * v).sum()).collect();
    ndarray::Array2::from_shape_fn(f.values.dim(), |(i, j)| (1.0 + x2[i] + k2[j]).powf(0.5 * k))
}

/// `‖⟨z⟩^k f‖_{L^p} + ‖⟨z⟩^k ∇^σ f‖_{L^p}`; for `σ = 0` only the first term.
pub fn weighted_sobolev_norm(f: &PhaseSpaceField, w: &WeightSpec) -> Result<f64> {
    if w.sobolev_order > 8 {
        return Err(LabError::Resolution(format!("Sobolev order {} exceeds 8", w.sobolev_order)));
    }
    let cell = f.grid.cell_volume();
    let weight = bracket_weight(f, w.weight_power);
    let base = lp_norm(f.values.iter().zip(weight.iter()).map(|(v, m)| v * m), cell, w.lebesgue_p);
    if w.sobolev_order == 0 {
        return Ok(base);
    }
    check_tail(f)?;
    let mag = derivative_tensor_magnitude(f, w.sobolev_order);
    let top = lp_norm(mag.iter().zip(weight.iter()).map(|(v, m)| v * m), cell, w.lebesgue_p);
    Ok(base + top)
}

/// Decreasing rearrangement of `|g|`.
fn rearrangement(g: &[f64]) -> Vec<f64> {
    let mut s: Vec<f64> = g.iter().map(|v| v.abs()).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Lorentz quasi-norm `‖g‖_{L^{p,q}}` of a spatial array over cells of measure `cell`.
///
/// The rearrangement is a step function, so the defining integral
/// `(q/p) ∫ (t^{1/p} g*(t))^q dt/t` is evaluated exactly on each step.
pub fn lorentz_norm(g: &[f64], cell: f64, p: f64, q: f64) -> f64 {
    let s = rearrangement(g);
    if q.is_infinite() {
        return s
            .iter()
            .enumerate()
            .map(|(j, v)| ((j + 1) as f64 * cell).powf(1.0 / p) * v)
            .fold(0.0, f64::max);
    }
    if p.is_infinite() {
        return if s.first().copied().unwrap_or(0.0) == 0.0 { 0.0 } else { f64::INFINITY };
    }
    let e = q / p;
    let mut acc = 0.0;
    let mut prev = 0.0f64;
    for (j, v) in s.iter().enumerate() {
        if *v == 0.0 {
            break;
        }
        let t = ((j + 1) as f64 * cell).powf(e);
        acc += (t - prev) * v.powf(q);
        prev = t;
    }
    acc.powf(1.0 / q)
}
