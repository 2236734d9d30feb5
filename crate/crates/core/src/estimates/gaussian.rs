use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::quadrature::integrate;
use super::{BoundCheck, BoundPoint, LadderAxis};
use crate::dynamics::KernelSpec;
use crate::error::{LabError, Result};

/// `ω_a = 2π^{a/2}/Γ(a/2)`, with `ω_0 = 1`.
pub fn omega(a: f64) -> f64 {
    if a == 0.0 {
        1.0
    } else {
        2.0 * PI.powf(0.5 * a) / gamma(0.5 * a)
    }
}

const U_RANGE: (f64, f64) = (-400.0, 400.0);

/// Reconstructs the unsigned kernel profile at `|x|² = r2` from its Gaussian superposition.
///
/// `a > 0`: `|x|^{-a} = (ω_a/2) ∫ t^{a/2-1} e^{-π|x|²t} dt`;
/// `a ∈ (-2, 0)`: the same with `e^{-π|x|²t} - 1`;
/// logarithm: `ln|x| = -(1/2) ∫ t^{-1} (e^{-π|x|²t} - e^{-πt}) dt`.
/// The integral runs over `t = e^u`.
pub fn gaussian_decomposition(k: &KernelSpec, r2: f64) -> Result<f64> {
    let a = k.a;
    let (lo, hi) = U_RANGE;
    if k.log {
        let q = integrate(
            |u: f64| {
                let t = u.exp();
                (-PI * t).exp() * (-PI * (r2 - 1.0) * t).exp_m1()
            },
            lo,
            hi,
            64,
            1e-12,
            1e-15,
        )?;
        return Ok(-0.5 * q.value);
    }
    if a > 0.0 {
        let q = integrate(|u: f64| (0.5 * a * u).exp() * (-PI * r2 * u.exp()).exp(), lo, hi, 64, 1e-12, 0.0)?;
        Ok(0.5 * omega(a) * q.value)
    } else if a > -2.0 && a < 0.0 {
        let q = integrate(|u: f64| (0.5 * a * u).exp() * (-PI * r2 * u.exp()).exp_m1(), lo, hi, 64, 1e-12, 0.0)?;
        Ok(0.5 * omega(a) * q.value)
    } else {
        Err(LabError::Exponent(format!("no Gaussian decomposition for a={a}")))
    }
}

/// Compares the Gaussian superposition with the closed-form profile `(|x|²+δ²)^{-a/2}`
/// (or `½ln(|x|²+δ²)`) at each radius; the verdict requires relative agreement to 1e-6.
pub fn gaussian_decomposition_check(k: &KernelSpec, radii: &[f64]) -> Result<BoundCheck> {
    if k.is_flat() {
        return Err(LabError::Exponent("flat kernels have no Gaussian decomposition".into()));
    }
    let d = k.d as f64;
    if !k.log && !(k.a > -2.0 && k.a < d && k.a != 0.0) {
        return Err(LabError::Exponent(format!("a={} outside (-2, {d})", k.a)));
    }
    let delta = k.delta.unwrap_or(0.0);
    let mut points = Vec::with_capacity(radii.len());
    let mut worst = 0.0f64;
    for &r in radii {
        let r2 = r * r + delta * delta;
        let quad = gaussian_decomposition(k, r2)?;
        let exact = if k.log { 0.5 * r2.ln() } else { r2.powf(-0.5 * k.a) };
        let err = if exact == 0.0 { quad.abs() } else { (quad - exact).abs() / exact.abs() };
        worst = worst.max(err);
        points.push(BoundPoint { param: r, z: None, lhs: quad, rhs_shape: exact, ratio: if exact == 0.0 { 1.0 + quad } else { quad / exact } });
    }
    Ok(BoundCheck::enveloped("gaussian_decomposition", LadderAxis::Radius, points, omega(k.a), 1e-6)
        .with_note("max_relative_residual", worst)
        .with_note("omega_a", omega(k.a)))
}
