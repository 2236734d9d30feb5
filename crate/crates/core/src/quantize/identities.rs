//! Weyl multiplication identities: `op(g)|p|^n`, `op(g)|x|^n` and the mixed product
//! rewritten as sums of Weyl quantizations of derivatives of `g`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::operator::{momentum_power, right_multiply, DensityOperator};
use super::weyl::{weyl_quantize, MidpointSource};
use crate::error::{LabError, Result};
use crate::phasespace::{phase_derivative, PhaseSpaceField};
use crate::C64;

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

fn multinomial_total(d: u32, half: u32) -> f64 {
    f64::from(d).powi(half as i32)
}

/// Sum of the Leibniz coefficients of `Δ^{n/2}(fg)` in dimension `d`: `(4d)^{n/2}`.
pub fn laplacian_leibniz_sum(d: u32, n: u32) -> f64 {
    // Σ over |γ| = n/2 of the multinomial weights, times Σ_k C(n, k) = 2^n per monomial
    multinomial_total(d, n / 2) * 2f64.powi(n as i32)
}

/// Sum of `b_{α,β}` (binomial coefficients times `2^{-|β|}`) for `|x|^n` in dimension `d`.
pub fn position_coefficient_sum(d: u32, n: u32) -> f64 {
    multinomial_total(d, n / 2) * 1.5f64.powi(n as i32)
}

/// The cruder prefactor `(4d)^n` carried by the weighted 𝓛² bounds.
pub fn momentum_prefactor(d: u32, n: u32) -> f64 {
    (4.0 * f64::from(d)).powi(n as i32)
}

pub fn position_prefactor(d: u32, n: u32) -> f64 {
    (2.25 * f64::from(d)).powf(f64::from(n) / 2.0)
}

fn mul_x(f: &PhaseSpaceField, power: u32) -> PhaseSpaceField {
    let g = f.grid;
    let mut out = f.clone();
    for i in 0..g.nx_total() {
        let x = g.x.point(i).powi(power as i32);
        out.values.row_mut(i).mapv_inplace(|v| v * x);
    }
    out
}

fn mul_xi(f: &PhaseSpaceField, power: u32) -> PhaseSpaceField {
    let g = f.grid;
    let mut out = f.clone();
    for k in 0..g.nxi_total() {
        let xi = g.xi.point(k).powi(power as i32);
        out.values.column_mut(k).mapv_inplace(|v| v * xi);
    }
    out
}

fn quantize(f: &PhaseSpaceField, hbar: f64) -> Result<Array2<C64>> {
    Ok(weyl_quantize(f, hbar, MidpointSource::SpectralInterpolated)?.matrix)
}

/// Symbol of `op(g)|p|^n` as a complex combination of real fields: `Σ c_k g_k`.
fn momentum_terms(g: &PhaseSpaceField, hbar: f64, n: u32) -> Vec<(C64, PhaseSpaceField)> {
    (0..=n)
        .map(|k| {
            let c = C64::new(0.0, 0.5 * hbar).powu(k) * binom(n, k);
            (c, mul_xi(&phase_derivative(g, &[k, 0]), n - k))
        })
        .collect()
}

fn position_terms(g: &PhaseSpaceField, hbar: f64, n: u32) -> Vec<(C64, PhaseSpaceField)> {
    (0..=n)
        .map(|k| {
            let c = C64::new(0.0, -0.5 * hbar).powu(k) * binom(n, k);
            (c, mul_x(&phase_derivative(g, &[0, k]), n - k))
        })
        .collect()
}

fn assemble(terms: &[(C64, PhaseSpaceField)], hbar: f64) -> Result<Array2<C64>> {
    let mut acc: Option<Array2<C64>> = None;
    for (c, f) in terms {
        if *c == C64::new(0.0, 0.0) {
            continue;
        }
        let q = quantize(f, hbar)?.mapv(|z| z * c);
        acc = Some(match acc {
            None => q,
            Some(a) => a + q,
        });
    }
    let n = terms[0].1.grid.x.n_points;
    Ok(acc.unwrap_or_else(|| Array2::zeros((n, n))))
}

/// `op(g)|p|^n` assembled from the identity's right-hand side.
pub fn weyl_times_momentum(g: &PhaseSpaceField, hbar: f64, n: u32) -> Result<Array2<C64>> {
    assemble(&momentum_terms(g, hbar, n), hbar)
}

/// `op(g)|x|^n` assembled from the identity's right-hand side.
pub fn weyl_times_position(g: &PhaseSpaceField, hbar: f64, n: u32) -> Result<Array2<C64>> {
    assemble(&position_terms(g, hbar, n), hbar)
}

/// `op(g)|p|^{n1}|x|^n` from the double expansion.
pub fn weyl_times_momentum_position(g: &PhaseSpaceField, hbar: f64, n1: u32, n: u32) -> Result<Array2<C64>> {
    let mut terms = Vec::new();
    for (c1, g1) in momentum_terms(g, hbar, n1) {
        for (c2, g2) in position_terms(&g1, hbar, n) {
            terms.push((c1 * c2, g2));
        }
    }
    assemble(&terms, hbar)
}

/// Relative 𝓛² residuals of the three identities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub n: u32,
    pub n1: u32,
    pub momentum: f64,
    pub position: f64,
    pub mixed: f64,
    pub momentum_coefficient_sum: f64,
    pub position_coefficient_sum: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        self.momentum.max(self.position).max(self.mixed)
    }
}

fn rel_residual(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let diff: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let scale: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Builds both sides of each identity by independent routes (operator products versus
/// quantized derivative sums) and reports relative Frobenius residuals.
pub fn weyl_multiply_identities_check(f: &PhaseSpaceField, hbar: f64, n: u32, n1: u32) -> Result<IdentityResiduals> {
    if n % 2 == 1 || n1 % 2 == 1 {
        return Err(LabError::Exponent(format!("powers must be even, got n={n}, n1={n1}")));
    }
    crate::phasespace::check_tail(f)?;
    let rho: DensityOperator = weyl_quantize(f, hbar, MidpointSource::SpectralInterpolated)?;
    let x = rho.grid_x.points();
    let xpow = |m: &Array2<C64>, p: u32| -> Array2<C64> {
        Array2::from_shape_fn(m.dim(), |(i, j)| m[[i, j]] * x[j].powi(p as i32))
    };
    let pn = momentum_power(&rho.grid_x, hbar, f64::from(n));
    let pn1 = momentum_power(&rho.grid_x, hbar, f64::from(n1));

    let lhs_p = right_multiply(&rho.matrix, &pn);
    let lhs_x = xpow(&rho.matrix, n);
    let lhs_px = xpow(&right_multiply(&rho.matrix, &pn1), n);

    Ok(IdentityResiduals {
        n,
        n1,
        momentum: rel_residual(&lhs_p, &weyl_times_momentum(f, hbar, n)?),
        position: rel_residual(&lhs_x, &weyl_times_position(f, hbar, n)?),
        mixed: rel_residual(&lhs_px, &weyl_times_momentum_position(f, hbar, n1, n)?),
        momentum_coefficient_sum: laplacian_leibniz_sum(1, n),
        position_coefficient_sum: position_coefficient_sum(1, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_sums() {
        assert_eq!(laplacian_leibniz_sum(1, 2), 4.0);
        assert_eq!(laplacian_leibniz_sum(3, 2), 12.0);
        assert!(laplacian_leibniz_sum(1, 2) <= momentum_prefactor(1, 2));
        assert_eq!(momentum_prefactor(1, 2), 16.0);
        assert!((position_coefficient_sum(1, 2) - 2.25).abs() < 1e-15);
        assert!((position_coefficient_sum(2, 4) - position_prefactor(2, 4)).abs() < 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2), 6.0);
        assert_eq!(binom(2, 0), 1.0);
    }
}
