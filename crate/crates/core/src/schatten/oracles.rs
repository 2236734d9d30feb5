//! Appendix-style operator inequalities, each returning `(lhs, rhs)`.

use ndarray::Array2;

use super::{raw_norm, singular_values};
use crate::error::{LabError, Result};
use crate::linalg;
use crate::C64;

fn norm(a: &Array2<C64>, p: f64) -> Result<f64> {
    Ok(raw_norm(&singular_values(a)?, p))
}

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

fn require_psd(a: &Array2<C64>) -> Result<()> {
    linalg::require_hermitian(a, 1e-10)?;
    let vals = linalg::eigvalsh(a)?;
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if vals[0] < -1e-10 * scale.max(1e-300) {
        return Err(LabError::NotPsd(vals[0]));
    }
    Ok(())
}

/// `(‖AB‖_p, ‖A‖_q ‖B‖_r)` with `1/p = 1/q + 1/r`.
pub fn holder_oracle(a: &Array2<C64>, b: &Array2<C64>, p: f64, q: f64, r: f64) -> Result<(f64, f64)> {
    if p < 1.0 || q < 1.0 || r < 1.0 || (inv(p) - inv(q) - inv(r)).abs() > 1e-12 {
        return Err(LabError::Exponent(format!("1/{p} ≠ 1/{q} + 1/{r}")));
    }
    Ok((norm(&linalg::matmul(a, b), p)?, norm(a, q)? * norm(b, r)?))
}

/// Araki-Lieb-Thirring: `(‖AB‖_{qr}^q, ‖A^q B^q‖_r)` for PSD `A, B`, `q ≥ 1`.
pub fn alt_oracle(a: &Array2<C64>, b: &Array2<C64>, q: f64, r: f64) -> Result<(f64, f64)> {
    if q < 1.0 || r * q < 1.0 || r <= 0.0 {
        return Err(LabError::Exponent(format!("need q ≥ 1 and qr ≥ 1, got q={q}, r={r}")));
    }
    require_psd(a)?;
    require_psd(b)?;
    let lhs = norm(&linalg::matmul(a, b), q * r)?.powf(q);
    let aq = linalg::psd_power(a, q)?;
    let bq = linalg::psd_power(b, q)?;
    let rhs = if r >= 1.0 {
        norm(&linalg::matmul(&aq, &bq), r)?
    } else {
        raw_norm(&singular_values(&linalg::matmul(&aq, &bq))?, r)
    };
    Ok((lhs, rhs))
}

/// Mixing inequality `(‖B^r A B‖_p, ‖A B^{r+1}‖_p)` for PSD `A, B`.
pub fn mixing_oracle(a: &Array2<C64>, b: &Array2<C64>, p: f64, r: f64) -> Result<(f64, f64)> {
    if p < 1.0 || r < 0.0 {
        return Err(LabError::Exponent(format!("need p ≥ 1 and r ≥ 0, got p={p}, r={r}")));
    }
    require_psd(a)?;
    require_psd(b)?;
    let br = linalg::psd_power(b, r)?;
    let br1 = linalg::psd_power(b, r + 1.0)?;
    let lhs = norm(&linalg::matmul(&linalg::matmul(&br, a), b), p)?;
    let rhs = norm(&linalg::matmul(a, &br1), p)?;
    Ok((lhs, rhs))
}
