use ndarray::{Array1, Array2};

use super::operator::DensityOperator;
use crate::error::{LabError, Result};
use crate::linalg;
use crate::spectral::{self, Plan};
use crate::C64;

fn kernel_tail(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let plan = Plan::new(n);
    let mut spec = m.clone();
    let mut buf = Vec::new();
    for mut col in spec.columns_mut() {
        buf.clear();
        buf.extend(col.iter().copied());
        plan.forward(&mut buf);
        col.iter_mut().zip(&buf).for_each(|(d, s)| *d = *s);
    }
    for mut row in spec.rows_mut() {
        buf.clear();
        buf.extend(row.iter().copied());
        plan.forward(&mut buf);
        row.iter_mut().zip(&buf).for_each(|(d, s)| *d = *s);
    }
    spectral::tail_fraction(&spec.into_dyn(), 2.0 / 3.0)
}

/// `∇_x ρ = [∂, ρ]`, kernel `(∂_x + ∂_y)ρ(x,y)` by spectral differentiation.
pub fn quantum_grad_x(rho: &DensityOperator) -> Result<Array2<C64>> {
    let tail = kernel_tail(&rho.matrix);
    if tail > 0.01 {
        return Err(LabError::Aliasing(format!(
            "{:.3}% of the kernel's L² mass lies above 2/3 Nyquist",
            100.0 * tail
        )));
    }
    let k = rho.grid_x.wavenumbers();
    let d1 = spectral::derivative_multiplier(&k, 1);
    let plan = Plan::new(rho.n());
    let mut scratch = Vec::new();
    let mut dx = rho.matrix.clone();
    for col in dx.columns_mut() {
        plan.apply_lane(col, &d1, &mut scratch);
    }
    let mut dy = rho.matrix.clone();
    for row in dy.rows_mut() {
        plan.apply_lane(row, &d1, &mut scratch);
    }
    Ok(dx + dy)
}

/// `∇_ξ ρ = [x/(iℏ), ρ]`, kernel `(x - y)ρ(x,y)/(iℏ)`.
pub fn quantum_grad_xi(rho: &DensityOperator) -> Array2<C64> {
    let x = rho.grid_x.points();
    let scale = C64::new(0.0, -1.0 / rho.hbar);
    Array2::from_shape_fn(rho.matrix.dim(), |(i, j)| rho.matrix[[i, j]] * (x[i] - x[j]) * scale)
}

/// `Σ_j |λ_j| |ψ_j(x_i)|² / Δx` for a Hermitian matrix.
pub fn diag_abs(a: &Array2<C64>, dx: f64) -> Result<Array1<f64>> {
    linalg::require_hermitian(a, 1e-8)?;
    let (vals, vecs) = linalg::eigh(a)?;
    let n = a.nrows();
    let mut out = Array1::zeros(n);
    for (j, l) in vals.iter().enumerate() {
        let w = l.abs() / dx;
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            out[i] += w * vecs[[i, j]].norm_sqr();
        }
    }
    Ok(out)
}
