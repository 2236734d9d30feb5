use ndarray::Array2;

use super::conv::Convolver;
use super::vlasov::ForceModel;
use crate::error::{LabError, Result};
use crate::quantize::DensityOperator;
use crate::C64;

/// Error operator with kernel
/// `[V(x) - V(y) - W((x+y)/2)·(x-y)]·ρ_f(x,y)`, `V = K∗ρ_f`, `W = ∇K∗ρ_f`.
///
/// Midpoint values of `W` come from a second convolution sampled at half-cell offsets.
pub fn b_t_operator(f_op: &DensityOperator, rho_f: &[f64], force: &ForceModel) -> Result<Array2<C64>> {
    let grid = f_op.grid_x;
    let n = grid.n_points;
    if rho_f.len() != n {
        return Err(LabError::GridMismatch(format!("density of length {} on {n} points", rho_f.len())));
    }
    let x = grid.points();
    let dx = grid.spacing();
    let (v, w_mid): (Vec<f64>, Vec<f64>) = match force {
        ForceModel::MeanField(k) => {
            let k = k.resolved(&grid)?;
            if k.is_zero() {
                (vec![0.0; n], vec![0.0; 2 * n])
            } else {
                let v = Convolver::new(&grid, 0.0, |s| k.value(s.abs())).apply(rho_f);
                let w0 = Convolver::new(&grid, 0.0, |s| k.grad_1d(s)).apply(rho_f);
                let w1 = Convolver::new(&grid, 0.5 * dx, |s| k.grad_1d(s)).apply(rho_f);
                let mut w = vec![0.0; 2 * n];
                for i in 0..n {
                    w[2 * i] = w0[i];
                    w[2 * i + 1] = w1[i];
                }
                (v, w)
            }
        }
        ForceModel::External(p) => {
            let v = x.iter().map(|&xi| (p.v)(xi)).collect();
            let w = (0..2 * n).map(|m| (p.dv)(x[0] + 0.5 * m as f64 * dx)).collect();
            (v, w)
        }
    };
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        let bracket = v[i] - v[j] - w_mid[i + j] * (x[i] - x[j]);
        f_op.matrix[[i, j]] * bracket
    }))
}
