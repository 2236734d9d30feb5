//! Discrete Weyl quantization, Wigner transform, quantum gradients and the Weyl
//! multiplication identities.

mod gradients;
mod identities;
mod operator;
mod weyl;

pub use gradients::{diag_abs, quantum_grad_x, quantum_grad_xi};
pub use identities::{
    laplacian_leibniz_sum, momentum_prefactor, position_coefficient_sum, position_prefactor,
    weyl_multiply_identities_check, weyl_times_momentum, weyl_times_momentum_position, weyl_times_position,
    IdentityResiduals,
};
pub use operator::{left_multiply, momentum_power, psd_repair, right_multiply, DensityOperator};
pub use weyl::{check_resolvable, phase_per_step, weyl_quantize, wigner_transform, MidpointSource};

use crate::error::Result;
use crate::phasespace::{derivative_tensor_magnitude, PhaseSpaceField};

/// Both sides of `‖op_ℏ(g)‖_{𝓛^∞} ≤ C ‖g‖_{W^{1,∞}}` in one dimension.
///
/// The left side is the semiclassical operator norm `h⁻¹‖op_ℏ(g)‖`, which tends to
/// `sup|g|` for slowly varying symbols; the right side is `sup|g| + sup|∇g|`.
pub fn operator_norm_vs_symbol(f: &PhaseSpaceField, hbar: f64) -> Result<(f64, f64)> {
    let rho = weyl_quantize(f, hbar, MidpointSource::SpectralInterpolated)?;
    let h = rho.h();
    let op = crate::linalg::singular_values(&rho.matrix)?.first().copied().unwrap_or(0.0);
    let sup = f.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let grad = derivative_tensor_magnitude(f, 1).iter().fold(0.0f64, |m, v| m.max(*v));
    Ok((op / h, sup + grad))
}
