//! Shared fixtures for the criterion benchmarks.

use semilab_core::phasespace::{PhaseSpaceField, PhaseSpaceGrid};
use semilab_core::quantize::{psd_repair, weyl_quantize, DensityOperator, MidpointSource};

/// Normalized Gaussian on an `n × n_xi` grid of side 8.
pub fn gaussian_field(n: usize, n_xi: usize) -> PhaseSpaceField {
    let grid = PhaseSpaceGrid::one_d(n, 8.0, n_xi, 8.0).expect("power-of-two grid");
    PhaseSpaceField::from_fn_1d(grid, |x, k| {
        (-((x - 0.3).powi(2) + (k - 0.5).powi(2)) / 0.5).exp() / (0.5 * std::f64::consts::PI)
    })
}

/// Quantized state of [`gaussian_field`] at `ħ`.
pub fn gaussian_state(n: usize, hbar: f64) -> DensityOperator {
    let f = gaussian_field(n, 128);
    psd_repair(&weyl_quantize(&f, hbar, MidpointSource::SpectralInterpolated).expect("resolvable"))
        .expect("positive")
        .0
}
