//! Grids, sampled phase-space fields, spatial densities and classical norms.

mod field;
mod grid;
mod norms;

pub use field::{spatial_density, PhaseSpaceField, WeightSpec};
pub use grid::{Grid1D, PhaseSpaceGrid};
pub use norms::{
    check_tail, derivative_tensor_magnitude, lorentz_norm, lp_norm, phase_derivative, phase_norms,
    weighted_sobolev_norm,
};
