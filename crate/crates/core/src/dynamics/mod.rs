//! Interaction kernels, the Vlasov solver, Hartree and Hartree-Fock propagators,
//! the exchange and error operators, and weighted-derivative monitors.

mod bt;
mod conv;
mod hartree;
mod kernel;
mod moments;
mod vlasov;

pub use bt::b_t_operator;
pub use conv::{mean_field_force, mean_field_potential, Convolver, MeanField};
pub use hartree::{exchange_operator, hartree_fock_step, hartree_step, kernel_matrix, QuantumModel, QuantumSolver};
pub use kernel::{kernel_eval, KernelSpec};
pub use moments::{moment_monitor_step, MomentEntry, MomentEnvelope, MomentMonitor};
pub use vlasov::{vlasov_step, ExternalPotential, ForceModel, VlasovSolver};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Time-stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    pub hbar: f64,
    pub record_every: usize,
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.t_final > 0.0 && self.hbar > 0.0 && self.record_every > 0) {
            return Err(LabError::Config(format!("invalid evolution parameters {self:?}")));
        }
        Ok(())
    }

    /// Number of steps, rounding `t_final/dt` to the nearest integer.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    /// `dt·max|ξ|/Δx`, reported for diagnostics.
    pub fn cfl(&self, grid: &crate::phasespace::PhaseSpaceGrid) -> f64 {
        self.dt * 0.5 * grid.xi.length / grid.x.spacing()
    }
}
