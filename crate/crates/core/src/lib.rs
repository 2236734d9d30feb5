//! Numerical laboratory for mean-field dynamics in the semiclassical regime.
//!
//! Classical states are sampled phase-space fields evolved by a spectral
//! semi-Lagrangian Vlasov solver; quantum states are dense density matrices evolved
//! by split-step Hartree and Hartree-Fock propagators. Weyl quantization and the
//! Wigner transform connect the two, and semiclassical Schatten norms measure how
//! far apart they drift as ℏ → 0.

pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod io;
pub mod lab;
pub mod linalg;
pub mod phasespace;
pub mod quantize;
pub mod schatten;
pub mod spectral;

pub use num_complex::Complex64 as C64;

pub use dynamics::{EvolutionConfig, KernelSpec, MomentMonitor};
pub use error::{LabError, Result};
pub use estimates::BoundCheck;
pub use lab::{ExperimentConfig, LadderRun};
pub use phasespace::{Grid1D, PhaseSpaceField, PhaseSpaceGrid, WeightSpec};
pub use quantize::DensityOperator;
pub use schatten::SchattenReport;
