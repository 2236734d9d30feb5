use ndarray::Axis;

use super::conv::MeanField;
use super::kernel::KernelSpec;
use crate::error::{LabError, Result};
use crate::phasespace::{spatial_density, PhaseSpaceField, PhaseSpaceGrid};
use crate::spectral::{shift_multiplier, Plan};
use crate::C64;

/// An imposed potential `V(x)` with its derivative.
#[derive(Clone, Copy)]
pub struct ExternalPotential {
    pub v: fn(f64) -> f64,
    pub dv: fn(f64) -> f64,
}

/// Source of the force field acting on the state.
#[derive(Clone, Copy)]
pub enum ForceModel {
    MeanField(KernelSpec),
    External(ExternalPotential),
}

impl From<KernelSpec> for ForceModel {
    fn from(k: KernelSpec) -> Self {
        ForceModel::MeanField(k)
    }
}

/// Resolved force source on a concrete spatial grid.
#[derive(Clone)]
pub(crate) enum Field {
    Mean(MeanField),
    External(ExternalPotential, Vec<f64>),
}

impl Field {
    pub(crate) fn new(model: &ForceModel, grid: &crate::phasespace::Grid1D) -> Result<Self> {
        Ok(match model {
            ForceModel::MeanField(k) => Field::Mean(MeanField::new(k, grid)?),
            ForceModel::External(p) => Field::External(*p, grid.points()),
        })
    }

    pub(crate) fn potential(&self, rho: &[f64]) -> Vec<f64> {
        match self {
            Field::Mean(m) => m.potential(rho),
            Field::External(p, x) => x.iter().map(|&v| (p.v)(v)).collect(),
        }
    }

    pub(crate) fn force(&self, rho: &[f64]) -> Vec<f64> {
        match self {
            Field::Mean(m) => m.force(rho),
            Field::External(p, x) => x.iter().map(|&v| -(p.dv)(v)).collect(),
        }
    }

    pub(crate) fn kernel(&self) -> Option<&KernelSpec> {
        match self {
            Field::Mean(m) => Some(&m.kernel),
            Field::External(..) => None,
        }
    }
}

/// Strang-split spectral semi-Lagrangian solver for `∂_t f + ξ ∂_x f + E ∂_ξ f = 0`.
pub struct VlasovSolver {
    grid: PhaseSpaceGrid,
    field: Field,
    plan_x: Plan,
    plan_xi: Plan,
    kx: Vec<f64>,
    kxi: Vec<f64>,
    xis: Vec<f64>,
    half_shift: Option<(f64, Vec<Vec<C64>>)>,
}

impl VlasovSolver {
    pub fn new(grid: PhaseSpaceGrid, model: impl Into<ForceModel>) -> Result<Self> {
        if grid.dim != 1 {
            return Err(LabError::Dimension(format!("Vlasov solver is one-dimensional, got d={}", grid.dim)));
        }
        Ok(Self {
            field: Field::new(&model.into(), &grid.x)?,
            plan_x: Plan::new(grid.x.n_points),
            plan_xi: Plan::new(grid.xi.n_points),
            kx: grid.x.wavenumbers(),
            kxi: grid.xi.wavenumbers(),
            xis: grid.xi.points(),
            grid,
            half_shift: None,
        })
    }

    pub fn kernel(&self) -> Option<&KernelSpec> {
        self.field.kernel()
    }

    /// Force `E(x)` generated by the state.
    pub fn force(&self, f: &PhaseSpaceField) -> Vec<f64> {
        self.field.force(spatial_density(f).as_slice().expect("contiguous"))
    }

    pub fn potential(&self, f: &PhaseSpaceField) -> Vec<f64> {
        self.field.potential(spatial_density(f).as_slice().expect("contiguous"))
    }

    fn advect_x(&mut self, f: &mut PhaseSpaceField, tau: f64) -> Result<()> {
        let vmax = 0.5 * self.grid.xi.length;
        if (vmax * tau).abs() >= 0.5 * self.grid.x.length {
            return Err(LabError::Aliasing(format!(
                "free-streaming shift {:.3} exceeds half the spatial box",
                vmax * tau
            )));
        }
        let stale = self.half_shift.as_ref().is_none_or(|(t, _)| *t != tau);
        if stale {
            let mults = self.xis.iter().map(|&xi| shift_multiplier(&self.kx, xi * tau)).collect();
            self.half_shift = Some((tau, mults));
        }
        let mults = &self.half_shift.as_ref().expect("cached").1;
        let mut buf: Vec<C64> = Vec::new();
        for (k, mut col) in f.values.axis_iter_mut(Axis(1)).enumerate() {
            buf.clear();
            buf.extend(col.iter().map(|&v| C64::new(v, 0.0)));
            self.plan_x.apply(&mut buf, &mults[k]);
            col.iter_mut().zip(&buf).for_each(|(d, s)| *d = s.re);
        }
        Ok(())
    }

    fn advect_xi(&self, f: &mut PhaseSpaceField, e: &[f64], dt: f64) -> Result<()> {
        let emax = e.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if emax * dt >= 0.5 * self.grid.xi.length {
            return Err(LabError::Aliasing(format!(
                "force shift {:.3} exceeds half the momentum box",
                emax * dt
            )));
        }
        let mut buf: Vec<C64> = Vec::new();
        for (i, mut row) in f.values.axis_iter_mut(Axis(0)).enumerate() {
            let mult = shift_multiplier(&self.kxi, e[i] * dt);
            buf.clear();
            buf.extend(row.iter().map(|&v| C64::new(v, 0.0)));
            self.plan_xi.apply(&mut buf, &mult);
            row.iter_mut().zip(&buf).for_each(|(d, s)| *d = s.re);
        }
        Ok(())
    }

    /// One Strang step: half free streaming, full acceleration, half free streaming.
    ///
    /// The acceleration substep leaves the spatial density unchanged, so the force
    /// evaluated after the first half step is exact for it.
    pub fn step(&mut self, f: &mut PhaseSpaceField, dt: f64) -> Result<()> {
        if f.grid != self.grid {
            return Err(LabError::GridMismatch("field grid differs from solver grid".into()));
        }
        self.advect_x(f, 0.5 * dt)?;
        let e = self.force(f);
        self.advect_xi(f, &e, dt)?;
        self.advect_x(f, 0.5 * dt)?;
        f.time += dt;
        Ok(())
    }
}

/// Single Strang step with a freshly built solver.
pub fn vlasov_step(f: &PhaseSpaceField, model: impl Into<ForceModel>, dt: f64) -> Result<PhaseSpaceField> {
    let mut solver = VlasovSolver::new(f.grid, model)?;
    let mut out = f.clone();
    solver.step(&mut out, dt)?;
    Ok(out)
}
