use ndarray::{Array1, Array2, ArrayD, ArrayViewD, IxDyn};
use serde::{Deserialize, Serialize};

use super::grid::PhaseSpaceGrid;
use crate::error::{LabError, Result};

/// Real samples of `f(x, ξ)`; rows are flattened spatial indices, columns flattened momenta.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceField {
    pub grid: PhaseSpaceGrid,
    pub values: Array2<f64>,
    pub time: f64,
}

/// Parameters of `W^{σ,p}_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub sobolev_order: u32,
    pub weight_power: f64,
    pub lebesgue_p: f64,
}

impl PhaseSpaceField {
    pub fn new(grid: PhaseSpaceGrid, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (grid.nx_total(), grid.nxi_total()) {
            return Err(LabError::GridMismatch(format!(
                "values {:?} do not match grid ({}, {})",
                values.dim(),
                grid.nx_total(),
                grid.nxi_total()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LabError::Resolution("field contains non-finite samples".into()));
        }
        Ok(Self { grid, values, time: 0.0 })
    }

    pub fn zeros(grid: PhaseSpaceGrid) -> Self {
        Self { grid, values: Array2::zeros((grid.nx_total(), grid.nxi_total())), time: 0.0 }
    }

    /// Samples `f` at every grid node; for d=2 the closure receives `[x1, x2]` and `[ξ1, ξ2]`.
    pub fn from_fn(grid: PhaseSpaceGrid, f: impl Fn(&[f64], &[f64]) -> f64) -> Self {
        let xs: Vec<Vec<f64>> = (0..grid.nx_total()).map(|i| grid.x_coords(i)).collect();
        let ks: Vec<Vec<f64>> = (0..grid.nxi_total()).map(|k| grid.xi_coords(k)).collect();
        let values = Array2::from_shape_fn((grid.nx_total(), grid.nxi_total()), |(i, k)| f(&xs[i], &ks[k]));
        Self { grid, values, time: 0.0 }
    }

    /// One-dimensional convenience constructor.
    pub fn from_fn_1d(grid: PhaseSpaceGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_fn(grid, |x, k| f(x[0], k[0]))
    }

    pub fn mass(&self) -> f64 {
        self.values.sum() * self.grid.cell_volume()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { grid: self.grid, values: &self.values * c, time: self.time }
    }

    /// View as a `2d`-dimensional array `(x_1..x_d, ξ_1..ξ_d)`.
    pub fn full_view(&self) -> ArrayViewD<'_, f64> {
        self.values
            .view()
            .into_shape_with_order(IxDyn(&self.grid.full_shape()))
            .expect("standard layout field")
    }

    pub(crate) fn from_full(grid: PhaseSpaceGrid, full: ArrayD<f64>, time: f64) -> Self {
        let values = full
            .into_shape_with_order((grid.nx_total(), grid.nxi_total()))
            .expect("full shape")
            .into_dimensionality()
            .expect("2d");
        Self { grid, values, time }
    }

    /// Mass outside the central `frac` portion of each axis; used to guard the torus substitution.
    pub fn boundary_mass(&self, frac: f64) -> f64 {
        let g = &self.grid;
        let lim_x = 0.5 * frac * g.x.length;
        let lim_k = 0.5 * frac * g.xi.length;
        let mut m = 0.0;
        for i in 0..g.nx_total() {
            let xin = g.x_coords(i).iter().all(|v| v.abs() <= lim_x);
            for k in 0..g.nxi_total() {
                let kin = g.xi_coords(k).iter().all(|v| v.abs() <= lim_k);
                if !(xin && kin) {
                    m += self.values[[i, k]].abs();
                }
            }
        }
        m * g.cell_volume()
    }
}

/// `ρ_f(x) = Δξ^d Σ_k f(x, ξ_k)`.
pub fn spatial_density(f: &PhaseSpaceField) -> Array1<f64> {
    f.values.sum_axis(ndarray::Axis(1)) * f.grid.dxi_vol()
}
