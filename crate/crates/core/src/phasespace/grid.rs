use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Uniform periodic grid on the centered interval `[-L/2, L/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub n_points: usize,
    pub length: f64,
    pub periodic: bool,
}

impl Grid1D {
    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(LabError::Resolution(format!("grid size {n_points} is not a power of two")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(LabError::Resolution(format!("grid length {length} must be positive")));
        }
        Ok(Self { n_points, length, periodic: true })
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n_points as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Index of the grid point at the origin.
    pub fn center(&self) -> usize {
        self.n_points / 2
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        crate::spectral::wavenumbers(self.n_points, self.length)
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.n_points == other.n_points && (self.length - other.length).abs() <= 1e-12 * self.length
    }
}

/// Tensor phase-space grid; every spatial axis shares `x`, every momentum axis shares `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceGrid {
    pub x: Grid1D,
    pub xi: Grid1D,
    pub dim: usize,
}

impl PhaseSpaceGrid {
    pub fn new(dim: usize, x: Grid1D, xi: Grid1D) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(LabError::Dimension(format!("phase-space dimension d={dim} not in {{1,2}}")));
        }
        Ok(Self { x, xi, dim })
    }

    pub fn one_d(nx: usize, lx: f64, nxi: usize, lxi: f64) -> Result<Self> {
        Self::new(1, Grid1D::new(nx, lx)?, Grid1D::new(nxi, lxi)?)
    }

    /// Number of flattened spatial samples `n_x^d`.
    pub fn nx_total(&self) -> usize {
        self.x.n_points.pow(self.dim as u32)
    }

    pub fn nxi_total(&self) -> usize {
        self.xi.n_points.pow(self.dim as u32)
    }

    pub fn dx_vol(&self) -> f64 {
        self.x.spacing().powi(self.dim as i32)
    }

    pub fn dxi_vol(&self) -> f64 {
        self.xi.spacing().powi(self.dim as i32)
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx_vol() * self.dxi_vol()
    }

    /// Shape of the unflattened array `(x_1..x_d, ξ_1..ξ_d)`.
    pub fn full_shape(&self) -> Vec<usize> {
        let mut s = vec![self.x.n_points; self.dim];
        s.extend(std::iter::repeat_n(self.xi.n_points, self.dim));
        s
    }

    /// Spatial coordinates of a flattened spatial index.
    pub fn x_coords(&self, flat: usize) -> Vec<f64> {
        unflatten(flat, self.x.n_points, self.dim).into_iter().map(|i| self.x.point(i)).collect()
    }

    pub fn xi_coords(&self, flat: usize) -> Vec<f64> {
        unflatten(flat, self.xi.n_points, self.dim).into_iter().map(|i| self.xi.point(i)).collect()
    }
}

fn unflatten(mut flat: usize, n: usize, dim: usize) -> Vec<usize> {
    let mut out = vec![0; dim];
    for slot in out.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
    out
}
