use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg;
use crate::phasespace::Grid1D;
use crate::spectral::Plan;
use crate::C64;

/// Kernel `ρ(x, y)` sampled as `M[i][j] = ρ(x_i, x_j)·Δx`, so `tr M ≈ ∫ρ(x,x)dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityOperator {
    pub grid_x: Grid1D,
    pub hbar: f64,
    pub matrix: Array2<C64>,
}

impl DensityOperator {
    pub fn new(grid_x: Grid1D, hbar: f64, matrix: Array2<C64>) -> Result<Self> {
        if matrix.dim() != (grid_x.n_points, grid_x.n_points) {
            return Err(LabError::GridMismatch(format!(
                "matrix {:?} on a grid of {} points",
                matrix.dim(),
                grid_x.n_points
            )));
        }
        Ok(Self { grid_x, hbar, matrix })
    }

    pub fn zeros(grid_x: Grid1D, hbar: f64) -> Self {
        let n = grid_x.n_points;
        Self { grid_x, hbar, matrix: Array2::zeros((n, n)) }
    }

    pub fn n(&self) -> usize {
        self.grid_x.n_points
    }

    pub fn h(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// Spatial density `ρ(x_i, x_i)`.
    pub fn density(&self) -> Array1<f64> {
        let dx = self.grid_x.spacing();
        self.matrix.diag().mapv(|z| z.re / dx)
    }

    pub fn with_matrix(&self, matrix: Array2<C64>) -> Self {
        Self { grid_x: self.grid_x, hbar: self.hbar, matrix }
    }

    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.matrix)
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.grid_x.same_as(&other.grid_x) || (self.hbar - other.hbar).abs() > 1e-14 * self.hbar {
            return Err(LabError::GridMismatch(format!(
                "operators on (n={}, L={}, ħ={}) and (n={}, L={}, ħ={})",
                self.n(),
                self.grid_x.length,
                self.hbar,
                other.n(),
                other.grid_x.length,
                other.hbar
            )));
        }
        Ok(())
    }

    /// Circular translation by `cells` grid points in both kernel variables.
    pub fn translated(&self, cells: isize) -> Self {
        let n = self.n() as isize;
        let m = Array2::from_shape_fn((self.n(), self.n()), |(i, j)| {
            let si = (i as isize - cells).rem_euclid(n) as usize;
            let sj = (j as isize - cells).rem_euclid(n) as usize;
            self.matrix[[si, sj]]
        });
        self.with_matrix(m)
    }
}

/// `F⁻¹ diag(mult) F` applied to every column: left multiplication by a Fourier multiplier.
pub fn left_multiply(m: &Array2<C64>, mult: &[C64]) -> Array2<C64> {
    let plan = Plan::new(m.nrows());
    let mut out = m.clone();
    let mut scratch = Vec::new();
    for col in out.columns_mut() {
        plan.apply_lane(col, mult, &mut scratch);
    }
    out
}

/// Right multiplication `M·P` by the Fourier multiplier `P = F⁻¹ diag(mult) F`.
pub fn right_multiply(m: &Array2<C64>, mult: &[C64]) -> Array2<C64> {
    let n = mult.len();
    // row·P is the transpose action, which reflects the multiplier k → -k
    let reflected: Vec<C64> = (0..n).map(|j| mult[(n - j) % n]).collect();
    let plan = Plan::new(m.ncols());
    let mut out = m.clone();
    let mut scratch = Vec::new();
    for row in out.rows_mut() {
        plan.apply_lane(row, &reflected, &mut scratch);
    }
    out
}

/// Multiplier of `|p̂|^s = (ℏ|k|)^s`.
pub fn momentum_power(grid: &Grid1D, hbar: f64, s: f64) -> Vec<C64> {
    grid.wavenumbers()
        .into_iter()
        .map(|k| {
            let a = (hbar * k).abs();
            C64::new(if a == 0.0 { if s == 0.0 { 1.0 } else { 0.0 } } else { a.powf(s) }, 0.0)
        })
        .collect()
}

/// Clips negative eigenvalues and renormalizes the trace to one; returns the clipped mass.
pub fn psd_repair(rho: &DensityOperator) -> Result<(DensityOperator, f64)> {
    let (vals, vecs) = linalg::eigh(&rho.matrix)?;
    let clipped: f64 = vals.iter().filter(|v| **v < 0.0).map(|v| -v).sum();
    let kept: f64 = vals.iter().filter(|v| **v > 0.0).sum();
    if kept <= 0.0 {
        return Err(LabError::NotPsd(vals.first().copied().unwrap_or(0.0)));
    }
    let m = linalg::spectral_compose(&vals, &vecs, |l| C64::new(l.max(0.0) / kept, 0.0));
    // restore exact Hermitian symmetry lost to rounding
    let m = (&m + &linalg::adjoint(&m)).mapv(|z| z * 0.5);
    Ok((rho.with_matrix(m), clipped))
}
