//! Free-space convolution on a periodic grid by zero padding to twice the length.

use super::kernel::KernelSpec;
use crate::error::Result;
use crate::phasespace::Grid1D;
use crate::spectral::Plan;
use crate::C64;

/// Precomputed spectrum of a sampled convolution kernel.
#[derive(Clone)]
pub struct Convolver {
    n: usize,
    dx: f64,
    plan: Plan,
    spectrum: Vec<C64>,
}

impl Convolver {
    /// `out_i = Σ_j g(x_i - x_j + offset) ρ_j Δx` for the sampled function `g`.
    pub fn new(grid: &Grid1D, offset: f64, g: impl Fn(f64) -> f64) -> Self {
        let n = grid.n_points;
        let dx = grid.spacing();
        let m = 2 * n;
        let plan = Plan::new(m);
        let mut spectrum: Vec<C64> = (0..m)
            .map(|idx| {
                let lag = if idx < n { idx as f64 } else if idx == n { 0.0 } else { idx as f64 - m as f64 };
                if idx == n {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(g(lag * dx + offset), 0.0)
                }
            })
            .collect();
        plan.forward(&mut spectrum);
        Self { n, dx, plan, spectrum }
    }

    pub fn apply(&self, rho: &[f64]) -> Vec<f64> {
        let mut buf = vec![C64::new(0.0, 0.0); 2 * self.n];
        for (b, r) in buf.iter_mut().zip(rho) {
            *b = C64::new(*r, 0.0);
        }
        self.plan.forward(&mut buf);
        buf.iter_mut().zip(&self.spectrum).for_each(|(b, s)| *b *= s);
        self.plan.inverse(&mut buf);
        buf[..self.n].iter().map(|z| z.re * self.dx).collect()
    }
}

/// Potential and force convolvers for one kernel on one grid.
#[derive(Clone)]
pub struct MeanField {
    pub kernel: KernelSpec,
    potential: Convolver,
    gradient: Convolver,
}

impl MeanField {
    pub fn new(kernel: &KernelSpec, grid: &Grid1D) -> Result<Self> {
        let k = kernel.resolved(grid)?;
        let potential = Convolver::new(grid, 0.0, |x| k.value(x.abs()));
        let gradient = Convolver::new(grid, 0.0, |x| k.grad_1d(x));
        Ok(Self { kernel: k, potential, gradient })
    }

    /// `V = K_δ ∗ ρ`.
    pub fn potential(&self, rho: &[f64]) -> Vec<f64> {
        if self.kernel.is_zero() {
            return vec![0.0; rho.len()];
        }
        self.potential.apply(rho)
    }

    /// `E = -∇K_δ ∗ ρ`.
    pub fn force(&self, rho: &[f64]) -> Vec<f64> {
        if self.kernel.is_zero() {
            return vec![0.0; rho.len()];
        }
        self.gradient.apply(rho).into_iter().map(|v| -v).collect()
    }
}

/// `E = -∇K_δ ∗ ρ` on the grid of `rho`.
pub fn mean_field_force(rho: &[f64], kernel: &KernelSpec, grid: &Grid1D) -> Result<Vec<f64>> {
    Ok(MeanField::new(kernel, grid)?.force(rho))
}

/// `V = K_δ ∗ ρ` on the grid of `rho`.
pub fn mean_field_potential(rho: &[f64], kernel: &KernelSpec, grid: &Grid1D) -> Result<Vec<f64>> {
    Ok(MeanField::new(kernel, grid)?.potential(rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let grid = Grid1D::new(32, 8.0).unwrap();
        let x = grid.points();
        let rho: Vec<f64> = x.iter().map(|v| (-(v - 0.7) * (v - 0.7)).exp()).collect();
        let g = |s: f64| 1.0 / (1.0 + s * s) + 0.1 * s;
        let c = Convolver::new(&grid, 0.0, g);
        let out = c.apply(&rho);
        for i in 0..32 {
            let direct: f64 = (0..32).map(|j| g(x[i] - x[j]) * rho[j] * grid.spacing()).sum();
            assert!((out[i] - direct).abs() < 1e-12);
        }
    }
}
