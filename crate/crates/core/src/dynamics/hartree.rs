use ndarray::Array2;

use super::kernel::KernelSpec;
use super::vlasov::{Field, ForceModel};
use crate::error::{LabError, Result};
use crate::linalg;
use crate::quantize::{left_multiply, right_multiply, DensityOperator};
use crate::C64;

/// Pairwise kernel matrix `K_δ(x_i - x_j)`.
pub fn kernel_matrix(kernel: &KernelSpec, grid: &crate::phasespace::Grid1D) -> Result<Array2<f64>> {
    let k = kernel.resolved(grid)?;
    let x = grid.points();
    let n = grid.n_points;
    Ok(Array2::from_shape_fn((n, n), |(i, j)| k.value((x[i] - x[j]).abs())))
}

/// Exchange operator with kernel `K(x-y)ρ(x,y)`: entrywise product with the kernel matrix.
pub fn exchange_operator(rho: &DensityOperator, kernel: &KernelSpec) -> Result<Array2<C64>> {
    if kernel.d != 1 {
        return Err(LabError::Dimension(format!("exchange operator is one-dimensional, got d={}", kernel.d)));
    }
    let km = kernel_matrix(kernel, &rho.grid_x)?;
    Ok(&rho.matrix * &km.mapv(|v| C64::new(v, 0.0)))
}

/// Which mean-field model the quantum propagator integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantumModel {
    Hartree,
    HartreeFock,
}

/// Split-step propagator for `iℏ∂_tρ = [H, ρ]` with `H = -ℏ²Δ/2 + K∗ρ (- X)`.
pub struct QuantumSolver {
    pub hbar: f64,
    pub model: QuantumModel,
    grid: crate::phasespace::Grid1D,
    field: Field,
    exchange_kernel: Option<Array2<f64>>,
    k: Vec<f64>,
    kinetic_cache: Option<(f64, Vec<C64>, Vec<C64>)>,
}

impl QuantumSolver {
    pub fn new(grid: crate::phasespace::Grid1D, hbar: f64, force: impl Into<ForceModel>, model: QuantumModel) -> Result<Self> {
        let force = force.into();
        let field = Field::new(&force, &grid)?;
        let exchange_kernel = match (&force, model) {
            (ForceModel::MeanField(k), QuantumModel::HartreeFock) if !k.is_zero() => Some(kernel_matrix(k, &grid)?),
            _ => None,
        };
        Ok(Self { hbar, model, grid, field, exchange_kernel, k: grid.wavenumbers(), kinetic_cache: None })
    }

    pub fn hartree(grid: crate::phasespace::Grid1D, hbar: f64, force: impl Into<ForceModel>) -> Result<Self> {
        Self::new(grid, hbar, force, QuantumModel::Hartree)
    }

    pub fn hartree_fock(grid: crate::phasespace::Grid1D, hbar: f64, force: impl Into<ForceModel>) -> Result<Self> {
        Self::new(grid, hbar, force, QuantumModel::HartreeFock)
    }

    fn check(&self, rho: &DensityOperator) -> Result<()> {
        if !rho.grid_x.same_as(&self.grid) || rho.hbar != self.hbar {
            return Err(LabError::GridMismatch("operator grid or ħ differs from the propagator".into()));
        }
        Ok(())
    }

    fn kinetic(&mut self, m: &Array2<C64>, tau: f64) -> Array2<C64> {
        let stale = self.kinetic_cache.as_ref().is_none_or(|(t, _, _)| *t != tau);
        if stale {
            let u: Vec<C64> =
                self.k.iter().map(|&k| C64::from_polar(1.0, -0.5 * self.hbar * k * k * tau)).collect();
            let uc = u.iter().map(|z| z.conj()).collect();
            self.kinetic_cache = Some((tau, u, uc));
        }
        let (_, u, uc) = self.kinetic_cache.as_ref().expect("cached");
        right_multiply(&left_multiply(m, u), uc)
    }

    pub fn potential(&self, rho: &DensityOperator) -> Vec<f64> {
        self.field.potential(rho.density().as_slice().expect("contiguous"))
    }

    fn diagonal_phase(&self, m: &mut Array2<C64>, v: &[f64], dt: f64) {
        let p: Vec<C64> = v.iter().map(|&vi| C64::from_polar(1.0, -vi * dt / self.hbar)).collect();
        for ((i, j), z) in m.indexed_iter_mut() {
            *z *= p[i] * p[j].conj();
        }
    }

    /// `diag(V) - X` for the current state.
    pub fn interaction_hamiltonian(&self, rho: &DensityOperator) -> Array2<C64> {
        let v = self.potential(rho);
        let n = self.grid.n_points;
        let mut h = Array2::<C64>::zeros((n, n));
        if let Some(km) = &self.exchange_kernel {
            for ((i, j), z) in h.indexed_iter_mut() {
                *z = -rho.matrix[[i, j]] * km[[i, j]];
            }
        }
        for i in 0..n {
            h[[i, i]] += v[i];
        }
        (&h + &linalg::adjoint(&h)).mapv(|z| z * 0.5)
    }

    fn conjugate(&self, m: &Array2<C64>, h: &Array2<C64>, tau: f64) -> Result<Array2<C64>> {
        let hb = self.hbar;
        let e = linalg::hermitian_function(h, |l| C64::from_polar(1.0, -l * tau / hb))?;
        Ok(linalg::matmul(&linalg::matmul(&e, m), &linalg::adjoint(&e)))
    }

    /// One Strang step: half kinetic, full interaction, half kinetic.
    ///
    /// For Hartree the interaction is diagonal and leaves the density invariant, so
    /// the frozen potential is exact. With exchange, the interaction Hamiltonian is
    /// evaluated at a first-order predicted midpoint state (exponential midpoint rule),
    /// which keeps the splitting second order.
    pub fn step(&mut self, rho: &mut DensityOperator, dt: f64) -> Result<()> {
        self.check(rho)?;
        let mut m = self.kinetic(&rho.matrix, 0.5 * dt);
        let mid = rho.with_matrix(m.clone());
        match &self.exchange_kernel {
            None => {
                let v = self.potential(&mid);
                self.diagonal_phase(&mut m, &v, dt);
            }
            Some(_) => {
                let h0 = self.interaction_hamiltonian(&mid);
                let hm_prod = linalg::matmul(&h0, &m);
                let comm = &hm_prod - &linalg::adjoint(&hm_prod);
                let s = C64::new(0.0, -0.5 * dt / self.hbar);
                let predicted = mid.with_matrix(&m + &comm.mapv(|z| z * s));
                let hm = self.interaction_hamiltonian(&predicted);
                m = self.conjugate(&m, &hm, dt)?;
            }
        }
        m = self.kinetic(&m, 0.5 * dt);
        rho.matrix = (&m + &linalg::adjoint(&m)).mapv(|z| z * 0.5);
        Ok(())
    }

    /// `Tr(p²ρ)/2 + ½∫V ρ` and, with exchange, `- ½Tr(Xρ)`.
    pub fn energy(&self, rho: &DensityOperator) -> f64 {
        let p2: Vec<C64> = self.k.iter().map(|&k| C64::new((self.hbar * k).powi(2), 0.0)).collect();
        let kin = 0.5 * linalg::trace(&left_multiply(&rho.matrix, &p2)).re;
        let dens = rho.density();
        let v = self.potential(rho);
        let dx = self.grid.spacing();
        let pot = match self.field {
            Field::Mean(_) => 0.5 * dens.iter().zip(&v).map(|(r, v)| r * v).sum::<f64>() * dx,
            Field::External(..) => dens.iter().zip(&v).map(|(r, v)| r * v).sum::<f64>() * dx,
        };
        let exch = match &self.exchange_kernel {
            Some(km) => {
                -0.5 * rho
                    .matrix
                    .iter()
                    .zip(km.iter())
                    .map(|(z, k)| k * z.norm_sqr())
                    .sum::<f64>()
            }
            None => 0.0,
        };
        kin + pot + exch
    }
}

/// Single Hartree step with a freshly built propagator.
pub fn hartree_step(rho: &DensityOperator, force: impl Into<ForceModel>, dt: f64) -> Result<DensityOperator> {
    let mut s = QuantumSolver::hartree(rho.grid_x, rho.hbar, force)?;
    let mut out = rho.clone();
    s.step(&mut out, dt)?;
    Ok(out)
}

/// Single Hartree-Fock step with a freshly built propagator.
pub fn hartree_fock_step(rho: &DensityOperator, force: impl Into<ForceModel>, dt: f64) -> Result<DensityOperator> {
    let mut s = QuantumSolver::hartree_fock(rho.grid_x, rho.hbar, force)?;
    let mut out = rho.clone();
    s.step(&mut out, dt)?;
    Ok(out)
}
