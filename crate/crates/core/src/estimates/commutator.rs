use ndarray::Array2;

use super::{BoundCheck, BoundPoint, LadderAxis};
use crate::dynamics::KernelSpec;
use crate::error::{LabError, Result};
use crate::linalg;
use crate::phasespace::lp_norm;
use crate::quantize::{momentum_power, quantum_grad_xi, right_multiply, DensityOperator};
use crate::schatten::{semiclassical_norm, singular_values};
use crate::spectral::Plan;
use crate::C64;

/// Exponents of the trace-norm commutator bound for a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorExponents {
    pub b: f64,
    pub b_prime: f64,
    pub eps: f64,
    pub eps_tilde: f64,
}

impl CommutatorExponents {
    /// `b = d/(a+1)`, `b' = b/(b-1)`; defaults `ε = (b'-1)/2`, `ε̃ = ε/(4b')`.
    pub fn new(k: &KernelSpec, eps: Option<f64>) -> Result<Self> {
        let d = k.d as f64;
        if !(k.a > -1.0 && k.a < d - 1.0) {
            return Err(LabError::Exponent(format!("a={} outside (-1, {})", k.a, d - 1.0)));
        }
        let b = k.b();
        let b_prime = k.b_prime();
        if !(b_prime > 1.0 && b_prime.is_finite()) {
            return Err(LabError::Exponent(format!("conjugate exponent b'={b_prime} must be finite and > 1")));
        }
        let eps = eps.unwrap_or(0.5 * (b_prime - 1.0));
        if !(eps > 0.0 && eps <= b_prime - 1.0) {
            return Err(LabError::Exponent(format!("ε={eps} outside (0, {}]", b_prime - 1.0)));
        }
        Ok(Self { b, b_prime, eps, eps_tilde: eps / (4.0 * b_prime) })
    }
}

fn kernel_column(k: &KernelSpec, rho: &DensityOperator, z: f64) -> Result<Vec<f64>> {
    let k = k.resolved(&rho.grid_x)?;
    Ok(rho.grid_x.points().iter().map(|&x| k.value((x - z).abs())).collect())
}

/// `i[K(·-z), ρ]`, Hermitian.
fn commutator(kz: &[f64], rho: &DensityOperator) -> Array2<C64> {
    Array2::from_shape_fn(rho.matrix.dim(), |(i, j)| rho.matrix[[i, j]] * C64::new(0.0, kz[i] - kz[j]))
}

/// `Tr|[K(·-z), ρ]|`.
fn commutator_trace(k: &KernelSpec, rho: &DensityOperator, z: f64) -> Result<f64> {
    let c = commutator(&kernel_column(k, rho, z)?, rho);
    Ok(singular_values(&c)?.iter().sum())
}

/// Eigenpairs of `∇_ξ ρ` and the density `diag|∇_ξ ρ|`.
fn grad_xi_spectrum(rho: &DensityOperator) -> Result<(Vec<f64>, Array2<C64>, Vec<f64>)> {
    let g = quantum_grad_xi(rho);
    let (vals, vecs) = linalg::eigh(&g)?;
    let dx = rho.grid_x.spacing();
    let n = rho.n();
    let mut diag = vec![0.0; n];
    for (j, l) in vals.iter().enumerate() {
        let w = l.abs() / dx;
        for (i, d) in diag.iter_mut().enumerate() {
            *d += w * vecs[[i, j]].norm_sqr();
        }
    }
    Ok((vals, vecs, diag))
}

/// `(Tr|[K(·-z),ρ]|, h·‖diag|∇_ξρ|‖_{L^{b'-ε}}^{1/2+ε̃} ‖diag|∇_ξρ|‖_{L^{b'+ε}}^{1/2-ε̃})`.
pub fn commutator_trace_point(rho: &DensityOperator, k: &KernelSpec, z: f64, ex: &CommutatorExponents) -> Result<(f64, f64)> {
    let (_, _, diag) = grad_xi_spectrum(rho)?;
    let rhs = trace_rhs(rho, &diag, ex);
    Ok((commutator_trace(k, rho, z)?, rhs))
}

fn trace_rhs(rho: &DensityOperator, diag: &[f64], ex: &CommutatorExponents) -> f64 {
    let dx = rho.grid_x.spacing();
    let lo = lp_norm(diag.iter().copied(), dx, ex.b_prime - ex.eps);
    let hi = lp_norm(diag.iter().copied(), dx, ex.b_prime + ex.eps);
    rho.h() * lo.powf(0.5 + ex.eps_tilde) * hi.powf(0.5 - ex.eps_tilde)
}

/// Trace-norm commutator bound across states (typically an ℏ ladder) and translation points.
pub fn commutator_trace_check(
    states: &[DensityOperator],
    k: &KernelSpec,
    z_list: &[f64],
    eps: Option<f64>,
    factor: f64,
) -> Result<BoundCheck> {
    let ex = CommutatorExponents::new(k, eps)?;
    let mut points = Vec::new();
    for rho in states {
        let (_, _, diag) = grad_xi_spectrum(rho)?;
        let rhs = trace_rhs(rho, &diag, &ex);
        for &z in z_list {
            points.push(BoundPoint::new(rho.hbar, commutator_trace(k, rho, z)?, rhs).at(z));
        }
    }
    Ok(BoundCheck::graded("commutator_trace", LadderAxis::Hbar, points, factor)
        .with_note("b", ex.b)
        .with_note("b_prime", ex.b_prime)
        .with_note("eps", ex.eps)
        .with_note("eps_tilde", ex.eps_tilde))
}

/// `|Tr|[K(·-z),ρ]| - Tr|[K(·-z-sΔx), τ_s ρ]||` for a circular translation by `cells`.
pub fn commutator_covariance(rho: &DensityOperator, k: &KernelSpec, z: f64, cells: isize) -> Result<f64> {
    let shifted = rho.translated(cells);
    let a = commutator_trace(k, rho, z)?;
    let b = commutator_trace(k, &shifted, z + cells as f64 * rho.grid_x.spacing())?;
    Ok((a - b).abs())
}

/// `𝓛^p` commutator bound with momentum-weighted right side, `1/p = 1/q + 1/b`.
pub fn commutator_lp_check(
    states: &[DensityOperator],
    k: &KernelSpec,
    z_list: &[f64],
    p: f64,
    n_weight: f64,
    eps: Option<f64>,
    factor: f64,
) -> Result<BoundCheck> {
    k.validate()?;
    let b = k.b();
    if !(p >= 1.0 && p < b) {
        return Err(LabError::Exponent(format!("p={p} must lie in [1, b={b})")));
    }
    if n_weight <= k.a + 1.0 {
        return Err(LabError::Exponent(format!("weight order n={n_weight} must exceed a+1={}", k.a + 1.0)));
    }
    let q = 1.0 / (1.0 / p - 1.0 / b);
    let eps = eps.unwrap_or(0.5 * (q - 1.0));
    if !(eps > 0.0 && eps < q - 1.0) {
        return Err(LabError::Exponent(format!("ε={eps} outside (0, {})", q - 1.0)));
    }
    let eps_tilde = eps / q;
    let mut points = Vec::new();
    for rho in states {
        let g = quantum_grad_xi(rho);
        let w: Vec<C64> = momentum_power(&rho.grid_x, rho.hbar, n_weight).iter().map(|m| m + 1.0).collect();
        let sv = singular_values(&right_multiply(&g, &w))?;
        let rhs = rho.h()
            * semiclassical_norm(&sv, rho.hbar, q + eps).powf(0.5 + eps_tilde)
            * semiclassical_norm(&sv, rho.hbar, q - eps).powf(0.5 - eps_tilde);
        for &z in z_list {
            let c = commutator(&kernel_column(k, rho, z)?, rho);
            let lhs = semiclassical_norm(&singular_values(&c)?, rho.hbar, p);
            points.push(BoundPoint::new(rho.hbar, lhs, rhs).at(z));
        }
    }
    Ok(BoundCheck::graded("commutator_lp", LadderAxis::Hbar, points, factor)
        .with_note("p", p)
        .with_note("q", q)
        .with_note("b", b)
        .with_note("eps", eps))
}

/// `Σ_j |λ_j| ⟨ψ_j, |p|^s ψ_j⟩` with the momentum moments taken on the discrete Fourier basis.
pub(crate) fn abs_momentum_trace(vals: &[f64], vecs: &Array2<C64>, rho: &DensityOperator, s: f64) -> f64 {
    let n = rho.n();
    let w = momentum_power(&rho.grid_x, rho.hbar, s);
    let plan = Plan::new(n);
    let mut buf = vec![C64::new(0.0, 0.0); n];
    let mut acc = 0.0;
    for (j, l) in vals.iter().enumerate() {
        if *l == 0.0 {
            continue;
        }
        buf.iter_mut().zip(vecs.column(j)).for_each(|(b, v)| *b = *v);
        plan.forward(&mut buf);
        let m: f64 = buf.iter().zip(&w).map(|(z, wk)| z.norm_sqr() * wk.re).sum::<f64>() / n as f64;
        acc += l.abs() * m;
    }
    acc
}

/// Quantum kinetic interpolation: `‖diag|∇_ξρ|‖_{L^p}` against
/// `(Tr|∇_ξρ||p|^{n1})^θ ‖∇_ξρ‖_{𝓛^∞}^{1-θ}` with `p = 1 + n1`, `θ = 1/p`.
pub fn kinetic_interpolation_check(states: &[DensityOperator], n1: u32, factor: f64) -> Result<BoundCheck> {
    if n1 % 2 != 0 {
        return Err(LabError::Exponent(format!("n1={n1} must be even")));
    }
    let p = 1.0 + n1 as f64;
    let theta = 1.0 / p;
    let mut points = Vec::new();
    for rho in states {
        let (vals, vecs, diag) = grad_xi_spectrum(rho)?;
        let lhs = lp_norm(diag.iter().copied(), rho.grid_x.spacing(), p);
        let moment = abs_momentum_trace(&vals, &vecs, rho, n1 as f64);
        let op = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())) / rho.h();
        points.push(BoundPoint::new(rho.hbar, lhs, moment.powf(theta) * op.powf(1.0 - theta)));
    }
    Ok(BoundCheck::graded("kinetic_interpolation", LadderAxis::Hbar, points, factor)
        .with_note("p", p)
        .with_note("theta", theta))
}
