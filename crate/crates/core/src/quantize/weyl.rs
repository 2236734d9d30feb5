use std::f64::consts::PI;

use ndarray::Array2;
use rayon::prelude::*;

use super::operator::DensityOperator;
use crate::error::{LabError, Result};
use crate::phasespace::{Grid1D, PhaseSpaceField, PhaseSpaceGrid};
use crate::spectral::{self, Plan};
use crate::C64;

/// Where the quantizer reads `f` at the half-grid midpoints `(x_i + x_j)/2`.
pub enum MidpointSource<'a> {
    /// Closed-form symbol `f(x, ξ)`.
    Analytic(&'a (dyn Fn(f64, f64) -> f64 + Sync)),
    /// Trigonometric interpolation of the sampled field along `x`.
    SpectralInterpolated,
}

/// Per-step phase `Δx·max|ξ|/ℏ` of the quantization kernel.
pub fn phase_per_step(grid: &PhaseSpaceGrid, hbar: f64) -> f64 {
    grid.x.spacing() * 0.5 * grid.xi.length / hbar
}

pub fn check_resolvable(grid: &PhaseSpaceGrid, hbar: f64) -> Result<()> {
    if grid.dim != 1 {
        return Err(LabError::Dimension(format!("operators are one-dimensional, got d={}", grid.dim)));
    }
    let phase = phase_per_step(grid, hbar);
    if phase >= PI {
        return Err(LabError::Aliasing(format!(
            "kernel phase per grid step Δx·ξ_max/ħ = {phase:.4} is not below π"
        )));
    }
    Ok(())
}

/// Half-grid samples `g[m][k] = f(-L/2 + mΔx/2, ξ_k)`, `m ∈ [0, 2n)`.
fn midpoint_table(f: &PhaseSpaceField, src: &MidpointSource) -> Array2<f64> {
    let g = f.grid;
    let n = g.x.n_points;
    let nk = g.xi.n_points;
    match src {
        MidpointSource::Analytic(func) => Array2::from_shape_fn((2 * n, nk), |(m, k)| {
            func(g.x.point(0) + 0.5 * m as f64 * g.x.spacing(), g.xi.point(k))
        }),
        MidpointSource::SpectralInterpolated => {
            let mut out = Array2::zeros((2 * n, nk));
            for k in 0..nk {
                let col: Vec<f64> = f.values.column(k).to_vec();
                for (m, v) in spectral::upsample2(&col).into_iter().enumerate() {
                    out[[m, k]] = v;
                }
            }
            out
        }
    }
}

/// Discrete Weyl quantization
/// `M[i][j] = Δx Δξ Σ_k f((x_i+x_j)/2, ξ_k) e^{i(x_i-x_j)ξ_k/ℏ}`.
///
/// Kernel entries with `|x_i - x_j| ≥ πℏ/Δξ` lie beyond the first period of the
/// ξ-sum and are set to zero.
pub fn weyl_quantize(f: &PhaseSpaceField, hbar: f64, src: MidpointSource) -> Result<DensityOperator> {
    check_resolvable(&f.grid, hbar)?;
    let g = f.grid;
    let n = g.x.n_points;
    let nk = g.xi.n_points;
    let (dx, dxi) = (g.x.spacing(), g.xi.spacing());
    let table = midpoint_table(f, &src);
    let cutoff = PI * hbar / dxi;
    let xis = g.xi.points();
    // phase[s][k] = exp(i s Δx ξ_k / ℏ) for s ≥ 0
    let phase: Vec<Vec<C64>> = (0..n)
        .map(|s| xis.iter().map(|&xi| C64::from_polar(1.0, s as f64 * dx * xi / hbar)).collect())
        .collect();
    let w = dx * dxi;
    let rows: Vec<Vec<C64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![C64::new(0.0, 0.0); n];
            for j in 0..=i {
                let s = i - j;
                if s as f64 * dx >= cutoff {
                    continue;
                }
                let mid = table.row(i + j);
                let ph = &phase[s];
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..nk {
                    acc += ph[k] * mid[k];
                }
                row[j] = acc * w;
            }
            row
        })
        .collect();
    let mut m = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            m[[i, j]] = rows[i][j];
            m[[j, i]] = rows[i][j].conj();
        }
    }
    Ok(DensityOperator { grid_x: g.x, hbar, matrix: m })
}

/// Trigonometric upsampling of the kernel to a grid twice as fine in both variables.
fn upsample_kernel(m: &Array2<C64>) -> Array2<C64> {
    let n = m.nrows();
    let big = 2 * n;
    let small = Plan::new(n);
    let large = Plan::new(big);
    let lift = |buf: &mut Vec<C64>| -> Vec<C64> {
        small.forward(buf);
        let mut out = vec![C64::new(0.0, 0.0); big];
        for j in 0..n / 2 {
            out[j] = buf[j];
        }
        for j in n / 2 + 1..n {
            out[j + n] = buf[j];
        }
        let h = buf[n / 2] * 0.5;
        out[n / 2] = h;
        out[big - n / 2] = h;
        large.inverse(&mut out);
        out.iter_mut().for_each(|z| *z *= 2.0);
        out
    };
    let mut stage = Array2::<C64>::zeros((n, big));
    for i in 0..n {
        let mut row = m.row(i).to_vec();
        let up = lift(&mut row);
        for (j, v) in up.into_iter().enumerate() {
            stage[[i, j]] = v;
        }
    }
    let mut out = Array2::<C64>::zeros((big, big));
    for j in 0..big {
        let mut col = stage.column(j).to_vec();
        let up = lift(&mut col);
        for (i, v) in up.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    out
}

/// Wigner transform `w(x,ξ) = (2πℏ)⁻¹ ∫ e^{-iyξ/ℏ} ρ(x+y/2, x-y/2) dy` sampled on `x_i × xi`.
pub fn wigner_transform(rho: &DensityOperator, xi: Grid1D) -> Result<PhaseSpaceField> {
    let grid = PhaseSpaceGrid::new(1, rho.grid_x, xi)?;
    check_resolvable(&grid, rho.hbar)?;
    let n = rho.n();
    let dx = rho.grid_x.spacing();
    let fine = upsample_kernel(&rho.matrix);
    let big = 2 * n as isize;
    let xis = xi.points();
    let norm = 1.0 / (2.0 * PI * rho.hbar);
    // phase[l][k] = exp(-i l Δx ξ_k / ℏ)
    let phase: Vec<Vec<C64>> = (0..n)
        .map(|l| xis.iter().map(|&k| C64::from_polar(1.0, -(l as f64) * dx * k / rho.hbar)).collect())
        .collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let c = 2 * i as isize;
            let lmax = c.min(big - 1 - c) as usize;
            let mut acc = vec![0.0f64; xis.len()];
            for l in 0..=lmax.min(n - 1) {
                let li = l as isize;
                let plus = fine[[(c + li) as usize, (c - li) as usize]];
                let minus = fine[[(c - li) as usize, (c + li) as usize]];
                let ph = &phase[l];
                for (a, p) in acc.iter_mut().zip(ph) {
                    let t = if l == 0 { plus * p } else { plus * p + minus * p.conj() };
                    *a += t.re;
                }
            }
            acc.into_iter().map(|v| v * norm).collect()
        })
        .collect();
    let values = Array2::from_shape_fn((n, xi.n_points), |(i, k)| rows[i][k]);
    PhaseSpaceField::new(grid, values)
}
