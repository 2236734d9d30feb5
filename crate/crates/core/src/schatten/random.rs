//! Seeded random matrices for property tests and oracle sweeps.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg;
use crate::C64;

pub fn gaussian_matrix(rng: &mut impl Rng, n: usize) -> Array2<C64> {
    Array2::from_shape_fn((n, n), |_| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

pub fn hermitian(rng: &mut impl Rng, n: usize) -> Array2<C64> {
    let g = gaussian_matrix(rng, n);
    (&g + &linalg::adjoint(&g)).mapv(|z| z * 0.5)
}

/// `G G†`, positive semidefinite with a continuous spectrum.
pub fn psd(rng: &mut impl Rng, n: usize) -> Array2<C64> {
    let g = gaussian_matrix(rng, n);
    let m = linalg::matmul(&g, &linalg::adjoint(&g));
    (&m + &linalg::adjoint(&m)).mapv(|z| z * 0.5)
}

/// Unit-trace PSD matrix with a random rank between 1 and `n`.
pub fn density_matrix(rng: &mut impl Rng, n: usize) -> Array2<C64> {
    let rank = rng.random_range(1..=n);
    let mut g = gaussian_matrix(rng, n);
    for j in rank..n {
        g.column_mut(j).fill(C64::new(0.0, 0.0));
    }
    let m = linalg::matmul(&g, &linalg::adjoint(&g));
    let t = linalg::trace(&m).re;
    let m = m.mapv(|z| z / t);
    (&m + &linalg::adjoint(&m)).mapv(|z| z * 0.5)
}

/// Haar-like unitary from the polar part of a Gaussian matrix.
pub fn unitary(rng: &mut impl Rng, n: usize) -> Array2<C64> {
    let g = gaussian_matrix(rng, n);
    let (u, _, v) = linalg::svd(&g).expect("svd of a finite matrix");
    linalg::matmul(&u, &linalg::adjoint(&v))
}
