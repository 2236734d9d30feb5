//! Dense complex linear algebra on `Array2<C64>`, backed by faer.

use faer::{Mat, MatRef, Side};
use ndarray::Array2;

use crate::error::{LabError, Result};
use crate::C64;

fn as_faer(a: &Array2<C64>) -> MatRef<'_, C64> {
    let (r, c) = a.dim();
    match a.as_slice() {
        Some(s) => MatRef::from_row_major_slice(s, r, c),
        None => panic!("matrix must be in standard layout"),
    }
}

fn from_faer(m: MatRef<'_, C64>) -> Array2<C64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

fn std_layout(a: &Array2<C64>) -> std::borrow::Cow<'_, Array2<C64>> {
    if a.is_standard_layout() {
        std::borrow::Cow::Borrowed(a)
    } else {
        std::borrow::Cow::Owned(a.as_standard_layout().to_owned())
    }
}

/// Largest entrywise deviation `|A - A†|`, relative to `max|A|`.
pub fn hermitian_defect(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut dev = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            dev = dev.max(d);
            scale = scale.max(a[[i, j]].norm());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        dev / scale
    }
}

pub fn require_hermitian(a: &Array2<C64>, tol: f64) -> Result<()> {
    let d = hermitian_defect(a);
    if d > tol {
        Err(LabError::NonHermitian(d))
    } else {
        Ok(())
    }
}

/// Hermitian eigendecomposition: ascending eigenvalues and column eigenvectors.
pub fn eigh(a: &Array2<C64>) -> Result<(Vec<f64>, Array2<C64>)> {
    let a = std_layout(a);
    let evd = as_faer(&a)
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| LabError::Backend(format!("{e:?}")))?;
    let s = evd.S();
    let vals = (0..a.nrows()).map(|i| s[i].re).collect();
    Ok((vals, from_faer(evd.U())))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigvalsh(a: &Array2<C64>) -> Result<Vec<f64>> {
    let a = std_layout(a);
    as_faer(&a)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| LabError::Backend(format!("{e:?}")))
}

/// Singular values, nonincreasing.
pub fn singular_values(a: &Array2<C64>) -> Result<Vec<f64>> {
    let a = std_layout(a);
    let mut s = as_faer(&a)
        .singular_values()
        .map_err(|e| LabError::Backend(format!("{e:?}")))?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Full SVD `A = U diag(s) V†` with nonincreasing `s`.
pub fn svd(a: &Array2<C64>) -> Result<(Array2<C64>, Vec<f64>, Array2<C64>)> {
    let a = std_layout(a);
    let d = as_faer(&a)
        .svd()
        .map_err(|e| LabError::Backend(format!("{e:?}")))?;
    let k = a.nrows().min(a.ncols());
    let s: Vec<f64> = (0..k).map(|i| d.S()[i].re).collect();
    Ok((from_faer(d.U()), s, from_faer(d.V())))
}

pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (a, b) = (std_layout(a), std_layout(b));
    let m: Mat<C64> = as_faer(&a) * as_faer(&b);
    from_faer(m.as_ref())
}

pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// `V diag(g(λ)) V†` for a Hermitian input.
pub fn hermitian_function(a: &Array2<C64>, g: impl Fn(f64) -> C64) -> Result<Array2<C64>> {
    let (vals, vecs) = eigh(a)?;
    Ok(spectral_compose(&vals, &vecs, g))
}

pub fn spectral_compose(vals: &[f64], vecs: &Array2<C64>, g: impl Fn(f64) -> C64) -> Array2<C64> {
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let gj = g(l);
        scaled.column_mut(j).mapv_inplace(|z| z * gj);
    }
    matmul(&scaled, &adjoint(vecs))
}

/// Real power of a PSD matrix; tiny negative eigenvalues are clipped to zero.
pub fn psd_power(a: &Array2<C64>, q: f64) -> Result<Array2<C64>> {
    let (vals, vecs) = eigh(a)?;
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(&min) = vals.first() {
        if min < -1e-10 * scale.max(1e-300) {
            return Err(LabError::NotPsd(min));
        }
    }
    Ok(spectral_compose(&vals, &vecs, |l| {
        let l = l.max(0.0);
        C64::new(if l == 0.0 { if q == 0.0 { 1.0 } else { 0.0 } } else { l.powf(q) }, 0.0)
    }))
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().iter().copied().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_reconstructs() {
        let a = Array2::from_shape_fn((5, 5), |(i, j)| {
            let x = (i as f64 - j as f64) * 0.3;
            C64::new((i + j) as f64 * 0.1 + if i == j { 2.0 } else { 0.0 }, x)
        });
        let (vals, vecs) = eigh(&a).unwrap();
        let back = spectral_compose(&vals, &vecs, |l| C64::new(l, 0.0));
        for (x, y) in back.iter().zip(a.iter()) {
            assert!((x - y).norm() < 1e-12);
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn svd_reconstructs() {
        let a = Array2::from_shape_fn((4, 4), |(i, j)| C64::new((i * 3 + j) as f64, (i as f64) - (j as f64).sin()));
        let (u, s, v) = svd(&a).unwrap();
        let mut us = u.clone();
        for (j, sj) in s.iter().enumerate() {
            us.column_mut(j).mapv_inplace(|z| z * *sj);
        }
        let back = matmul(&us, &adjoint(&v));
        for (x, y) in back.iter().zip(a.iter()) {
            assert!((x - y).norm() < 1e-10);
        }
        let sv = singular_values(&a).unwrap();
        for (x, y) in sv.iter().zip(s.iter()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
