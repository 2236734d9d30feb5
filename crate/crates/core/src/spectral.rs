//! FFT plumbing: wavenumbers, multipliers, shifts and band-limited interpolation.

use std::sync::Arc;

use ndarray::{ArrayViewMut1, Axis, ArrayViewMutD};
use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Angular wavenumbers of an `n`-point grid of length `len` in FFT order.
pub fn wavenumbers(n: usize, len: f64) -> Vec<f64> {
    let dk = 2.0 * std::f64::consts::PI / len;
    (0..n)
        .map(|j| {
            let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            m * dk
        })
        .collect()
}

/// Forward/inverse plan pair for one transform length.
#[derive(Clone)]
pub struct Plan {
    pub n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Plan {
    pub fn new(n: usize) -> Self {
        let mut p = FftPlanner::new();
        Self { n, fwd: p.plan_fft_forward(n), inv: p.plan_fft_inverse(n) }
    }

    pub fn forward(&self, buf: &mut [C64]) {
        self.fwd.process(buf);
    }

    /// Normalized inverse transform.
    pub fn inverse(&self, buf: &mut [C64]) {
        self.inv.process(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|z| *z *= s);
    }

    /// `buf ← F⁻¹ diag(mult) F buf`.
    pub fn apply(&self, buf: &mut [C64], mult: &[C64]) {
        self.forward(buf);
        buf.iter_mut().zip(mult).for_each(|(z, m)| *z *= m);
        self.inverse(buf);
    }

    pub fn apply_lane(&self, mut lane: ArrayViewMut1<C64>, mult: &[C64], scratch: &mut Vec<C64>) {
        scratch.clear();
        scratch.extend(lane.iter().copied());
        self.apply(scratch, mult);
        lane.iter_mut().zip(scratch.iter()).for_each(|(d, s)| *d = *s);
    }
}

/// Multiplier `∏ (i k)^order` for a derivative of the given order.
pub fn derivative_multiplier(k: &[f64], order: u32) -> Vec<C64> {
    let n = k.len();
    k.iter()
        .enumerate()
        .map(|(j, &kj)| {
            // odd derivatives of the Nyquist mode are not real-representable
            if order % 2 == 1 && n % 2 == 0 && j == n / 2 {
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, kj).powu(order)
            }
        })
        .collect()
}

/// Multiplier translating a periodic signal by `s`: `g(x) ← g(x - s)`.
pub fn shift_multiplier(k: &[f64], s: f64) -> Vec<C64> {
    let n = k.len();
    k.iter()
        .enumerate()
        .map(|(j, &kj)| {
            if n % 2 == 0 && j == n / 2 {
                C64::new((kj * s).cos(), 0.0)
            } else {
                C64::from_polar(1.0, -kj * s)
            }
        })
        .collect()
}

/// Applies a multiplier along one axis of an n-dimensional complex array.
pub fn apply_along_axis(arr: &mut ArrayViewMutD<C64>, axis: usize, mult: &[C64]) {
    let plan = Plan::new(arr.len_of(Axis(axis)));
    let mut scratch = Vec::with_capacity(plan.n);
    for lane in arr.lanes_mut(Axis(axis)) {
        plan.apply_lane(lane, mult, &mut scratch);
    }
}

/// Trigonometric interpolation of a periodic real signal to a grid twice as fine.
/// Output sample `2i` equals input sample `i`; odd samples are the midpoints.
pub fn upsample2(g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let plan = Plan::new(n);
    let mut buf: Vec<C64> = g.iter().map(|&v| C64::new(v, 0.0)).collect();
    plan.forward(&mut buf);
    let m = 2 * n;
    let mut big = vec![C64::new(0.0, 0.0); m];
    for j in 0..n / 2 {
        big[j] = buf[j];
    }
    for j in n / 2 + 1..n {
        big[j + n] = buf[j];
    }
    if n % 2 == 0 {
        // split the Nyquist coefficient symmetrically
        let h = buf[n / 2] * 0.5;
        big[n / 2] = h;
        big[m - n / 2] = h;
    } else {
        big[n / 2] = buf[n / 2];
    }
    let plan2 = Plan::new(m);
    plan2.inverse(&mut big);
    big.iter().map(|z| z.re * 2.0).collect()
}

/// Fraction of the L² mass of `spec` (FFT-ordered along each axis) above `frac` of Nyquist
/// in any coordinate.
pub fn tail_fraction(spec: &ndarray::ArrayD<C64>, frac: f64) -> f64 {
    let shape = spec.shape().to_vec();
    let mut total = 0.0;
    let mut tail = 0.0;
    for (idx, z) in spec.indexed_iter() {
        let w = z.norm_sqr();
        total += w;
        let outside = ndarray::Dimension::slice(&idx).iter().zip(&shape).any(|(&j, &n)| {
            let m = if j < n / 2 { j as f64 } else { (n - j) as f64 };
            m > frac * (n as f64 / 2.0)
        });
        if outside {
            tail += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derivative_of_sine() {
        let n = 32;
        let len = 2.0 * PI;
        let k = wavenumbers(n, len);
        let plan = Plan::new(n);
        let x: Vec<f64> = (0..n).map(|i| -PI + i as f64 * len / n as f64).collect();
        let mut buf: Vec<C64> = x.iter().map(|&v| C64::new((3.0 * v).sin(), 0.0)).collect();
        plan.apply(&mut buf, &derivative_multiplier(&k, 1));
        for (b, &v) in buf.iter().zip(&x) {
            assert!((b.re - 3.0 * (3.0 * v).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn upsample_hits_midpoints() {
        let n = 16;
        let len = 2.0 * PI;
        let x = |i: f64| -PI + i * len / n as f64;
        let g: Vec<f64> = (0..n).map(|i| (2.0 * x(i as f64)).cos() + 0.3 * x(i as f64).sin()).collect();
        let up = upsample2(&g);
        for i in 0..2 * n {
            let xi = x(i as f64 / 2.0);
            assert!((up[i] - ((2.0 * xi).cos() + 0.3 * xi.sin())).abs() < 1e-12);
        }
    }

    #[test]
    fn shift_is_translation() {
        let n = 64;
        let len = 10.0;
        let k = wavenumbers(n, len);
        let plan = Plan::new(n);
        let x: Vec<f64> = (0..n).map(|i| -5.0 + i as f64 * len / n as f64).collect();
        let mut buf: Vec<C64> = x.iter().map(|&v| C64::new((-v * v).exp(), 0.0)).collect();
        plan.apply(&mut buf, &shift_multiplier(&k, 0.37));
        for (b, &v) in buf.iter().zip(&x) {
            assert!((b.re - (-(v - 0.37) * (v - 0.37)).exp()).abs() < 1e-9);
        }
    }
}
