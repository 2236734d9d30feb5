use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::phasespace::Grid1D;

/// Interaction potential `K(x) = sign·|x|^{-a}` (or `sign·ln|x|` when `log` is set),
/// with `|x|` replaced by `sqrt(|x|² + δ²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub d: usize,
    pub a: f64,
    /// `+1` repulsive, `-1` attractive, `0` switches the interaction off.
    pub sign: f64,
    /// Softening length; `None` selects the grid default.
    pub delta: Option<f64>,
    #[serde(default)]
    pub log: bool,
}

impl KernelSpec {
    pub fn power(d: usize, a: f64, sign: f64) -> Self {
        Self { d, a, sign, delta: None, log: false }
    }

    pub fn logarithmic(d: usize, sign: f64) -> Self {
        Self { d, a: 0.0, sign, delta: None, log: true }
    }

    pub fn zero(d: usize) -> Self {
        Self { d, a: 0.0, sign: 0.0, delta: Some(0.0), log: false }
    }

    /// `K ≡ c`.
    pub fn constant(d: usize, c: f64) -> Self {
        Self { d, a: 0.0, sign: c, delta: Some(0.0), log: false }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0.0
    }

    /// Zero or constant kernel.
    pub fn is_flat(&self) -> bool {
        self.is_zero() || (self.a == 0.0 && !self.log)
    }

    /// `b = d/(a+1)`.
    pub fn b(&self) -> f64 {
        self.d as f64 / (self.a + 1.0)
    }

    /// Conjugate exponent `b' = b/(b-1)`; infinite when `b = 1`.
    pub fn b_prime(&self) -> f64 {
        let b = self.b();
        if b == 1.0 {
            f64::INFINITY
        } else {
            b / (b - 1.0)
        }
    }

    /// Whether the origin must be resolved by softening.
    pub fn needs_softening(&self) -> bool {
        !self.is_flat() && (self.log || self.a >= self.d as f64 - 2.0)
    }

    /// Softening actually used on a grid of spacing `dx`.
    pub fn delta_on(&self, dx: f64) -> f64 {
        match self.delta {
            Some(d) => d,
            None if self.needs_softening() => 2.0 * dx,
            None => 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_flat() {
            return Ok(());
        }
        let d = self.d as f64;
        if !(self.a > -1.0 && self.a < d) {
            return Err(LabError::Exponent(format!("kernel exponent a={} outside (-1, {d})", self.a)));
        }
        if self.log && self.a != 0.0 {
            return Err(LabError::Exponent("logarithmic kernel requires a = 0".into()));
        }
        Ok(())
    }

    /// Resolved copy for a grid: checks the singularity rule and fixes `δ`.
    pub fn resolved(&self, grid: &Grid1D) -> Result<Self> {
        self.validate()?;
        let dx = grid.spacing();
        let delta = self.delta_on(dx);
        if self.needs_softening() && delta == 0.0 {
            return Err(LabError::Singularity(format!(
                "a={} ≥ d-2={} requires a positive softening length",
                self.a,
                self.d as i64 - 2
            )));
        }
        if self.needs_softening() && delta < dx * (1.0 - 1e-12) {
            return Err(LabError::Singularity(format!("softening δ={delta} is below the grid spacing {dx}")));
        }
        Ok(Self { delta: Some(delta), ..*self })
    }

    fn delta_val(&self) -> f64 {
        self.delta.unwrap_or(0.0)
    }

    /// Pointwise `K_δ(r)` for `r = |x| ≥ 0`.
    pub fn value(&self, r: f64) -> f64 {
        if self.is_flat() {
            return self.sign;
        }
        let d2 = self.delta_val().powi(2);
        let s2 = r * r + d2;
        if self.log {
            0.5 * self.sign * s2.ln()
        } else {
            self.sign * s2.powf(-0.5 * self.a)
        }
    }

    /// Radial derivative `K_δ'(r)`; `∇K(x) = K'(|x|) x/|x|`.
    pub fn radial_derivative(&self, r: f64) -> f64 {
        if self.is_flat() {
            return 0.0;
        }
        let d2 = self.delta_val().powi(2);
        let s2 = r * r + d2;
        if self.log {
            self.sign * r / s2
        } else {
            -self.a * self.sign * r * s2.powf(-0.5 * self.a - 1.0)
        }
    }

    /// One-dimensional gradient `∂_x K_δ(x)`.
    pub fn grad_1d(&self, x: f64) -> f64 {
        self.radial_derivative(x.abs()) * x.signum()
    }
}

/// `K_δ` and `∂_x K_δ` at the nodes of a one-dimensional grid.
///
/// With `δ = 0` and `a > 0` the origin sample is the cell average of the kernel.
pub fn kernel_eval(k: &KernelSpec, grid: &Grid1D) -> Result<(Vec<f64>, Vec<f64>)> {
    let k = k.resolved(grid)?;
    let dx = grid.spacing();
    let mut vals = Vec::with_capacity(grid.n_points);
    let mut grads = Vec::with_capacity(grid.n_points);
    for x in grid.points() {
        if x == 0.0 && k.delta_val() == 0.0 && k.a > 0.0 && !k.is_flat() {
            vals.push(k.sign * (0.5 * dx).powf(-k.a) / (1.0 - k.a));
        } else {
            vals.push(k.value(x.abs()));
        }
        grads.push(k.grad_1d(x));
    }
    Ok((vals, grads))
}
