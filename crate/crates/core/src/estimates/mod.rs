//! Numerical checks of the inequalities and decompositions: each check produces
//! `(lhs, rhs_shape, ratio)` triples along a ladder and grades the ratio.

mod commutator;
mod exchange;
mod gaussian;
mod quadrature;
mod stability;
mod weyl_bounds;

pub use commutator::{
    commutator_covariance, commutator_lp_check, commutator_trace_check, commutator_trace_point,
    kinetic_interpolation_check, CommutatorExponents,
};
pub use exchange::{controlling_l2m_check, exchange_bound_check, exchange_energy};
pub use gaussian::{gaussian_decomposition, gaussian_decomposition_check, omega};
pub use quadrature::{integrate, Quadrature};
pub use stability::{classical_stability_check, StabilityOptions, StabilityReport};
pub use weyl_bounds::weighted_weyl_bound_check;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Ladder parameter of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderAxis {
    Hbar,
    Z,
    Resolution,
    Delta,
    Radius,
    Time,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub param: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    pub lhs: f64,
    pub rhs_shape: f64,
    pub ratio: f64,
}

impl BoundPoint {
    pub fn new(param: f64, lhs: f64, rhs_shape: f64) -> Self {
        Self { param, z: None, lhs, rhs_shape, ratio: ratio(lhs, rhs_shape) }
    }

    pub fn at(mut self, z: f64) -> Self {
        self.z = Some(z);
        self
    }
}

/// `lhs / rhs_shape`, defined as 0 when `lhs = 0`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub bounded: bool,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub axis: LadderAxis,
    pub points: Vec<BoundPoint>,
    #[serde(rename = "fitted_C")]
    pub fitted_c: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, f64>,
}

impl BoundCheck {
    /// Grades boundedness: all ratios finite, and the positive ones within `factor` of each other.
    /// The fitted constant is the ratio at the first (coarsest) point with `lhs > 0`.
    pub fn graded(name: impl Into<String>, axis: LadderAxis, points: Vec<BoundPoint>, factor: f64) -> Self {
        let positive: Vec<f64> = points.iter().map(|p| p.ratio).filter(|r| *r > 0.0).collect();
        let finite = points.iter().all(|p| p.ratio.is_finite() && p.ratio >= 0.0);
        let (max_ratio, min_ratio) = if positive.is_empty() {
            (0.0, 0.0)
        } else {
            (positive.iter().copied().fold(f64::MIN, f64::max), positive.iter().copied().fold(f64::MAX, f64::min))
        };
        let bounded = finite && (positive.is_empty() || max_ratio / min_ratio < factor);
        Self {
            name: name.into(),
            axis,
            fitted_c: positive.first().copied().unwrap_or(0.0),
            points,
            verdict: Verdict { bounded, max_ratio, min_ratio, factor },
            notes: BTreeMap::new(),
        }
    }

    /// Grades `ratio ≤ 1 + slack` at every point (envelope-type checks).
    pub fn enveloped(name: impl Into<String>, axis: LadderAxis, points: Vec<BoundPoint>, fitted_c: f64, slack: f64) -> Self {
        let ratios: Vec<f64> = points.iter().map(|p| p.ratio).collect();
        let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
        let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let bounded = ratios.iter().all(|r| r.is_finite() && *r <= 1.0 + slack);
        Self {
            name: name.into(),
            axis,
            points,
            fitted_c,
            verdict: Verdict { bounded, max_ratio, min_ratio: if min_ratio.is_finite() { min_ratio } else { 0.0 }, factor: 1.0 + slack },
            notes: BTreeMap::new(),
        }
    }

    pub fn with_note(mut self, key: &str, value: f64) -> Self {
        self.notes.insert(key.to_string(), value);
        self
    }

    pub fn spread(&self) -> f64 {
        if self.verdict.min_ratio > 0.0 {
            self.verdict.max_ratio / self.verdict.min_ratio
        } else {
            0.0
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_lhs_grades_as_bounded() {
        let c = BoundCheck::graded("t", LadderAxis::Hbar, vec![BoundPoint::new(0.1, 0.0, 0.0)], 10.0);
        assert!(c.verdict.bounded);
        assert_eq!(c.points[0].ratio, 0.0);
    }

    #[test]
    fn json_shape() {
        let c = BoundCheck::graded(
            "t",
            LadderAxis::Hbar,
            vec![BoundPoint::new(0.2, 2.0, 1.0), BoundPoint::new(0.1, 3.0, 1.0)],
            10.0,
        );
        let v = c.to_json();
        assert_eq!(v["fitted_C"], 2.0);
        assert_eq!(v["axis"], "hbar");
        assert_eq!(v["points"][1]["ratio"], 3.0);
        assert!(v["verdict"]["bounded"].as_bool().unwrap());
    }
}
