//! Semiclassical Schatten norms, trace distance and operator-inequality oracles.

mod oracles;
pub mod random;

pub use oracles::{alt_oracle, holder_oracle, mixing_oracle};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{LabError, Result};
use crate::linalg;
use crate::quantize::DensityOperator;
use crate::C64;

/// Norm bundle of one operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchattenReport {
    pub p_values: Vec<f64>,
    /// Raw Schatten norms `(Σ s_i^p)^{1/p}`.
    pub schatten: Vec<f64>,
    /// Semiclassical norms `h^{-d/p'}` times the raw norm.
    pub norms: Vec<f64>,
    pub trace: f64,
    pub op_norm: f64,
    pub singular_values: Vec<f64>,
}

/// Singular values, using the Hermitian eigensolver when the input is Hermitian.
pub fn singular_values(a: &Array2<C64>) -> Result<Vec<f64>> {
    if linalg::hermitian_defect(a) <= 1e-13 {
        let mut s: Vec<f64> = linalg::eigvalsh(a)?.into_iter().map(f64::abs).collect();
        s.sort_by(|x, y| y.total_cmp(x));
        Ok(s)
    } else {
        linalg::singular_values(a)
    }
}

/// `(Σ s_i^p)^{1/p}`, with `p = ∞` the largest singular value.
pub fn raw_norm(sv: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return sv.iter().fold(0.0, |m, v| m.max(*v));
    }
    if p == 1.0 {
        return sv.iter().sum();
    }
    let top = sv.iter().fold(0.0f64, |m, v| m.max(*v));
    if top == 0.0 {
        return 0.0;
    }
    top * sv.iter().map(|v| (v / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Exponent `d/p'` with `1/p' = 1 - 1/p`.
pub fn semiclassical_exponent(d: usize, p: f64) -> f64 {
    d as f64 * (1.0 - 1.0 / p)
}

/// `‖A‖_{𝓛^p} = h^{-d/p'} ‖A‖_p` with `h = 2πℏ`, here for `d = 1`.
pub fn semiclassical_norm(sv: &[f64], hbar: f64, p: f64) -> f64 {
    let h = 2.0 * std::f64::consts::PI * hbar;
    h.powf(-semiclassical_exponent(1, p)) * raw_norm(sv, p)
}

pub fn schatten(a: &Array2<C64>, hbar: f64, p_values: &[f64]) -> Result<SchattenReport> {
    for &p in p_values {
        if !(p >= 1.0) {
            return Err(LabError::Exponent(format!("Schatten exponent {p} < 1")));
        }
    }
    let sv = singular_values(a)?;
    let schatten: Vec<f64> = p_values.iter().map(|&p| raw_norm(&sv, p)).collect();
    let norms = p_values.iter().map(|&p| semiclassical_norm(&sv, hbar, p)).collect();
    Ok(SchattenReport {
        p_values: p_values.to_vec(),
        schatten,
        norms,
        trace: linalg::trace(a).re,
        op_norm: sv.first().copied().unwrap_or(0.0),
        singular_values: sv,
    })
}

fn p_to_json(p: f64) -> Value {
    if p.is_infinite() {
        json!("inf")
    } else {
        json!(p)
    }
}

fn p_from_json(v: &Value) -> Result<f64> {
    match v {
        Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        Value::Number(n) => n.as_f64().ok_or_else(|| LabError::Format("bad p".into())),
        _ => Err(LabError::Format(format!("bad p value {v}"))),
    }
}

impl SchattenReport {
    /// Flat JSON object `{"p", "schatten", "semiclassical", "trace", "opnorm"}`; `p = ∞` is `"inf"`.
    pub fn to_json(&self) -> Value {
        json!({
            "p": self.p_values.iter().map(|&p| p_to_json(p)).collect::<Vec<_>>(),
            "schatten": self.schatten,
            "semiclassical": self.norms,
            "trace": self.trace,
            "opnorm": self.op_norm,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = |key: &str| -> Result<Vec<Value>> {
            v.get(key)
                .and_then(Value::as_array)
                .cloned()
                .ok_or_else(|| LabError::Format(format!("missing array {key}")))
        };
        let num = |x: &Value| x.as_f64().ok_or_else(|| LabError::Format(format!("not a number: {x}")));
        Ok(Self {
            p_values: arr("p")?.iter().map(p_from_json).collect::<Result<_>>()?,
            schatten: arr("schatten")?.iter().map(num).collect::<Result<_>>()?,
            norms: arr("semiclassical")?.iter().map(num).collect::<Result<_>>()?,
            trace: v.get("trace").map(num).transpose()?.unwrap_or(0.0),
            op_norm: v.get("opnorm").map(num).transpose()?.unwrap_or(0.0),
            singular_values: Vec::new(),
        })
    }
}

/// `Tr|A - B|`.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> Result<f64> {
    a.check_compatible(b)?;
    let diff = &a.matrix - &b.matrix;
    Ok(singular_values(&diff)?.iter().sum())
}

/// `‖A‖_1` of an arbitrary matrix.
pub fn trace_norm(a: &Array2<C64>) -> Result<f64> {
    Ok(singular_values(a)?.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_norm_limits() {
        let sv = [3.0, 1.0, 0.5];
        assert_eq!(raw_norm(&sv, 1.0), 4.5);
        assert_eq!(raw_norm(&sv, f64::INFINITY), 3.0);
        assert!((raw_norm(&sv, 2.0) - (9.0f64 + 1.0 + 0.25).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn json_shape() {
        let a = Array2::from_diag(&ndarray::arr1(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]));
        let r = schatten(&a, 0.1, &[1.0, 2.0, f64::INFINITY]).unwrap();
        let v = r.to_json();
        assert_eq!(v["p"][2], "inf");
        assert_eq!(v["semiclassical"][0], 1.0);
        let back = SchattenReport::from_json(&v).unwrap();
        assert_eq!(back.p_values, r.p_values);
        assert_eq!(back.norms, r.norms);
    }
}
