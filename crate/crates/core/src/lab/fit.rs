use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Least-squares line through `(log ℏ, log error)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn rate_fit(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(LabError::FitUnderdetermined(points.len()));
    }
    if let Some(&(_, e)) = points.iter().find(|(h, e)| !(*e > 0.0) || !(*h > 0.0)) {
        return Err(LabError::NonpositiveError(e));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(LabError::FitUnderdetermined(1));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit { slope, intercept, r2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(c: f64, s: f64) -> Vec<(f64, f64)> {
        [0.2, 0.1, 0.05, 0.025].iter().map(|&h| (h, c * f64::powf(h, s))).collect()
    }

    #[test]
    fn exact_lines() {
        for s in [1.0, 2.0, 0.75] {
            let f = rate_fit(&line(3.0, s)).unwrap();
            assert!((f.slope - s).abs() < 1e-12);
            assert!((f.intercept - 3.0f64.ln()).abs() < 1e-12);
            assert!((f.r2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn refuses_bad_input() {
        assert!(matches!(rate_fit(&line(1.0, 1.0)[..2]), Err(LabError::FitUnderdetermined(2))));
        assert!(matches!(rate_fit(&[(0.1, 1.0), (0.2, 0.0), (0.3, 1.0)]), Err(LabError::NonpositiveError(_))));
    }
}
