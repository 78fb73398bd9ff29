use serde::{Deserialize, Serialize};

use super::sweep::SweepResult;
use crate::error::{Error, Result};

/// RMS residual above which a fit is flagged as a poor description of the
/// data by `ln ln T = a·ln(1/ε) + b`.
pub const POOR_FIT_RESIDUAL: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a_estimate: f64,
    pub intercept: f64,
    /// RMS residual of the linear fit.
    pub residual: f64,
    pub points_used: usize,
    pub poor_fit: bool,
}

/// Least-squares slope of `ln ln T` against `ln(1/ε)` over the non-censored
/// rows with `T > 1`.
pub fn fit_exponent(sweep: &SweepResult) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = sweep
        .rows
        .iter()
        .filter(|r| !r.censored)
        .filter_map(|r| r.stability_time.map(|t| (r.epsilon, t)))
        .filter(|&(e, t)| t > 1.0 && t.is_finite() && e > 0.0)
        .map(|(e, t)| ((1.0 / e).ln(), t.ln().ln()))
        .collect();
    fit_points(&pts)
}

pub(crate) fn fit_points(pts: &[(f64, f64)]) -> Result<FitResult> {
    if pts.len() < 3 {
        return Err(Error::domain(format!(
            "exponent fit needs >= 3 non-censored rows with T > 1, got {}",
            pts.len()
        )));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::domain(
            "exponent fit is degenerate: all epsilon values coincide",
        ));
    }
    if syy == 0.0 {
        return Err(Error::domain(
            "exponent fit is degenerate: stability time does not vary with epsilon",
        ));
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - (a * p.0 + b)).powi(2)).sum();
    let residual = (rss / m).sqrt();
    Ok(FitResult {
        a_estimate: a,
        intercept: b,
        residual,
        points_used: pts.len(),
        poor_fit: residual > POOR_FIT_RESIDUAL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::synthetic_sweep;

    fn grid() -> Vec<f64> {
        (0..9).map(|k| 10f64.powf(-1.0 - 0.5 * k as f64)).collect()
    }

    #[test]
    fn exact_synthetic_tables() {
        for a in [1.0 / 6.0, 0.25, 0.5] {
            let s = synthetic_sweep(&grid(), a, 1.0, 1.0).unwrap();
            let f = fit_exponent(&s).unwrap();
            assert!((f.a_estimate - a).abs() < 1e-6, "{a}: {f:?}");
            assert!(!f.poor_fit);
            assert_eq!(f.points_used, 9);
        }
    }

    #[test]
    fn power_law_is_flagged() {
        let pts: Vec<(f64, f64)> = grid()
            .iter()
            .map(|e| ((1.0 / e).ln(), (e.powi(-2)).ln().ln()))
            .collect();
        let f = fit_points(&pts).unwrap();
        assert!(f.poor_fit, "{f:?}");
    }

    #[test]
    fn degenerate_inputs() {
        let pts = vec![(1.0, 2.0), (2.0, 2.0), (3.0, 2.0)];
        assert!(fit_points(&pts).is_err());
        assert!(fit_points(&pts[..2]).is_err());
    }
}
