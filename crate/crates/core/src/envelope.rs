//! Stability exponents and validity thresholds.
//!
//! The exponent algebra is exact: its functions are generic over [`Real`],
//! implemented for `f64` and for exact rationals `Ratio<i64>`. The stable
//! constants that multiply the envelopes are not known in closed form; they
//! all default to one in [`EnvelopeConstants`], and every prediction is
//! marked shape-only until they are calibrated.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scalars the exponent formulas can be evaluated in.
pub trait Real: Copy + PartialOrd + Num + FromPrimitive + ToPrimitive + Debug {}

impl Real for f64 {}
impl Real for Ratio<i64> {}

fn int<T: Real>(x: i64) -> T {
    T::from_i64(x).expect("small integers are representable")
}

/// Relative slack accepted on the upper end of admissible parameter ranges,
/// so that decimal renderings such as `0.1666667` for `1/6` are admitted.
pub const RANGE_SLACK: f64 = 1e-6;

fn within_upper<T: Real>(x: T, bound: T) -> bool {
    if x <= bound {
        return true;
    }
    match (x.to_f64(), bound.to_f64()) {
        (Some(x), Some(b)) => x <= b * (1.0 + RANGE_SLACK),
        _ => false,
    }
}

fn check_dim(n: usize) -> Result<i64> {
    if n < 2 {
        return Err(Error::domain(format!("dimension n = {n} must be >= 2")));
    }
    Ok(n as i64)
}

/// `a_γ = (1 − 2γ) / (2(n−1))` for `0 < γ ≤ (2n)^{−1}`.
pub fn exponent_analytic<T: Real>(n: usize, gamma: T) -> Result<T> {
    let n = check_dim(n)?;
    let upper = T::one() / int(2 * n);
    if !(gamma > T::zero()) || !within_upper(gamma, upper) {
        return Err(Error::domain(format!(
            "gamma = {gamma:?} outside (0, 1/(2n)] for n = {n}"
        )));
    }
    Ok((T::one() - int::<T>(2) * gamma) / int(2 * (n - 1)))
}

/// `δ = γ/(n−1)`, under which `a_γ = (2(n−1))^{−1} − δ`.
pub fn analytic_delta_from_gamma<T: Real>(n: usize, gamma: T) -> T {
    gamma / int(n as i64 - 1)
}

pub fn analytic_gamma_from_delta<T: Real>(n: usize, delta: T) -> T {
    delta * int(n as i64 - 1)
}

/// `(a_γ, b_γ)` with `a_γ = (1 − 5γ(n−1)²)/(2α(n−1))` and
/// `b_γ = (1 − γ(n−1)(3n−1))/(2(n−1))`, for `0 < γ ≤ 5^{−1}(n−1)^{−2}`.
pub fn exponent_gevrey<T: Real>(n: usize, alpha: T, gamma: T) -> Result<(T, T)> {
    let n = check_dim(n)?;
    if !(alpha >= T::one()) {
        return Err(Error::domain(format!("alpha = {alpha:?} must be >= 1")));
    }
    let m1 = n - 1;
    let upper = T::one() / int(5 * m1 * m1);
    if !(gamma > T::zero()) || !within_upper(gamma, upper) {
        return Err(Error::domain(format!(
            "gamma = {gamma:?} outside (0, 1/(5(n-1)^2)] for n = {n}"
        )));
    }
    let a = (T::one() - int::<T>(5 * m1 * m1) * gamma) / (int::<T>(2 * m1) * alpha);
    let b = (T::one() - gamma * int(m1 * (3 * n - 1))) / int(2 * m1);
    Ok((a, b))
}

/// `δ = (5/2)·γ·(n−1)`.
pub fn gevrey_delta_from_gamma<T: Real>(n: usize, gamma: T) -> T {
    int::<T>(5) * gamma * int(n as i64 - 1) / int(2)
}

pub fn gevrey_gamma_from_delta<T: Real>(n: usize, delta: T) -> T {
    int::<T>(2) * delta / int(5 * (n as i64 - 1))
}

/// Local exponents near a resonance of multiplicity `m`:
/// `a_m = (2α(n−m))^{−1}`, `b_m = (2(n−m))^{−1}`.
pub fn local_exponents<T: Real>(n: usize, multiplicity: usize, alpha: T) -> Result<(T, T)> {
    if multiplicity >= n {
        return Err(Error::domain(format!(
            "multiplicity {multiplicity} must be < n = {n}"
        )));
    }
    if !(alpha >= T::one()) {
        return Err(Error::domain("alpha must be >= 1"));
    }
    let d = int::<T>(2 * (n - multiplicity) as i64);
    Ok((T::one() / (d * alpha), T::one() / d))
}

/// The stable constants of the envelopes. None is given numerically by the
/// theory; all default to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvelopeConstants {
    pub k0: f64,
    pub eps0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c1p: f64,
    pub c2p: f64,
    pub c3p: f64,
    pub c4p: f64,
    pub c5p: f64,
    pub rho0: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    /// Right-hand side of the Gevrey resonance condition `εK^{5(n−1)²} < c7`.
    pub c7: f64,
    /// Set when the constants above were calibrated for a concrete system.
    pub calibrated: bool,
}

impl Default for EnvelopeConstants {
    fn default() -> Self {
        EnvelopeConstants {
            k0: 1.0,
            eps0: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            c5: 1.0,
            c1p: 1.0,
            c2p: 1.0,
            c3p: 1.0,
            c4p: 1.0,
            c5p: 1.0,
            rho0: 1.0,
            big_c: 1.0,
            c7: 1.0,
            calibrated: false,
        }
    }
}

impl EnvelopeConstants {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.k0, self.eps0, self.c1, self.c2, self.c3, self.c4, self.c5, self.c1p, self.c2p,
            self.c3p, self.c4p, self.c5p, self.rho0, self.big_c, self.c7,
        ];
        if all.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
            return Err(Error::domain(
                "envelope constants must be positive and finite",
            ));
        }
        Ok(())
    }
}

/// `K = K₀ (ε₀/ε)^γ`.
pub fn k_schedule(eps: f64, gamma: f64, consts: &EnvelopeConstants) -> Result<f64> {
    if !(eps > 0.0) || eps > consts.eps0 {
        return Err(Error::domain(format!(
            "epsilon = {eps} outside (0, eps0 = {}]",
            consts.eps0
        )));
    }
    if !(gamma > 0.0) {
        return Err(Error::domain(format!("gamma = {gamma} must be > 0")));
    }
    Ok(consts.k0 * (consts.eps0 / eps).powf(gamma))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Analytic,
    Gevrey,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl Threshold {
    fn less(name: &str, lhs: f64, rhs: f64) -> Self {
        Threshold {
            name: name.to_string(),
            lhs,
            rhs,
            satisfied: lhs < rhs,
        }
    }
}

/// Evaluates the validity inequalities literally at `(ε, K)`:
///
/// * `resonant_stability`: `εK^{2n} < 1` (analytic regime),
/// * `gevrey_resonant_stability`: `εK^{5(n−1)²} < c7` (Gevrey regime),
/// * `confinement_order`: `K^{−2} < Cρ₀/32`,
/// * `confinement_energy`: `εK² < 16`.
pub fn check_thresholds(
    n: usize,
    eps: f64,
    k: f64,
    regime: Regime,
    consts: &EnvelopeConstants,
) -> Vec<Threshold> {
    let n = n as i32;
    let mut out = Vec::with_capacity(3);
    match regime {
        Regime::Analytic => out.push(Threshold::less(
            "resonant_stability",
            eps * k.powi(2 * n),
            1.0,
        )),
        Regime::Gevrey => out.push(Threshold::less(
            "gevrey_resonant_stability",
            eps * k.powi(5 * (n - 1) * (n - 1)),
            consts.c7,
        )),
    }
    out.push(Threshold::less(
        "confinement_order",
        k.powi(-2),
        consts.big_c * consts.rho0 / 32.0,
    ));
    out.push(Threshold::less("confinement_energy", eps * k * k, 16.0));
    out
}

/// Caveat attached to uncalibrated predictions.
pub const SHAPE_ONLY: &str = "shape-only unless constants calibrated";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityPrediction {
    pub regime: Regime,
    pub n: usize,
    pub alpha: f64,
    pub delta: f64,
    /// Schedule exponent `γ` equivalent to `δ`.
    pub gamma: f64,
    pub epsilon: f64,
    /// Resonance order cutoff `K = K₀(ε₀/ε)^γ`.
    pub k_cutoff: f64,
    pub radius_exponent: f64,
    pub confinement_radius: f64,
    /// The `a` of `exp(ε^{−a})`.
    pub time_log_exponent: f64,
    /// `ln` of the time bound `c₂ exp(c₃ ε^{−a})`.
    pub log_time_bound: f64,
    pub thresholds: Vec<Threshold>,
    pub constants: EnvelopeConstants,
    pub shape_only: bool,
    pub caveat: Option<String>,
}

fn check_eps(eps: f64, consts: &EnvelopeConstants) -> Result<()> {
    if !(eps > 0.0) || eps > consts.eps0 {
        return Err(Error::domain(format!(
            "epsilon = {eps} outside (0, eps0 = {}]",
            consts.eps0
        )));
    }
    Ok(())
}

/// Analytic envelope: `|I(t) − I₀| ≤ c₁ ε^{δ(n−1)}` for
/// `|t| ≤ c₂ exp(c₃ ε^{−1/(2(n−1)) + δ})`, with `0 < δ ≤ (2n(n−1))^{−1}`.
pub fn predict_analytic(
    n: usize,
    delta: f64,
    eps: f64,
    consts: &EnvelopeConstants,
) -> Result<StabilityPrediction> {
    let ni = check_dim(n)? as f64;
    consts.validate()?;
    let upper = 1.0 / (2.0 * ni * (ni - 1.0));
    if !(delta > 0.0) || !within_upper(delta, upper) {
        return Err(Error::domain(format!(
            "delta = {delta} outside (0, 1/(2n(n-1))] = (0, {upper}]"
        )));
    }
    check_eps(eps, consts)?;
    let gamma = analytic_gamma_from_delta(n, delta);
    let k = k_schedule(eps, gamma, consts)?;
    let radius_exponent = delta * (ni - 1.0);
    let a = 1.0 / (2.0 * (ni - 1.0)) - delta;
    Ok(StabilityPrediction {
        regime: Regime::Analytic,
        n,
        alpha: 1.0,
        delta,
        gamma,
        epsilon: eps,
        k_cutoff: k,
        radius_exponent,
        confinement_radius: consts.c1 * eps.powf(radius_exponent),
        time_log_exponent: a,
        log_time_bound: consts.c2.ln() + consts.c3 * eps.powf(-a),
        thresholds: check_thresholds(n, eps, k, Regime::Analytic, consts),
        shape_only: !consts.calibrated,
        caveat: (!consts.calibrated).then(|| SHAPE_ONLY.to_string()),
        constants: consts.clone(),
    })
}

/// Gevrey envelope: `|I(t) − I₀| ≤ c′₁ ε^{2δ/(5(n−1))}` for
/// `|t| ≤ c′₂ exp(c′₃ ε^{−1/(2α(n−1)) + δ})`, with `0 < δ ≤ (2αn(n−1))^{−1}`.
pub fn predict_gevrey(
    n: usize,
    alpha: f64,
    delta: f64,
    eps: f64,
    consts: &EnvelopeConstants,
) -> Result<StabilityPrediction> {
    let ni = check_dim(n)? as f64;
    consts.validate()?;
    if !(alpha >= 1.0) {
        return Err(Error::domain(format!("alpha = {alpha} must be >= 1")));
    }
    let upper = 1.0 / (2.0 * alpha * ni * (ni - 1.0));
    if !(delta > 0.0) || !within_upper(delta, upper) {
        return Err(Error::domain(format!(
            "delta = {delta} outside (0, 1/(2 alpha n(n-1))] = (0, {upper}]"
        )));
    }
    check_eps(eps, consts)?;
    let gamma = gevrey_gamma_from_delta(n, delta);
    let k = k_schedule(eps, gamma, consts)?;
    let radius_exponent = 2.0 * delta / (5.0 * (ni - 1.0));
    let a = 1.0 / (2.0 * alpha * (ni - 1.0)) - delta;
    Ok(StabilityPrediction {
        regime: Regime::Gevrey,
        n,
        alpha,
        delta,
        gamma,
        epsilon: eps,
        k_cutoff: k,
        radius_exponent,
        confinement_radius: consts.c1p * eps.powf(radius_exponent),
        time_log_exponent: a,
        log_time_bound: consts.c2p.ln() + consts.c3p * eps.powf(-a),
        thresholds: check_thresholds(n, eps, k, Regime::Gevrey, consts),
        shape_only: !consts.calibrated,
        caveat: (!consts.calibrated).then(|| SHAPE_ONLY.to_string()),
        constants: consts.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = Ratio<i64>;

    fn q(a: i64, b: i64) -> Q {
        Ratio::new(a, b)
    }

    #[test]
    fn schedule() {
        let c = EnvelopeConstants::default();
        assert_eq!(k_schedule(1.0, 0.3, &c).unwrap(), 1.0);
        assert!((k_schedule(1e-6, 1.0 / 6.0, &c).unwrap() - 10.0).abs() < 1e-12);
        assert!(k_schedule(1e-6, 0.0, &c).is_err());
        assert!(k_schedule(2.0, 0.1, &c).is_err());
    }

    #[test]
    fn analytic_exponent_examples() {
        assert_eq!(exponent_analytic(3, q(1, 6)).unwrap(), q(1, 6));
        assert_eq!(exponent_analytic(3, q(1, 12)).unwrap(), q(5, 24));
        let g = q(1, 12);
        let d = analytic_delta_from_gamma(3, g);
        assert_eq!(exponent_analytic(3, g).unwrap(), q(1, 4) - d);
        assert!(exponent_analytic(3, q(1, 5)).is_err());
        assert!(exponent_analytic(3, q(0, 1)).is_err());
    }

    #[test]
    fn gevrey_exponent_examples() {
        assert_eq!(
            exponent_gevrey(3, q(1, 1), q(1, 40)).unwrap(),
            (q(1, 8), q(3, 20))
        );
        let g = q(1, 100);
        let d = gevrey_delta_from_gamma(3, g);
        assert_eq!(exponent_gevrey(3, q(1, 1), g).unwrap().0, q(1, 4) - d);
        // γ → 0 limits
        let (a, b) = exponent_gevrey(4, 2.0, 1e-12).unwrap();
        assert!((a - 1.0 / 12.0).abs() < 1e-10 && (b - 1.0 / 6.0).abs() < 1e-10);
        assert!(exponent_gevrey(3, 1.0, 0.1).is_err());
        assert!(exponent_gevrey(3, 0.5, 0.01).is_err());
    }

    #[test]
    fn local_exponent_examples() {
        assert_eq!(local_exponents(4, 2, q(1, 1)).unwrap(), (q(1, 4), q(1, 4)));
        assert_eq!(
            local_exponents(5, 0, q(3, 1)).unwrap(),
            (q(1, 30), q(1, 10))
        );
        assert_eq!(local_exponents(3, 2, q(1, 1)).unwrap(), (q(1, 2), q(1, 2)));
        assert!(local_exponents(3, 3, q(1, 1)).is_err());
    }

    #[test]
    fn analytic_prediction() {
        let c = EnvelopeConstants::default();
        let p = predict_analytic(3, 1.0 / 12.0, 1e-4, &c).unwrap();
        assert!((p.confinement_radius - 10f64.powf(-2.0 / 3.0)).abs() < 1e-12);
        assert!((p.log_time_bound - 10f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!(p.shape_only && p.caveat.is_some());

        let p = predict_analytic(4, 1.0 / 24.0, 1e-3, &c).unwrap();
        assert!((p.radius_exponent - 0.125).abs() < 1e-15);
        assert!((p.time_log_exponent - 0.125).abs() < 1e-15);

        let p = predict_analytic(3, 1.0 / 12.0, 1.0, &c).unwrap();
        assert!(p.confinement_radius.is_finite() && p.log_time_bound.is_finite());
        assert_eq!(p.thresholds.len(), 3);
        assert!(predict_analytic(3, 1.0, 1e-4, &c).is_err());
    }

    #[test]
    fn gevrey_prediction() {
        let c = EnvelopeConstants::default();
        let p = predict_gevrey(3, 2.0, 1.0 / 48.0, 1e-4, &c).unwrap();
        assert!((p.time_log_exponent - 5.0 / 48.0).abs() < 1e-15);
        let g1 = predict_gevrey(3, 1.0, 1.0 / 24.0, 1e-4, &c).unwrap();
        let an = predict_analytic(3, 1.0 / 24.0, 1e-4, &c).unwrap();
        assert_eq!(g1.time_log_exponent, an.time_log_exponent);
        assert_ne!(g1.radius_exponent, an.radius_exponent);
        assert!(predict_gevrey(3, 1.0, 1.0, 1e-4, &c).is_err());
    }

    #[test]
    fn thresholds() {
        let c = EnvelopeConstants::default();
        let t = check_thresholds(3, 1e-8, 2.0, Regime::Analytic, &c);
        assert!(t[0].satisfied && (t[0].lhs - 64e-8).abs() < 1e-20);
        assert!(!check_thresholds(3, 1.0, 2.0, Regime::Analytic, &c)[0].satisfied);
        let t = check_thresholds(3, 1e-8, 10.0, Regime::Analytic, &c);
        assert!(t[1].satisfied && t[1].lhs == 0.01);
        let t = check_thresholds(3, 1e-30, 2.0, Regime::Gevrey, &c);
        assert_eq!(t[0].name, "gevrey_resonant_stability");
        assert!(t[0].satisfied);
    }

    #[test]
    fn decimal_gamma_is_admitted() {
        let a = exponent_analytic(3, 0.1666667).unwrap();
        assert!((a - 1.0 / 6.0).abs() < 1e-7);
    }
}
