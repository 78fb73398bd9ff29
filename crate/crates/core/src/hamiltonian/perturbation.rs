use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Action-dependent factor `w(I) = c + b·I + Iᵀ Q I` of a perturbation term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionWeight {
    #[serde(default = "one")]
    pub constant: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<Vec<Vec<f64>>>,
}

fn one() -> f64 {
    1.0
}

impl Default for ActionWeight {
    fn default() -> Self {
        ActionWeight {
            constant: 1.0,
            linear: None,
            quadratic: None,
        }
    }
}

impl ActionWeight {
    pub fn constant(c: f64) -> Self {
        ActionWeight {
            constant: c,
            linear: None,
            quadratic: None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.linear.is_none() && self.quadratic.is_none()
    }

    pub fn eval(&self, action: &[f64]) -> f64 {
        let mut w = self.constant;
        if let Some(b) = &self.linear {
            w += b.iter().zip(action).map(|(b, i)| b * i).sum::<f64>();
        }
        if let Some(q) = &self.quadratic {
            for (row, ii) in q.iter().zip(action) {
                w += ii
                    * row
                        .iter()
                        .zip(action)
                        .map(|(qij, ij)| qij * ij)
                        .sum::<f64>();
            }
        }
        w
    }

    /// Adds `scale·∇w(I)` to `out`.
    pub fn add_grad(&self, action: &[f64], scale: f64, out: &mut [f64]) {
        if let Some(b) = &self.linear {
            for (o, b) in out.iter_mut().zip(b) {
                *o += scale * b;
            }
        }
        if let Some(q) = &self.quadratic {
            let n = action.len();
            for i in 0..n {
                let mut g = 0.0;
                for j in 0..n {
                    g += (q[i][j] + q[j][i]) * action[j];
                }
                out[i] += scale * g;
            }
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.linear.as_ref().is_some_and(|b| b.len() != n) {
            return Err(Error::domain(
                "linear action weight has the wrong dimension",
            ));
        }
        if self
            .quadratic
            .as_ref()
            .is_some_and(|q| q.len() != n || q.iter().any(|r| r.len() != n))
        {
            return Err(Error::domain("quadratic action weight must be n x n"));
        }
        Ok(())
    }

    /// `sup |w|` over the sup-norm ball of radius `r`.
    pub fn sup_bound(&self, r: f64) -> f64 {
        let mut s = self.constant.abs();
        if let Some(b) = &self.linear {
            s += r * b.iter().map(|x| x.abs()).sum::<f64>();
        }
        if let Some(q) = &self.quadratic {
            s += r * r * q.iter().flatten().map(|x| x.abs()).sum::<f64>();
        }
        s
    }
}

/// One term `amplitude · w(I) · cos(2π(k·θ + phase))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub k: Vec<i64>,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
    #[serde(default, skip_serializing_if = "ActionWeight::is_default")]
    pub weight: ActionWeight,
}

impl ActionWeight {
    fn is_default(&self) -> bool {
        *self == ActionWeight::default()
    }
}

impl TrigTerm {
    pub fn new(k: Vec<i64>, amplitude: f64, phase: f64) -> Self {
        TrigTerm {
            k,
            amplitude,
            phase,
            weight: ActionWeight::default(),
        }
    }

    #[inline]
    fn argument(&self, theta: &[f64]) -> f64 {
        let kt: f64 = self.k.iter().zip(theta).map(|(&k, t)| k as f64 * t).sum();
        TAU * (kt + self.phase)
    }
}

/// A finite trigonometric polynomial in the angles.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigPerturbation {
    pub terms: Vec<TrigTerm>,
}

impl TrigPerturbation {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        TrigPerturbation { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for t in &self.terms {
            if t.k.len() != n {
                return Err(Error::domain(format!(
                    "perturbation term k has length {}, expected {n}",
                    t.k.len()
                )));
            }
            if !t.amplitude.is_finite() || !t.phase.is_finite() || !(0.0..1.0).contains(&t.phase) {
                return Err(Error::domain(
                    "perturbation amplitude must be finite and phase in [0, 1)",
                ));
            }
            t.weight.validate(n)?;
        }
        Ok(())
    }

    pub fn eval(&self, theta: &[f64], action: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amplitude * t.weight.eval(action) * t.argument(theta).cos())
            .sum()
    }

    /// Writes `∂f/∂θ` into `out`.
    pub fn grad_theta_into(&self, theta: &[f64], action: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for t in &self.terms {
            let c = -TAU * t.amplitude * t.weight.eval(action) * t.argument(theta).sin();
            for (o, &k) in out.iter_mut().zip(&t.k) {
                *o += c * k as f64;
            }
        }
    }

    /// Writes `∂f/∂I` into `out`.
    pub fn grad_action_into(&self, theta: &[f64], action: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for t in self.terms.iter().filter(|t| !t.weight.is_constant()) {
            let c = t.amplitude * t.argument(theta).cos();
            t.weight.add_grad(action, c, out);
        }
    }

    pub fn grad_theta(&self, theta: &[f64], action: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; theta.len()];
        self.grad_theta_into(theta, action, &mut out);
        out
    }

    pub fn grad_action(&self, theta: &[f64], action: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; theta.len()];
        self.grad_action_into(theta, action, &mut out);
        out
    }

    pub fn depends_on_action(&self) -> bool {
        self.terms.iter().any(|t| !t.weight.is_constant())
    }

    /// `sup |f|` over `Tⁿ × B(0, r)`.
    pub fn sup_bound(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amplitude.abs() * t.weight.sup_bound(r))
            .sum()
    }

    /// Bound on the second derivatives of `f` (largest entry), used for the
    /// fixed-point contraction estimate.
    pub(crate) fn second_derivative_bound(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let k1: f64 = t.k.iter().map(|k| k.abs() as f64).sum();
                t.amplitude.abs() * t.weight.sup_bound(r) * (TAU * k1).powi(2).max(1.0)
            })
            .sum::<f64>()
    }
}
