use std::path::Path;

use serde::{Deserialize, Serialize};

use super::integrable::IntegrableSpec;
use super::perturbation::TrigPerturbation;
use crate::error::{Error, Result};

/// Version tag accepted in system documents.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GevreyParams {
    pub alpha: f64,
    #[serde(rename = "L")]
    pub big_l: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    pub action: Vec<f64>,
}

/// Full description of a near-integrable system `H = h + ε·f`; the single
/// ingestion format for every experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub version: u32,
    pub n: usize,
    /// Radius `R` of the sup-norm action ball.
    #[serde(rename = "R")]
    pub radius: f64,
    /// Analyticity width; carried for documentation only.
    #[serde(default = "default_width")]
    pub s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gevrey: Option<GevreyParams>,
    pub integrable: IntegrableSpec,
    #[serde(default)]
    pub perturbation: TrigPerturbation,
    pub epsilon: f64,
    /// Quasi-convexity constant.
    pub m: f64,
    /// Bound on the derivatives of `h` of order 1 to 3.
    #[serde(rename = "M")]
    pub big_m: f64,
    /// Optional constant of the alternative quasi-convexity form; unused.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialState>,
}

fn default_width() -> f64 {
    1.0
}

impl SystemSpec {
    pub fn validate(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::domain(format!(
                "unsupported system schema version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        if self.n < 2 {
            return Err(Error::domain("dimension n must be >= 2"));
        }
        self.integrable.validate()?;
        if self.integrable.dim() != self.n {
            return Err(Error::domain("integrable part has the wrong dimension"));
        }
        self.perturbation.validate(self.n)?;
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::domain("domain radius R must be positive"));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::domain("epsilon must be >= 0"));
        }
        if !(self.m > 0.0) || !(self.big_m >= self.m) {
            return Err(Error::domain("constants must satisfy 0 < m <= M"));
        }
        if let Some(g) = self.gevrey {
            if !(g.alpha >= 1.0) || !(g.big_l > 0.0) {
                return Err(Error::domain("Gevrey parameters need alpha >= 1 and L > 0"));
            }
        }
        if let Some(init) = &self.initial {
            if init.action.len() != self.n || init.theta.as_ref().is_some_and(|t| t.len() != self.n)
            {
                return Err(Error::domain("initial state has the wrong dimension"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SystemSpec = serde_json::from_str(text)
            .map_err(|e| Error::domain(format!("malformed system spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::domain(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// `sup |ε·f|` over `Tⁿ × B(0, R)`.
    pub fn perturbation_sup(&self) -> f64 {
        self.epsilon * self.perturbation.sup_bound(self.radius)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        SystemSpec {
            epsilon,
            ..self.clone()
        }
    }

    /// Reference system: `n = 3`, `h = Ω·I + ½‖I‖²` and three unit-total
    /// cosine modes, so that `|f| ≤ 1`.
    pub fn reference(epsilon: f64) -> Self {
        use super::perturbation::TrigTerm;
        SystemSpec {
            version: SCHEMA_VERSION,
            n: 3,
            radius: 1.0,
            s: 1.0,
            gevrey: None,
            integrable: IntegrableSpec::shifted_convex(vec![
                0.2,
                0.2 * 2f64.sqrt(),
                0.2 * 3f64.sqrt(),
            ]),
            perturbation: TrigPerturbation::new(vec![
                TrigTerm::new(vec![1, -1, 0], 0.5, 0.0),
                TrigTerm::new(vec![0, 1, -1], 0.3, 0.25),
                TrigTerm::new(vec![1, 0, 0], 0.2, 0.5),
            ]),
            epsilon,
            m: 1.0,
            big_m: 2.0,
            l: None,
            initial: Some(InitialState {
                theta: None,
                action: vec![0.0; 3],
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_round_trips_and_validates() {
        let spec = SystemSpec::reference(1e-3);
        spec.validate().unwrap();
        let back = SystemSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        assert!((spec.perturbation.sup_bound(spec.radius) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_documents() {
        let mut v: serde_json::Value =
            serde_json::from_str(&SystemSpec::reference(0.0).to_json()).unwrap();
        v["version"] = 2.into();
        assert!(SystemSpec::from_json(&v.to_string()).is_err());
        v["version"] = 1.into();
        v["unexpected"] = 0.into();
        assert!(SystemSpec::from_json(&v.to_string()).is_err());
        assert!(SystemSpec::from_json("{").is_err());
        let mut spec = SystemSpec::reference(0.0);
        spec.m = 3.0;
        assert!(spec.validate().is_err());
    }
}
