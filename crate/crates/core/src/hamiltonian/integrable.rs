use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed-form quasi-convex integrable Hamiltonians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "catalog_id", rename_all = "snake_case", deny_unknown_fields)]
pub enum IntegrableSpec {
    /// `h(I) = Ω·I + ½‖I‖²`.
    ShiftedConvex { omega: Vec<f64> },
    /// `h(I) = Ω·I + ½ Σ wᵢ Iᵢ²` with `wᵢ > 0`.
    AnisotropicConvex { omega: Vec<f64>, weights: Vec<f64> },
}

impl IntegrableSpec {
    pub fn shifted_convex(omega: Vec<f64>) -> Self {
        IntegrableSpec::ShiftedConvex { omega }
    }

    pub fn anisotropic_convex(omega: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let spec = IntegrableSpec::AnisotropicConvex { omega, weights };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            IntegrableSpec::ShiftedConvex { omega } => {
                if omega.is_empty() || omega.iter().any(|x| !x.is_finite()) {
                    return Err(Error::domain(
                        "shifted_convex needs a finite, nonempty omega",
                    ));
                }
            }
            IntegrableSpec::AnisotropicConvex { omega, weights } => {
                if omega.is_empty() || omega.len() != weights.len() {
                    return Err(Error::domain(
                        "anisotropic_convex needs omega and weights of equal length",
                    ));
                }
                if omega.iter().any(|x| !x.is_finite())
                    || weights.iter().any(|w| !(*w > 0.0) || !w.is_finite())
                {
                    return Err(Error::domain(
                        "anisotropic_convex weights must be positive and finite",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.omega().len()
    }

    pub fn omega(&self) -> &[f64] {
        match self {
            IntegrableSpec::ShiftedConvex { omega }
            | IntegrableSpec::AnisotropicConvex { omega, .. } => omega,
        }
    }

    /// Diagonal of the (constant) Hessian.
    pub fn hessian_diagonal(&self) -> Vec<f64> {
        match self {
            IntegrableSpec::ShiftedConvex { omega } => vec![1.0; omega.len()],
            IntegrableSpec::AnisotropicConvex { weights, .. } => weights.clone(),
        }
    }

    /// The quasi-convexity constant `min wᵢ` of the family.
    pub fn convexity_constant(&self) -> f64 {
        self.hessian_diagonal()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    /// `sup |∂ᵢ∂ⱼ h|`.
    pub fn max_second_partial(&self) -> f64 {
        self.hessian_diagonal().into_iter().fold(0.0, f64::max)
    }

    pub fn eval(&self, action: &[f64]) -> f64 {
        let omega = self.omega();
        match self {
            IntegrableSpec::ShiftedConvex { .. } => action
                .iter()
                .zip(omega)
                .map(|(i, o)| o * i + 0.5 * i * i)
                .sum(),
            IntegrableSpec::AnisotropicConvex { weights, .. } => action
                .iter()
                .zip(omega)
                .zip(weights)
                .map(|((i, o), w)| o * i + 0.5 * w * i * i)
                .sum(),
        }
    }

    /// Frequency map `ω(I) = ∇h(I)`, written into `out`.
    pub fn grad_into(&self, action: &[f64], out: &mut [f64]) {
        let omega = self.omega();
        match self {
            IntegrableSpec::ShiftedConvex { .. } => {
                for ((o, i), w0) in out.iter_mut().zip(action).zip(omega) {
                    *o = w0 + i;
                }
            }
            IntegrableSpec::AnisotropicConvex { weights, .. } => {
                for (((o, i), w0), w) in out.iter_mut().zip(action).zip(omega).zip(weights) {
                    *o = w0 + w * i;
                }
            }
        }
    }

    pub fn grad(&self, action: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; action.len()];
        self.grad_into(action, &mut out);
        out
    }

    pub fn hess(&self, _action: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.hessian_diagonal()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let h = IntegrableSpec::shifted_convex(vec![1.0, 0.0]);
        assert_eq!(h.eval(&[0.0, 0.0]), 0.0);
        assert_eq!(h.grad(&[0.0, 0.0]), vec![1.0, 0.0]);
        assert_eq!(h.hess(&[0.0, 0.0]), DMatrix::identity(2, 2));

        let omega = vec![0.3, -1.2, 2.0];
        let h = IntegrableSpec::shifted_convex(omega.clone());
        let n2: f64 = omega.iter().map(|x| x * x).sum();
        assert!((h.eval(&omega) - 1.5 * n2).abs() < 1e-14);

        let h = IntegrableSpec::anisotropic_convex(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert_eq!(
            h.hess(&[1.0, 1.0]),
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]))
        );
        assert_eq!(h.eval(&[1.0, 1.0]), 1.5);
    }

    #[test]
    fn invalid_weights() {
        assert!(IntegrableSpec::anisotropic_convex(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
        assert!(IntegrableSpec::anisotropic_convex(vec![0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn json_shape() {
        let h = IntegrableSpec::anisotropic_convex(vec![1.0, 0.5], vec![1.0, 2.0]).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(
            s,
            r#"{"catalog_id":"anisotropic_convex","omega":[1.0,0.5],"weights":[1.0,2.0]}"#
        );
        let back: IntegrableSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }
}
