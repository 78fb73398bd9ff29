use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::integrable::IntegrableSpec;
use crate::error::{Error, Result};

/// A point `(I, λ)` of `B × R⁺`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoEnergeticPoint {
    pub action: Vec<f64>,
    pub lambda: f64,
}

impl IsoEnergeticPoint {
    pub fn new(action: Vec<f64>, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::domain(format!("lambda = {lambda} must be positive")));
        }
        Ok(IsoEnergeticPoint { action, lambda })
    }
}

fn frequency(spec: &IntegrableSpec, p: &IsoEnergeticPoint) -> Result<Vec<f64>> {
    if p.action.len() != spec.dim() {
        return Err(Error::domain("action has the wrong dimension"));
    }
    if !(p.lambda > 0.0) {
        return Err(Error::domain("lambda must be positive"));
    }
    let omega = spec.grad(&p.action);
    if omega.iter().all(|&w| w == 0.0) {
        return Err(Error::domain("the frequency map vanishes at this action"));
    }
    Ok(omega)
}

/// `Ψ_h(I, λ) = (h(I), λ·ω(I))`.
pub fn psi_h(spec: &IntegrableSpec, p: &IsoEnergeticPoint) -> Result<(f64, Vec<f64>)> {
    let omega = frequency(spec, p)?;
    Ok((
        spec.eval(&p.action),
        omega.into_iter().map(|w| p.lambda * w).collect(),
    ))
}

/// Jacobian of `Ψ_h` with respect to `(I, λ)`:
///
/// ```text
/// [ ω(I)ᵀ      0    ]
/// [ λ∇²h(I)   ω(I) ]
/// ```
///
/// together with a nonsingularity verdict from partial-pivot elimination
/// with relative threshold `1e-12`.
pub fn jacobian_psi(spec: &IntegrableSpec, p: &IsoEnergeticPoint) -> Result<(DMatrix<f64>, bool)> {
    let omega = frequency(spec, p)?;
    let n = omega.len();
    let hess = spec.hess(&p.action);
    let mut j = DMatrix::zeros(n + 1, n + 1);
    for c in 0..n {
        j[(0, c)] = omega[c];
        for r in 0..n {
            j[(r + 1, c)] = p.lambda * hess[(r, c)];
        }
        j[(c + 1, n)] = omega[c];
    }
    let nonsingular = is_nonsingular(&j, 1e-12);
    Ok((j, nonsingular))
}

fn is_nonsingular(a: &DMatrix<f64>, rel: f64) -> bool {
    let n = a.nrows();
    let mut m = a.clone();
    let scale = m.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return false;
    }
    for k in 0..n {
        let (p, pv) = (k..n)
            .map(|i| (i, m[(i, k)].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if pv <= rel * scale {
            return false;
        }
        m.swap_rows(k, p);
        for i in k + 1..n {
            let f = m[(i, k)] / m[(k, k)];
            for c in k..n {
                let v = m[(k, c)];
                m[(i, c)] -= f * v;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_jacobian(spec: &IntegrableSpec, p: &IsoEnergeticPoint, h: f64) -> DMatrix<f64> {
        let n = p.action.len();
        let eval = |x: &[f64]| -> Vec<f64> {
            let q = IsoEnergeticPoint {
                action: x[..n].to_vec(),
                lambda: x[n],
            };
            let (e, f) = psi_h(spec, &q).unwrap();
            std::iter::once(e).chain(f).collect()
        };
        let mut x: Vec<f64> = p.action.iter().copied().chain([p.lambda]).collect();
        let mut j = DMatrix::zeros(n + 1, n + 1);
        for c in 0..=n {
            let x0 = x[c];
            x[c] = x0 + h;
            let fp = eval(&x);
            x[c] = x0 - h;
            let fm = eval(&x);
            x[c] = x0;
            for r in 0..=n {
                j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        j
    }

    #[test]
    fn psi_examples() {
        let h = IntegrableSpec::shifted_convex(vec![1.0, 0.0]);
        let (e, f) = psi_h(&h, &IsoEnergeticPoint::new(vec![0.0, 0.0], 2.0).unwrap()).unwrap();
        assert_eq!((e, f), (0.0, vec![2.0, 0.0]));
        let a = vec![0.3, -0.2];
        let (e, f) = psi_h(&h, &IsoEnergeticPoint::new(a.clone(), 1.0).unwrap()).unwrap();
        assert_eq!((e, f), (h.eval(&a), h.grad(&a)));
        let flat = IntegrableSpec::shifted_convex(vec![0.0, 0.0]);
        assert!(psi_h(&flat, &IsoEnergeticPoint::new(vec![0.0, 0.0], 1.0).unwrap()).is_err());
        assert!(IsoEnergeticPoint::new(vec![0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let h = IntegrableSpec::shifted_convex(vec![0.0, 1.0]);
        let p = IsoEnergeticPoint::new(vec![1.0, -1.0], 1.0).unwrap();
        let (j, ok) = jacobian_psi(&h, &p).unwrap();
        assert!(ok);
        let fd = fd_jacobian(&h, &p, 1e-5);
        assert!((&j - &fd).abs().max() <= 1e-6 * j.abs().max());
    }

    #[test]
    fn pure_quadratic_rows() {
        let h = IntegrableSpec::shifted_convex(vec![0.0, 0.0]);
        let (j, ok) =
            jacobian_psi(&h, &IsoEnergeticPoint::new(vec![1.0, 0.0], 1.0).unwrap()).unwrap();
        assert_eq!(
            j,
            DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0])
        );
        assert!(ok);
        assert!((j.determinant().abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_matrix_is_flagged() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(!is_nonsingular(&a, 1e-12));
    }
}
