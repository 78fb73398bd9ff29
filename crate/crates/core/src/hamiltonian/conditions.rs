use nalgebra::DMatrix;
use serde::Serialize;

use super::integrable::IntegrableSpec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QcVerdict {
    pub pass: bool,
    /// `min vᵀ∇²h(I)v` over unit `v ⊥ ∇h(I)`.
    pub margin: f64,
}

/// Relative rounding allowance of the margin comparison in [`check_qc`].
pub const QC_RELATIVE_SLACK: f64 = 1e-9;

/// Quasi-convexity at one action: the Hessian restricted to `∇h(I)^⊥` must
/// be bounded below by `m` (up to [`QC_RELATIVE_SLACK`]).
pub fn check_qc(spec: &IntegrableSpec, action: &[f64], m: f64) -> Result<QcVerdict> {
    let margin = projected_hessian_margin(&spec.grad(action), &spec.hess(action))?;
    Ok(QcVerdict {
        pass: margin >= m - QC_RELATIVE_SLACK * m.abs(),
        margin,
    })
}

/// Smallest eigenvalue of `hess` projected on the orthogonal complement of
/// `grad`.
///
/// The orthonormal basis of `grad^⊥` comes from Gram–Schmidt applied to the
/// canonical vectors, skipping the index where `|gradᵢ|` is largest (that
/// one is the only vector that could be nearly parallel to `grad`).
pub fn projected_hessian_margin(grad: &[f64], hess: &DMatrix<f64>) -> Result<f64> {
    let n = grad.len();
    if n < 2 {
        return Err(Error::domain("quasi-convexity needs dimension >= 2"));
    }
    if hess.nrows() != n || hess.ncols() != n {
        return Err(Error::domain("Hessian shape does not match the gradient"));
    }
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::domain(
            "quasi-convexity is undefined where the gradient vanishes",
        ));
    }
    let skip = (0..n)
        .max_by(|&a, &b| grad[a].abs().total_cmp(&grad[b].abs()))
        .expect("n >= 2");

    let mut basis: Vec<Vec<f64>> = vec![grad.iter().map(|g| g / norm).collect()];
    for i in (0..n).filter(|&i| i != skip) {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= vn);
        basis.push(v);
    }

    let complement = &basis[1..];
    let k = complement.len();
    let mut projected = DMatrix::zeros(k, k);
    for a in 0..k {
        let hv = hess * nalgebra::DVector::from_column_slice(&complement[a]);
        for b in 0..k {
            projected[(b, a)] = complement[b]
                .iter()
                .zip(hv.iter())
                .map(|(x, y)| x * y)
                .sum();
        }
    }
    // symmetrise rounding noise
    let projected = (&projected + projected.transpose()) * 0.5;
    Ok(jacobi_eigenvalues(&projected)
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum();
        let scale: f64 = m.iter().map(|x| x * x).sum::<f64>();
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
            }
        }
    }
    (0..n).map(|i| m[(i, i)]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub pass: bool,
    pub max_first: f64,
    pub max_second: f64,
    pub max_third: f64,
}

/// `|∂ᵏh(I)| ≤ M` for `1 ≤ |k| ≤ 3` at every grid point. The catalog is
/// quadratic, so third derivatives vanish identically.
pub fn check_derivative_bound(
    spec: &IntegrableSpec,
    grid: &[Vec<f64>],
    big_m: f64,
) -> Result<DerivativeReport> {
    if grid.is_empty() {
        return Err(Error::domain("derivative bound needs a nonempty grid"));
    }
    let mut max_first: f64 = 0.0;
    let mut max_second: f64 = 0.0;
    for point in grid {
        if point.len() != spec.dim() {
            return Err(Error::domain("grid point has the wrong dimension"));
        }
        max_first = spec
            .grad(point)
            .into_iter()
            .fold(max_first, |m, g| m.max(g.abs()));
        max_second = spec
            .hess(point)
            .iter()
            .fold(max_second, |m, h| m.max(h.abs()));
    }
    let max_third = 0.0;
    Ok(DerivativeReport {
        pass: max_first <= big_m && max_second <= big_m && max_third <= big_m,
        max_first,
        max_second,
        max_third,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_hessian_margin_is_one() {
        let h = IntegrableSpec::shifted_convex(vec![0.3, -0.7, 1.1]);
        for a in [[0.0, 0.0, 0.0], [0.4, -0.2, 0.9], [-1.0, 2.0, 0.5]] {
            let v = check_qc(&h, &a, 1.0).unwrap();
            assert!(v.pass);
            assert!((v.margin - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_h_fails() {
        let margin = projected_hessian_margin(&[1.0, 2.0], &DMatrix::zeros(2, 2)).unwrap();
        assert_eq!(margin, 0.0);
        assert!(margin < 0.1);
    }

    #[test]
    fn indefinite_hessian() {
        let hess = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        let margin = projected_hessian_margin(&[1.0, 0.0], &hess).unwrap();
        assert!((margin + 1.0).abs() < 1e-15);
    }

    #[test]
    fn vanishing_gradient() {
        let h = IntegrableSpec::shifted_convex(vec![0.0, 0.0]);
        assert!(check_qc(&h, &[0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn anisotropic_margin_between_extreme_weights() {
        let h =
            IntegrableSpec::anisotropic_convex(vec![1.0, 0.0, 0.0], vec![0.5, 2.0, 3.0]).unwrap();
        // ∇h = (1, 0, 0) at I = 0, complement spanned by e₂, e₃
        assert!((check_qc(&h, &[0.0; 3], 1.0).unwrap().margin - 2.0).abs() < 1e-12);
        let v = check_qc(&h, &[0.2, 0.4, -0.3], 0.5).unwrap();
        assert!(v.pass && v.margin >= 0.5 - 1e-12 && v.margin <= 3.0);
    }

    #[test]
    fn jacobi_matches_known_spectrum() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let mut ev = jacobi_eigenvalues(&a);
        ev.sort_by(f64::total_cmp);
        let s = 2f64.sqrt();
        for (e, x) in ev.iter().zip([2.0 - s, 2.0, 2.0 + s]) {
            assert!((e - x).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_bound_on_unit_ball() {
        let h = IntegrableSpec::shifted_convex(vec![1.0, 0.0]);
        let mut grid = vec![];
        for i in -4..=4 {
            for j in -4..=4 {
                grid.push(vec![i as f64 / 4.0, j as f64 / 4.0]);
            }
        }
        let r = check_derivative_bound(&h, &grid, 3.0).unwrap();
        assert!(r.pass);
        assert_eq!((r.max_first, r.max_second, r.max_third), (2.0, 1.0, 0.0));
        assert!(!check_derivative_bound(&h, &grid, 0.5).unwrap().pass);
        assert!(check_derivative_bound(&h, &[], 3.0).is_err());
    }
}
