use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use super::matrix::{bareiss_det, ser_bigint, IntVector, SubmoduleBasis};
use crate::error::{Error, Result};

/// `|Λ| = √det(M·Mᵀ)` for the row basis `M`, from the exact Gram determinant.
pub fn module_volume(basis: &SubmoduleBasis) -> f64 {
    let m = basis.matrix();
    let gram = m.mul(&m.transpose()).expect("r x n times n x r");
    let det = bareiss_det(gram.rows().to_vec());
    debug_assert!(
        det.is_positive(),
        "full row rank has positive Gram determinant"
    );
    det.to_f64().unwrap_or(f64::INFINITY).sqrt()
}

/// Upper bounds on the Lochak constants of the rank-one module generated by
/// a primitive `k`: `c_Λ ≤ n!·K^{n−1}` and `c′_Λ ≤ K` with `K = |k|₁`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LochakBounds {
    #[serde(serialize_with = "ser_bigint")]
    pub c_upper: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub c_prime_upper: BigInt,
}

impl LochakBounds {
    pub fn as_f64(&self) -> (f64, f64) {
        (
            self.c_upper.to_f64().unwrap_or(f64::INFINITY),
            self.c_prime_upper.to_f64().unwrap_or(f64::INFINITY),
        )
    }
}

pub fn lochak_bounds(k: &IntVector) -> Result<LochakBounds> {
    if !k.is_primitive()? {
        return Err(Error::domain(format!("{k} is not primitive")));
    }
    let n = k.len();
    let big_k = k.ell1();
    let factorial: BigInt = (1..=n).map(BigInt::from).product();
    let power = num_traits::pow(big_k.clone(), n - 1);
    Ok(LochakBounds {
        c_upper: factorial * power,
        c_prime_upper: big_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::IntMatrix;

    fn basis(rows: &[&[i64]]) -> SubmoduleBasis {
        SubmoduleBasis::new(IntMatrix::from_i64_rows(rows).unwrap()).unwrap()
    }

    #[test]
    fn volumes() {
        assert_eq!(module_volume(&basis(&[&[3, 4]])), 5.0);
        assert_eq!(module_volume(&basis(&[&[1, 0, 0], &[0, 1, 0]])), 1.0);
        assert!((module_volume(&basis(&[&[1, 1, 1]])) - 3f64.sqrt()).abs() < 1e-15);
        // row operations do not change the module
        assert_eq!(
            module_volume(&basis(&[&[1, 2, 0], &[0, 1, 1]])),
            module_volume(&basis(&[&[1, 3, 1], &[1, 4, 2]]))
        );
    }

    #[test]
    fn bounds() {
        let b = |k: &[i64]| {
            lochak_bounds(&IntVector::from_i64s(k).unwrap())
                .unwrap()
                .as_f64()
        };
        assert_eq!(b(&[2, 3]), (10.0, 5.0));
        assert_eq!(b(&[1, 0, 1]), (24.0, 2.0));
        assert_eq!(b(&[1, 0, 0, 0]), (24.0, 1.0));
        assert_eq!(b(&[1]), (1.0, 1.0));
        assert!(lochak_bounds(&IntVector::from_i64s(&[2, 4]).unwrap()).is_err());
    }
}
