use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::bezout::ext_gcd_bounded;
use super::matrix::{bareiss_det, IntMatrix, IntVector, UnimodularMatrix};
use crate::error::{Error, Result};

/// How the last row of the inductive completion is signed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompletionPolicy {
    /// Assemble with the Bézout pair of `u·d + v·kₙ = 1`; if the exact
    /// determinant is not `±1`, switch to the companion pair `(u, −v)`.
    Verified,
    /// Always use the Bézout pair as returned, without the determinant check.
    /// Only exists so the self-test harness can demonstrate a sign fault.
    Unchecked,
}

/// Completes a primitive vector `k ∈ Zⁿ` to a unimodular matrix whose first
/// row is `k` and whose rows all have ℓ¹-norm at most `|k|₁`.
pub fn unimodular_completion(k: &IntVector) -> Result<UnimodularMatrix> {
    let m = complete_with_policy(k, CompletionPolicy::Verified)?;
    Ok(UnimodularMatrix::new_unchecked(m))
}

pub(crate) fn complete_with_policy(k: &IntVector, policy: CompletionPolicy) -> Result<IntMatrix> {
    if !k.is_primitive()? {
        return Err(Error::domain(format!(
            "{k} is not primitive (invariant factor {} != 1)",
            k.content()
        )));
    }
    let rows = complete(k.components(), policy)?;
    IntMatrix::from_rows(rows)
}

fn complete(k: &[BigInt], policy: CompletionPolicy) -> Result<Vec<Vec<BigInt>>> {
    let n = k.len();
    if n == 1 {
        return Ok(vec![k.to_vec()]);
    }

    let head = &k[..n - 1];
    if head.iter().all(Zero::is_zero) {
        // k = (0, …, 0, ±1): complete the rotated vector (k₂, …, kₙ, k₁)
        // and rotate the columns back.
        let mut rotated = k[1..].to_vec();
        rotated.push(k[0].clone());
        let sub = complete(&rotated, policy)?;
        return Ok(sub
            .into_iter()
            .map(|row| {
                let mut out = vec![BigInt::zero(); n];
                for (j, x) in row.into_iter().enumerate() {
                    out[(j + 1) % n] = x;
                }
                out
            })
            .collect());
    }

    let d = head
        .iter()
        .fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
    let reduced: Vec<BigInt> = head.iter().map(|c| c / &d).collect();
    let sub = complete(&reduced, policy)?;
    let kn = &k[n - 1];

    let (u, v) = if kn.is_zero() {
        (BigInt::one(), BigInt::zero())
    } else {
        let (g, u, v) = ext_gcd_bounded(&d, kn)?;
        debug_assert!(g.is_one());
        (u, v)
    };

    let assemble = |u: &BigInt, v: &BigInt| -> Vec<Vec<BigInt>> {
        let sign = if (n - 1) % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        let mut rows = Vec::with_capacity(n);
        rows.push(k.to_vec());
        for row in sub.iter().skip(1) {
            let mut r = row.clone();
            r.push(BigInt::zero());
            rows.push(r);
        }
        let mut last: Vec<BigInt> = reduced.iter().map(|c| &sign * v * c).collect();
        last.push(&sign * u);
        rows.push(last);
        rows
    };

    let rows = assemble(&u, &v);
    if policy == CompletionPolicy::Unchecked || bareiss_det(rows.clone()).abs().is_one() {
        return Ok(rows);
    }
    let rows = assemble(&u, &-v);
    let det = bareiss_det(rows.clone());
    if !det.abs().is_one() {
        return Err(Error::domain(format!(
            "completion of {k:?} has determinant {det}"
        )));
    }
    Ok(rows)
}

/// Exact inverse of a unimodular matrix through its adjugate.
pub fn inverse_unimodular(a: &UnimodularMatrix) -> Result<UnimodularMatrix> {
    let m = a.matrix();
    let n = m.nrows();
    let det = a.det();
    if !det.abs().is_one() {
        return Err(Error::domain(format!("|det| = {} != 1", det.abs())));
    }
    if n == 1 {
        return Ok(UnimodularMatrix::new_unchecked(IntMatrix::from_rows(
            vec![vec![det]],
        )?));
    }
    let mut inv = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let cof = bareiss_det(m.minor(j, i));
            let signed = if (i + j) % 2 == 0 { cof } else { -cof };
            inv.rows_mut()[i][j] = signed * &det;
        }
    }
    Ok(UnimodularMatrix::new_unchecked(inv))
}
