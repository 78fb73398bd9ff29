use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::matrix::{ser_bigint_vec, IntMatrix, SubmoduleBasis, UnimodularMatrix};

/// `L = B·Δ·A` with `B ∈ GL(r, Z)`, `A ∈ GL(n, Z)` and `Δ = diag(d₁, …, d_r)`
/// padded with zero columns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmithDecomposition {
    pub b: UnimodularMatrix,
    #[serde(serialize_with = "ser_bigint_vec")]
    pub diag: Vec<BigInt>,
    pub a: UnimodularMatrix,
}

impl SmithDecomposition {
    /// The `r × n` matrix `Δ`.
    pub fn delta(&self) -> IntMatrix {
        IntMatrix::diagonal(self.b.dim(), self.a.dim(), &self.diag)
    }

    pub fn reconstruct(&self) -> IntMatrix {
        let bd = self
            .b
            .matrix()
            .mul(&self.delta())
            .expect("r x r times r x n");
        bd.mul(self.a.matrix()).expect("r x n times n x n")
    }

    /// `d₁ | d₂ | … | d_r`, with zero dividing only zero.
    pub fn divisibility_holds(&self) -> bool {
        self.diag.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                w[1].is_multiple_of(&w[0])
            }
        })
    }
}

/// Smith normal form by elementary row/column reduction, pivoting on the
/// entry of least absolute value.
pub fn smith_normal_form(l: &SubmoduleBasis) -> SmithDecomposition {
    let r = l.rank();
    let n = l.dim();
    let mut d: Vec<Vec<BigInt>> = l.matrix().rows().to_vec();
    let mut b: Vec<Vec<BigInt>> = IntMatrix::identity(r).rows().to_vec();
    let mut a: Vec<Vec<BigInt>> = IntMatrix::identity(n).rows().to_vec();

    // Invariant: L = b · d · a. A row operation E on d is undone by
    // right-multiplying b with E⁻¹, a column operation F by left-multiplying
    // a with F⁻¹.
    for t in 0..r {
        loop {
            let (pi, pj) = min_pivot(&d, t).expect("full row rank leaves a nonzero pivot");
            if pi != t {
                d.swap(t, pi);
                for row in b.iter_mut() {
                    row.swap(t, pi);
                }
            }
            if pj != t {
                for row in d.iter_mut() {
                    row.swap(t, pj);
                }
                a.swap(t, pj);
            }

            let mut clean = true;
            for i in t + 1..r {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                for j in t..n {
                    let delta = &q * &d[t][j];
                    d[i][j] -= delta;
                }
                for row in b.iter_mut() {
                    let delta = &q * &row[i];
                    row[t] += delta;
                }
                clean &= d[i][t].is_zero();
            }
            for j in t + 1..n {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                for row in d.iter_mut().skip(t) {
                    let delta = &q * &row[t];
                    row[j] -= delta;
                }
                let (rt, rj) = pair_mut(&mut a, t, j);
                for (x, y) in rt.iter_mut().zip(rj.iter()) {
                    *x += &q * y;
                }
                clean &= d[t][j].is_zero();
            }
            if !clean {
                continue;
            }

            let offender =
                (t + 1..r).find(|&i| (t + 1..n).any(|j| !d[i][j].is_multiple_of(&d[t][t])));
            match offender {
                Some(i) => {
                    // row_t += row_i; compensate with col_i(b) -= col_t(b).
                    let (rt, ri) = pair_mut(&mut d, t, i);
                    for (x, y) in rt.iter_mut().zip(ri.iter()) {
                        *x += y;
                    }
                    for row in b.iter_mut() {
                        let delta = row[t].clone();
                        row[i] -= delta;
                    }
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            for row in b.iter_mut() {
                row[t] = -&row[t];
            }
        }
    }

    let diag = (0..r).map(|i| d[i][i].clone()).collect();
    let as_unimodular = |m: Vec<Vec<BigInt>>| {
        UnimodularMatrix::new_unchecked(IntMatrix::from_rows(m).expect("nonempty"))
    };
    SmithDecomposition {
        b: as_unimodular(b),
        diag,
        a: as_unimodular(a),
    }
}

fn min_pivot(d: &[Vec<BigInt>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for (i, row) in d.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn pair_mut<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &T) {
    assert_ne!(i, j);
    if i < j {
        let (lo, hi) = v.split_at_mut(j);
        (&mut lo[i], &hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(i);
        (&mut hi[0], &lo[j])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn snf(rows: &[&[i64]]) -> SmithDecomposition {
        let m = IntMatrix::from_i64_rows(rows).unwrap();
        let s = smith_normal_form(&SubmoduleBasis::new(m.clone()).unwrap());
        assert_eq!(s.reconstruct(), m);
        assert!(s.b.det().abs().is_one());
        assert!(s.a.det().abs().is_one());
        assert!(s.divisibility_holds());
        s
    }

    #[test]
    fn identity_is_its_own_form() {
        let s = snf(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(s.diag, vec![BigInt::one(); 3]);
    }

    #[test]
    fn rank_one_examples() {
        assert_eq!(snf(&[&[2, 4]]).diag, vec![BigInt::from(2)]);
        assert_eq!(snf(&[&[2, 3]]).diag, vec![BigInt::from(1)]);
        assert_eq!(snf(&[&[0, -6, 9]]).diag, vec![BigInt::from(3)]);
    }

    #[test]
    fn divisibility_needs_fixing() {
        // diag(2, 3) has SNF diag(1, 6).
        let s = snf(&[&[2, 0], &[0, 3]]);
        assert_eq!(s.diag, vec![BigInt::from(1), BigInt::from(6)]);
        let s = snf(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        assert_eq!(
            s.diag,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
    }
}
