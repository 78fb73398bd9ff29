use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Bézout coefficients with bounded size.
///
/// Returns `(d, u, v)` with `u·x + v·y = d = gcd(|x|, |y|)`. When both inputs
/// are nonzero the coefficients satisfy `|u| ≤ |y|/d` and `|v| ≤ |x|/d`.
/// For `y = 0` the result is `(|x|, sign(x), 0)`; symmetrically for `x = 0`
/// it is `(|y|, 0, sign(y))`.
pub fn ext_gcd_bounded(x: &BigInt, y: &BigInt) -> Result<(BigInt, BigInt, BigInt)> {
    if x.is_zero() && y.is_zero() {
        return Err(Error::domain("gcd(0, 0) is undefined"));
    }
    if y.is_zero() {
        return Ok((x.abs(), x.signum(), BigInt::zero()));
    }
    if x.is_zero() {
        return Ok((y.abs(), BigInt::zero(), y.signum()));
    }

    let eg = x.extended_gcd(y);
    let (d, u0) = if eg.gcd.is_negative() {
        (-eg.gcd, -eg.x)
    } else {
        (eg.gcd, eg.x)
    };

    // Solutions are u = u0 - t·y/d. The representative in [0, |y|/d) always
    // satisfies both bounds; its neighbour below may be smaller.
    let period = y.abs() / &d;
    let low = u0.mod_floor(&period);
    let candidates = [&low - &period, low];
    let x_bound = x.abs() / &d;

    let mut best: Option<(BigInt, BigInt)> = None;
    for u in candidates {
        let v = (&d - &u * x) / y;
        if u.abs() > period || v.abs() > x_bound {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bu, bv)) => {
                let size = u.abs() + v.abs();
                let best_size = bu.abs() + bv.abs();
                size < best_size || (size == best_size && u.abs() < bu.abs())
            }
        };
        if better {
            best = Some((u, v));
        }
    }
    let (u, v) = best.expect("the representative in [0, |y|/d) satisfies the bounds");
    debug_assert_eq!(&u * x + &v * y, d);
    Ok((d, u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn egcd(x: i64, y: i64) -> (i64, i64, i64) {
        let (d, u, v) = ext_gcd_bounded(&x.into(), &y.into()).unwrap();
        (
            d.try_into().unwrap(),
            u.try_into().unwrap(),
            v.try_into().unwrap(),
        )
    }

    /// Every (u, v) in the solution family within the coefficient bounds.
    fn bounded_solutions(x: i64, y: i64) -> Vec<(i64, i64)> {
        let d = num_integer::gcd(x, y);
        let (ub, vb) = ((y / d).abs(), (x / d).abs());
        let mut out = vec![];
        for u in -ub..=ub {
            if (d - u * x) % y == 0 {
                let v = (d - u * x) / y;
                if v.abs() <= vb {
                    out.push((u, v));
                }
            }
        }
        out
    }

    #[test]
    fn zero_second_argument() {
        assert_eq!(egcd(5, 0), (5, 1, 0));
        assert_eq!(egcd(-5, 0), (5, -1, 0));
        assert_eq!(egcd(0, -7), (7, 0, -1));
    }

    #[test]
    fn small_examples_match_enumeration() {
        assert_eq!(bounded_solutions(2, 3), vec![(-1, 1), (2, -1)]);
        assert_eq!(egcd(2, 3), (1, -1, 1));
        assert_eq!(bounded_solutions(4, 6), vec![(-1, 1), (2, -1)]);
        assert_eq!(egcd(4, 6), (2, -1, 1));
    }

    #[test]
    fn both_zero_is_rejected() {
        assert!(ext_gcd_bounded(&0.into(), &0.into()).is_err());
    }

    #[test]
    fn result_is_always_among_bounded_solutions() {
        for x in -30i64..=30 {
            for y in -30i64..=30 {
                if x == 0 || y == 0 {
                    continue;
                }
                let (d, u, v) = egcd(x, y);
                assert_eq!(d, num_integer::gcd(x, y));
                assert!(bounded_solutions(x, y).contains(&(u, v)), "{x} {y}");
            }
        }
    }
}
