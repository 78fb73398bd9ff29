use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A reduced fraction `p/q` with `q ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub p: i64,
    pub q: i64,
}

impl Rational {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::domain("zero denominator"));
        }
        let g = p.gcd(&q);
        let s = q.signum();
        Ok(Rational {
            p: s * p / g,
            q: s * q / g,
        })
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    /// `|p| + q`.
    pub fn height(&self) -> i64 {
        self.p.abs() + self.q
    }

    pub fn is_reduced(&self) -> bool {
        self.q >= 1 && self.p.gcd(&self.q) == 1
    }

    fn exact(&self) -> BigRational {
        BigRational::new(self.p.into(), self.q.into())
    }

    /// Membership in the closed interval `[lo, hi]`, decided exactly.
    pub fn in_closed(&self, lo: f64, hi: f64) -> bool {
        let x = self.exact();
        match (exact_f64(lo), exact_f64(hi)) {
            (Some(lo), Some(hi)) => lo <= x && x <= hi,
            _ => false,
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

fn exact_f64(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}

/// The height bound `4√2 · l^{−1/2}` for intervals of length `l`.
pub fn dirichlet_bound(length: f64) -> f64 {
    4.0 * std::f64::consts::SQRT_2 / length.sqrt()
}

/// A reduced rational in `[center − l/2, center + l/2] ⊆ [−1, 1]`.
///
/// The denominator is first taken as the least integer `q` with `q²·l ≥ 2`
/// and the numerator as the nearest integer to `q·center`. That candidate
/// lands in the interval whenever `l ≥ 1/2` (the rounding error `1/(2q)` is
/// then at most `l/2`), but not in general for shorter intervals. When it
/// misses the interval or the height bound, the simplest rational of the
/// interval (least denominator and least `|p|`, hence least `|p| + q`) is
/// returned instead. The returned rational always lies in the
/// interval. When the interval contains no rational of height below
/// [`dirichlet_bound`], neither does the returned one; e.g. `[0.001, 0.021]`
/// contains nothing simpler than `1/48` while the bound is `40`.
pub fn dirichlet_rational(center: f64, length: f64) -> Result<Rational> {
    if !(length > 0.0) || !length.is_finite() || !center.is_finite() {
        return Err(Error::domain(format!(
            "invalid interval: center {center}, length {length}"
        )));
    }
    let (lo, hi) = (center - length / 2.0, center + length / 2.0);
    if lo < -1.0 || hi > 1.0 {
        return Err(Error::domain(format!(
            "interval [{lo}, {hi}] is not contained in [-1, 1]"
        )));
    }

    let l = exact_f64(length).expect("finite");
    let two = BigRational::from_integer(2.into());
    let mut q = (2.0 / length).sqrt().ceil().max(1.0) as i64;
    while q > 1 && BigRational::from_integer((q - 1).into()).pow(2) * &l >= two {
        q -= 1;
    }
    while BigRational::from_integer(q.into()).pow(2) * &l < two {
        q += 1;
    }
    let p = (q as f64 * center).round() as i64;
    let candidate = Rational::new(p, q)?;
    if candidate.in_closed(lo, hi) && (candidate.height() as f64) < dirichlet_bound(length) {
        return Ok(candidate);
    }
    simplest_rational_in(lo, hi)
}

/// The rational of least denominator in the closed interval `[lo, hi]`
/// (ties impossible), found by descending the Stern–Brocot tree through
/// continued fractions.
pub fn simplest_rational_in(lo: f64, hi: f64) -> Result<Rational> {
    let (Some(a), Some(b)) = (exact_f64(lo), exact_f64(hi)) else {
        return Err(Error::domain("interval endpoints must be finite"));
    };
    if a > b {
        return Err(Error::domain(format!("empty interval [{lo}, {hi}]")));
    }
    let r = simplest_exact(&a, &b);
    let (p, q) = (r.numer().to_i64(), r.denom().to_i64());
    match (p, q) {
        (Some(p), Some(q)) => Rational::new(p, q),
        _ => Err(Error::Resource(format!(
            "simplest rational {r} exceeds 64 bits"
        ))),
    }
}

fn simplest_exact(a: &BigRational, b: &BigRational) -> BigRational {
    if !a.is_positive() && !b.is_negative() {
        return BigRational::zero();
    }
    if b.is_negative() {
        return -simplest_exact(&-b, &-a);
    }
    // 0 < a <= b
    let c = a.ceil();
    if &c <= b {
        return c;
    }
    let fl = a.floor();
    let inner = simplest_exact(&(b - &fl).recip(), &(a - &fl).recip());
    fl + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Scan q = 1, 2, … for the first p/q in the interval (least |p| for that q).
    fn scan(lo: f64, hi: f64) -> Rational {
        for q in 1i64.. {
            let pl = (lo * q as f64).ceil() as i64 - 1;
            let ph = (hi * q as f64).floor() as i64 + 1;
            let mut best: Option<Rational> = None;
            for p in pl..=ph {
                let r = Rational::new(p, q).unwrap();
                if r.q == q && r.in_closed(lo, hi) && best.is_none_or(|b| r.p.abs() < b.p.abs()) {
                    best = Some(r);
                }
            }
            if let Some(b) = best {
                return b;
            }
        }
        unreachable!()
    }

    #[test]
    fn zero_center() {
        for l in [0.5, 0.01, 1e-6, 2.0] {
            assert_eq!(dirichlet_rational(0.0, l).unwrap(), Rational { p: 0, q: 1 });
        }
    }

    #[test]
    fn examples() {
        let r = dirichlet_rational(0.55, 0.5).unwrap();
        assert_eq!(r, scan(0.3, 0.8));
        assert_eq!(r, Rational { p: 1, q: 2 });
        assert!((r.height() as f64) < dirichlet_bound(0.5));

        let r = dirichlet_rational(0.7, 0.02).unwrap();
        assert_eq!(r, Rational { p: 7, q: 10 });
        assert!(r.height() < 40);
    }

    #[test]
    fn counterexample_to_height_bound() {
        let r = dirichlet_rational(0.011, 0.02).unwrap();
        assert_eq!(r, scan(0.001, 0.021));
        assert_eq!(r, Rational { p: 1, q: 48 });
        assert!(r.height() as f64 >= dirichlet_bound(0.02));
    }

    #[test]
    fn fallback_matches_scan() {
        for (lo, hi) in [
            (0.72, 0.74),
            (-0.74, -0.72),
            (0.333, 0.334),
            (0.9, 1.0),
            (-1.0, -0.99),
        ] {
            let r = dirichlet_rational((lo + hi) / 2.0, hi - lo).unwrap();
            assert!(r.in_closed(
                (lo + hi) / 2.0 - (hi - lo) / 2.0,
                (lo + hi) / 2.0 + (hi - lo) / 2.0
            ));
            assert_eq!(simplest_rational_in(lo, hi).unwrap(), scan(lo, hi));
        }
    }

    #[test]
    fn invalid_intervals() {
        assert!(dirichlet_rational(0.0, 0.0).is_err());
        assert!(dirichlet_rational(0.0, -1.0).is_err());
        assert!(dirichlet_rational(0.9, 0.5).is_err());
        assert!(dirichlet_rational(f64::NAN, 0.5).is_err());
    }
}
