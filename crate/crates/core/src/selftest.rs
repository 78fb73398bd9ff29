//! Exhaustive and seeded property suites over the exact lattice routines
//! and the exponent algebra.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::envelope::{
    analytic_delta_from_gamma, exponent_analytic, exponent_gevrey, gevrey_delta_from_gamma,
    local_exponents,
};
use crate::lattice::{
    complete_with_policy, dirichlet_bound, dirichlet_rational, ext_gcd_bounded, inverse_unimodular,
    smith_normal_form, CompletionPolicy, IntMatrix, IntVector, SubmoduleBasis, UnimodularMatrix,
};

/// Options of a self-test run.
#[derive(Clone, Copy, Debug, Default)]
pub struct SelftestOptions {
    /// Build completions without the determinant sign check, so the
    /// completion suite must catch the resulting fault.
    pub inject_completion_sign_fault: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    /// First failing case.
    pub counterexample: Option<String>,
    /// Violations of a property that is reported but does not fail the
    /// run (the Dirichlet height bound, which is false as stated).
    pub advisory_violations: u64,
    pub advisory_example: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            counterexample: None,
            advisory_violations: 0,
            advisory_example: None,
            elapsed: Duration::ZERO,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.counterexample.is_none() {
                self.counterexample = Some(what());
            }
        }
    }

    fn advise(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.advisory_violations += 1;
            if self.advisory_example.is_none() {
                self.advisory_example = Some(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub suites: Vec<SuiteReport>,
    pub pass: bool,
}

fn timed(f: impl FnOnce() -> SuiteReport) -> SuiteReport {
    let start = Instant::now();
    let mut r = f();
    r.elapsed = start.elapsed();
    r
}

pub fn run_selftest(opts: SelftestOptions) -> SelftestReport {
    let policy = if opts.inject_completion_sign_fault {
        CompletionPolicy::Unchecked
    } else {
        CompletionPolicy::Verified
    };
    let suites = vec![
        timed(bezout_suite),
        timed(|| completion_suite(policy)),
        timed(dirichlet_suite),
        timed(smith_suite),
        timed(exponent_suite),
    ];
    let pass = suites.iter().all(SuiteReport::passed);
    SelftestReport { suites, pass }
}

/// `ux + vy = d`, `|u| ≤ |y|/d`, `|v| ≤ |x|/d` for `1 ≤ |x|, |y| ≤ 200`.
pub fn bezout_suite() -> SuiteReport {
    let mut r = SuiteReport::new("bezout");
    let range = (-200i64..=200).filter(|v| *v != 0);
    for x in range.clone() {
        for y in range.clone() {
            let (bx, by) = (BigInt::from(x), BigInt::from(y));
            let ok = match ext_gcd_bounded(&bx, &by) {
                Ok((d, u, v)) => {
                    d.is_positive()
                        && &u * &bx + &v * &by == d
                        && &u.abs() * &d <= by.abs()
                        && &v.abs() * &d <= bx.abs()
                }
                Err(_) => false,
            };
            r.check(ok, || format!("x = {x}, y = {y}"));
        }
    }
    r
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

fn check_completion(r: &mut SuiteReport, k: &[i64], policy: CompletionPolicy) {
    let kv = IntVector::from_i64s(k).expect("nonempty");
    let n = k.len();
    let l1 = kv.ell1();
    let ok = complete_with_policy(&kv, policy).is_ok_and(|a| {
        let det_ok = a.det().is_ok_and(|d| d.abs().is_one());
        let first = a.row(0) == kv.components();
        let norms = a.row_l1_norms().iter().all(|x| *x <= l1);
        let inv = det_ok
            && inverse_unimodular(&UnimodularMatrix::new(a.clone()).expect("det checked"))
                .is_ok_and(|b| b.matrix().max_row_l1() <= factorial(n) * l1.pow(n as u32 - 1));
        det_ok && first && norms && inv
    });
    r.check(ok, || format!("k = {k:?}"));
}

fn gcd_all(k: &[i64]) -> i64 {
    k.iter().fold(0i64, |g, &x| num_integer::gcd(g, x))
}

/// Random vector of `Zⁿ` with `0 < |k|₁ ≤ max_l1`, primitive.
fn random_primitive(rng: &mut SplitMix64, n: usize, max_l1: i64) -> Vec<i64> {
    loop {
        let k: Vec<i64> = (0..n).map(|_| rng.gen_range(-max_l1..=max_l1)).collect();
        let l1: i64 = k.iter().map(|x| x.abs()).sum();
        if l1 > 0 && l1 <= max_l1 && gcd_all(&k) == 1 {
            return k;
        }
    }
}

/// Every primitive `k ∈ Z²` with `|k|₁ ≤ 50`, and 1000 seeded primitive
/// vectors with `|k|₁ ≤ 20` for each `n = 3, 4, 5`.
pub fn completion_suite(policy: CompletionPolicy) -> SuiteReport {
    let mut r = SuiteReport::new("completion");
    for a in -50i64..=50 {
        for b in -50i64..=50 {
            if a.abs() + b.abs() <= 50 && gcd_all(&[a, b]) == 1 {
                check_completion(&mut r, &[a, b], policy);
            }
        }
    }
    let mut rng = SplitMix64::seed_from_u64(0x5eed_0002);
    for n in 3..=5 {
        for _ in 0..1000 {
            let k = random_primitive(&mut rng, n, 20);
            check_completion(&mut r, &k, policy);
        }
    }
    r
}

/// `10⁴` seeded intervals with log-uniform length in `[10⁻⁴, 1]`: the
/// rational is reduced and lies in the interval; the height bound
/// `|p| + q < 4√2·l^{−1/2}` is tracked as advisory.
pub fn dirichlet_suite() -> SuiteReport {
    let mut r = SuiteReport::new("dirichlet");
    let mut rng = SplitMix64::seed_from_u64(0x5eed_0003);
    for _ in 0..10_000 {
        let l = 10f64.powf(rng.gen_range(-4.0..=0.0));
        let c = rng.gen_range(-1.0 + l / 2.0..=1.0 - l / 2.0);
        match dirichlet_rational(c, l) {
            Ok(x) => {
                r.check(
                    x.is_reduced() && x.in_closed(c - l / 2.0, c + l / 2.0),
                    || format!("center {c}, length {l} -> {}/{}", x.p, x.q),
                );
                r.advise((x.height() as f64) < dirichlet_bound(l), || {
                    format!(
                        "center {c}, length {l} -> {}/{} with |p|+q = {} >= {}",
                        x.p,
                        x.q,
                        x.height(),
                        dirichlet_bound(l)
                    )
                });
            }
            Err(e) => r.check(false, || format!("center {c}, length {l}: {e}")),
        }
    }
    r
}

/// Random full-rank integer matrix with `r ≤ n` rows and entries in `[−9, 9]`.
pub(crate) fn random_basis(rng: &mut SplitMix64, r: usize, n: usize) -> SubmoduleBasis {
    loop {
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let m = IntMatrix::from_i64_rows(&rows).expect("rectangular");
        if let Ok(b) = SubmoduleBasis::new(m) {
            return b;
        }
    }
}

/// 500 seeded matrices with `r ≤ 3`, `n ≤ 5`, plus primitive rank-one inputs.
pub fn smith_suite() -> SuiteReport {
    let mut s = SuiteReport::new("smith");
    let mut rng = SplitMix64::seed_from_u64(0x5eed_0004);
    for _ in 0..500 {
        let n = rng.gen_range(1..=5usize);
        let r = rng.gen_range(1..=n.min(3));
        let basis = random_basis(&mut rng, r, n);
        let snf = smith_normal_form(&basis);
        let ok = snf.reconstruct() == *basis.matrix()
            && snf.divisibility_holds()
            && snf.diag.iter().all(|d| d.is_positive())
            && snf.b.det().abs().is_one()
            && snf.a.det().abs().is_one();
        s.check(ok, || format!("rows {:?}", basis.matrix().to_i64_rows()));
    }
    for n in 2..=5 {
        for _ in 0..50 {
            let k = random_primitive(&mut rng, n, 20);
            let basis = SubmoduleBasis::from_vector(&IntVector::from_i64s(&k).expect("nonempty"))
                .expect("nonzero");
            let snf = smith_normal_form(&basis);
            s.check(
                snf.diag == vec![BigInt::one()] && snf.reconstruct() == *basis.matrix(),
                || format!("primitive k = {k:?}"),
            );
        }
    }
    s
}

/// Exact identities of the exponent algebra over the rationals.
pub fn exponent_suite() -> SuiteReport {
    type Q = Ratio<i64>;
    let mut s = SuiteReport::new("exponents");
    for n in 2..=10usize {
        let ni = n as i64;
        let g = Q::new(1, 2 * ni);
        s.check(exponent_analytic(n, g).ok() == Some(g), || {
            format!("a(n = {n}, 1/(2n)) != 1/(2n)")
        });
        for j in 1..=20i64 {
            // γ = j/20 · (2n)^{-1}
            let g = Q::new(j, 40 * ni);
            let a = exponent_analytic(n, g).expect("in range");
            let d = analytic_delta_from_gamma(n, g);
            s.check(a == Q::new(1, 2 * (ni - 1)) - d, || {
                format!("analytic delta identity n = {n}, gamma = {g}")
            });
            s.check(
                Q::new(1, 2 * ni) <= a && a < Q::new(1, 2 * (ni - 1)),
                || format!("analytic range n = {n}, gamma = {g}"),
            );
            // γ = j/20 · (5(n−1)²)^{-1}
            let g = Q::new(j, 100 * (ni - 1) * (ni - 1));
            let (a, b) = exponent_gevrey(n, Q::one(), g).expect("in range");
            let d = gevrey_delta_from_gamma(n, g);
            s.check(a == Q::new(1, 2 * (ni - 1)) - d, || {
                format!("gevrey delta identity n = {n}, gamma = {g}")
            });
            s.check(
                Q::new(ni - 2, 5 * (ni - 1) * (ni - 1)) <= b && b <= Q::new(1, 2 * (ni - 1)),
                || format!("gevrey b range n = {n}, gamma = {g}"),
            );
        }
        for m in 0..n {
            let (a, b) = local_exponents(n, m, Q::one()).expect("m < n");
            s.check(a == b && a == Q::new(1, 2 * (ni - m as i64)), || {
                format!("local exponents n = {n}, m = {m}")
            });
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_suite_passes() {
        let r = exponent_suite();
        assert!(r.passed(), "{r:?}");
        assert!(r.cases > 0);
    }

    #[test]
    fn smith_suite_passes() {
        assert!(smith_suite().passed());
    }

    #[test]
    fn fault_is_caught() {
        let r = completion_suite(CompletionPolicy::Unchecked);
        assert!(r.failures > 0);
        assert!(r.counterexample.as_deref().unwrap().starts_with("k = "));
    }

    #[test]
    fn dirichlet_height_advisory() {
        let r = dirichlet_suite();
        assert!(r.passed());
        assert!(r.advisory_violations > 0);
    }
}
