use std::f64::consts::TAU;

use super::perturbation::{ActionWeight, TrigPerturbation};
use crate::error::{Error, Result};

/// Upper bound on `S(x) = Σ_{j≥0} Lʲ (j!)^{−α} xʲ`.
///
/// For `α = 1` this is `e^{Lx}`. Otherwise terms are summed in log space
/// until the term ratio `Lx/(j+1)^α` falls below one half and the term is
/// negligible; the remaining tail is bounded by a geometric series.
pub fn gevrey_series(x: f64, alpha: f64, big_l: f64) -> Result<f64> {
    if !(alpha >= 1.0) || !(big_l > 0.0) || !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!(
            "Gevrey series needs alpha >= 1, L > 0, x >= 0 (got {alpha}, {big_l}, {x})"
        )));
    }
    let lx = big_l * x;
    if alpha == 1.0 {
        return Ok(lx.exp());
    }
    if lx == 0.0 {
        return Ok(1.0);
    }
    let ln_lx = lx.ln();
    let mut sum = 0.0;
    let mut ln_fact = 0.0;
    for j in 0u32.. {
        if j > 0 {
            ln_fact += (j as f64).ln();
        }
        let term = (j as f64 * ln_lx - alpha * ln_fact).exp();
        sum += term;
        let ratio = lx / ((j + 1) as f64).powf(alpha);
        if ratio < 0.5 && term <= 1e-17 * sum {
            // every later ratio is smaller still
            sum += term * ratio / (1.0 - ratio);
            break;
        }
        if !sum.is_finite() {
            return Err(Error::domain("Gevrey series overflowed"));
        }
    }
    Ok(sum)
}

/// `Σ_l L^{|l|} (l!)^{−α} sup|∂ˡw|` over `B(0, r)` for a degree-two weight.
fn weight_norm(w: &ActionWeight, alpha: f64, big_l: f64, r: f64, n: usize) -> f64 {
    let mut total = w.sup_bound(r);
    let q = w.quadratic.as_ref();
    for i in 0..n {
        let mut first = w.linear.as_ref().map_or(0.0, |b| b[i].abs());
        if let Some(q) = q {
            first += r * (0..n).map(|j| (q[i][j] + q[j][i]).abs()).sum::<f64>();
        }
        total += big_l * first;
    }
    if let Some(q) = q {
        for i in 0..n {
            // l = 2eᵢ: l! = 2, ∂ˡw = 2Qᵢᵢ
            total += big_l * big_l * 2f64.powf(-alpha) * (2.0 * q[i][i]).abs();
            for j in i + 1..n {
                total += big_l * big_l * (q[i][j] + q[j][i]).abs();
            }
        }
    }
    total
}

/// Certified upper bound on the Gevrey norm `|f|_{α,L}` of a trigonometric
/// perturbation,
/// `Σ_k |a_k| · Πᵢ S(2π|kᵢ|) · |w_k|_{α,L}`.
///
/// For constant action weights the last factor is `|c|`; for polynomial
/// weights it is the (coarser) weight norm over `B(0, action_radius)`. The
/// product form is exact for the mixed derivatives of `g(θ)·w(I)` because
/// multi-index factorials factor across the two blocks.
pub fn gevrey_norm_bound(
    pert: &TrigPerturbation,
    alpha: f64,
    big_l: f64,
    action_radius: f64,
) -> Result<f64> {
    if !(alpha >= 1.0) || !(big_l > 0.0) {
        return Err(Error::domain("Gevrey norm needs alpha >= 1 and L > 0"));
    }
    let mut total = 0.0;
    for t in &pert.terms {
        let mut angular = 1.0;
        for &k in &t.k {
            angular *= gevrey_series(TAU * k.unsigned_abs() as f64, alpha, big_l)?;
        }
        total += t.amplitude.abs()
            * angular
            * weight_norm(&t.weight, alpha, big_l, action_radius, t.k.len());
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::TrigTerm;

    fn single(k: Vec<i64>, amp: f64) -> TrigPerturbation {
        TrigPerturbation::new(vec![TrigTerm::new(k, amp, 0.0)])
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(
            gevrey_norm_bound(&TrigPerturbation::zero(), 1.0, 0.5, 1.0).unwrap(),
            0.0
        );
        assert_eq!(
            gevrey_norm_bound(&single(vec![0, 0], -0.3), 2.0, 0.5, 1.0).unwrap(),
            0.3
        );
    }

    #[test]
    fn analytic_single_mode() {
        for l in [0.01, 0.1, 0.5] {
            let got = gevrey_norm_bound(&single(vec![1, 0], 1.0), 1.0, l, 1.0).unwrap();
            // truncated series of (2πL)^j / j!
            let mut series = 0.0;
            let mut term = 1.0;
            for j in 0..200 {
                series += term;
                term *= TAU * l / (j + 1) as f64;
            }
            assert!((got - (TAU * l).exp()).abs() < 1e-12 * got);
            assert!((got - series).abs() < 1e-12 * got);
        }
    }

    #[test]
    fn gevrey_series_dominates_truncation() {
        for alpha in [1.5, 2.0, 3.0] {
            let x = TAU * 3.0;
            let s = gevrey_series(x, alpha, 0.7).unwrap();
            let mut partial = 0.0;
            let mut ln_fact = 0.0;
            for j in 0..150 {
                if j > 0 {
                    ln_fact += (j as f64).ln();
                }
                partial += (j as f64 * (0.7 * x).ln() - alpha * ln_fact).exp();
            }
            assert!(s >= partial * (1.0 - 1e-15));
            assert!(s <= partial * (1.0 + 1e-12));
        }
        assert!(gevrey_series(1.0, 0.9, 1.0).is_err());
    }

    #[test]
    fn monotone_in_l_and_amplitude() {
        let f = TrigPerturbation::new(vec![
            TrigTerm::new(vec![1, -2], 0.5, 0.2),
            TrigTerm::new(vec![0, 3], 0.1, 0.0),
        ]);
        let mut prev = 0.0;
        for l in [0.01, 0.02, 0.05, 0.1] {
            let b = gevrey_norm_bound(&f, 1.5, l, 1.0).unwrap();
            assert!(b > prev);
            prev = b;
        }
        let bigger = TrigPerturbation::new(vec![
            TrigTerm::new(vec![1, -2], 0.6, 0.2),
            TrigTerm::new(vec![0, 3], 0.1, 0.0),
        ]);
        assert!(gevrey_norm_bound(&bigger, 1.5, 0.1, 1.0).unwrap() > prev);
    }

    #[test]
    fn action_weights_increase_the_bound() {
        let mut t = TrigTerm::new(vec![1, 0], 1.0, 0.0);
        let base =
            gevrey_norm_bound(&TrigPerturbation::new(vec![t.clone()]), 1.0, 0.1, 1.0).unwrap();
        t.weight = ActionWeight {
            constant: 1.0,
            linear: Some(vec![0.5, 0.0]),
            quadratic: None,
        };
        let weighted = gevrey_norm_bound(&TrigPerturbation::new(vec![t]), 1.0, 0.1, 1.0).unwrap();
        // |w| ≤ 1.5 on the unit ball, plus L·0.5 for ∂w
        assert!((weighted - base * (1.5 + 0.05)).abs() < 1e-12);
    }
}
