//! Simple resonances in frequency space.
//!
//! A frequency `ω` is simply resonant of order `K` when some primitive
//! `k ∈ Zⁿ` with `|k|₁ < K` annihilates it. Along a trajectory the detector
//! watches the ratios `ωᵢ/ωⱼ` against a sup-attaining component `j`: each
//! time such a ratio sweeps over a reduced `p/q` with `|p| + q < K`, the
//! vector `k′ = q·eᵢ − p·eⱼ` satisfies `k′·ω = 0` somewhere on the step.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::IntVector;

/// A nonzero frequency vector `ω = ∇h(I)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyVector(Vec<f64>);

impl FrequencyVector {
    pub fn new(omega: Vec<f64>) -> Result<Self> {
        if omega.is_empty() || omega.iter().any(|w| !w.is_finite()) {
            return Err(Error::domain(
                "frequency vector must be nonempty and finite",
            ));
        }
        if omega.iter().all(|&w| w == 0.0) {
            return Err(Error::domain("zero frequency vector"));
        }
        Ok(FrequencyVector(omega))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|ω| = maxᵢ |ωᵢ|`.
    pub fn sup(&self) -> f64 {
        self.0.iter().fold(0.0, |m, w| m.max(w.abs()))
    }

    fn sup_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let s = self.sup();
        self.0
            .iter()
            .enumerate()
            .filter(move |(_, w)| w.abs() == s)
            .map(|(j, _)| j)
    }

    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|w| lambda * w).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    /// Order cutoff `K`; detected vectors satisfy `|k′|₁ < K`.
    pub order: f64,
    /// Relative tolerance on `|k·ω| / (|k|₁·|ω|)`.
    pub tol: f64,
    /// Largest number of lattice points the brute-force oracle may visit.
    #[serde(default = "default_budget")]
    pub budget: u64,
}

fn default_budget() -> u64 {
    10_000_000
}

impl DetectorConfig {
    pub fn new(order: f64, tol: f64) -> Result<Self> {
        let cfg = DetectorConfig {
            order,
            tol,
            budget: default_budget(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.order >= 1.0) || !self.order.is_finite() {
            return Err(Error::domain(format!(
                "detector order K = {} must be >= 1",
                self.order
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::domain(format!(
                "detector tolerance {} must be > 0",
                self.tol
            )));
        }
        Ok(())
    }
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            order: 10.0,
            tol: 1e-6,
            budget: default_budget(),
        }
    }
}

/// A detected crossing of a simple resonance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceEvent {
    pub t: f64,
    pub k: IntVector,
    /// `|k′·ω|` at the estimated crossing.
    pub residual: f64,
    /// Index whose ratio crossed.
    pub i: usize,
    /// Sup-attaining reference index.
    pub j: usize,
}

/// `ωᵢ / |ω|`, a point of `[−1, 1]ⁿ` with at least one unit component.
pub fn ratio_coordinates(omega: &FrequencyVector) -> Vec<f64> {
    let s = omega.sup();
    omega.0.iter().map(|w| w / s).collect()
}

/// Euclidean distance from `ω` to the hyperplane `k·ω = 0`.
pub fn resonant_distance(omega: &FrequencyVector, k: &IntVector) -> Result<f64> {
    if k.is_zero() {
        return Err(Error::domain("resonant hyperplane of the zero vector"));
    }
    if k.len() != omega.len() {
        return Err(Error::domain("dimension mismatch between k and omega"));
    }
    let norm = k.to_f64s().iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(k.dot_f64(omega.as_slice()).abs() / norm)
}

/// Reduced fractions `p/q` in `[lo, hi]` with `|p| + q < order`, in order of
/// increasing denominator (a Farey enumeration restricted by height).
pub fn farey_candidates(lo: f64, hi: f64, order: f64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    if !(lo <= hi) {
        return out;
    }
    let qmax = (order.ceil() as i64 - 1).max(0);
    for q in 1..=qmax {
        let pl = (lo * q as f64).ceil() as i64;
        let ph = (hi * q as f64).floor() as i64;
        for p in pl..=ph {
            if ((p.abs() + q) as f64) < order && p.gcd(&q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

/// `±(q·eᵢ − p·eⱼ)`, signed so that the first nonzero component is positive.
fn pair_vector(n: usize, i: usize, j: usize, p: i64, q: i64) -> IntVector {
    let mut k = vec![BigInt::from(0); n];
    let s = if i < j || p <= 0 { 1 } else { -1 };
    k[i] = BigInt::from(s * q);
    k[j] = BigInt::from(-s * p);
    IntVector::new(k).expect("n >= 1")
}

/// Looks for a simple-resonance crossing between two consecutive samples
/// `(t, ω)` of a continuous frequency path.
///
/// For every sup-attaining index `j` of either sample and every `i ≠ j`, the
/// ratio `ωᵢ/ωⱼ` sweeps an interval between the two samples; any reduced
/// `p/q` with `|p| + q < K` inside it, or within tolerance of it at an
/// endpoint, yields `k′ = q·eᵢ − p·eⱼ`. The event with the least `|p| + q`,
/// then least `j`, then least `i` is returned. Its time is located by linear
/// interpolation of the ratio.
pub fn detect_ratio_crossing(
    prev: (f64, &FrequencyVector),
    curr: (f64, &FrequencyVector),
    cfg: &DetectorConfig,
) -> Result<Option<ResonanceEvent>> {
    let ((t0, w0), (t1, w1)) = (prev, curr);
    if w0.len() != w1.len() {
        return Err(Error::domain("frequency samples have different dimensions"));
    }
    let n = w0.len();
    let (a, b) = (w0.as_slice(), w1.as_slice());
    let (s0, s1) = (w0.sup(), w1.sup());

    let mut refs: Vec<usize> = w0.sup_indices().chain(w1.sup_indices()).collect();
    refs.sort_unstable();
    refs.dedup();

    // (height, j, i, p) ordering key plus the event itself
    let mut best: Option<((i64, usize, usize, i64), ResonanceEvent)> = None;
    for &j in &refs {
        if a[j] == 0.0 || b[j] == 0.0 || a[j].signum() != b[j].signum() {
            continue;
        }
        for i in (0..n).filter(|&i| i != j) {
            let (r0, r1) = (a[i] / a[j], b[i] / b[j]);
            let (lo, hi) = (r0.min(r1), r0.max(r1));
            // Widening that covers every p/q passing the endpoint residual test.
            let slack = cfg.tol * cfg.order * (s0 / a[j].abs()).max(s1 / b[j].abs());
            for (p, q) in farey_candidates(lo - slack, hi + slack, cfg.order) {
                let height = p.abs() + q;
                let key = (height, j, i, p);
                if best.as_ref().is_some_and(|(bk, _)| *bk <= key) {
                    continue;
                }
                let x = p as f64 / q as f64;
                let crossed = lo <= x && x <= hi;
                let (qf, pf, hf) = (q as f64, p as f64, height as f64);
                let res0 = (qf * a[i] - pf * a[j]).abs();
                let res1 = (qf * b[i] - pf * b[j]).abs();
                let within = res0 <= cfg.tol * hf * s0 || res1 <= cfg.tol * hf * s1;
                if !(crossed || within) {
                    continue;
                }
                let s = if r1 != r0 {
                    ((x - r0) / (r1 - r0)).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let residual = {
                    let wi = a[i] + s * (b[i] - a[i]);
                    let wj = a[j] + s * (b[j] - a[j]);
                    (qf * wi - pf * wj).abs()
                };
                let event = ResonanceEvent {
                    t: t0 + s * (t1 - t0),
                    k: pair_vector(n, i, j, p, q),
                    residual,
                    i,
                    j,
                };
                best = Some((key, event));
            }
        }
    }
    Ok(best.map(|(_, e)| e))
}

/// Number of vectors of `Zⁿ` with `|k|₁ ≤ m` (including zero).
fn ball_size(n: usize, m: u64) -> f64 {
    // Σᵢ 2ⁱ·C(n, i)·C(m, i)
    let mut total = 0.0;
    let mut cn = 1.0;
    let mut cm = 1.0;
    for i in 0..=n.min(m as usize) {
        if i > 0 {
            cn *= (n - i + 1) as f64 / i as f64;
            cm *= (m as f64 - i as f64 + 1.0) / i as f64;
        }
        total += 2f64.powi(i as i32) * cn * cm;
    }
    total
}

/// Exhaustive search over primitive `k` with `0 < |k|₁ ≤ ⌊K⌋`, one
/// representative per `±k` (first nonzero component positive). Returns the
/// minimiser of `|k·ω|` when its relative residual is within tolerance.
pub fn brute_force_resonant(
    omega: &FrequencyVector,
    cfg: &DetectorConfig,
) -> Result<Option<IntVector>> {
    cfg.validate()?;
    let n = omega.len();
    let m = cfg.order.floor() as u64;
    let size = ball_size(n, m);
    if size > cfg.budget as f64 {
        return Err(Error::Resource(format!(
            "enumerating |k| <= {m} in dimension {n} visits ~{size:.3e} points (budget {})",
            cfg.budget
        )));
    }
    let w = omega.as_slice();
    let sup = omega.sup();
    let mut best: Option<(f64, i64, Vec<i64>)> = None;
    let mut k = vec![0i64; n];
    enumerate(&mut k, 0, m as i64, false, &mut |k| {
        let l1: i64 = k.iter().map(|c| c.abs()).sum();
        if l1 == 0 || k.iter().fold(0i64, |g, &c| g.gcd(&c)) != 1 {
            return;
        }
        let dot: f64 = k.iter().zip(w).map(|(&c, x)| c as f64 * x).sum();
        let r = dot.abs();
        let better = match &best {
            None => true,
            Some((br, bl, _)) => r < *br || (r == *br && l1 < *bl),
        };
        if better {
            best = Some((r, l1, k.to_vec()));
        }
    });
    Ok(best.and_then(|(r, l1, k)| {
        (r <= cfg.tol * l1 as f64 * sup).then(|| IntVector::from_i64s(&k).expect("n >= 1"))
    }))
}

fn enumerate(
    k: &mut Vec<i64>,
    pos: usize,
    remaining: i64,
    seen_nonzero: bool,
    visit: &mut impl FnMut(&[i64]),
) {
    if pos == k.len() {
        visit(k);
        return;
    }
    let lo = if seen_nonzero { -remaining } else { 0 };
    for c in lo..=remaining {
        k[pos] = c;
        enumerate(
            k,
            pos + 1,
            remaining - c.abs(),
            seen_nonzero || c != 0,
            visit,
        );
    }
    k[pos] = 0;
}
