use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_exponent, FitResult};
use super::integrator::IntegratorConfig;
use super::trajectory::stability_run;
use super::State;
use crate::error::{Error, Result};
use crate::hamiltonian::SystemSpec;
use crate::resonance::DetectorConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Drift threshold defining the stability time.
    pub rho: f64,
    pub t_max: f64,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    /// When present, resonance crossings are counted per run.
    #[serde(default)]
    pub detector: Option<DetectorConfig>,
    pub seeds: Vec<u64>,
    /// Worker threads; `0` uses the global pool.
    #[serde(default)]
    pub workers: usize,
}

/// One `(ε, seed)` run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRow {
    pub epsilon: f64,
    pub seed: u64,
    pub stability_time: Option<f64>,
    pub censored: bool,
    pub escaped: bool,
    pub max_drift: Option<f64>,
    pub max_h_deviation: Option<f64>,
    pub monitor_ok: bool,
    pub crossings: usize,
    pub error: Option<String>,
}

/// Median aggregate over the seeds of one `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub epsilon: f64,
    /// Median stability time over the successful seeds; censored times
    /// enter as `t_max`.
    pub stability_time: Option<f64>,
    /// Set when at least half of the successful seeds were censored, so
    /// that the median is only a lower bound.
    pub censored: bool,
    pub median_drift: Option<f64>,
    pub max_drift: Option<f64>,
    pub crossings: usize,
    pub seeds_ok: usize,
    pub seeds_censored: usize,
    pub seeds_failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<EpsilonRow>,
    pub runs: Vec<SeedRow>,
    pub fit: Option<FitResult>,
    /// Why no fit was produced, when it was not.
    pub fit_note: Option<String>,
    pub censored_rows: usize,
}

impl SweepResult {
    fn from_rows(rows: Vec<EpsilonRow>, runs: Vec<SeedRow>) -> Self {
        let censored_rows = rows.iter().filter(|r| r.censored).count();
        let mut out = SweepResult {
            rows,
            runs,
            fit: None,
            fit_note: None,
            censored_rows,
        };
        match fit_exponent(&out) {
            Ok(f) => out.fit = Some(f),
            Err(e) => out.fit_note = Some(e.to_string()),
        }
        out
    }

    pub fn failed_runs(&self) -> usize {
        self.runs.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Uniform initial angles in `[0, 1)ⁿ` drawn from a SplitMix64 stream.
pub fn initial_angles(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

fn validate_eps(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::domain("epsilon list is empty"));
    }
    if eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::domain("epsilon values must be positive and finite"));
    }
    if let Some(w) = eps.windows(2).find(|w| w[1] >= w[0]) {
        let what = if w[1] == w[0] {
            "duplicate"
        } else {
            "increasing"
        };
        return Err(Error::domain(format!(
            "epsilon list must be strictly decreasing ({what} {} -> {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

fn one_run(template: &SystemSpec, eps: f64, seed: u64, cfg: &SweepConfig) -> SeedRow {
    let spec = template.with_epsilon(eps);
    let action = template
        .initial
        .as_ref()
        .map(|i| i.action.clone())
        .unwrap_or_else(|| vec![0.0; spec.n]);
    let fail = |msg: String| SeedRow {
        epsilon: eps,
        seed,
        stability_time: None,
        censored: false,
        escaped: false,
        max_drift: None,
        max_h_deviation: None,
        monitor_ok: false,
        crossings: 0,
        error: Some(msg),
    };
    let state = match State::new(initial_angles(seed, spec.n), action) {
        Ok(s) => s,
        Err(e) => return fail(e.to_string()),
    };
    match stability_run(
        &spec,
        &state,
        cfg.rho,
        cfg.t_max,
        &cfg.integrator,
        cfg.detector.as_ref(),
    ) {
        Ok(rec) => SeedRow {
            epsilon: eps,
            seed,
            stability_time: Some(rec.final_time),
            censored: rec.censored,
            escaped: rec.escaped,
            max_drift: Some(rec.max_drift),
            max_h_deviation: Some(rec.max_h_deviation),
            monitor_ok: rec.monitor_ok,
            crossings: rec.events.len(),
            error: None,
        },
        Err(f) => fail(f.error.to_string()),
    }
}

fn aggregate(eps: f64, runs: &[SeedRow]) -> EpsilonRow {
    let ok: Vec<&SeedRow> = runs.iter().filter(|r| r.error.is_none()).collect();
    let mut times: Vec<f64> = ok.iter().filter_map(|r| r.stability_time).collect();
    let mut drifts: Vec<f64> = ok.iter().filter_map(|r| r.max_drift).collect();
    let seeds_censored = ok.iter().filter(|r| r.censored).count();
    EpsilonRow {
        epsilon: eps,
        stability_time: median(&mut times),
        censored: !ok.is_empty() && 2 * seeds_censored >= ok.len(),
        max_drift: drifts.iter().copied().reduce(f64::max),
        median_drift: median(&mut drifts),
        crossings: ok.iter().map(|r| r.crossings).sum(),
        seeds_ok: ok.len(),
        seeds_censored,
        seeds_failed: runs.len() - ok.len(),
    }
}

/// Stability times for every `(ε, seed)` pair, aggregated by median per `ε`.
///
/// Runs are independent and computed in parallel; their order in the result
/// is by `(ε, seed)` whatever the schedule. A failing run is recorded in its
/// row and the sweep continues.
pub fn sweep(template: &SystemSpec, eps_list: &[f64], cfg: &SweepConfig) -> Result<SweepResult> {
    template.validate()?;
    validate_eps(eps_list)?;
    if cfg.seeds.is_empty() {
        return Err(Error::domain("sweep needs at least one seed"));
    }
    cfg.integrator.validate()?;
    if !(cfg.t_max > 0.0) || !cfg.t_max.is_finite() {
        return Err(Error::domain("t_max must be positive and finite"));
    }
    if !(cfg.rho > 0.0) || cfg.rho >= template.radius / 2.0 {
        return Err(Error::domain(format!(
            "rho = {} outside (0, R/2) with R = {}",
            cfg.rho, template.radius
        )));
    }
    let jobs: Vec<(f64, u64)> = eps_list
        .iter()
        .flat_map(|&e| cfg.seeds.iter().map(move |&s| (e, s)))
        .collect();
    let work = || {
        jobs.par_iter()
            .map(|&(e, s)| one_run(template, e, s, cfg))
            .collect::<Vec<_>>()
    };
    let runs = if cfg.workers == 0 {
        work()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Resource(format!("cannot start worker pool: {e}")))?
            .install(work)
    };
    let per = cfg.seeds.len();
    let rows = eps_list
        .iter()
        .enumerate()
        .map(|(k, &e)| aggregate(e, &runs[k * per..(k + 1) * per]))
        .collect();
    Ok(SweepResult::from_rows(rows, runs))
}

/// Analytic table `T(ε) = c₂·exp(c₃·ε^{−a})`, bypassing integration.
pub fn synthetic_sweep(eps_list: &[f64], a: f64, c2: f64, c3: f64) -> Result<SweepResult> {
    validate_eps(eps_list)?;
    if !(a > 0.0) || !(c2 > 0.0) || !(c3 > 0.0) {
        return Err(Error::domain("synthetic table needs a, c2, c3 > 0"));
    }
    let mut rows = Vec::with_capacity(eps_list.len());
    for &e in eps_list {
        let t = c2 * (c3 * e.powf(-a)).exp();
        if !t.is_finite() {
            return Err(Error::domain(format!(
                "synthetic T overflows at epsilon = {e}"
            )));
        }
        rows.push(EpsilonRow {
            epsilon: e,
            stability_time: Some(t),
            censored: false,
            median_drift: None,
            max_drift: None,
            crossings: 0,
            seeds_ok: 0,
            seeds_censored: 0,
            seeds_failed: 0,
        });
    }
    Ok(SweepResult::from_rows(rows, Vec::new()))
}
