use serde::{Deserialize, Serialize};

use super::field::energy;
use super::integrator::{IntegratorConfig, Stepper};
use super::State;
use crate::error::{Error, Result};
use crate::hamiltonian::SystemSpec;
use crate::lattice::IntVector;
use crate::resonance::{detect_ratio_crossing, DetectorConfig, FrequencyVector, ResonanceEvent};

/// One integrated orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub n: usize,
    pub epsilon: f64,
    pub initial: State,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// `H(θ, I)` at the sample times.
    pub energy_series: Vec<f64>,
    /// `sup_{s≤t} |I(s) − I₀|` at the sample times.
    pub drift_series: Vec<f64>,
    pub events: Vec<ResonanceEvent>,
    /// Left `B(0, R)`.
    pub escaped: bool,
    /// Reached the horizon without escaping or meeting the stop condition.
    pub censored: bool,
    pub steps: u64,
    pub final_time: f64,
    pub max_drift: f64,
    /// First time the drift reached the watched threshold, if one was set.
    pub threshold_time: Option<f64>,
    /// `max |H(t) − H(0)|` over every step.
    pub max_energy_error: f64,
    /// `max |h(I(t)) − h(I₀)|` over every step.
    pub max_h_deviation: f64,
    /// Monitor bound `2·sup|ε·f| + energy_slack`.
    pub h_deviation_bound: f64,
    pub monitor_ok: bool,
    pub warnings: Vec<String>,
}

impl TrajectoryRecord {
    fn empty(spec: &SystemSpec, state0: &State) -> Self {
        TrajectoryRecord {
            n: spec.n,
            epsilon: spec.epsilon,
            initial: state0.clone(),
            times: Vec::new(),
            states: Vec::new(),
            energy_series: Vec::new(),
            drift_series: Vec::new(),
            events: Vec::new(),
            escaped: false,
            censored: false,
            steps: 0,
            final_time: 0.0,
            max_drift: 0.0,
            threshold_time: None,
            max_energy_error: 0.0,
            max_h_deviation: 0.0,
            h_deviation_bound: 0.0,
            monitor_ok: true,
            warnings: Vec::new(),
        }
    }

    pub fn first_crossing_time(&self) -> Option<f64> {
        self.events.first().map(|e| e.t)
    }
}

/// A run that stopped on an error, with everything recorded up to it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{error}")]
pub struct IntegrationFailure {
    pub error: Error,
    pub partial: Box<TrajectoryRecord>,
}

impl From<IntegrationFailure> for Error {
    fn from(f: IntegrationFailure) -> Self {
        f.error
    }
}

struct RunOptions<'a> {
    detector: Option<&'a DetectorConfig>,
    stop_drift: Option<f64>,
    watch_drift: Option<f64>,
    keep_samples: bool,
}

fn frequencies(spec: &SystemSpec, action: &[f64], t: f64) -> Result<FrequencyVector> {
    FrequencyVector::new(spec.integrable.grad(action)).map_err(|_| Error::Integrator {
        time: t,
        reason: "frequency vector vanished".into(),
    })
}

fn run(
    spec: &SystemSpec,
    state0: &State,
    t_end: f64,
    cfg: &IntegratorConfig,
    opts: RunOptions<'_>,
) -> std::result::Result<TrajectoryRecord, IntegrationFailure> {
    let mut rec = TrajectoryRecord::empty(spec, state0);
    let fail = |error: Error, rec: TrajectoryRecord| IntegrationFailure {
        error,
        partial: Box::new(rec),
    };

    let checks = (|| -> Result<Stepper<'_>> {
        spec.validate()?;
        if state0.dim() != spec.n {
            return Err(Error::domain("initial state has the wrong dimension"));
        }
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::domain(format!(
                "horizon T = {t_end} must be finite and >= 0"
            )));
        }
        if let Some(d) = opts.detector {
            d.validate()?;
        }
        Stepper::new(spec, cfg)
    })();
    let mut stepper = match checks {
        Ok(s) => s,
        Err(e) => return Err(fail(e, rec)),
    };

    let mut state = state0.clone();
    state.reduce_angles();
    rec.initial = state.clone();
    let i0 = state.action.clone();
    if state.action_distance(&vec![0.0; spec.n]) >= spec.radius / 2.0 {
        rec.warnings.push(format!(
            "initial action lies outside B(0, R/2) with R = {}",
            spec.radius
        ));
    }
    let big_h0 = energy(spec, &state);
    let h0 = spec.integrable.eval(&i0);
    rec.h_deviation_bound = 2.0 * spec.perturbation_sup() + cfg.energy_slack;

    let sample = |rec: &mut TrajectoryRecord, t: f64, s: &State, big_h: f64| {
        rec.times.push(t);
        rec.states.push(s.clone());
        rec.energy_series.push(big_h);
        rec.drift_series.push(rec.max_drift);
    };
    sample(&mut rec, 0.0, &state, big_h0);

    let mut last_k: Option<IntVector> = None;
    let mut prev_omega = None;
    if let Some(det) = opts.detector {
        let w = match frequencies(spec, &state.action, 0.0) {
            Ok(w) => w,
            Err(e) => return Err(fail(e, rec)),
        };
        match detect_ratio_crossing((0.0, &w), (0.0, &w), det) {
            Ok(Some(ev)) => {
                last_k = Some(ev.k.clone());
                rec.events.push(ev);
            }
            Ok(None) => {}
            Err(e) => return Err(fail(e, rec)),
        }
        prev_omega = Some(w);
    }

    if opts.stop_drift.is_some_and(|rho| rho <= 0.0) {
        rec.final_time = 0.0;
        return Ok(rec);
    }

    let dt = cfg.dt;
    let total_steps = (t_end / dt).ceil() as u64;
    let mut t = 0.0;
    let mut stopped = false;
    let mut sampled_last = true;
    for k in 1..=total_steps {
        let h = if k == total_steps {
            t_end - (k - 1) as f64 * dt
        } else {
            dt
        };
        if let Err(e) = stepper.advance(&mut state, h, t) {
            rec.final_time = t;
            if !sampled_last && opts.keep_samples {
                let bh = energy(spec, &state);
                sample(&mut rec, t, &state, bh);
            }
            return Err(fail(e, rec));
        }
        t = if k == total_steps {
            t_end
        } else {
            k as f64 * dt
        };
        rec.steps = k;

        let drift = state.action_distance(&i0);
        if drift > rec.max_drift {
            rec.max_drift = drift;
            if rec.threshold_time.is_none() && opts.watch_drift.is_some_and(|rho| drift >= rho) {
                rec.threshold_time = Some(t);
            }
        }
        let big_h = energy(spec, &state);
        rec.max_energy_error = rec.max_energy_error.max((big_h - big_h0).abs());
        let hdev = (spec.integrable.eval(&state.action) - h0).abs();
        if hdev > rec.max_h_deviation {
            rec.max_h_deviation = hdev;
            if hdev > rec.h_deviation_bound {
                rec.monitor_ok = false;
            }
        }

        if let (Some(det), Some(w0)) = (opts.detector, prev_omega.as_ref()) {
            let w1 = match frequencies(spec, &state.action, t) {
                Ok(w) => w,
                Err(e) => return Err(fail(e, rec)),
            };
            match detect_ratio_crossing((t - h, w0), (t, &w1), det) {
                Ok(Some(ev)) => {
                    if last_k.as_ref() != Some(&ev.k) {
                        last_k = Some(ev.k.clone());
                        rec.events.push(ev);
                    }
                }
                Ok(None) => last_k = None,
                Err(e) => return Err(fail(e, rec)),
            }
            prev_omega = Some(w1);
        }

        let escaped = state.action.iter().any(|a| a.abs() > spec.radius);
        stopped = opts.stop_drift.is_some_and(|rho| drift >= rho);
        let last = k == total_steps || escaped || stopped;
        sampled_last = false;
        if last || (opts.keep_samples && k % cfg.sample_stride as u64 == 0) {
            sample(&mut rec, t, &state, big_h);
            sampled_last = true;
        }
        if escaped {
            rec.escaped = true;
            break;
        }
        if stopped {
            break;
        }
    }
    rec.final_time = t;
    rec.censored = !rec.escaped && !stopped;
    Ok(rec)
}

/// Integrates to time `t_end` or until the orbit leaves `B(0, R)`, running
/// the resonance detector on consecutive frequency samples.
///
/// A resonance is logged when the detector fires with a vector different
/// from the one it reported at the previous step, so a slow passage through
/// a resonance yields one event.
pub fn integrate(
    spec: &SystemSpec,
    state0: &State,
    t_end: f64,
    cfg: &IntegratorConfig,
    detector: Option<&DetectorConfig>,
) -> std::result::Result<TrajectoryRecord, IntegrationFailure> {
    integrate_watching(spec, state0, t_end, cfg, detector, None)
}

/// [`integrate`], also recording the first time the drift reaches `rho`.
pub fn integrate_watching(
    spec: &SystemSpec,
    state0: &State,
    t_end: f64,
    cfg: &IntegratorConfig,
    detector: Option<&DetectorConfig>,
    rho: Option<f64>,
) -> std::result::Result<TrajectoryRecord, IntegrationFailure> {
    if rho.is_some_and(|r| r == 0.0) {
        let mut rec = run(
            spec,
            state0,
            t_end,
            cfg,
            RunOptions {
                detector,
                stop_drift: None,
                watch_drift: None,
                keep_samples: true,
            },
        )?;
        rec.threshold_time = Some(0.0);
        return Ok(rec);
    }
    run(
        spec,
        state0,
        t_end,
        cfg,
        RunOptions {
            detector,
            stop_drift: None,
            watch_drift: rho,
            keep_samples: true,
        },
    )
}

/// Integrates until the drift reaches `rho`, returning that time together
/// with the record; when the horizon is reached first the time is `t_max`
/// and the record is censored.
pub(crate) fn stability_run(
    spec: &SystemSpec,
    state0: &State,
    rho: f64,
    t_max: f64,
    cfg: &IntegratorConfig,
    detector: Option<&DetectorConfig>,
) -> std::result::Result<TrajectoryRecord, IntegrationFailure> {
    if !(rho >= 0.0) || rho >= spec.radius / 2.0 {
        return Err(IntegrationFailure {
            error: Error::domain(format!(
                "rho = {rho} outside [0, R/2) with R = {}",
                spec.radius
            )),
            partial: Box::new(TrajectoryRecord::empty(spec, state0)),
        });
    }
    let mut rec = run(
        spec,
        state0,
        t_max,
        cfg,
        RunOptions {
            detector,
            stop_drift: Some(rho),
            watch_drift: Some(rho),
            keep_samples: false,
        },
    )?;
    if rho == 0.0 {
        rec.threshold_time = Some(0.0);
    }
    Ok(rec)
}

/// First time the drift `|I(t) − I₀|` reaches `rho`, or `(t_max, true)`
/// when it does not within the horizon.
pub fn stability_time(
    spec: &SystemSpec,
    state0: &State,
    rho: f64,
    t_max: f64,
    cfg: &IntegratorConfig,
) -> Result<(f64, bool)> {
    let rec = stability_run(spec, state0, rho, t_max, cfg, None)?;
    Ok((rec.final_time, rec.censored))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::IntegrableSpec;

    fn start() -> State {
        State::new(vec![0.3, 0.6, 0.1], vec![0.0; 3]).unwrap()
    }

    #[test]
    fn integrable_run() {
        let spec = SystemSpec::reference(0.0);
        let det = DetectorConfig::default();
        let rec = integrate(
            &spec,
            &start(),
            100.0,
            &IntegratorConfig::with_dt(0.1),
            Some(&det),
        )
        .unwrap();
        assert_eq!(rec.max_drift, 0.0);
        assert!(rec.events.is_empty());
        assert!(!rec.escaped && rec.censored);
        assert_eq!(rec.steps, 1000);
        assert_eq!(rec.final_time, 100.0);
        assert_eq!(rec.times.len(), rec.states.len());
    }

    #[test]
    fn resonant_start_fires_at_zero() {
        let mut spec = SystemSpec::reference(0.0);
        spec.integrable = IntegrableSpec::shifted_convex(vec![0.4, 0.4, 0.4 / 2f64.sqrt()]);
        let det = DetectorConfig::default();
        let rec = integrate(
            &spec,
            &start(),
            1.0,
            &IntegratorConfig::with_dt(0.1),
            Some(&det),
        )
        .unwrap();
        assert_eq!(rec.events.len(), 1);
        assert_eq!(rec.events[0].t, 0.0);
        assert_eq!(rec.events[0].k.to_i64s().unwrap(), vec![1, -1, 0]);
    }

    #[test]
    fn energy_monitor_and_drift() {
        let spec = SystemSpec::reference(1e-3);
        let det = DetectorConfig::default();
        let rec = integrate(
            &spec,
            &start(),
            1e4,
            &IntegratorConfig::with_dt(0.1),
            Some(&det),
        )
        .unwrap();
        assert!(rec.monitor_ok);
        assert!(rec.max_h_deviation <= 2e-3 + 1e-6);
        assert!(rec.drift_series.windows(2).all(|w| w[0] <= w[1]));
        assert!(rec.max_drift > 0.0);
    }

    #[test]
    fn record_round_trips() {
        let spec = SystemSpec::reference(1e-2);
        let det = DetectorConfig::default();
        let rec = integrate(
            &spec,
            &start(),
            50.0,
            &IntegratorConfig::with_dt(0.1),
            Some(&det),
        )
        .unwrap();
        let text = serde_json::to_string(&rec).unwrap();
        let back: TrajectoryRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn escape_ends_run() {
        let mut spec = SystemSpec::reference(0.2);
        spec.radius = 0.02;
        let rec = integrate(&spec, &start(), 1e3, &IntegratorConfig::with_dt(0.02), None).unwrap();
        assert!(rec.escaped && !rec.censored);
        assert!(rec.final_time < 1e3);
        assert!(rec.max_drift > spec.radius);
    }

    #[test]
    fn stability_times() {
        let spec = SystemSpec::reference(0.0);
        assert_eq!(
            stability_time(&spec, &start(), 0.1, 50.0, &IntegratorConfig::with_dt(0.1)).unwrap(),
            (50.0, true)
        );
        let spec = SystemSpec::reference(1e-2);
        assert_eq!(
            stability_time(&spec, &start(), 0.0, 50.0, &IntegratorConfig::with_dt(0.1)).unwrap(),
            (0.0, false)
        );
        let (t, censored) =
            stability_time(&spec, &start(), 1e-4, 1e3, &IntegratorConfig::with_dt(0.1)).unwrap();
        assert!(!censored && t > 0.0 && t < 1e3);
        let rec = integrate_watching(
            &spec,
            &start(),
            1e3,
            &IntegratorConfig::with_dt(0.1),
            None,
            Some(1e-4),
        )
        .unwrap();
        assert_eq!(rec.threshold_time, Some(t));
        assert!(stability_time(&spec, &start(), 0.6, 1.0, &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn failure_keeps_partial_record() {
        let spec = SystemSpec::reference(1e-2);
        let cfg = IntegratorConfig {
            fp_max_iters: 2,
            fp_tol: 1e-300,
            ..IntegratorConfig::with_dt(0.1)
        };
        let err = integrate(&spec, &start(), 10.0, &cfg, None).unwrap_err();
        assert_eq!(err.error.kind(), "integrator");
        assert_eq!(err.partial.times, vec![0.0]);
    }
}
