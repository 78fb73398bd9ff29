//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers or strings and returns a JSON string, so
//! the page needs no generated TypeScript types. The same functions are
//! callable natively, which is how they are tested.

use nekolab_core::envelope::{predict_analytic, EnvelopeConstants};
use nekolab_core::hamiltonian::SystemSpec;
use nekolab_core::lattice::{unimodular_completion, IntVector};
use nekolab_core::resonance::DetectorConfig;
use nekolab_core::simulate::{initial_angles, integrate, IntegratorConfig, State};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn error_json(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// Unimodular completion of a comma separated primitive vector.
#[wasm_bindgen]
pub fn complete(k: &str) -> String {
    let parsed: Result<Vec<i64>, _> = k.split(',').map(|s| s.trim().parse::<i64>()).collect();
    let Ok(parsed) = parsed else {
        return error_json(format!("not an integer list: {k:?}"));
    };
    let result = IntVector::from_i64s(&parsed).and_then(|v| {
        let a = unimodular_completion(&v)?;
        let det = a.matrix().det()?;
        Ok(json!({
            "matrix": a.matrix(),
            "det": det.to_string(),
            "row_norms": a.matrix().row_l1_norms().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "l1": v.ell1().to_string(),
        }))
    });
    match result {
        Ok(v) => v.to_string(),
        Err(e) => error_json(e),
    }
}

/// Confinement radius and log stability time over a log-spaced ε grid
/// between `10^log_eps_min` and `10^log_eps_max`.
#[wasm_bindgen]
pub fn envelope_curve(
    n: usize,
    delta: f64,
    log_eps_min: f64,
    log_eps_max: f64,
    points: usize,
) -> String {
    if points < 2 || !(log_eps_min < log_eps_max) || log_eps_max > 0.0 {
        return error_json("need points >= 2 and log_eps_min < log_eps_max <= 0");
    }
    let consts = EnvelopeConstants::default();
    let mut eps = Vec::with_capacity(points);
    let mut radius = Vec::with_capacity(points);
    let mut log_time = Vec::with_capacity(points);
    for k in 0..points {
        let le = log_eps_min + (log_eps_max - log_eps_min) * k as f64 / (points - 1) as f64;
        let e = 10f64.powf(le);
        match predict_analytic(n, delta, e, &consts) {
            Ok(p) => {
                eps.push(e);
                radius.push(p.confinement_radius);
                log_time.push(p.log_time_bound);
            }
            Err(err) => return error_json(err),
        }
    }
    json!({ "eps": eps, "radius": radius, "log_time": log_time, "shape_only": true }).to_string()
}

/// Integrates the three-dimensional reference system and returns the drift
/// series together with the resonance events, sampled for plotting.
#[wasm_bindgen]
pub fn reference_drift(epsilon: f64, horizon: f64, dt: f64, seed: u32) -> String {
    if !(horizon > 0.0) || horizon / dt > 2e6 {
        return error_json("horizon must be positive and at most 2e6 steps");
    }
    let spec = SystemSpec::reference(epsilon);
    let state = match State::new(initial_angles(seed as u64, 3), vec![0.0; 3]) {
        Ok(s) => s,
        Err(e) => return error_json(e),
    };
    let steps = (horizon / dt).ceil() as usize;
    let cfg = IntegratorConfig {
        dt,
        sample_stride: (steps / 400).max(1),
        ..Default::default()
    };
    let det = DetectorConfig::default();
    match integrate(&spec, &state, horizon, &cfg, Some(&det)) {
        Ok(rec) => json!({
            "t": rec.times,
            "drift": rec.drift_series,
            "events": rec.events.iter().map(|e| json!({ "t": e.t, "k": e.k.to_string() })).collect::<Vec<_>>(),
            "max_drift": rec.max_drift,
            "energy_deviation": rec.max_h_deviation,
            "energy_bound": rec.h_deviation_bound,
        })
        .to_string(),
        Err(f) => error_json(f.error),
    }
}
