//! CSV and JSON writers for trajectories and sweeps.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::sweep::SweepResult;
use super::trajectory::TrajectoryRecord;
use crate::error::Result;
use crate::resonance::ResonanceEvent;

fn num(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Columns `t, I_1..I_n, theta_1..theta_n, H, drift`, one row per sample.
pub fn write_trajectory_csv(path: &Path, rec: &TrajectoryRecord) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["t".to_string()];
    header.extend((1..=rec.n).map(|i| format!("I_{i}")));
    header.extend((1..=rec.n).map(|i| format!("theta_{i}")));
    header.push("H".into());
    header.push("drift".into());
    w.write_record(&header)?;
    for (k, s) in rec.states.iter().enumerate() {
        let mut row = Vec::with_capacity(header.len());
        row.push(rec.times[k].to_string());
        row.extend(s.action.iter().map(f64::to_string));
        row.extend(s.theta.iter().map(f64::to_string));
        row.push(rec.energy_series[k].to_string());
        row.push(rec.drift_series[k].to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_events_json(path: &Path, events: &[ResonanceEvent]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, events)?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Columns `epsilon, seed, T, censored, max_drift, crossings`, one row per
/// run; failed runs leave `T` and `max_drift` empty.
pub fn write_sweep_csv(path: &Path, result: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["epsilon", "seed", "T", "censored", "max_drift", "crossings"])?;
    for r in &result.runs {
        w.write_record([
            r.epsilon.to_string(),
            r.seed.to_string(),
            num(r.stability_time),
            r.censored.to_string(),
            num(r.max_drift),
            r.crossings.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
