//! Trajectories of `H = h + ε·f`: symplectic stepping, drift and energy
//! monitoring, resonance logging, stability times, ε-sweeps and exponent
//! fits.

mod field;
mod fit;
mod integrator;
mod io;
mod sweep;
mod trajectory;

pub use field::{energy, hamiltonian_vector_field};
pub use fit::{fit_exponent, FitResult, POOR_FIT_RESIDUAL};
pub use integrator::{step, IntegratorConfig, Scheme, Stepper};
pub use io::{write_events_json, write_sweep_csv, write_trajectory_csv};
pub use sweep::{
    initial_angles, sweep, synthetic_sweep, EpsilonRow, SeedRow, SweepConfig, SweepResult,
};
pub use trajectory::{
    integrate, integrate_watching, stability_time, IntegrationFailure, TrajectoryRecord,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point `(θ, I)` of `Tⁿ × Rⁿ`; angles are kept in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub theta: Vec<f64>,
    pub action: Vec<f64>,
}

impl State {
    pub fn new(theta: Vec<f64>, action: Vec<f64>) -> Result<Self> {
        if theta.len() != action.len() || theta.is_empty() {
            return Err(Error::domain(
                "angle and action vectors must have the same positive length",
            ));
        }
        if theta.iter().chain(&action).any(|x| !x.is_finite()) {
            return Err(Error::domain("state has non-finite components"));
        }
        let mut s = State { theta, action };
        s.reduce_angles();
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.action.len()
    }

    pub fn reduce_angles(&mut self) {
        for t in &mut self.theta {
            *t = t.rem_euclid(1.0);
            // rem_euclid can round up to exactly 1.0 for tiny negative inputs
            if *t >= 1.0 {
                *t = 0.0;
            }
        }
    }

    /// `|I − J|` in the sup norm.
    pub fn action_distance(&self, other: &[f64]) -> f64 {
        self.action
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
