use serde::{Deserialize, Serialize};

use super::field::field_into;
use super::State;
use crate::error::{Error, Result};
use crate::hamiltonian::SystemSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    ImplicitMidpoint,
    /// Triple-jump composition of three midpoint steps, order 4.
    Composed4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub fp_tol: f64,
    pub fp_max_iters: usize,
    /// Record a sample every this many steps.
    pub sample_stride: usize,
    /// Added to `2ε·sup|f|` in the energy monitor.
    pub energy_slack: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            scheme: Scheme::ImplicitMidpoint,
            dt: 0.05,
            fp_tol: 1e-12,
            fp_max_iters: 50,
            sample_stride: 100,
            energy_slack: 1e-6,
        }
    }
}

impl IntegratorConfig {
    pub fn with_dt(dt: f64) -> Self {
        IntegratorConfig {
            dt,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::domain(format!("dt = {} must be > 0", self.dt)));
        }
        if !(self.fp_tol > 0.0) {
            return Err(Error::domain(format!(
                "fp_tol = {} must be > 0",
                self.fp_tol
            )));
        }
        if self.fp_max_iters == 0 || self.sample_stride == 0 {
            return Err(Error::domain("fp_max_iters and sample_stride must be >= 1"));
        }
        if !(self.energy_slack >= 0.0) {
            return Err(Error::domain("energy_slack must be >= 0"));
        }
        Ok(())
    }

    /// Largest substep length taken by the scheme.
    fn max_substep(&self) -> f64 {
        match self.scheme {
            Scheme::ImplicitMidpoint => self.dt,
            Scheme::Composed4 => self.dt * TRIPLE_JUMP.1.abs().max(TRIPLE_JUMP.0),
        }
    }
}

/// `(γ₁, γ₂)` with `2γ₁ + γ₂ = 1` and `2γ₁³ + γ₂³ = 0`.
const TRIPLE_JUMP: (f64, f64) = {
    // 2^{1/3}
    let c = 1.259_921_049_894_873_2;
    (1.0 / (2.0 - c), -c / (2.0 - c))
};

/// Lipschitz estimate of the vector field, `‖∇²h‖ + ε·‖∂²f‖`.
fn lipschitz(spec: &SystemSpec) -> f64 {
    spec.integrable.max_second_partial()
        + spec.epsilon * spec.perturbation.second_derivative_bound(spec.radius)
}

/// Reusable state for repeated steps of one system.
pub struct Stepper<'a> {
    spec: &'a SystemSpec,
    cfg: IntegratorConfig,
    base_theta: Vec<f64>,
    base_action: Vec<f64>,
    mid_theta: Vec<f64>,
    mid_action: Vec<f64>,
    dtheta: Vec<f64>,
    daction: Vec<f64>,
    scratch: Vec<f64>,
    /// Fixed-point iterations spent by the last step.
    pub last_iterations: usize,
}

impl<'a> Stepper<'a> {
    /// Checks the configuration and the contraction condition
    /// `dt·(‖∇²h‖ + ε·‖∂²f‖) < 1` of the fixed-point solve.
    pub fn new(spec: &'a SystemSpec, cfg: &IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        let lip = lipschitz(spec);
        if cfg.max_substep() * lip >= 1.0 {
            return Err(Error::domain(format!(
                "dt = {} too large for the fixed-point solve: substep * Lipschitz bound = {} >= 1",
                cfg.dt,
                cfg.max_substep() * lip
            )));
        }
        let n = spec.n;
        Ok(Stepper {
            spec,
            cfg: cfg.clone(),
            base_theta: vec![0.0; n],
            base_action: vec![0.0; n],
            mid_theta: vec![0.0; n],
            mid_action: vec![0.0; n],
            dtheta: vec![0.0; n],
            daction: vec![0.0; n],
            scratch: vec![0.0; n],
            last_iterations: 0,
        })
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    /// Advances `state` by `h` (negative `h` runs backwards); `t` is only
    /// used for diagnostics.
    pub fn advance(&mut self, state: &mut State, h: f64, t: f64) -> Result<()> {
        self.last_iterations = 0;
        match self.cfg.scheme {
            Scheme::ImplicitMidpoint => self.midpoint(state, h, t)?,
            Scheme::Composed4 => {
                let (g1, g2) = TRIPLE_JUMP;
                self.midpoint(state, g1 * h, t)?;
                self.midpoint(state, g2 * h, t)?;
                self.midpoint(state, g1 * h, t)?;
            }
        }
        state.reduce_angles();
        Ok(())
    }

    /// One implicit midpoint step `z′ = z + h·X((z + z′)/2)`, solved by
    /// fixed-point iteration from the explicit Euler guess.
    fn midpoint(&mut self, state: &mut State, h: f64, t: f64) -> Result<()> {
        self.base_theta.copy_from_slice(&state.theta);
        self.base_action.copy_from_slice(&state.action);
        field_into(
            self.spec,
            &self.base_theta,
            &self.base_action,
            &mut self.dtheta,
            &mut self.daction,
            &mut self.scratch,
        );
        for i in 0..self.spec.n {
            state.theta[i] = self.base_theta[i] + h * self.dtheta[i];
            state.action[i] = self.base_action[i] + h * self.daction[i];
        }
        let mut increment = f64::INFINITY;
        for iter in 1..=self.cfg.fp_max_iters {
            for i in 0..self.spec.n {
                self.mid_theta[i] = 0.5 * (self.base_theta[i] + state.theta[i]);
                self.mid_action[i] = 0.5 * (self.base_action[i] + state.action[i]);
            }
            field_into(
                self.spec,
                &self.mid_theta,
                &self.mid_action,
                &mut self.dtheta,
                &mut self.daction,
                &mut self.scratch,
            );
            increment = 0.0;
            for i in 0..self.spec.n {
                let th = self.base_theta[i] + h * self.dtheta[i];
                let ac = self.base_action[i] + h * self.daction[i];
                increment = increment
                    .max((th - state.theta[i]).abs())
                    .max((ac - state.action[i]).abs());
                state.theta[i] = th;
                state.action[i] = ac;
            }
            if !increment.is_finite() {
                break;
            }
            if increment <= self.cfg.fp_tol {
                self.last_iterations += iter;
                return Ok(());
            }
        }
        Err(Error::Integrator {
            time: t,
            reason: format!(
                "fixed-point iteration did not reach tolerance {} in {} iterations (last increment {increment:e}, substep {h})",
                self.cfg.fp_tol, self.cfg.fp_max_iters
            ),
        })
    }
}

/// One step of length `cfg.dt` from `state`.
pub fn step(spec: &SystemSpec, state: &State, cfg: &IntegratorConfig) -> Result<State> {
    let mut stepper = Stepper::new(spec, cfg)?;
    let mut next = state.clone();
    stepper.advance(&mut next, cfg.dt, 0.0)?;
    Ok(next)
}
