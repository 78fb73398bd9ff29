use crate::hamiltonian::SystemSpec;

use super::State;

/// The canonical equations `θ̇ = ∂H/∂I`, `İ = −∂H/∂θ` for `H = h + ε·f`.
pub fn hamiltonian_vector_field(spec: &SystemSpec, state: &State) -> (Vec<f64>, Vec<f64>) {
    let n = state.dim();
    let mut dtheta = vec![0.0; n];
    let mut daction = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    field_into(
        spec,
        &state.theta,
        &state.action,
        &mut dtheta,
        &mut daction,
        &mut scratch,
    );
    (dtheta, daction)
}

pub(crate) fn field_into(
    spec: &SystemSpec,
    theta: &[f64],
    action: &[f64],
    dtheta: &mut [f64],
    daction: &mut [f64],
    scratch: &mut [f64],
) {
    let eps = spec.epsilon;
    spec.integrable.grad_into(action, dtheta);
    if eps == 0.0 {
        daction.fill(0.0);
        return;
    }
    if spec.perturbation.depends_on_action() {
        spec.perturbation.grad_action_into(theta, action, scratch);
        for (d, g) in dtheta.iter_mut().zip(scratch.iter()) {
            *d += eps * g;
        }
    }
    spec.perturbation.grad_theta_into(theta, action, daction);
    for d in daction.iter_mut() {
        *d *= -eps;
    }
}

/// `H(θ, I) = h(I) + ε·f(θ, I)`.
pub fn energy(spec: &SystemSpec, state: &State) -> f64 {
    let h = spec.integrable.eval(&state.action);
    if spec.epsilon == 0.0 {
        return h;
    }
    h + spec.epsilon * spec.perturbation.eval(&state.theta, &state.action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{ActionWeight, IntegrableSpec, TrigPerturbation, TrigTerm};
    use std::f64::consts::TAU;

    fn single_mode(eps: f64) -> SystemSpec {
        let mut spec = SystemSpec::reference(eps);
        spec.perturbation = TrigPerturbation::new(vec![TrigTerm::new(vec![1, 0, 0], 1.0, 0.0)]);
        spec
    }

    #[test]
    fn integrable_flow() {
        let spec = SystemSpec::reference(0.0);
        let s = State::new(vec![0.1, 0.2, 0.3], vec![0.05, -0.1, 0.0]).unwrap();
        let (dt, di) = hamiltonian_vector_field(&spec, &s);
        assert_eq!(dt, spec.integrable.grad(&s.action));
        assert!(di.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn action_free_perturbation_keeps_frequencies() {
        let spec = SystemSpec::reference(0.01);
        let s = State::new(vec![0.1, 0.7, 0.3], vec![0.05, -0.1, 0.2]).unwrap();
        let (dt, _) = hamiltonian_vector_field(&spec, &s);
        assert_eq!(dt, spec.integrable.grad(&s.action));
    }

    #[test]
    fn cosine_mode() {
        let eps = 0.01;
        let spec = single_mode(eps);
        let s = State::new(vec![0.13, 0.4, 0.9], vec![0.0; 3]).unwrap();
        let (_, di) = hamiltonian_vector_field(&spec, &s);
        let want = TAU * eps * (TAU * 0.13f64).sin();
        assert!((di[0] - want).abs() < 1e-15);
        assert_eq!(&di[1..], &[0.0, 0.0]);
    }

    #[test]
    fn field_matches_finite_differences() {
        let mut spec = SystemSpec::reference(0.05);
        spec.integrable =
            IntegrableSpec::anisotropic_convex(vec![0.3, 0.5, 0.7], vec![1.0, 2.0, 0.5]).unwrap();
        spec.perturbation.terms[0].weight = ActionWeight {
            constant: 1.0,
            linear: Some(vec![0.2, -0.1, 0.3]),
            quadratic: None,
        };
        let s = State::new(vec![0.21, 0.63, 0.47], vec![0.1, -0.2, 0.15]).unwrap();
        let (dt, di) = hamiltonian_vector_field(&spec, &s);
        let h = 1e-6;
        for i in 0..3 {
            let mut plus = s.clone();
            let mut minus = s.clone();
            plus.action[i] += h;
            minus.action[i] -= h;
            let fd = (energy(&spec, &plus) - energy(&spec, &minus)) / (2.0 * h);
            assert!((fd - dt[i]).abs() < 1e-8, "dtheta {i}: {fd} vs {}", dt[i]);
            let mut plus = s.clone();
            let mut minus = s.clone();
            plus.theta[i] += h;
            minus.theta[i] -= h;
            let fd = (energy(&spec, &plus) - energy(&spec, &minus)) / (2.0 * h);
            assert!((fd + di[i]).abs() < 1e-8, "dI {i}: {fd} vs {}", di[i]);
        }
    }
}
