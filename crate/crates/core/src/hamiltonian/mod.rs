//! Near-integrable systems `H(θ, I) = h(I) + ε·f(θ, I)` on `Tⁿ × B(0, R)`.
//!
//! Angles live on `Rⁿ/Zⁿ` (stored reduced mod 1); the `2π` factors appear
//! only inside trigonometric evaluation.

mod conditions;
mod gevrey;
mod integrable;
mod isoenergetic;
mod perturbation;
mod system;

pub use conditions::{
    check_derivative_bound, check_qc, jacobi_eigenvalues, projected_hessian_margin,
    DerivativeReport, QcVerdict,
};
pub use gevrey::{gevrey_norm_bound, gevrey_series};
pub use integrable::IntegrableSpec;
pub use isoenergetic::{jacobian_psi, psi_h, IsoEnergeticPoint};
pub use perturbation::{ActionWeight, TrigPerturbation, TrigTerm};
pub use system::{GevreyParams, InitialState, SystemSpec, SCHEMA_VERSION};
