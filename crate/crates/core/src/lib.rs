//! Constructive machinery for Nekhoroshev-type stability of quasi-convex
//! near-integrable Hamiltonians `H(θ, I) = h(I) + ε f(θ, I)`.
//!
//! * [`lattice`]: exact integer algorithms on resonance modules (bounded
//!   Bézout coefficients, unimodular completion, Smith normal form, module
//!   volumes, Dirichlet-type rational approximation).
//! * [`resonance`]: ratio coordinates and simple-resonance crossing detection.
//! * [`hamiltonian`]: closed-form integrable catalog, trigonometric
//!   perturbations, quasi-convexity and derivative-bound checks, Gevrey norm
//!   bounds and the iso-energetic map.
//! * [`envelope`]: stability exponents and validity thresholds.
//! * [`simulate`]: symplectic trajectories, drift monitoring, sweeps and
//!   exponent fitting.
//! * [`selftest`]: the exhaustive property suites behind `nekolab selftest`.

pub mod envelope;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod resonance;
pub mod selftest;
pub mod simulate;

pub use error::{Error, Result};
