//! Exact integer algorithms on sub-modules of `Zⁿ`.
//!
//! All arithmetic is carried out on [`BigInt`]: cofactors of a completed
//! unimodular matrix grow like `n!·K^{n−1}` and overflow fixed-width integers
//! long before the dimensions of interest get large.

mod bezout;
mod completion;
mod dirichlet;
mod matrix;
mod smith;
mod volume;

pub use bezout::ext_gcd_bounded;
pub use completion::{inverse_unimodular, unimodular_completion, CompletionPolicy};
pub use dirichlet::{dirichlet_bound, dirichlet_rational, simplest_rational_in, Rational};
pub use matrix::{IntMatrix, IntVector, SubmoduleBasis, UnimodularMatrix};
pub use smith::{smith_normal_form, SmithDecomposition};
pub use volume::{lochak_bounds, module_volume, LochakBounds};

pub(crate) use completion::complete_with_policy;

pub use num_bigint::BigInt;
