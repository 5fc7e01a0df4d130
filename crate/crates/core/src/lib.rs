//! Nonparametric density estimation on the torus `[-π, π]^d`.
//!
//! The unknown density (shifted by one, `q = p₀ + 1`) is written as a canonical
//! ensemble `q(x) = e^{-E(x, y)}` with energy `E(x, y) = Σ y_α e^{iα·x}`. The
//! Fourier coefficients `y` are recovered from samples by matching empirical
//! characteristic-function moments against the truncated convolution
//! exponential of `y`:
//!
//! ```text
//! (2π)^d [ δ₀(α) + Σ_{n=1}^{N₂} (-1)ⁿ/n! · y^{*n}(α) − δ₀(α) ] = (1/M) Σ_n e^{-iα·x[n]},   |α|_∞ ≤ N₁
//! ```
//!
//! The pipeline is
//!
//! 1. [`empirical::empirical_moments`] turns a [`Dataset`] into a [`MomentField`],
//! 2. [`solver::newton_solve`] solves the polynomial system for a hermitian
//!    [`CoefficientField`],
//! 3. [`density`] reconstructs `p̂₀ = e^{-E} − 1`, integrates it and reports its
//!    mean and covariance.
//!
//! [`algebra`] holds the coefficient-space arithmetic (convolution, convolution
//! powers, the truncated convolution exponential) and [`synth`] the seeded data
//! generators used by the tests and the CLI.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod density;
pub mod empirical;
mod error;
pub mod io;
mod numeric;
pub mod solver;
pub mod synth;

pub use algebra::{CoefficientField, MultiIndex, Window};
pub use density::{DensityEstimate, GridSpec};
pub use empirical::{Dataset, MomentAccumulator, MomentField};
pub use error::{Error, Result};
pub use solver::{SolveMode, SolverConfig, SolverReport, Target, Termination};
pub use synth::{AxisSampler, GaussianSpec};

/// `(2π)^d`, the Lebesgue volume of the torus window.
pub fn torus_volume(dim: usize) -> f64 {
    (2.0 * std::f64::consts::PI).powi(dim as i32)
}
