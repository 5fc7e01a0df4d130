//! Arithmetic on truncated Fourier-coefficient fields.
//!
//! A [`CoefficientField`] stores one complex value per multi-index of a cubic
//! [`Window`] `{α : |α|_∞ ≤ N}`; everything outside the window is zero. Products
//! of energy functions become convolutions of their coefficient fields, and
//! the pointwise exponential `e^{-E}` becomes the convolution exponential.
//!
//! Convolutions never wrap around. Intermediate supports of convolution powers
//! are kept exact and only the final result is restricted to the requested
//! output window.

mod field;
mod ops;
mod window;

pub use field::CoefficientField;
pub use ops::{conv_exp_truncated, conv_power, conv_powers, convolve, hermitian_project, l1_norm};
pub use window::{MultiIndex, Window};
