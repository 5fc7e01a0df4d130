use num_complex::Complex64;

use super::window::{MultiIndex, Window};
use crate::error::{Error, Result};

/// Complex coefficients `y_α` on a [`Window`]; implicitly zero outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    window: Window,
    values: Vec<Complex64>,
}

impl CoefficientField {
    pub fn zeros(window: Window) -> Self {
        CoefficientField {
            values: vec![Complex64::new(0.0, 0.0); window.len()],
            window,
        }
    }

    /// `c·δ₀`.
    pub fn scaled_delta(window: Window, c: Complex64) -> Self {
        let mut f = Self::zeros(window);
        f.values[window.center()] = c;
        f
    }

    /// The convolution identity `δ₀`.
    pub fn delta(window: Window) -> Self {
        Self::scaled_delta(window, Complex64::new(1.0, 0.0))
    }

    pub fn from_values(window: Window, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != window.len() {
            return Err(Error::invalid(format!(
                "expected {} values for window of radius {}, got {}",
                window.len(),
                window.radius(),
                values.len()
            )));
        }
        Ok(CoefficientField { window, values })
    }

    pub fn from_fn(window: Window, mut f: impl FnMut(&MultiIndex) -> Complex64) -> Self {
        let values = window.indices().map(|a| f(&a)).collect();
        CoefficientField { window, values }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn radius(&self) -> usize {
        self.window.radius()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Value at `alpha`, zero outside the window.
    pub fn get(&self, alpha: &[i64]) -> Complex64 {
        self.window
            .offset_of(alpha)
            .map_or(Complex64::new(0.0, 0.0), |o| self.values[o])
    }

    pub fn set(&mut self, alpha: &[i64], value: Complex64) -> Result<()> {
        let o = self.window.offset_of(alpha).ok_or_else(|| {
            Error::invalid(format!(
                "multi-index {:?} outside window of radius {}",
                alpha,
                self.window.radius()
            ))
        })?;
        self.values[o] = value;
        Ok(())
    }

    /// `y₀`.
    pub fn origin(&self) -> Complex64 {
        self.values[self.window.center()]
    }

    /// Nonzero entries in enumeration order.
    pub fn entries(&self) -> impl Iterator<Item = (MultiIndex, Complex64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.re != 0.0 || v.im != 0.0)
            .map(|(o, &v)| (self.window.index_at(o), v))
    }

    /// Copies this field onto another window of the same dimension, dropping
    /// entries that fall outside it.
    pub fn resized(&self, radius: usize) -> CoefficientField {
        let target = self.window.with_radius(radius);
        if radius == self.window.radius() {
            return self.clone();
        }
        let mut out = CoefficientField::zeros(target);
        let mut coords = vec![0i64; self.dim()];
        for (o, v) in self.values.iter().enumerate() {
            self.window.coords_into(o, &mut coords);
            if let Some(t) = target.offset_of(&coords) {
                out.values[t] = *v;
            }
        }
        out
    }

    /// Zeroes every entry with `|α|_∞ > n`, keeping the window.
    pub fn truncated(&self, n: usize) -> CoefficientField {
        let mut out = self.clone();
        for (o, v) in out.values.iter_mut().enumerate() {
            if self.window.sup_norm_at(o) > n {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> CoefficientField {
        CoefficientField {
            window: self.window,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Entrywise `self + other`; windows must agree.
    pub fn try_add(&self, other: &CoefficientField) -> Result<CoefficientField> {
        self.check_same_window(other)?;
        Ok(CoefficientField {
            window: self.window,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &CoefficientField) -> Result<CoefficientField> {
        self.try_add(&other.scaled(-1.0))
    }

    pub(crate) fn check_same_window(&self, other: &CoefficientField) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if self.radius() != other.radius() {
            return Err(Error::WindowMismatch {
                expected: self.radius(),
                found: other.radius(),
            });
        }
        Ok(())
    }

    /// `max_α |y_α|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max_α |y_α − z_α|` over the union of both windows.
    pub fn max_abs_diff(&self, other: &CoefficientField) -> f64 {
        let r = self.radius().max(other.radius());
        let a = self.resized(r);
        let b = other.resized(r);
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from `y_{-α} = conj(y_α)`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.values.len())
            .map(|o| (self.values[o] - self.values[self.window.mirror(o)].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Number of real parameters of a hermitian field on this window: `(2N+1)^d`.
    pub fn real_param_count(window: Window) -> usize {
        window.len()
    }

    /// Real parameterization of a hermitian field: `[Re y₀, Re y_α, Im y_α, …]`
    /// over the half-lattice `α > 0` (offsets after the center), ascending.
    pub fn to_real_params(&self) -> Vec<f64> {
        let c = self.window.center();
        let mut p = Vec::with_capacity(self.values.len());
        p.push(self.values[c].re);
        for v in &self.values[c + 1..] {
            p.push(v.re);
            p.push(v.im);
        }
        p
    }

    /// Inverse of [`to_real_params`](Self::to_real_params); the result is exactly hermitian.
    pub fn from_real_params(window: Window, params: &[f64]) -> Result<CoefficientField> {
        if params.len() != window.len() {
            return Err(Error::invalid(format!(
                "expected {} real parameters, got {}",
                window.len(),
                params.len()
            )));
        }
        let c = window.center();
        let mut f = CoefficientField::zeros(window);
        f.values[c] = Complex64::new(params[0], 0.0);
        for (k, o) in (c + 1..window.len()).enumerate() {
            let v = Complex64::new(params[1 + 2 * k], params[2 + 2 * k]);
            f.values[o] = v;
            f.values[window.mirror(o)] = v.conj();
        }
        Ok(f)
    }
}
