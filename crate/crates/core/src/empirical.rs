//! Empirical characteristic-function moments `m̂_α = (1/M) Σ_n e^{-iα·x[n]}`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{CoefficientField, Window};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

/// Ordered sample points in `[-π, π]^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    coords: Vec<f64>,
}

impl Dataset {
    /// Builds a dataset from row-major coordinates, rejecting empty input and
    /// any coordinate outside `[-π, π]`.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dataset dimension must be at least 1"));
        }
        if coords.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        for (i, &v) in coords.iter().enumerate() {
            check_coordinate(i / dim, i % dim, v)?;
        }
        Ok(Dataset { dim, coords })
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::invalid(format!(
                    "sample {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sample count `M`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// One-dimensional dataset of coordinate `axis`.
    pub fn marginal(&self, axis: usize) -> Result<Dataset> {
        if axis >= self.dim {
            return Err(Error::invalid(format!(
                "axis {axis} out of range for dimension {}",
                self.dim
            )));
        }
        Ok(Dataset {
            dim: 1,
            coords: self.points().map(|p| p[axis]).collect(),
        })
    }
}

fn check_coordinate(index: usize, axis: usize, value: f64) -> Result<()> {
    if !(-PI..=PI).contains(&value) {
        return Err(Error::SampleOutOfWindow { index, axis, value });
    }
    Ok(())
}

/// Characteristic-function moments on a window, with the sample count that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentField {
    values: CoefficientField,
    sample_count: usize,
}

impl MomentField {
    /// Wraps arbitrary moment values (e.g. a forward-model fixture).
    pub fn new(values: CoefficientField, sample_count: usize) -> Self {
        MomentField { values, sample_count }
    }

    pub fn window(&self) -> Window {
        self.values.window()
    }

    pub fn field(&self) -> &CoefficientField {
        &self.values
    }

    pub fn into_field(self) -> CoefficientField {
        self.values
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn get(&self, alpha: &[i64]) -> Complex64 {
        self.values.get(alpha)
    }

    /// Moments of coordinate `axis` alone: the entries on that axis, as a 1-d field.
    pub fn axis_marginal(&self, axis: usize) -> Result<MomentField> {
        let d = self.values.dim();
        if axis >= d {
            return Err(Error::invalid(format!("axis {axis} out of range for dimension {d}")));
        }
        let r = self.values.radius();
        let w = Window::new(1, r)?;
        let mut alpha = vec![0i64; d];
        let vals = (-(r as i64)..=r as i64)
            .map(|k| {
                alpha[axis] = k;
                self.values.get(&alpha)
            })
            .collect();
        Ok(MomentField::new(
            CoefficientField::from_values(w, vals)?,
            self.sample_count,
        ))
    }
}

/// Streaming accumulator of `Σ_n e^{-iα·x[n]}` over the half-lattice.
///
/// Only offsets after the window center are accumulated; the rest are filled
/// in by conjugate mirroring on [`finalize`](Self::finalize) and the origin is
/// pinned to exactly `1`.
#[derive(Debug, Clone)]
pub struct MomentAccumulator {
    window: Window,
    sums: Vec<CompensatedSum>,
    count: usize,
    // per-axis table of e^{-i j x_k}, j = 0..=N
    phases: Vec<Complex64>,
    coords: Vec<i64>,
}

impl MomentAccumulator {
    pub fn new(window: Window) -> Self {
        let half = window.len() - window.center() - 1;
        MomentAccumulator {
            window,
            sums: vec![CompensatedSum::default(); half],
            count: 0,
            phases: vec![Complex64::new(0.0, 0.0); window.dim() * (window.radius() + 1)],
            coords: vec![0; window.dim()],
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Adds one sample. On error the accumulator is left unchanged.
    pub fn push(&mut self, x: &[f64]) -> Result<()> {
        let d = self.window.dim();
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            });
        }
        for (axis, &v) in x.iter().enumerate() {
            check_coordinate(self.count, axis, v)?;
        }
        let n = self.window.radius();
        for (axis, &v) in x.iter().enumerate() {
            for j in 0..=n {
                let (s, c) = (j as f64 * v).sin_cos();
                self.phases[axis * (n + 1) + j] = Complex64::new(c, -s);
            }
        }
        let center = self.window.center();
        for (k, sum) in self.sums.iter_mut().enumerate() {
            self.window.coords_into(center + 1 + k, &mut self.coords);
            let mut term = Complex64::new(1.0, 0.0);
            for (axis, &a) in self.coords.iter().enumerate() {
                let p = self.phases[axis * (n + 1) + a.unsigned_abs() as usize];
                term *= if a < 0 { p.conj() } else { p };
            }
            sum.add(term);
        }
        self.count += 1;
        Ok(())
    }

    /// Folds another accumulator's partial sums into this one.
    pub fn merge(&mut self, other: &MomentAccumulator) -> Result<()> {
        if other.window != self.window {
            return Err(Error::WindowMismatch {
                expected: self.window.radius(),
                found: other.window.radius(),
            });
        }
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.merge(b);
        }
        self.count += other.count;
        Ok(())
    }

    pub fn finalize(&self) -> Result<MomentField> {
        if self.count == 0 {
            return Err(Error::EmptyDataset);
        }
        let w = self.window;
        let center = w.center();
        let m = self.count as f64;
        let mut values = vec![Complex64::new(0.0, 0.0); w.len()];
        values[center] = Complex64::new(1.0, 0.0);
        for (k, sum) in self.sums.iter().enumerate() {
            let v = sum.value() / m;
            let o = center + 1 + k;
            values[o] = v;
            values[w.mirror(o)] = v.conj();
        }
        Ok(MomentField::new(CoefficientField::from_values(w, values)?, self.count))
    }
}

/// `m̂_α = (1/M) Σ_{n=1}^{M} e^{-iα·x[n]}` for every `α` in `window`, summed in sample order.
pub fn empirical_moments(data: &Dataset, window: Window) -> Result<MomentField> {
    if data.dim() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: window.dim(),
            found: data.dim(),
        });
    }
    let mut acc = MomentAccumulator::new(window);
    for p in data.points() {
        acc.push(p)?;
    }
    acc.finalize()
}
