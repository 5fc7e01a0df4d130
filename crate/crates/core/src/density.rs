//! Density reconstruction, quadrature, and the cross-entropy machinery.
//!
//! Densities are functions on `[-π, π]^d` with respect to plain Lebesgue `dx`.
//! Integrals use the uniform periodic grid `x_j = −π + 2πj/n`, which is the
//! trapezoid rule on the torus and spectrally accurate for smooth periodic
//! integrands. Moments weight the density by the non-periodic coordinates, so
//! they use composite Simpson on the same nodes closed at `+π`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{l1_norm, CoefficientField, Window};
use crate::error::{Error, Result};
use crate::numeric::kahan_sum;

/// Largest tolerated imaginary part of `E(x, y)`.
pub const REALNESS_TOL: f64 = 1e-10;

/// Uniform grid with `points_per_axis` nodes per axis on `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub points_per_axis: usize,
}

impl GridSpec {
    pub fn new(dim: usize, points_per_axis: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("grid dimension must be at least 1"));
        }
        if points_per_axis < 2 {
            return Err(Error::invalid("grid needs at least 2 points per axis"));
        }
        if points_per_axis.checked_pow(dim as u32).is_none() {
            return Err(Error::invalid("grid too large"));
        }
        Ok(GridSpec { dim, points_per_axis })
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.points_per_axis as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -PI + self.spacing() * j as f64
    }

    /// Quadrature weight of every node for `∫ · dx`.
    pub fn weight(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Per-axis node indices of grid point `i` (row-major, last axis fastest).
    fn digits(&self, mut i: usize, out: &mut [usize]) {
        let n = self.points_per_axis;
        for k in (0..self.dim).rev() {
            out[k] = i % n;
            i /= n;
        }
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        let mut d = vec![0; self.dim];
        self.digits(i, &mut d);
        d.iter().map(|&j| self.node(j)).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.dim,
            });
        }
        Ok(())
    }
}

/// Complex value of `Σ_α y_α e^{iα·x}`.
fn energy_complex(coeffs: &CoefficientField, x: &[f64]) -> Complex64 {
    let w = coeffs.window();
    let r = w.radius();
    let side = w.side();
    let mut table = vec![Complex64::new(0.0, 0.0); w.dim() * side];
    for (k, &xk) in x.iter().enumerate() {
        for a in 0..side {
            let (s, c) = ((a as f64 - r as f64) * xk).sin_cos();
            table[k * side + a] = Complex64::new(c, s);
        }
    }
    sum_with_table(coeffs, &table, |k| k)
}

// `axis_row(k)` picks the table row used for axis k.
fn sum_with_table(coeffs: &CoefficientField, table: &[Complex64], axis_row: impl Fn(usize) -> usize) -> Complex64 {
    let w = coeffs.window();
    let side = w.side();
    let d = w.dim();
    let mut total = Complex64::new(0.0, 0.0);
    for (o, &y) in coeffs.values().iter().enumerate() {
        if y.re == 0.0 && y.im == 0.0 {
            continue;
        }
        let mut rest = o;
        let mut term = y;
        for k in (0..d).rev() {
            term *= table[axis_row(k) * side + rest % side];
            rest /= side;
        }
        total += term;
    }
    total
}

fn checked_real(z: Complex64) -> Result<f64> {
    if z.im.abs() >= REALNESS_TOL {
        return Err(Error::NotHermitian { residue: z.im.abs() });
    }
    Ok(z.re)
}

/// `E(x, y) = Σ_{|α|_∞ ≤ N} y_α e^{iα·x}`, which must be real.
pub fn evaluate_energy(coeffs: &CoefficientField, x: &[f64]) -> Result<f64> {
    if x.len() != coeffs.dim() {
        return Err(Error::DimensionMismatch {
            expected: coeffs.dim(),
            found: x.len(),
        });
    }
    checked_real(energy_complex(coeffs, x))
}

/// `E` at every node of `grid`, in grid order.
pub fn energy_on_grid(coeffs: &CoefficientField, grid: &GridSpec) -> Result<Vec<f64>> {
    grid.check_dim(coeffs.dim())?;
    let w = coeffs.window();
    let side = w.side();
    let r = w.radius() as f64;
    let n = grid.points_per_axis;
    // table[j * side + a] = e^{i (a − r) x_j}
    let mut table = vec![Complex64::new(0.0, 0.0); n * side];
    for j in 0..n {
        let x = grid.node(j);
        for a in 0..side {
            let (s, c) = ((a as f64 - r) * x).sin_cos();
            table[j * side + a] = Complex64::new(c, s);
        }
    }
    let mut digits = vec![0usize; grid.dim];
    (0..grid.len())
        .map(|i| {
            grid.digits(i, &mut digits);
            checked_real(sum_with_table(coeffs, &table, |k| digits[k]))
        })
        .collect()
}

/// Solved coefficients plus the truncation orders that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub coeffs: CoefficientField,
    /// `true`: the estimate is `e^{-E} − 1`; `false`: `e^{-E}`.
    pub shift: bool,
    pub n1: usize,
    pub n2: usize,
}

impl DensityEstimate {
    pub fn new(coeffs: CoefficientField, shift: bool, n2: usize) -> Self {
        let n1 = coeffs.radius();
        DensityEstimate { coeffs, shift, n1, n2 }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    fn value_from_energy(&self, e: f64) -> f64 {
        if self.shift {
            (-e).exp_m1()
        } else {
            (-e).exp()
        }
    }

    pub fn values_on_grid(&self, grid: &GridSpec) -> Result<Vec<f64>> {
        Ok(energy_on_grid(&self.coeffs, grid)?
            .into_iter()
            .map(|e| self.value_from_energy(e))
            .collect())
    }
}

/// `e^{-E(x)} − 1` in shift mode, `e^{-E(x)}` otherwise.
pub fn evaluate_density(est: &DensityEstimate, x: &[f64]) -> Result<f64> {
    Ok(est.value_from_energy(evaluate_energy(&est.coeffs, x)?))
}

/// `∫ p̂(x) dx` by the periodic trapezoid rule.
pub fn integrate_density(est: &DensityEstimate, grid: &GridSpec) -> Result<f64> {
    let vals = est.values_on_grid(grid)?;
    Ok(kahan_sum(vals) * grid.weight())
}

/// Mean and covariance of an estimate, with its trapezoid mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMoments {
    pub mass: f64,
    pub mean: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    (0..=n)
        .map(|j| {
            let c = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect()
}

/// Treatment of negative values of `p̂ = e^{-E} − 1` when taking moments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativePart {
    /// Integrate the signed estimate. Finite-sample dips cancel against
    /// nearby overshoot instead of biasing the spread upward.
    #[default]
    Keep,
    /// Integrate `max(p̂, 0)`.
    Clamp,
}

/// Mean and covariance of the estimate normalized by its own mass, with
/// negative values kept.
pub fn moments_from_density(est: &DensityEstimate, grid: &GridSpec) -> Result<DensityMoments> {
    moments_with(est, grid, NegativePart::Keep)
}

/// Mean and covariance of `ρ` (the estimate, optionally clamped at 0)
/// normalized by `∫ ρ dx`.
///
/// Requires an even `points_per_axis`; the closing node `+π` reuses the
/// periodic value at `−π`.
pub fn moments_with(est: &DensityEstimate, grid: &GridSpec, negative: NegativePart) -> Result<DensityMoments> {
    grid.check_dim(est.dim())?;
    let n = grid.points_per_axis;
    if !n.is_multiple_of(2) {
        return Err(Error::invalid("moments need an even number of grid points per axis"));
    }
    let d = grid.dim;
    let vals = est.values_on_grid(grid)?;
    let mass = kahan_sum(vals.iter().copied()) * grid.weight();
    let rho: Vec<f64> = match negative {
        NegativePart::Keep => vals,
        NegativePart::Clamp => vals.iter().map(|v| v.max(0.0)).collect(),
    };

    let w1 = simpson_weights(n, grid.spacing());
    let closed = GridSpec {
        dim: d,
        points_per_axis: n + 1,
    };
    let node = |j: usize| if j == n { PI } else { grid.node(j) };
    let mut digits = vec![0usize; d];
    let mut x = vec![0.0; d];
    // (weight·ρ, x) for every closed-grid node
    let mut nodes = Vec::with_capacity(closed.len());
    for i in 0..closed.len() {
        closed.digits(i, &mut digits);
        let mut wt = 1.0;
        let mut flat = 0;
        for k in 0..d {
            wt *= w1[digits[k]];
            x[k] = node(digits[k]);
            flat = flat * n + digits[k] % n;
        }
        nodes.push((wt * rho[flat], x.clone()));
    }
    let total = kahan_sum(nodes.iter().map(|(w, _)| *w));
    if !(total > 0.0) {
        return Err(Error::DegenerateEstimate { mass: total });
    }
    let mean: Vec<f64> = (0..d)
        .map(|k| kahan_sum(nodes.iter().map(|(w, x)| w * x[k])) / total)
        .collect();
    let mut covariance = vec![vec![0.0; d]; d];
    for j in 0..d {
        for k in j..d {
            let c = kahan_sum(nodes.iter().map(|(w, x)| w * (x[j] - mean[j]) * (x[k] - mean[k]))) / total;
            covariance[j][k] = c;
            covariance[k][j] = c;
        }
    }
    Ok(DensityMoments { mass, mean, covariance })
}

fn sample_positive(density: &impl Fn(&[f64]) -> f64, grid: &GridSpec) -> Result<Vec<f64>> {
    grid.points()
        .map(|x| {
            let v = density(&x);
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonPositiveDensity { point: x, value: v })
            }
        })
        .collect()
}

/// Fourier coefficients of `ln(1/p)` against `dm_d = dx/(2π)^d`:
/// `y_α = ∫ −ln p(x) e^{-iα·x} dm_d`, hermitian-projected.
pub fn log_density_fourier_oracle(
    density: impl Fn(&[f64]) -> f64,
    window: Window,
    grid: &GridSpec,
) -> Result<CoefficientField> {
    grid.check_dim(window.dim())?;
    let logs: Vec<f64> = sample_positive(&density, grid)?.into_iter().map(|v| -v.ln()).collect();
    let coeffs = fourier_coefficients(&logs, window, grid, -1.0);
    let scale = 1.0 / grid.len() as f64;
    Ok(crate::algebra::hermitian_project(&coeffs.scaled(scale)))
}

/// `Σ_j f_j e^{sign·iα·x_j}` for every `α` in `window`.
fn fourier_coefficients(f: &[f64], window: Window, grid: &GridSpec, sign: f64) -> CoefficientField {
    let n = grid.points_per_axis;
    let side = window.side();
    let r = window.radius() as f64;
    let mut table = vec![Complex64::new(0.0, 0.0); n * side];
    for j in 0..n {
        for a in 0..side {
            let (s, c) = (sign * (a as f64 - r) * grid.node(j)).sin_cos();
            table[j * side + a] = Complex64::new(c, s);
        }
    }
    let d = grid.dim;
    let mut digits = vec![0usize; d];
    let mut acc = vec![crate::numeric::CompensatedSum::default(); window.len()];
    for (i, &v) in f.iter().enumerate() {
        grid.digits(i, &mut digits);
        for (o, a) in acc.iter_mut().enumerate() {
            let mut rest = o;
            let mut term = Complex64::new(v, 0.0);
            for k in (0..d).rev() {
                term *= table[digits[k] * side + rest % side];
                rest /= side;
            }
            a.add(term);
        }
    }
    CoefficientField::from_values(window, acc.iter().map(|a| a.value()).collect()).expect("window length")
}

/// `H(p₀) = −∫ p₀ ln p₀ dx`.
pub fn entropy(p0: impl Fn(&[f64]) -> f64, grid: &GridSpec) -> Result<f64> {
    let v = sample_positive(&p0, grid)?;
    Ok(-kahan_sum(v.iter().map(|p| p * p.ln())) * grid.weight())
}

/// `Z_E = ∫ e^{-E} dx` and the energies on the grid.
fn partition(coeffs: &CoefficientField, grid: &GridSpec) -> Result<(f64, Vec<f64>)> {
    let e = energy_on_grid(coeffs, grid)?;
    let z = kahan_sum(e.iter().map(|v| (-v).exp())) * grid.weight();
    Ok((z, e))
}

/// `H(p₀, p) = ∫ p₀ (E + ln Z_E) dx` for `p = e^{-E}/Z_E`, `Z_E = ∫ e^{-E} dx`.
pub fn cross_entropy(p0: impl Fn(&[f64]) -> f64, est: &DensityEstimate, grid: &GridSpec) -> Result<f64> {
    if est.shift {
        return Err(Error::invalid("cross-entropy needs an unshifted estimate"));
    }
    grid.check_dim(est.dim())?;
    let p = sample_positive(&p0, grid)?;
    let (z, e) = partition(&est.coeffs, grid)?;
    let lnz = z.ln();
    Ok(kahan_sum(p.iter().zip(&e).map(|(p, e)| p * (e + lnz))) * grid.weight())
}

/// `g_α = ∫ e^{iα·x} p₀ dx − ∫ e^{iα·x} p(x|y) dx`, the derivative of
/// [`cross_entropy`] with respect to `y_α`.
pub fn gradient_cross_entropy(
    p0: impl Fn(&[f64]) -> f64,
    coeffs: &CoefficientField,
    grid: &GridSpec,
) -> Result<CoefficientField> {
    grid.check_dim(coeffs.dim())?;
    let p = sample_positive(&p0, grid)?;
    let (z, e) = partition(coeffs, grid)?;
    let diff: Vec<f64> = p.iter().zip(&e).map(|(p, e)| p - (-e).exp() / z).collect();
    Ok(fourier_coefficients(&diff, coeffs.window(), grid, 1.0).scaled(grid.weight()))
}

/// Gradient with respect to the real parameters of
/// [`CoefficientField::to_real_params`]: `[Re g₀, 2 Re g_α, −2 Im g_α, …]`.
pub fn real_gradient(g: &CoefficientField) -> Vec<f64> {
    let w = g.window();
    let c = w.center();
    let v = g.values();
    let mut out = vec![v[c].re];
    for z in &v[c + 1..] {
        out.push(2.0 * z.re);
        out.push(-2.0 * z.im);
    }
    out
}

fn normalized(coeffs: &CoefficientField, grid: &GridSpec) -> Result<(Vec<f64>, f64)> {
    let (z, e) = partition(coeffs, grid)?;
    Ok((e.iter().map(|v| (-v).exp() / z).collect(), z))
}

/// `∫ |e^{-E}/Z_E − e^{-E_N}/Z_{E_N}| dx` where `E_N` keeps `|α|_∞ ≤ n_small`.
pub fn partial_sum_l1_distance(coeffs: &CoefficientField, n_small: usize, grid: &GridSpec) -> Result<f64> {
    check_partial(coeffs, n_small)?;
    let (full, _) = normalized(coeffs, grid)?;
    let (part, _) = normalized(&coeffs.truncated(n_small), grid)?;
    Ok(kahan_sum(full.iter().zip(&part).map(|(a, b)| (a - b).abs())) * grid.weight())
}

/// `e^{Σ_{|α|_∞ > n} |y_α| + |ln Z_E/Z_{E_N}|} − 1`, an upper bound on
/// [`partial_sum_l1_distance`].
pub fn partial_sum_l1_bound(coeffs: &CoefficientField, n_small: usize, grid: &GridSpec) -> Result<f64> {
    check_partial(coeffs, n_small)?;
    let part = coeffs.truncated(n_small);
    let tail = l1_norm(&coeffs.try_sub(&part)?);
    let (_, z) = normalized(coeffs, grid)?;
    let (_, zn) = normalized(&part, grid)?;
    Ok((tail + (z / zn).ln().abs()).exp_m1())
}

fn check_partial(coeffs: &CoefficientField, n_small: usize) -> Result<()> {
    if n_small > coeffs.radius() {
        return Err(Error::invalid(format!(
            "partial-sum order {n_small} exceeds coefficient radius {}",
            coeffs.radius()
        )));
    }
    Ok(())
}
