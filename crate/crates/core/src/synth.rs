//! Seeded sample generators and analytic references.
//!
//! Every generator draws from a `Xoshiro256PlusPlus` stream seeded with
//! `seed_from_u64(seed)` (SplitMix64 expansion of the 64-bit seed). Standard
//! normals come from `rand_distr::StandardNormal` (ziggurat), uniforms from
//! `Rng::random_range(-π..=π)`. Draws that leave `[-π, π]^d` are rejected and
//! redrawn, so results depend only on the seed and the call arguments.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::algebra::MultiIndex;
use crate::empirical::Dataset;
use crate::error::{Error, Result};

// Upper bound on consecutive rejected draws for one sample.
const MAX_REJECTIONS: usize = 1_000_000;

fn rng_for(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Multivariate normal `N(μ, Σ)` with a cached Cholesky factor.
#[derive(Debug, Clone)]
pub struct GaussianSpec {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    cholesky: DMatrix<f64>,
}

impl GaussianSpec {
    pub fn new(mean: Vec<f64>, covariance: Vec<Vec<f64>>) -> Result<Self> {
        let d = mean.len();
        if d == 0 {
            return Err(Error::invalid("mean must have at least one component"));
        }
        if covariance.len() != d || covariance.iter().any(|r| r.len() != d) {
            return Err(Error::invalid(format!("covariance must be {d}x{d}")));
        }
        let cov = DMatrix::from_fn(d, d, |i, j| covariance[i][j]);
        for i in 0..d {
            for j in 0..i {
                let scale = cov[(i, j)].abs().max(cov[(j, i)].abs()).max(1.0);
                if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-14 * scale {
                    return Err(Error::invalid("covariance is not symmetric"));
                }
            }
        }
        let chol = nalgebra::Cholesky::new(cov.clone()).ok_or(Error::NotPositiveDefinite)?;
        let l = chol.l();
        if (0..d).any(|i| !(l[(i, i)] > 0.0)) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(GaussianSpec {
            mean: DVector::from_vec(mean),
            covariance: cov,
            cholesky: l,
        })
    }

    /// Bivariate spec with `μ = (0, 0)` and `Σ = [[0.25, 0.2], [0.2, 0.75]]`.
    pub fn reference_bivariate() -> Self {
        GaussianSpec::new(vec![0.0, 0.0], vec![vec![0.25, 0.2], vec![0.2, 0.75]]).expect("positive definite")
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.covariance[(i, j)]
    }

    /// `E[e^{-iα·X}] = e^{-iα·μ − αᵀΣα/2}`, ignoring truncation to the window.
    pub fn characteristic(&self, alpha: &MultiIndex) -> Complex64 {
        let a = DVector::from_iterator(self.dim(), alpha.components().iter().map(|&c| c as f64));
        let quad = (a.transpose() * &self.covariance * &a)[(0, 0)];
        let phase = a.dot(&self.mean);
        Complex64::from_polar((-0.5 * quad).exp(), -phase)
    }

    fn draw(&self, rng: &mut Xoshiro256PlusPlus, out: &mut [f64]) -> Result<()> {
        let d = self.dim();
        let mut z = DVector::zeros(d);
        for _ in 0..MAX_REJECTIONS {
            for k in 0..d {
                z[k] = rng.sample(StandardNormal);
            }
            let x = &self.mean + &self.cholesky * &z;
            if x.iter().all(|v| (-PI..=PI).contains(v)) {
                out.copy_from_slice(x.as_slice());
                return Ok(());
            }
        }
        Err(Error::invalid("gaussian has negligible mass inside the window"))
    }
}

/// `gaussian_char(spec, α)`.
pub fn gaussian_char(spec: &GaussianSpec, alpha: &MultiIndex) -> Complex64 {
    spec.characteristic(alpha)
}

/// i.i.d. draws from `N(μ, Σ)` restricted to `[-π, π]^d` by rejection.
pub fn sample_truncated_gaussian(spec: &GaussianSpec, m: usize, seed: u64) -> Result<Dataset> {
    check_count(m)?;
    let d = spec.dim();
    let mut rng = rng_for(seed);
    let mut coords = vec![0.0; m * d];
    for chunk in coords.chunks_exact_mut(d) {
        spec.draw(&mut rng, chunk)?;
    }
    Dataset::from_flat(d, coords)
}

/// i.i.d. uniform draws on `[-π, π]^d`.
pub fn sample_uniform(d: usize, m: usize, seed: u64) -> Result<Dataset> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    sample_independent_product(&vec![AxisSampler::Uniform; d], m, seed)
}

fn check_count(m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    Ok(())
}

/// One-dimensional distribution on `[-π, π]` used as an axis of a product density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxisSampler {
    Uniform,
    /// `N(mean, sd²)` truncated to the window.
    Gaussian {
        mean: f64,
        sd: f64,
    },
    /// Von Mises density `∝ e^{κ cos(x − mean)}`.
    VonMises {
        mean: f64,
        concentration: f64,
    },
}

impl AxisSampler {
    fn validate(&self) -> Result<()> {
        match *self {
            AxisSampler::Uniform => Ok(()),
            AxisSampler::Gaussian { sd, .. } if !(sd > 0.0) => {
                Err(Error::invalid("standard deviation must be positive"))
            }
            AxisSampler::VonMises { concentration, .. } if !(concentration >= 0.0) => {
                Err(Error::invalid("concentration must be nonnegative"))
            }
            _ => Ok(()),
        }
    }

    pub fn draw(&self, rng: &mut impl Rng) -> Result<f64> {
        match *self {
            AxisSampler::Uniform => Ok(rng.random_range(-PI..=PI)),
            AxisSampler::Gaussian { mean, sd } => {
                for _ in 0..MAX_REJECTIONS {
                    let z: f64 = rng.sample(StandardNormal);
                    let x = mean + sd * z;
                    if (-PI..=PI).contains(&x) {
                        return Ok(x);
                    }
                }
                Err(Error::invalid("gaussian axis has negligible mass inside the window"))
            }
            AxisSampler::VonMises { mean, concentration } => {
                // uniform proposal, acceptance e^{κ(cos(x−μ) − 1)} ≤ 1
                for _ in 0..MAX_REJECTIONS {
                    let x = rng.random_range(-PI..=PI);
                    let u: f64 = rng.random();
                    if u < (concentration * ((x - mean).cos() - 1.0)).exp() {
                        return Ok(x);
                    }
                }
                Err(Error::invalid("von Mises rejection did not terminate"))
            }
        }
    }

    /// Density on `[-π, π]` with respect to `dx`, normalized over the window.
    pub fn density(&self, x: f64) -> f64 {
        match *self {
            AxisSampler::Uniform => 1.0 / (2.0 * PI),
            AxisSampler::Gaussian { mean, sd } => {
                let z = (x - mean) / sd;
                let mass = normal_window_mass(mean, sd);
                (-0.5 * z * z).exp() / (sd * (2.0 * PI).sqrt() * mass)
            }
            AxisSampler::VonMises { mean, concentration } => {
                (concentration * (x - mean).cos()).exp() / (2.0 * PI * bessel_i(0, concentration))
            }
        }
    }
}

/// Each coordinate drawn independently from its axis sampler, axis by axis per sample.
pub fn sample_independent_product(axes: &[AxisSampler], m: usize, seed: u64) -> Result<Dataset> {
    check_count(m)?;
    if axes.is_empty() {
        return Err(Error::invalid("at least one axis sampler is required"));
    }
    for a in axes {
        a.validate()?;
    }
    let mut rng = rng_for(seed);
    let mut coords = Vec::with_capacity(m * axes.len());
    for _ in 0..m {
        for a in axes {
            coords.push(a.draw(&mut rng)?);
        }
    }
    Dataset::from_flat(axes.len(), coords)
}

/// Modified Bessel function of the first kind `I_n(x)` by its power series.
pub fn bessel_i(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = (0..n).fold(1.0, |t, k| t * half / (k + 1) as f64);
    let mut sum = term;
    let q = half * half;
    for m in 1..200 {
        term *= q / (m as f64 * (m + n) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

fn normal_window_mass(mean: f64, sd: f64) -> f64 {
    let phi = |x: f64| 0.5 * erfc(-x / std::f64::consts::SQRT_2);
    phi((PI - mean) / sd) - phi((-PI - mean) / sd)
}

// Complementary error function, W. J. Cody's rational approximation as in
// Numerical Recipes `erfcc` (relative error < 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t
        * (-z * z - 1.265_512_23
            + t * (1.000_023_68
                + t * (0.374_091_96
                    + t * (0.096_784_18
                        + t * (-0.186_288_06
                            + t * (0.278_868_07
                                + t * (-1.135_203_98
                                    + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77)))))))))
            .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}
