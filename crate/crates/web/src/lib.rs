//! Browser bindings for the demo page in `www/`.
//!
//! Everything crosses the boundary as flat `f64` arrays: samples are
//! `[x₁, y₁, x₂, y₂, …]` and grids are row-major with the last axis fastest.

use wasm_bindgen::prelude::*;
use wiener_density::density::{moments_from_density, partial_sum_l1_bound, partial_sum_l1_distance};
use wiener_density::empirical::empirical_moments;
use wiener_density::solver::newton_solve;
use wiener_density::synth::sample_truncated_gaussian;
use wiener_density::{CoefficientField, Dataset, DensityEstimate, GaussianSpec, GridSpec, SolverConfig, Window};

#[wasm_bindgen(start)]
pub fn start() {
    console_error_panic_hook::set_once();
}

/// Samples from the bivariate Gaussian with the given mean and covariance,
/// truncated to `[-π, π]²`.
pub fn gaussian_samples(mean: [f64; 2], cov: [f64; 3], m: usize, seed: u64) -> Result<Vec<f64>, String> {
    let spec = GaussianSpec::new(mean.to_vec(), vec![vec![cov[0], cov[1]], vec![cov[1], cov[2]]])
        .map_err(|e| e.to_string())?;
    let data = sample_truncated_gaussian(&spec, m, seed).map_err(|e| e.to_string())?;
    Ok(data.as_flat().to_vec())
}

/// A solved 2-d estimate tabulated on a grid.
#[wasm_bindgen]
pub struct Estimate {
    grid: Vec<f64>,
    points_per_axis: usize,
    mean: Vec<f64>,
    covariance: Vec<f64>,
    iterations: usize,
    residual: f64,
    converged: bool,
}

#[wasm_bindgen]
impl Estimate {
    #[wasm_bindgen(getter)]
    pub fn grid(&self) -> Vec<f64> {
        self.grid.clone()
    }

    #[wasm_bindgen(getter, js_name = pointsPerAxis)]
    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    #[wasm_bindgen(getter)]
    pub fn mean(&self) -> Vec<f64> {
        self.mean.clone()
    }

    /// `[Σ₁₁, Σ₁₂, Σ₂₂]`.
    #[wasm_bindgen(getter)]
    pub fn covariance(&self) -> Vec<f64> {
        self.covariance.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    #[wasm_bindgen(getter)]
    pub fn residual(&self) -> f64 {
        self.residual
    }

    #[wasm_bindgen(getter)]
    pub fn converged(&self) -> bool {
        self.converged
    }
}

pub fn estimate_from_samples(samples: &[f64], n1: usize, n2: usize, points: usize) -> Result<Estimate, String> {
    let err = |e: wiener_density::Error| e.to_string();
    let data = Dataset::from_flat(2, samples.to_vec()).map_err(err)?;
    let config = SolverConfig::new(n1, n2);
    config.validate().map_err(err)?;
    let moments = empirical_moments(&data, Window::new(2, n1).map_err(err)?).map_err(err)?;
    let (y, report) = newton_solve(&moments, &config).map_err(err)?;
    let est = DensityEstimate::new(y, true, n2);
    let grid = GridSpec::new(2, points).map_err(err)?;
    let values = est.values_on_grid(&grid).map_err(err)?;
    let m = moments_from_density(&est, &grid).map_err(err)?;
    Ok(Estimate {
        grid: values,
        points_per_axis: points,
        mean: m.mean,
        covariance: vec![m.covariance[0][0], m.covariance[0][1], m.covariance[1][1]],
        iterations: report.iterations,
        residual: report.final_residual_norm,
        converged: report.converged(),
    })
}

/// `[distance(0), bound(0), distance(1), bound(1), …]` for the 1-d
/// coefficients `y_k = amplitude · decay^{|k|}`, `|k| ≤ radius`.
pub fn truncation_profile(amplitude: f64, decay: f64, radius: usize) -> Result<Vec<f64>, String> {
    let err = |e: wiener_density::Error| e.to_string();
    let w = Window::new(1, radius).map_err(err)?;
    let y = CoefficientField::from_fn(w, |a| (amplitude * decay.powi(a.sup_norm() as i32)).into());
    let grid = GridSpec::new(1, 512).map_err(err)?;
    let mut out = Vec::with_capacity(2 * (radius + 1));
    for n in 0..=radius {
        out.push(partial_sum_l1_distance(&y, n, &grid).map_err(err)?);
        out.push(partial_sum_l1_bound(&y, n, &grid).map_err(err)?);
    }
    Ok(out)
}

#[wasm_bindgen(js_name = sampleGaussian)]
#[allow(clippy::too_many_arguments)]
pub fn sample_gaussian(
    mx: f64,
    my: f64,
    s11: f64,
    s12: f64,
    s22: f64,
    m: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    gaussian_samples([mx, my], [s11, s12, s22], m, seed).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn estimate(samples: &[f64], n1: usize, n2: usize, points: usize) -> Result<Estimate, JsError> {
    estimate_from_samples(samples, n1, n2, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = truncationProfile)]
pub fn truncation_profile_js(amplitude: f64, decay: f64, radius: usize) -> Result<Vec<f64>, JsError> {
    truncation_profile(amplitude, decay, radius).map_err(|e| JsError::new(&e))
}
