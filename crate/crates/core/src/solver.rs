//! Damped Newton solver for the truncated moment-matching system.
//!
//! For every `α` with `|α|_∞ ≤ N₁` the residual is
//!
//! ```text
//! F_α(y) = (2π)^d · [ exp*_{N₂}(−y)(α) − s·δ₀(α) ] − m̂_α
//! ```
//!
//! where `exp*_{N₂}` is [`conv_exp_truncated`] and `s = 1` for the shifted
//! target `q = p₀ + 1 = e^{-E}` ([`Target::Shifted`]) or `s = 0` for the plain
//! target `p₀ = e^{-E}` ([`Target::Plain`]). The partition function is pinned
//! to one; `y₀` absorbs `ln Z`.
//!
//! Unknowns are the real parameters of a hermitian field (see
//! [`CoefficientField::to_real_params`]), so every iterate is exactly hermitian
//! and the Jacobian is a real `(2N₁+1)^d` square matrix.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{conv_exp_truncated, conv_powers, CoefficientField, Window};
use crate::empirical::MomentField;
use crate::error::{Error, Result};
use crate::torus_volume;

/// Which equations are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// One joint system over the full `d`-dimensional window.
    #[default]
    Full,
    /// `d` decoupled one-dimensional systems, one per coordinate.
    Independent,
}

/// Function represented by `e^{-E}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// `e^{-E} = p₀ + 1`; the estimate is `e^{-E} − 1`.
    Shifted,
    /// `e^{-E} = p₀`.
    Plain,
}

impl Target {
    fn shift(self) -> f64 {
        match self {
            Target::Shifted => 1.0,
            Target::Plain => 0.0,
        }
    }

    pub fn is_shifted(self) -> bool {
        self == Target::Shifted
    }
}

fn default_max_iter() -> usize {
    100
}
fn default_tol_residual() -> f64 {
    1e-10
}
fn default_tol_step() -> f64 {
    1e-12
}
fn default_shrink() -> f64 {
    0.5
}
fn default_min_step() -> f64 {
    (-20f64).exp2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Lattice radius `N₁`.
    pub n1: usize,
    /// Exponential series order `N₂`.
    pub n2: usize,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Stop once `‖F‖_∞` falls to this value.
    #[serde(default = "default_tol_residual")]
    pub tol_residual: f64,
    /// An accepted step shorter than this (sup-norm) without convergence stalls the solve.
    #[serde(default = "default_tol_step")]
    pub tol_step: f64,
    /// Backtracking factor.
    #[serde(default = "default_shrink")]
    pub shrink: f64,
    /// Smallest step fraction tried before the line search gives up.
    #[serde(default = "default_min_step")]
    pub min_step: f64,
    #[serde(default)]
    pub mode: SolveMode,
    /// Defaults to [`Target::Shifted`] in full mode and [`Target::Plain`] in
    /// independent mode, where per-axis energies add up to the joint energy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n1: 5,
            n2: 3,
            max_iter: default_max_iter(),
            tol_residual: default_tol_residual(),
            tol_step: default_tol_step(),
            shrink: default_shrink(),
            min_step: default_min_step(),
            mode: SolveMode::Full,
            target: None,
        }
    }
}

impl SolverConfig {
    pub fn new(n1: usize, n2: usize) -> Self {
        SolverConfig {
            n1,
            n2,
            ..Default::default()
        }
    }

    pub fn target(&self) -> Target {
        self.target.unwrap_or(match self.mode {
            SolveMode::Full => Target::Shifted,
            SolveMode::Independent => Target::Plain,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 1 || self.n2 < 1 {
            return Err(Error::invalid("n1 and n2 must be at least 1"));
        }
        if !(self.tol_residual > 0.0) || !(self.tol_step > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::invalid("shrink factor must lie in (0, 1)"));
        }
        if !(self.min_step > 0.0 && self.min_step <= 1.0) {
            return Err(Error::invalid("min_step must lie in (0, 1]"));
        }
        if self.mode == SolveMode::Independent && self.target() == Target::Shifted {
            return Err(Error::invalid(
                "independent mode requires the plain target: shifted per-axis energies do not add up",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIter,
    Stalled,
    SingularJacobian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub iterations: usize,
    pub final_residual_norm: f64,
    /// `‖F‖_∞` at the initial point and after every accepted step.
    pub residual_history: Vec<f64>,
    /// Step fraction accepted at each iteration (0 when the line search failed).
    pub step_sizes: Vec<f64>,
    pub termination: Termination,
}

impl SolverReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

/// `F_α(y)` for the shifted target.
pub fn residual(y: &CoefficientField, moments: &MomentField, n2: usize) -> Result<CoefficientField> {
    residual_for(y, moments, n2, Target::Shifted)
}

/// `F_α(y)` for either target.
pub fn residual_for(
    y: &CoefficientField,
    moments: &MomentField,
    n2: usize,
    target: Target,
) -> Result<CoefficientField> {
    y.check_same_window(moments.field())?;
    let w = y.window();
    let model = forward_moments(y, n2, target)?;
    let m = moments.field().values();
    let values = model.values().iter().zip(m).map(|(a, b)| a - b).collect();
    CoefficientField::from_values(w, values)
}

/// Model moments `(2π)^d [exp*_{N₂}(−y) − s·δ₀]` on `y`'s window.
pub fn forward_moments(y: &CoefficientField, n2: usize, target: Target) -> Result<CoefficientField> {
    let w = y.window();
    let mut e = conv_exp_truncated(y, n2 as i64, w)?;
    let c = w.center();
    e.values_mut()[c] -= target.shift();
    Ok(e.scaled(torus_volume(w.dim())))
}

/// Complex Jacobian `J(α, β) = ∂F_α/∂y_β = (2π)^d Σ_{n=1}^{N₂} (−1)ⁿ/(n−1)! · y^{*(n−1)}(α − β)`,
/// treating `y_β` and `y_{−β}` as independent variables. Rows and columns
/// follow the window enumeration order.
pub fn jacobian_complex(y: &CoefficientField, n2: usize) -> Result<DMatrix<Complex64>> {
    if n2 < 1 {
        return Err(Error::invalid("series order must be at least 1"));
    }
    let w = y.window();
    let diff = w.with_radius(2 * w.radius());
    let powers = conv_powers(y, n2 - 1, diff)?;
    // kernel(γ) = Σ_{k=0}^{N₂−1} (−1)^{k+1}/k! · y^{*k}(γ)
    let mut kernel = vec![Complex64::new(0.0, 0.0); diff.len()];
    let mut coef = -1.0;
    for (k, p) in powers.iter().enumerate() {
        if k > 0 {
            coef /= -(k as f64);
        }
        for (acc, v) in kernel.iter_mut().zip(p.values()) {
            *acc += v * coef;
        }
    }
    let vol = torus_volume(w.dim());
    let d = w.dim();
    let n = w.len();
    let mut a = vec![0i64; d];
    let mut b = vec![0i64; d];
    let mut g = vec![0i64; d];
    let mut j = DMatrix::zeros(n, n);
    for row in 0..n {
        w.coords_into(row, &mut a);
        for col in 0..n {
            w.coords_into(col, &mut b);
            for k in 0..d {
                g[k] = a[k] - b[k];
            }
            let o = diff.offset_of(&g).expect("difference lies in doubled window");
            j[(row, col)] = kernel[o] * vol;
        }
    }
    Ok(j)
}

/// Real Jacobian of the real-parameterized residual.
///
/// Columns follow [`CoefficientField::to_real_params`]; rows are
/// `[Re F₀, Re F_α, Im F_α, …]` over the same half-lattice.
pub fn jacobian(y: &CoefficientField, n2: usize) -> Result<DMatrix<f64>> {
    let jc = jacobian_complex(y, n2)?;
    Ok(realify_jacobian(&jc, y.window()))
}

fn realify_jacobian(jc: &DMatrix<Complex64>, w: Window) -> DMatrix<f64> {
    let n = w.len();
    let c = w.center();
    let i = Complex64::new(0.0, 1.0);
    // complex derivative of every F_α with respect to each real parameter
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    cols.push((0..n).map(|r| jc[(r, c)]).collect());
    for o in c + 1..n {
        let m = w.mirror(o);
        cols.push((0..n).map(|r| jc[(r, o)] + jc[(r, m)]).collect());
        cols.push((0..n).map(|r| i * (jc[(r, o)] - jc[(r, m)])).collect());
    }
    let mut real = DMatrix::zeros(n, n);
    for (k, col) in cols.iter().enumerate() {
        real[(0, k)] = col[c].re;
        for (h, o) in (c + 1..n).enumerate() {
            real[(1 + 2 * h, k)] = col[o].re;
            real[(2 + 2 * h, k)] = col[o].im;
        }
    }
    real
}

fn residual_params(f: &CoefficientField) -> DVector<f64> {
    let w = f.window();
    let c = w.center();
    let v = f.values();
    let mut out = Vec::with_capacity(w.len());
    out.push(v[c].re);
    for z in &v[c + 1..] {
        out.push(z.re);
        out.push(z.im);
    }
    DVector::from_vec(out)
}

fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max)
}

/// Constant-density starting point `y₀·δ₀`: `y₀ = −ln(1 + (2π)^{-d})` for the
/// shifted target, `y₀ = ln (2π)^d` for the plain one.
pub fn initial_guess(window: Window, target: Target) -> CoefficientField {
    let vol = torus_volume(window.dim());
    let y0 = match target {
        Target::Shifted => -(1.0 / vol).ln_1p(),
        Target::Plain => vol.ln(),
    };
    CoefficientField::scaled_delta(window, Complex64::new(y0, 0.0))
}

struct Newton<'a> {
    moments: &'a MomentField,
    config: &'a SolverConfig,
    target: Target,
}

/// Accepted step fraction, new parameters, residual, and its norm.
type Accepted = (f64, DVector<f64>, CoefficientField, f64);

impl Newton<'_> {
    fn eval(&self, params: &[f64]) -> Result<(CoefficientField, f64)> {
        let y = CoefficientField::from_real_params(self.moments.window(), params)?;
        let f = residual_for(&y, self.moments, self.config.n2, self.target)?;
        let norm = sup_norm(f.values());
        Ok((f, norm))
    }

    /// Backtracking on `‖F‖_∞`; returns the accepted fraction and the new point.
    fn line_search(&self, x: &DVector<f64>, dir: &DVector<f64>, current: f64) -> Result<Option<Accepted>> {
        let mut t = 1.0;
        while t >= self.config.min_step {
            let trial = x + dir * t;
            let (f, norm) = self.eval(trial.as_slice())?;
            if norm < current {
                return Ok(Some((t, trial, f, norm)));
            }
            t *= self.config.shrink;
        }
        Ok(None)
    }

    fn run(&self) -> Result<(CoefficientField, SolverReport)> {
        let w = self.moments.window();
        let mut x = DVector::from_vec(initial_guess(w, self.target).to_real_params());
        let (mut f, mut norm) = self.eval(x.as_slice())?;
        let mut report = SolverReport {
            iterations: 0,
            final_residual_norm: norm,
            residual_history: vec![norm],
            step_sizes: Vec::new(),
            termination: Termination::MaxIter,
        };
        let mut failed_searches = 0;
        loop {
            if norm <= self.config.tol_residual {
                report.termination = Termination::Converged;
                break;
            }
            if report.iterations >= self.config.max_iter {
                report.termination = Termination::MaxIter;
                break;
            }
            report.iterations += 1;
            let y = CoefficientField::from_real_params(w, x.as_slice())?;
            let jac = jacobian(&y, self.config.n2)?;
            let rhs = -residual_params(&f);
            let dir = match solve_linear(jac.clone(), &rhs) {
                Some(d) => d,
                None => {
                    report.termination = Termination::SingularJacobian;
                    break;
                }
            };
            let accepted = match self.line_search(&x, &dir, norm)? {
                Some(step) => Some(step),
                None => {
                    // Newton direction failed; retry once along steepest descent of ½‖F‖².
                    failed_searches += 1;
                    let grad = jac.transpose() * &rhs;
                    let scale = grad.amax();
                    if scale > 0.0 {
                        let dir = grad * (dir.amax().max(f64::EPSILON) / scale);
                        self.line_search(&x, &dir, norm)?
                    } else {
                        None
                    }
                }
            };
            match accepted {
                Some((t, trial, f_new, norm_new)) => {
                    let step = (&trial - &x).amax();
                    failed_searches = 0;
                    x = trial;
                    f = f_new;
                    norm = norm_new;
                    report.step_sizes.push(t);
                    report.residual_history.push(norm);
                    if norm > self.config.tol_residual && step <= self.config.tol_step {
                        report.termination = Termination::Stalled;
                        break;
                    }
                }
                None => {
                    failed_searches += 1;
                    report.step_sizes.push(0.0);
                    if failed_searches >= 2 {
                        report.termination = Termination::Stalled;
                        break;
                    }
                }
            }
        }
        report.final_residual_norm = norm;
        let y = CoefficientField::from_real_params(w, x.as_slice())?;
        Ok((y, report))
    }
}

/// Partial-pivot LU solve; `None` when a pivot falls below `1e-12` of the largest.
fn solve_linear(a: DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let lu = a.lu();
    let u = lu.u();
    let diag: Vec<f64> = u.diagonal().iter().map(|v| v.abs()).collect();
    let largest = diag.iter().cloned().fold(0.0, f64::max);
    if largest == 0.0 || diag.iter().any(|&p| p < 1e-12 * largest) {
        return None;
    }
    lu.solve(b)
}

/// Solves the joint system for the moments' window. `moments` must have radius `config.n1`.
pub fn newton_solve(moments: &MomentField, config: &SolverConfig) -> Result<(CoefficientField, SolverReport)> {
    config.validate()?;
    if moments.window().radius() != config.n1 {
        return Err(Error::WindowMismatch {
            expected: config.n1,
            found: moments.window().radius(),
        });
    }
    Newton {
        moments,
        config,
        target: config.target(),
    }
    .run()
}

/// Solves one one-dimensional system per coordinate.
pub fn solve_independent(
    moments_per_axis: &[MomentField],
    config: &SolverConfig,
) -> Result<Vec<(CoefficientField, SolverReport)>> {
    if config.mode != SolveMode::Independent {
        return Err(Error::invalid("solve_independent requires mode = independent"));
    }
    if moments_per_axis.is_empty() {
        return Err(Error::invalid("at least one axis is required"));
    }
    moments_per_axis
        .iter()
        .map(|m| {
            if m.window().dim() != 1 {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    found: m.window().dim(),
                });
            }
            newton_solve(m, config)
        })
        .collect()
}

/// Places per-axis 1-d fields on the axes of a `d`-dimensional field; the origin
/// receives the sum of the per-axis origins.
pub fn assemble_axes(axis_fields: &[CoefficientField]) -> Result<CoefficientField> {
    let d = axis_fields.len();
    let first = axis_fields.first().ok_or_else(|| Error::invalid("no axis fields"))?;
    let r = first.radius();
    if axis_fields.iter().any(|f| f.dim() != 1 || f.radius() != r) {
        return Err(Error::invalid("axis fields must be one-dimensional with equal radius"));
    }
    let w = Window::new(d, r)?;
    let mut out = CoefficientField::zeros(w);
    let origin: Complex64 = axis_fields.iter().map(|f| f.origin()).sum();
    out.set(&vec![0; d], origin)?;
    let mut alpha = vec![0i64; d];
    for (k, f) in axis_fields.iter().enumerate() {
        for eta in 1..=r as i64 {
            for s in [eta, -eta] {
                alpha[k] = s;
                out.set(&alpha, f.get(&[s]))?;
            }
        }
        alpha[k] = 0;
    }
    Ok(out)
}

/// Runs the configured mode on joint moments and returns a `d`-dimensional field.
/// In independent mode the per-axis reports are folded into one: the worst
/// residual and termination, and the summed iteration count.
pub fn solve(moments: &MomentField, config: &SolverConfig) -> Result<(CoefficientField, SolverReport)> {
    match config.mode {
        SolveMode::Full => newton_solve(moments, config),
        SolveMode::Independent => {
            let d = moments.window().dim();
            let axes = (0..d).map(|k| moments.axis_marginal(k)).collect::<Result<Vec<_>>>()?;
            let solved = solve_independent(&axes, config)?;
            let fields: Vec<_> = solved.iter().map(|(f, _)| f.clone()).collect();
            let mut report = solved
                .iter()
                .map(|(_, r)| r.clone())
                .max_by(|a, b| a.final_residual_norm.total_cmp(&b.final_residual_norm))
                .expect("nonempty");
            report.iterations = solved.iter().map(|(_, r)| r.iterations).sum();
            if let Some(bad) = solved.iter().find(|(_, r)| !r.converged()) {
                report.termination = bad.1.termination;
            }
            Ok((assemble_axes(&fields)?, report))
        }
    }
}
