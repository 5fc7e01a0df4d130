//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use wiener_density::algebra::{conv_exp_truncated, conv_power, convolve, hermitian_project, l1_norm};
use wiener_density::density::{
    cross_entropy, gradient_cross_entropy, log_density_fourier_oracle, moments_from_density, partial_sum_l1_bound,
    partial_sum_l1_distance, real_gradient,
};
use wiener_density::empirical::empirical_moments;
use wiener_density::solver::{forward_moments, jacobian, newton_solve, residual, solve_independent};
use wiener_density::synth::{bessel_i, sample_independent_product, sample_truncated_gaussian};
use wiener_density::{
    AxisSampler, CoefficientField, DensityEstimate, GaussianSpec, GridSpec, MomentField, SolveMode, SolverConfig,
    Target, Window,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

fn random_field(w: Window, scale: f64, rng: &mut impl Rng) -> CoefficientField {
    CoefficientField::from_fn(w, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
    })
}

fn random_hermitian(w: Window, l1: f64, rng: &mut impl Rng) -> CoefficientField {
    let y = hermitian_project(&random_field(w, 1.0, rng));
    y.scaled(l1 / l1_norm(&y))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `∫ f dx` over the grid, normalizing `f` to a probability density.
fn normalize(f: impl Fn(&[f64]) -> f64 + Copy, grid: &GridSpec) -> impl Fn(&[f64]) -> f64 + Copy {
    let mass: f64 = grid.points().map(|x| f(&x)).sum::<f64>() * grid.weight();
    move |x: &[f64]| f(x) / mass
}

// Product of two von Mises densities with concentration c, moments in closed form.
fn oracle_round_trip() -> Outcome {
    let c = 0.5;
    let (n1, n2) = (8, 20);
    let norm = 2.0 * PI * bessel_i(0, c);
    let p0 = move |x: &[f64]| (c * x[0].cos()).exp() * (c * x[1].cos()).exp() / (norm * norm);
    let window = Window::new(2, n1).unwrap();
    let grid = GridSpec::new(2, 64).unwrap();
    let y = log_density_fourier_oracle(|x: &[f64]| p0(x) + 1.0, window, &grid).unwrap();
    let model = forward_moments(&y, n2, Target::Shifted).unwrap();

    let i0 = bessel_i(0, c);
    let exact = CoefficientField::from_fn(window, |a| {
        let k = a.components();
        Complex64::new(
            bessel_i(k[0].unsigned_abs() as u32, c) * bessel_i(k[1].unsigned_abs() as u32, c) / (i0 * i0),
            0.0,
        )
    });
    let err = model.max_abs_diff(&exact);
    outcome(err < 1e-6, format!("sup-norm moment error {err:.2e} (limit 1e-6)"))
}

fn noiseless_inversion() -> Outcome {
    let w = Window::new(2, 2).unwrap();
    let config = SolverConfig::new(2, 6);
    let mut worst_err = 0.0f64;
    let mut worst_iter = 0;
    let mut recovered = 0;
    for seed in 0..20 {
        let truth = random_hermitian(w, 0.5 * rng(1000 + seed).random_range(0.2..1.0), &mut rng(seed));
        let m = forward_moments(&truth, config.n2, Target::Shifted).unwrap();
        let (y, report) = newton_solve(&MomentField::new(m, 0), &config).unwrap();
        let err = y.max_abs_diff(&truth);
        worst_err = worst_err.max(err);
        worst_iter = worst_iter.max(report.iterations);
        if report.converged() && err <= 1e-8 && report.iterations <= 15 {
            recovered += 1;
        }
    }
    outcome(
        recovered == 20,
        format!("{recovered}/20 recovered; worst error {worst_err:.2e}, worst iterations {worst_iter}"),
    )
}

struct Summary {
    mean: [f64; 2],
    cov: [f64; 3],
}

fn reference_run(m: usize, seed: u64) -> Summary {
    let data = sample_truncated_gaussian(&GaussianSpec::reference_bivariate(), m, seed).unwrap();
    let moments = empirical_moments(&data, Window::new(2, 5).unwrap()).unwrap();
    let (y, report) = newton_solve(&moments, &SolverConfig::new(5, 3)).unwrap();
    assert!(report.converged(), "M={m} seed={seed}: {:?}", report.termination);
    let s = moments_from_density(&DensityEstimate::new(y, true, 3), &GridSpec::new(2, 128).unwrap()).unwrap();
    Summary {
        mean: [s.mean[0], s.mean[1]],
        cov: [s.covariance[0][0], s.covariance[0][1], s.covariance[1][1]],
    }
}

fn reference_regime() -> Outcome {
    let truth = [0.25, 0.2, 0.75];
    let seeds = 0..5u64;
    let mut slowest = 0.0f64;
    let mut trend = Vec::new();
    let mut at_400 = Vec::new();
    for m in [50, 100, 200, 400] {
        let mut errors = Vec::new();
        for seed in seeds.clone() {
            let t = Instant::now();
            let s = reference_run(m, seed);
            slowest = slowest.max(t.elapsed().as_secs_f64());
            let e = s
                .mean
                .iter()
                .map(|v| v.abs())
                .chain(s.cov.iter().zip(truth).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            errors.push(e);
            if m == 400 {
                at_400.push(s);
            }
        }
        trend.push(median(errors));
    }
    let med = |f: &dyn Fn(&Summary) -> f64| median(at_400.iter().map(f).collect());
    let mu = [med(&|s| s.mean[0]), med(&|s| s.mean[1])];
    let cov = [med(&|s| s.cov[0]), med(&|s| s.cov[1]), med(&|s| s.cov[2])];
    let within = mu.iter().all(|v| v.abs() <= 0.10)
        && (cov[0] - 0.25).abs() <= 0.10
        && (cov[1] - 0.20).abs() <= 0.10
        && (cov[2] - 0.75).abs() <= 0.15;
    let monotone = trend.windows(2).all(|w| w[1] <= w[0]);
    outcome(
        within && monotone && slowest < 60.0,
        format!(
            "M=400 medians mean=({:.4}, {:.4}) cov=({:.4}, {:.4}, {:.4}); median max-error M=50..400 {:?}; slowest run {slowest:.2}s",
            mu[0],
            mu[1],
            cov[0],
            cov[1],
            cov[2],
            trend.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn l1_convergence() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (d, radius, points) in [(1, 10, 512), (2, 8, 128)] {
        let w = Window::new(d, radius).unwrap();
        let y = CoefficientField::from_fn(w, |a| Complex64::new(0.5 * 0.5f64.powi(a.sup_norm() as i32), 0.0));
        let grid = GridSpec::new(d, points).unwrap();
        let mut dist = Vec::new();
        let mut bounded = true;
        for n in 0..=radius {
            let dn = partial_sum_l1_distance(&y, n, &grid).unwrap();
            bounded &= dn <= partial_sum_l1_bound(&y, n, &grid).unwrap();
            dist.push(dn);
        }
        let ratio = dist[1] / dist[4];
        pass &= bounded && ratio >= 10.0;
        parts.push(format!(
            "d={d}: dist(1)={:.3e} dist(4)={:.3e} ratio {ratio:.2} (need >= 10), bound {} for all n",
            dist[1],
            dist[4],
            if bounded { "holds" } else { "VIOLATED" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn gradient_consistency() -> Outcome {
    let grid = GridSpec::new(2, 48).unwrap();
    let p0 = normalize(
        |x: &[f64]| (0.6 * x[0].cos() + 0.4 * x[1].cos() + 0.3 * (x[0] - x[1]).sin()).exp(),
        &grid,
    );
    let w = Window::new(2, 2).unwrap();
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut generator = rng(55);
    for _ in 0..10 {
        let y = random_hermitian(w, generator.random_range(0.5..2.0), &mut generator);
        let g = real_gradient(&gradient_cross_entropy(p0, &y, &grid).unwrap());
        let params = y.to_real_params();
        let h_at = |q: &[f64]| {
            let est = DensityEstimate::new(CoefficientField::from_real_params(w, q).unwrap(), false, 0);
            cross_entropy(p0, &est, &grid).unwrap()
        };
        for k in 0..params.len() {
            let (mut up, mut dn) = (params.clone(), params.clone());
            up[k] += h;
            dn[k] -= h;
            let fd = (h_at(&up) - h_at(&dn)) / (2.0 * h);
            let scale = g[k].abs().max(fd.abs());
            // ∂H/∂y₀ vanishes identically; compare it absolutely
            let rel = if scale < 1e-9 { 0.0 } else { (fd - g[k]).abs() / scale };
            worst = worst.max(rel);
        }
    }
    let y = log_density_fourier_oracle(p0, Window::new(2, 4).unwrap(), &grid).unwrap();
    let at_oracle = gradient_cross_entropy(p0, &y, &grid).unwrap().sup_norm();
    outcome(
        worst < 1e-5 && at_oracle < 1e-6,
        format!("worst relative error {worst:.2e} over 10 fields; |g| at oracle {at_oracle:.2e}"),
    )
}

// Five-point central differences: truncation error O(h⁴), far less sensitive
// to rounding than the three-point rule at the same accuracy.
fn jacobian_correctness() -> Outcome {
    let w = Window::new(2, 2).unwrap();
    let n2 = 6;
    let h = 1e-3;
    let mut worst = 0.0f64;
    let mut worst_abs = 0.0f64;
    let mut generator = rng(66);
    for _ in 0..10 {
        let y = random_hermitian(w, generator.random_range(0.2..1.5), &mut generator);
        let m = MomentField::new(hermitian_project(&random_field(w, 0.3, &mut generator)), 1);
        let j = jacobian(&y, n2).unwrap();
        let p = y.to_real_params();
        let f = |q: &[f64]| {
            residual(&CoefficientField::from_real_params(w, q).unwrap(), &m, n2)
                .unwrap()
                .to_real_params()
        };
        for col in 0..p.len() {
            let at = |t: f64| {
                let mut q = p.clone();
                q[col] += t;
                f(&q)
            };
            let (a, b, c, d) = (at(2.0 * h), at(h), at(-h), at(-2.0 * h));
            for row in 0..p.len() {
                let fd = (-a[row] + 8.0 * b[row] - 8.0 * c[row] + d[row]) / (12.0 * h);
                let diff = (fd - j[(row, col)]).abs();
                worst_abs = worst_abs.max(diff);
                let rel = if diff <= 1e-10 {
                    0.0
                } else {
                    diff / j[(row, col)].abs().max(fd.abs())
                };
                worst = worst.max(rel);
            }
        }
    }
    outcome(
        worst < 1e-5,
        format!("worst entrywise relative error {worst:.2e}, worst absolute {worst_abs:.2e}, over 10 fields"),
    )
}

fn independence_structure() -> Outcome {
    let axes = [
        AxisSampler::VonMises {
            mean: 0.4,
            concentration: 1.0,
        },
        AxisSampler::Gaussian { mean: -0.3, sd: 1.5 },
    ];
    let data = sample_independent_product(&axes, 2000, 77).unwrap();
    let n1 = 4;
    let mut full_cfg = SolverConfig::new(n1, 30);
    full_cfg.target = Some(Target::Plain);
    let joint = empirical_moments(&data, Window::new(2, n1).unwrap()).unwrap();
    let (y, report) = newton_solve(&joint, &full_cfg).unwrap();
    if !report.converged() {
        return outcome(false, format!("full solve did not converge: {:?}", report.termination));
    }

    // off-axis entries vs. the median on-axis magnitude at the same level
    let mut worst_ratio = 0.0f64;
    let mut off_axis = Vec::new();
    for k in 1..=n1 as u64 {
        let level: Vec<_> = y.window().indices().filter(|a| a.sup_norm() == k).collect();
        let on: Vec<f64> = level
            .iter()
            .filter(|a| a.support_size() == 1)
            .map(|a| y.get(a.components()).norm())
            .collect();
        let reference = median(on);
        for a in level.iter().filter(|a| a.support_size() > 1) {
            let v = y.get(a.components()).norm();
            off_axis.push(v);
            worst_ratio = worst_ratio.max(v / reference);
        }
    }
    let noise = (off_axis.iter().map(|v| v * v).sum::<f64>() / off_axis.len() as f64).sqrt();

    let mut ind_cfg = full_cfg.clone();
    ind_cfg.mode = SolveMode::Independent;
    let marginals: Vec<MomentField> = (0..2)
        .map(|k| empirical_moments(&data.marginal(k).unwrap(), Window::new(1, n1).unwrap()).unwrap())
        .collect();
    let fields = solve_independent(&marginals, &ind_cfg).unwrap();
    let mut worst_gap = 0.0f64;
    for (axis, (f, rep)) in fields.iter().enumerate() {
        if !rep.converged() {
            return outcome(false, format!("axis {axis} solve did not converge"));
        }
        for k in 1..=n1 as i64 {
            for s in [k, -k] {
                let mut alpha = [0i64; 2];
                alpha[axis] = s;
                worst_gap = worst_gap.max((y.get(&alpha) - f.get(&[s])).norm());
            }
        }
    }
    let origin_gap = (y.origin() - fields.iter().map(|(f, _)| f.origin()).sum::<Complex64>()).norm();
    worst_gap = worst_gap.max(origin_gap);
    outcome(
        worst_ratio <= 10.0 && worst_gap <= 3.0 * noise,
        format!(
            "worst off-axis/median on-axis ratio {worst_ratio:.2} (limit 10); axis gap {worst_gap:.2e} vs noise {noise:.2e} (limit 3x)"
        ),
    )
}

fn brute_convolve(a: &CoefficientField, b: &CoefficientField, out: Window) -> CoefficientField {
    let mut c = CoefficientField::zeros(out);
    for (i, x) in a.entries() {
        for (j, y) in b.entries() {
            let sum: Vec<i64> = i.components().iter().zip(j.components()).map(|(p, q)| p + q).collect();
            if out.contains(&sum) {
                c.set(&sum, c.get(&sum) + x * y).unwrap();
            }
        }
    }
    c
}

fn algebra_properties() -> Outcome {
    let shapes = [(1, 0), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2), (3, 0), (3, 1)];
    let mut generator = rng(88);
    let mut violations = [0usize; 5];
    let cases = 1000;
    let rel =
        |a: &CoefficientField, b: &CoefficientField| a.max_abs_diff(b) / a.sup_norm().max(b.sup_norm()).max(1e-300);
    for _ in 0..cases {
        let (d, ra) = shapes[generator.random_range(0..shapes.len())];
        let rb = shapes.iter().filter(|s| s.0 == d).map(|s| s.1).max().unwrap();
        let rb = generator.random_range(0..=rb);
        let a = random_field(
            Window::new(d, ra).unwrap(),
            generator.random_range(0.1..2.0),
            &mut generator,
        );
        let b = random_field(
            Window::new(d, rb).unwrap(),
            generator.random_range(0.1..2.0),
            &mut generator,
        );
        let full = Window::new(d, ra + rb).unwrap();
        let c = convolve(&a, &b, full).unwrap();

        if l1_norm(&c) > l1_norm(&a) * l1_norm(&b) * (1.0 + 1e-12) {
            violations[0] += 1;
        }

        let n2 = generator.random_range(1..=5i64);
        let y = a.scaled(0.5);
        let e = conv_exp_truncated(&y, n2, Window::new(d, ra * n2 as usize).unwrap()).unwrap();
        if l1_norm(&e) > l1_norm(&y).exp() * (1.0 + 1e-12) {
            violations[1] += 1;
        }

        let (ha, hb) = (hermitian_project(&a), hermitian_project(&b));
        let hc = convolve(&ha, &hb, full).unwrap();
        let he = conv_exp_truncated(&ha.scaled(0.3), n2, Window::new(d, ra * n2 as usize).unwrap()).unwrap();
        if hc.hermitian_defect() > 1e-13 * hc.sup_norm().max(1.0)
            || he.hermitian_defect() > 1e-13 * he.sup_norm().max(1.0)
        {
            violations[2] += 1;
        }

        let (m, n) = (generator.random_range(0..=3i64), generator.random_range(0..=3i64));
        let at = |k: i64| Window::new(d, ra * k as usize).unwrap();
        let lhs = conv_power(&y, m + n, at(m + n)).unwrap();
        let rhs = convolve(
            &conv_power(&y, m, at(m)).unwrap(),
            &conv_power(&y, n, at(n)).unwrap(),
            at(m + n),
        )
        .unwrap();
        if rel(&lhs, &rhs) > 1e-11 {
            violations[3] += 1;
        }

        // clipped output window exercises the box-clipping path too
        let out = Window::new(d, generator.random_range(0..=ra + rb + 1)).unwrap();
        if rel(&convolve(&a, &b, out).unwrap(), &brute_convolve(&a, &b, out)) > 1e-13 {
            violations[4] += 1;
        }
    }
    let names = [
        "submultiplicativity",
        "exponential bound",
        "hermitian closure",
        "power additivity",
        "brute force",
    ];
    let detail = names
        .iter()
        .zip(violations)
        .map(|(n, v)| format!("{n} {v}/{cases}"))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(violations.iter().all(|&v| v == 0), format!("violations: {detail}"))
}

/// Name, check, and optional wall-clock budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<f64>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle round-trip", oracle_round_trip, Some(10.0)),
        ("noiseless inversion", noiseless_inversion, Some(5.0)),
        ("reference gaussian regime", reference_regime, None),
        ("L1 convergence of partial sums", l1_convergence, None),
        ("gradient consistency", gradient_consistency, None),
        ("jacobian correctness", jacobian_correctness, None),
        ("independence structure", independence_structure, None),
        ("algebra property suite", algebra_properties, None),
    ];
    let mut failures = 0;
    let mut err = std::io::stderr();
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut result = run();
        let secs = t.elapsed().as_secs_f64();
        if let Some(limit) = budget {
            result.pass &= secs < *limit;
            result.detail.push_str(&format!("; budget {limit}s"));
        }
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failures += 1;
        }
        writeln!(
            err,
            "criterion {} [{name}]: {verdict} ({secs:.2}s) {}",
            i + 1,
            result.detail
        )
        .unwrap();
    }
    writeln!(
        err,
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    )
    .unwrap();
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
