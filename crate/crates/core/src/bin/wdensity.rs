//! `wdensity` — sample, estimate, evaluate, and summarize torus densities.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use wiener_density::density::{moments_from_density, DensityEstimate, DensityMoments, GridSpec};
use wiener_density::empirical::empirical_moments;
use wiener_density::io::{self, GridSidecar, RunManifest};
use wiener_density::synth::{sample_truncated_gaussian, sample_uniform, GaussianSpec};
use wiener_density::{solver, Error, SolverConfig, Window};

#[derive(Parser)]
#[command(
    name = "wdensity",
    version,
    about = "Density estimation on [-π, π]^d by Fourier moment matching"
)]
struct Cli {
    /// Solver configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    output: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Grid points per axis for evaluation and moments.
    #[arg(long, global = true, default_value_t = 128)]
    grid: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples and write samples.csv.
    Generate(GenerateArgs),
    /// Solve for coefficients from samples or precomputed moments.
    Estimate(EstimateArgs),
    /// Tabulate a density estimate on a grid.
    Evaluate(CoeffsArgs),
    /// Mean, covariance, and mass of a density estimate.
    Moments(CoeffsArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Truncated Gaussian; requires --mean and --cov.
    #[arg(long, conflicts_with = "uniform", requires_all = ["mean", "cov"])]
    gaussian: bool,
    /// Uniform on [-π, π]^d; requires --dim.
    #[arg(long, requires = "dim")]
    uniform: bool,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mean: Option<Vec<f64>>,
    /// Covariance, row-major: either the upper triangle or the full matrix.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    cov: Option<Vec<f64>>,
    #[arg(long)]
    dim: Option<usize>,
    /// Number of samples.
    #[arg(long)]
    m: usize,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct EstimateSource {
    /// Sample CSV.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Moment JSON (skips the empirical step).
    #[arg(long)]
    moments: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    source: EstimateSource,
}

#[derive(Args)]
struct CoeffsArgs {
    /// Coefficient JSON written by `estimate`.
    #[arg(long)]
    coeffs: PathBuf,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { 2 } else { 3 };
        Failure { code, error: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        // Context wrappers keep the library error reachable for classification.
        let code = match error.downcast_ref::<Error>() {
            Some(e) if !e.is_input_error() => 3,
            _ => 2,
        };
        Failure { code, error }
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    fs::create_dir_all(&cli.output).with_context(|| format!("creating {}", cli.output.display()))?;
    match &cli.command {
        Command::Generate(args) => generate(cli, args),
        Command::Estimate(args) => estimate(cli, args),
        Command::Evaluate(args) => evaluate(cli, args),
        Command::Moments(args) => moments(cli, args),
    }
}

fn covariance_matrix(d: usize, values: &[f64]) -> Result<Vec<Vec<f64>>, Error> {
    let mut cov = vec![vec![0.0; d]; d];
    if values.len() == d * d {
        for (i, row) in cov.iter_mut().enumerate() {
            row.copy_from_slice(&values[i * d..(i + 1) * d]);
        }
    } else if values.len() == d * (d + 1) / 2 {
        let upper = (0..d).flat_map(|i| (i..d).map(move |j| (i, j)));
        for ((i, j), &v) in upper.zip(values) {
            cov[i][j] = v;
            cov[j][i] = v;
        }
    } else {
        return Err(Error::InvalidInput(format!(
            "--cov needs {} (upper triangle) or {} values for dimension {d}, got {}",
            d * (d + 1) / 2,
            d * d,
            values.len()
        )));
    }
    Ok(cov)
}

fn generate(cli: &Cli, args: &GenerateArgs) -> CmdResult {
    let mut manifest = RunManifest::start("generate");
    manifest.seed = Some(cli.seed);
    let data = if args.gaussian {
        let mean = args.mean.clone().unwrap_or_default();
        let cov = covariance_matrix(mean.len(), args.cov.as_deref().unwrap_or_default())?;
        sample_truncated_gaussian(&GaussianSpec::new(mean, cov)?, args.m, cli.seed)?
    } else if args.uniform {
        sample_uniform(args.dim.unwrap_or(0), args.m, cli.seed)?
    } else {
        return Err(Error::InvalidInput("choose --gaussian or --uniform".into()).into());
    };
    let path = cli.output.join("samples.csv");
    io::write_dataset_csv(fs::File::create(&path).context("creating samples.csv")?, &data)?;
    manifest.outputs.push(path.clone());
    manifest.finish();
    io::write_json(&RunManifest::sidecar_path(&path), &manifest)?;
    println!("wrote {} samples to {}", data.len(), path.display());
    Ok(ExitCode::SUCCESS)
}

fn load_config(cli: &Cli) -> Result<SolverConfig, Failure> {
    let config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(Error::from)
                .with_context(|| format!("parsing {}", path.display()))?
        }
        None => SolverConfig::default(),
    };
    config.validate()?;
    Ok(config)
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    Ok(io::read_json(path).with_context(|| format!("reading {}", path.display()))?)
}

fn estimate(cli: &Cli, args: &EstimateArgs) -> CmdResult {
    let config = load_config(cli)?;
    let mut manifest = RunManifest::start("estimate");
    manifest.config = Some(config.clone());
    let moments = if let Some(path) = &args.source.input {
        manifest.inputs.push(path.clone());
        let data = io::read_dataset_csv(path).with_context(|| format!("reading {}", path.display()))?;
        empirical_moments(&data, Window::new(data.dim(), config.n1)?)?
    } else {
        let path = args.source.moments.as_ref().expect("clap enforces one source");
        manifest.inputs.push(path.clone());
        io::moments_from_json(&read_json(path)?).with_context(|| format!("parsing {}", path.display()))?
    };

    let (coeffs, report) = solver::solve(&moments, &config)?;
    let est = DensityEstimate::new(coeffs, config.target().is_shifted(), config.n2);

    let coeff_path = cli.output.join("coefficients.json");
    let report_path = cli.output.join("report.json");
    manifest.outputs = vec![coeff_path.clone(), report_path.clone()];
    manifest.finish();

    let mut doc = io::estimate_to_json(&est);
    doc["manifest"] = json!(manifest);
    io::write_json(&coeff_path, &doc)?;
    let mut rep = json!(report);
    rep["manifest"] = json!(manifest);
    io::write_json(&report_path, &rep)?;

    println!(
        "{:?} after {} iterations, residual {:.3e}",
        report.termination, report.iterations, report.final_residual_norm
    );
    if report.converged() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: solver did not converge ({:?})", report.termination);
        Ok(ExitCode::from(3))
    }
}

fn load_estimate(path: &Path) -> Result<DensityEstimate, Failure> {
    Ok(io::estimate_from_json(&read_json(path)?).with_context(|| format!("parsing {}", path.display()))?)
}

fn summarize(est: &DensityEstimate, grid: &GridSpec) -> Result<DensityMoments, Failure> {
    Ok(moments_from_density(est, grid)?)
}

fn evaluate(cli: &Cli, args: &CoeffsArgs) -> CmdResult {
    let est = load_estimate(&args.coeffs)?;
    let grid = GridSpec::new(est.dim(), cli.grid)?;
    let values = est.values_on_grid(&grid)?;
    let moments = summarize(&est, &grid)?;

    let csv_path = cli.output.join("grid.csv");
    let json_path = cli.output.join("grid.json");
    let mut manifest = RunManifest::start("evaluate");
    manifest.inputs.push(args.coeffs.clone());
    manifest.outputs = vec![csv_path.clone(), json_path.clone()];
    io::write_grid_csv(
        fs::File::create(&csv_path).context("creating grid.csv")?,
        &grid,
        &values,
    )?;
    manifest.finish();
    let sidecar = GridSidecar {
        grid,
        moments,
        manifest: Some(manifest),
    };
    io::write_json(&json_path, &sidecar)?;
    println!("wrote {} grid points to {}", grid.len(), csv_path.display());
    Ok(ExitCode::SUCCESS)
}

fn moments(cli: &Cli, args: &CoeffsArgs) -> CmdResult {
    let est = load_estimate(&args.coeffs)?;
    let grid = GridSpec::new(est.dim(), cli.grid)?;
    let moments = summarize(&est, &grid)?;
    let path = cli.output.join("moments.json");
    let mut manifest = RunManifest::start("moments");
    manifest.inputs.push(args.coeffs.clone());
    manifest.outputs.push(path.clone());
    manifest.finish();
    let mut doc = json!(moments);
    doc["grid"] = json!(grid);
    doc["manifest"] = json!(manifest);
    io::write_json(&path, &doc)?;
    println!("mass {}", moments.mass);
    println!("mean {:?}", moments.mean);
    for row in &moments.covariance {
        println!("cov  {row:?}");
    }
    Ok(ExitCode::SUCCESS)
}
