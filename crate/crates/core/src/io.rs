//! File formats: coefficient/moment JSON, sample and grid CSV, run manifests.
//!
//! Coefficient fields are written as
//! `{"dim": d, "radius": N, "entries": [[α₁, …, α_d, re, im], …]}` with only
//! nonzero entries, in lexicographic index order. Floats use the shortest
//! representation that round-trips exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::algebra::{CoefficientField, Window};
use crate::density::{DensityEstimate, DensityMoments, GridSpec};
use crate::empirical::{Dataset, MomentField};
use crate::error::{Error, Result};
use crate::solver::SolverConfig;

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

pub fn field_to_json(field: &CoefficientField) -> Value {
    let entries: Vec<Value> = field
        .entries()
        .map(|(alpha, z)| {
            let mut row: Vec<Value> = alpha.components().iter().map(|&a| json!(a)).collect();
            row.push(json!(z.re));
            row.push(json!(z.im));
            Value::Array(row)
        })
        .collect();
    json!({ "dim": field.dim(), "radius": field.radius(), "entries": entries })
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| format_err(format!("missing or invalid \"{key}\"")))
}

/// Parses the coefficient layout; unknown keys are ignored.
pub fn field_from_json(value: &Value) -> Result<CoefficientField> {
    let obj = value.as_object().ok_or_else(|| format_err("expected a JSON object"))?;
    let dim = get_usize(obj, "dim")?;
    let radius = get_usize(obj, "radius")?;
    let window = Window::new(dim, radius)?;
    let entries = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| format_err("missing \"entries\" array"))?;
    let mut field = CoefficientField::zeros(window);
    for (i, entry) in entries.iter().enumerate() {
        let row = entry
            .as_array()
            .filter(|r| r.len() == dim + 2)
            .ok_or_else(|| format_err(format!("entry {i}: expected {} numbers", dim + 2)))?;
        let alpha = row[..dim]
            .iter()
            .map(Value::as_i64)
            .collect::<Option<Vec<i64>>>()
            .ok_or_else(|| format_err(format!("entry {i}: index components must be integers")))?;
        let re = row[dim].as_f64();
        let im = row[dim + 1].as_f64();
        let (Some(re), Some(im)) = (re, im) else {
            return Err(format_err(format!("entry {i}: value must be two numbers")));
        };
        if !window.contains(&alpha) {
            return Err(format_err(format!(
                "entry {i}: index {alpha:?} outside radius {radius}"
            )));
        }
        field.set(&alpha, Complex64::new(re, im))?;
    }
    Ok(field)
}

pub fn moments_to_json(moments: &MomentField) -> Value {
    let mut v = field_to_json(moments.field());
    v["sample_count"] = json!(moments.sample_count());
    v
}

pub fn moments_from_json(value: &Value) -> Result<MomentField> {
    let field = field_from_json(value)?;
    let count = value
        .get("sample_count")
        .and_then(Value::as_u64)
        .ok_or_else(|| format_err("missing or invalid \"sample_count\""))?;
    Ok(MomentField::new(field, count as usize))
}

/// Coefficients plus `n1`, `n2` and `shift`.
pub fn estimate_to_json(est: &DensityEstimate) -> Value {
    let mut v = field_to_json(&est.coeffs);
    v["n1"] = json!(est.n1);
    v["n2"] = json!(est.n2);
    v["shift"] = json!(est.shift);
    v
}

/// Reads [`estimate_to_json`] output. A bare coefficient object is taken as
/// a shifted estimate.
pub fn estimate_from_json(value: &Value) -> Result<DensityEstimate> {
    let coeffs = field_from_json(value)?;
    let shift = match value.get("shift") {
        None => true,
        Some(v) => v.as_bool().ok_or_else(|| format_err("\"shift\" must be a boolean"))?,
    };
    let n2 = match value.get("n2") {
        None => 0,
        Some(v) => v.as_u64().ok_or_else(|| format_err("invalid \"n2\""))? as usize,
    };
    Ok(DensityEstimate::new(coeffs, shift, n2))
}

pub fn read_json(path: &Path) -> Result<Value> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Parses sample CSV: one point per row, optional `x1,…,xd` header.
pub fn parse_dataset_csv(input: impl Read) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut dim = None;
    let mut coords = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::MalformedRow {
            row,
            message: e.to_string(),
        })?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if i == 0 && is_header(&record) {
            dim = Some(record.len());
            continue;
        }
        let d = *dim.get_or_insert(record.len());
        if record.len() != d {
            return Err(Error::MalformedRow {
                row,
                message: format!("expected {d} columns, found {}", record.len()),
            });
        }
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| Error::MalformedRow {
                row,
                message: format!("cannot parse {field:?} as a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::MalformedRow {
                    row,
                    message: format!("non-finite value {field:?}"),
                });
            }
            coords.push(v);
        }
    }
    match dim {
        Some(d) if !coords.is_empty() => Dataset::from_flat(d, coords),
        _ => Err(Error::EmptyDataset),
    }
}

fn is_header(record: &csv::StringRecord) -> bool {
    record.iter().enumerate().all(|(k, f)| f == format!("x{}", k + 1))
}

pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    parse_dataset_csv(File::open(path)?)
}

fn header(dim: usize) -> Vec<String> {
    (1..=dim).map(|k| format!("x{k}")).collect()
}

fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_dataset_csv(out: impl Write, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(data.dim())).map_err(csv_err)?;
    for p in data.points() {
        w.write_record(p.iter().map(|&v| float(v))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Grid CSV with columns `x1,…,xd,density`, row-major.
pub fn write_grid_csv(out: impl Write, grid: &GridSpec, values: &[f64]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::invalid("grid value count does not match the grid"));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut head = header(grid.dim);
    head.push("density".into());
    w.write_record(&head).map_err(csv_err)?;
    for (x, &v) in grid.points().zip(values) {
        let row: Vec<String> = x.iter().chain(std::iter::once(&v)).map(|&c| float(c)).collect();
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Grid description plus the estimate's mass and moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSidecar {
    pub grid: GridSpec,
    #[serde(flatten)]
    pub moments: DensityMoments,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<RunManifest>,
}

/// Provenance recorded alongside every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<SolverConfig>,
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub outputs: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub started: u64,
    pub finished: u64,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn start(command: &str) -> Self {
        let now = unix_now();
        RunManifest {
            command: command.to_string(),
            config: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started: now,
            finished: now,
        }
    }

    pub fn finish(&mut self) {
        self.finished = unix_now();
    }

    /// Sibling path `<file>.manifest.json` used for formats without room for
    /// embedded metadata.
    pub fn sidecar_path(file: &Path) -> PathBuf {
        let mut name = file.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".manifest.json");
        file.with_file_name(name)
    }
}
