//! On-disk formats.
//!
//! A risk matrix is a CSV file whose header is `episode,<id0>,<id1>,…` and whose
//! rows hold one episode each. Next to `name.csv` sits `name.manifest.json`
//! with the grid and the `bounded_unit` flag, and optionally `name.rewards.csv`
//! in the same layout as the risks. Numbers are written with Rust's shortest
//! round-trip formatting, so reading a file back reproduces every bit.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::HyperGrid;
use crate::risk::{validate_risk_matrix, RewardMatrix, RiskMatrix};

/// Companion metadata of a risk-matrix CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiskManifest {
    pub grid: HyperGrid,
    pub bounded_unit: bool,
    /// Number of episodes (data rows) in the CSV.
    pub n: usize,
    /// File name of the rewards CSV, relative to the manifest.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rewards: Option<String>,
    /// Free-form unit label, e.g. "ms".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
}

/// A loaded risk matrix with everything that travels with it.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskData {
    pub matrix: RiskMatrix,
    pub grid: HyperGrid,
    pub rewards: Option<RewardMatrix>,
    pub units: Option<String>,
}

fn sibling(csv_path: &Path, suffix: &str) -> PathBuf {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    csv_path.with_file_name(format!("{stem}{suffix}"))
}

pub fn manifest_path(csv_path: &Path) -> PathBuf {
    sibling(csv_path, ".manifest.json")
}

pub fn rewards_path(csv_path: &Path) -> PathBuf {
    sibling(csv_path, ".rewards.csv")
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents).map_err(|e| Error::io(path, e))
}

/// Reads JSON, reporting syntax errors with their position and unknown or
/// missing fields as schema mismatches.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => Error::SchemaMismatch(format!("{}: {e}", path.display())),
        _ => Error::Parse {
            path: path.to_path_buf(),
            line: e.line() as u64,
            column: e.column(),
            message: e.to_string(),
        },
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn matrix_csv(rows: &[Vec<f64>], width: usize) -> String {
    let mut out = String::from("episode");
    for id in 0..width {
        out.push_str(&format!(",{id}"));
    }
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        out.push_str(&i.to_string());
        for v in row {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

/// Writes `csv_path`, its manifest and, when given, its rewards file.
pub fn write_risk_matrix(
    csv_path: &Path,
    m: &RiskMatrix,
    g: &HyperGrid,
    rewards: Option<&RewardMatrix>,
    units: Option<&str>,
) -> Result<()> {
    validate_risk_matrix(m, g)?;
    write_file(csv_path, matrix_csv(m.rows(), m.width()).as_bytes())?;
    let rewards_name = match rewards {
        Some(r) => {
            let p = rewards_path(csv_path);
            write_file(&p, matrix_csv(r.rows(), r.width()).as_bytes())?;
            p.file_name().map(|s| s.to_string_lossy().into_owned())
        }
        None => None,
    };
    let manifest = RiskManifest {
        grid: g.clone(),
        bounded_unit: m.bounded_unit(),
        n: m.n(),
        rewards: rewards_name,
        units: units.map(str::to_owned),
    };
    write_json(&manifest_path(csv_path), &manifest)
}

/// Parses a matrix CSV with the `episode,<id>…` header into rows.
pub fn read_matrix_csv(path: &Path, width: usize) -> Result<Vec<Vec<f64>>> {
    let text = read_to_string(path)?;
    let parse_err = |line: u64, column: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| parse_err(1, 1, e.to_string()))?.clone();
    if header.get(0).map(str::trim) != Some("episode") {
        return Err(Error::SchemaMismatch(format!(
            "{}: first header cell must be `episode`",
            path.display()
        )));
    }
    let ids: Vec<&str> = header.iter().skip(1).map(str::trim).collect();
    if ids.len() != width {
        return Err(Error::SchemaMismatch(format!(
            "{}: header has {} grid columns but the grid has {width} points",
            path.display(),
            ids.len()
        )));
    }
    for (j, id) in ids.iter().enumerate() {
        if id.parse::<usize>().ok() != Some(j) {
            return Err(Error::SchemaMismatch(format!(
                "{}: header column {} is `{id}`, expected grid id {j}",
                path.display(),
                j + 2
            )));
        }
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, 1, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width + 1 {
            return Err(Error::SchemaMismatch(format!(
                "{}: line {line} has {} cells, expected {}",
                path.display(),
                record.len(),
                width + 1
            )));
        }
        let mut row = Vec::with_capacity(width);
        for (k, cell) in record.iter().enumerate().skip(1) {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| parse_err(line, k + 1, format!("`{cell}` is not a number")))?;
            row.push(v);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Loads a risk matrix and its grid, validating both.
pub fn load_risk_matrix(path: &Path) -> Result<(RiskMatrix, HyperGrid)> {
    let data = load_risk_data(path)?;
    Ok((data.matrix, data.grid))
}

/// Like [`load_risk_matrix`], also returning rewards when the manifest names a file.
pub fn load_risk_data(path: &Path) -> Result<RiskData> {
    if !path.exists() {
        return Err(Error::FileNotFound(path.to_path_buf()));
    }
    let manifest: RiskManifest = read_json(&manifest_path(path))?;
    let rows = read_matrix_csv(path, manifest.grid.len())?;
    if rows.len() != manifest.n {
        return Err(Error::SchemaMismatch(format!(
            "{}: manifest says {} episodes, file has {}",
            path.display(),
            manifest.n,
            rows.len()
        )));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let matrix = RiskMatrix::new(rows, manifest.bounded_unit)?;
    validate_risk_matrix(&matrix, &manifest.grid)?;
    let rewards = match &manifest.rewards {
        Some(name) => {
            let rp = path.with_file_name(name);
            let r = RewardMatrix::new(read_matrix_csv(&rp, manifest.grid.len())?)?;
            if r.n() != matrix.n() {
                return Err(Error::SchemaMismatch(format!(
                    "{}: {} reward rows for {} episodes",
                    rp.display(),
                    r.n(),
                    matrix.n()
                )));
            }
            Some(r)
        }
        None => None,
    };
    Ok(RiskData {
        matrix,
        grid: manifest.grid,
        rewards,
        units: manifest.units,
    })
}
