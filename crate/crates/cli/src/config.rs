//! Run configuration: defaults, config-file values, then flags, in
//! increasing precedence.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use groverns_core::noise::{NoiseLayout, UnitarySpec};

/// Flat key-value config file (JSON).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub n: Option<usize>,
    pub w: Option<usize>,
    pub unitary: Option<serde_json::Value>,
    pub sites: Option<Vec<usize>>,
    pub m: Option<usize>,
    pub placement: Option<String>,
    pub p: Option<f64>,
    pub mu: Option<f64>,
    pub t_max: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: &PathBuf) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("cannot parse config file {}", path.display()))
    }
}

/// Fully resolved simulation run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub w: usize,
    pub unitary: UnitarySpec,
    pub layout: NoiseLayout,
    pub p: f64,
    pub mu: f64,
    pub t_max: usize,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => bail!("unknown format '{other}' (expected csv or json)"),
        }
    }
}

/// Parse a unitary argument: a named alias, or a JSON object with the
/// explicit parameters.
pub fn parse_unitary_arg(arg: &str) -> Result<UnitarySpec> {
    let trimmed = arg.trim();
    if trimmed.starts_with('{') {
        let spec: UnitarySpec =
            serde_json::from_str(trimmed).context("cannot parse unitary JSON object")?;
        return Ok(spec);
    }
    Ok(UnitarySpec::named(trimmed))
}

pub fn parse_unitary_value(value: &serde_json::Value) -> Result<UnitarySpec> {
    match value {
        serde_json::Value::String(s) => Ok(UnitarySpec::named(s)),
        obj @ serde_json::Value::Object(_) => {
            serde_json::from_value(obj.clone()).context("cannot parse unitary object")
        }
        other => bail!("unitary must be a string alias or an object, got {other}"),
    }
}

/// Parse a grid argument: either `start:end:step` (inclusive ends) or a
/// comma-separated list.
pub fn parse_grid(arg: &str) -> Result<Vec<f64>> {
    if arg.contains(':') {
        let parts: Vec<&str> = arg.split(':').collect();
        if parts.len() != 3 {
            bail!("range grid must be start:end:step, got '{arg}'");
        }
        let start: f64 = parts[0].parse().context("bad grid start")?;
        let end: f64 = parts[1].parse().context("bad grid end")?;
        let step: f64 = parts[2].parse().context("bad grid step")?;
        if step <= 0.0 || end < start {
            bail!("grid requires step > 0 and end >= start");
        }
        let count = ((end - start) / step + 0.5).floor() as usize + 1;
        return Ok((0..count).map(|i| (start + i as f64 * step).min(end)).collect());
    }
    arg.split(',')
        .map(|v| v.trim().parse::<f64>().context("bad grid value"))
        .collect()
}

/// Parse a comma-separated list of site indices.
pub fn parse_sites(arg: &str) -> Result<Vec<usize>> {
    arg.split(',')
        .map(|v| v.trim().parse::<usize>().context("bad site index"))
        .collect()
}

/// Registers above this size are rejected by the CLI; override with the
/// GROVERNS_MAX_QUBITS environment variable.
pub fn max_qubits() -> usize {
    std::env::var("GROVERNS_MAX_QUBITS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .unwrap_or(14)
}
