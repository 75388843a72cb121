//! Output directory, file writing, CSV rows and failure reporting.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use chua_core::ChuaError;
use serde::Serialize;
use serde_json::json;

use crate::Cli;

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, bad config, or an unwritable path: exit status 1.
    Usage(String),
    /// The computation itself failed: exit status 2.
    Numerical(ChuaError),
}

impl From<ChuaError> for Failure {
    fn from(e: ChuaError) -> Self {
        match e {
            ChuaError::InvalidParameter(m) | ChuaError::ContractViolation(m) => Failure::Usage(m),
            other => Failure::Numerical(other),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Machine-readable description of a numerical failure.
pub fn diagnostic_json(e: &ChuaError) -> String {
    let (kind, detail) = match e {
        ChuaError::NonFiniteState => ("non_finite_state", json!({})),
        ChuaError::Diverged { t } => ("diverged", json!({ "t": finite_or_null(*t) })),
        ChuaError::PoleOnAxis { omega } => ("pole_on_axis", json!({ "omega": omega })),
        ChuaError::LocusDiscontinuity { amplitude } => ("locus_discontinuity", json!({ "amplitude": amplitude })),
        ChuaError::StepUnderflow { t, state } => ("step_underflow", json!({ "t": t, "state": state })),
        ChuaError::InsufficientData(_) => ("insufficient_data", json!({})),
        ChuaError::InvalidParameter(_) => ("invalid_parameter", json!({})),
        ChuaError::ContractViolation(_) => ("contract_violation", json!({})),
    };
    json!({ "status": "numerical_failure", "kind": kind, "message": e.to_string(), "detail": detail }).to_string()
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        serde_json::Value::Null
    }
}

pub struct Session {
    pub out_dir: PathBuf,
    pub workers: usize,
    pub dry_run: bool,
    pub svg: bool,
}

impl Session {
    pub fn new(cli: &Cli) -> CliResult<Self> {
        let out_dir = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
        if out_dir.exists() && !out_dir.is_dir() {
            return Err(usage(format!("output path {} is not a directory", out_dir.display())));
        }
        Ok(Self { out_dir, workers: cli.workers, dry_run: cli.dry_run, svg: !cli.no_svg })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> CliResult<PathBuf> {
        fs::create_dir_all(&self.out_dir)
            .map_err(|e| usage(format!("cannot create {}: {e}", self.out_dir.display())))?;
        let path = self.path(name);
        fs::write(&path, contents).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<PathBuf> {
        let text = serde_json::to_string_pretty(value).map_err(|e| usage(e.to_string()))?;
        println!("{text}");
        self.write(name, &(text + "\n"))
    }

    /// Prints what would run and where it would write, for `--dry-run`.
    pub fn dry_run<T: Serialize>(&self, subcommand: &str, config: &T, outputs: &[&str]) -> CliResult {
        let files: Vec<String> = outputs.iter().map(|n| self.path(n).display().to_string()).collect();
        let doc = json!({ "subcommand": subcommand, "config": config, "outputs": files });
        println!("{}", serde_json::to_string_pretty(&doc).map_err(|e| usage(e.to_string()))?);
        Ok(())
    }
}

/// Accumulates comma-separated rows; values use shortest round-trip formatting.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: header.join(",") + "\n" }
    }

    pub fn row(&mut self, cells: &[&dyn Display]) {
        let cells: Vec<String> = cells.iter().map(|c| c.to_string()).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Empty cell for absent values.
pub struct Opt(pub Option<f64>);

impl Display for Opt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v}"),
            None => Ok(()),
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("malformed config {}: {e}", path.display())))
}
