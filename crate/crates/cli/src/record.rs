//! On-disk layout of a run directory.
//!
//! ```text
//! <output_dir>/manifest.json
//! <output_dir>/records/n_00042.json
//! <output_dir>/reports/<name>.json
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use hprow_core::hp::HPApproximant;
use hprow_core::roots::RootSet;
use hprow_core::trajectory::Collected;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// One row element and its zeros.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RowRecord {
    pub schema_version: u32,
    pub n: usize,
    #[serde(flatten)]
    pub status: RowStatus,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RowStatus {
    Ok {
        approximant: Box<HPApproximant>,
        /// Absent when the kernel is not one-dimensional.
        zeros: Option<RootSet>,
        zeros_error: Option<String>,
    },
    Failed {
        error: String,
    },
}

impl RowRecord {
    pub fn approximant(&self) -> Option<&HPApproximant> {
        match &self.status {
            RowStatus::Ok { approximant, .. } => Some(approximant),
            RowStatus::Failed { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecordEntry {
    pub n: usize,
    pub file: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Versions {
    pub hprow: String,
    pub hprow_core: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub config_source: String,
    pub config: RunConfig,
    pub records: Vec<RecordEntry>,
    pub reports: Vec<String>,
    pub summary: RunSummary,
    pub versions: Versions,
    pub wall_time_secs: f64,
}

/// Counts a reader wants before opening any record.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunSummary {
    pub rows: usize,
    pub failed: Vec<usize>,
    pub non_unique: Vec<usize>,
    /// Rows whose kernel came from the exact path.
    pub exact_path: usize,
    /// Per component, the n at which the incomplete difference vanished
    /// exactly. Nonempty only for rational components.
    pub terminated: BTreeMap<usize, Vec<usize>>,
}

/// A schema or layout problem, as opposed to a numeric one.
#[derive(Debug)]
pub struct SchemaError(pub String);

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for SchemaError {}

pub fn record_file(n: usize) -> String {
    format!("n_{n:05}.json")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| SchemaError(format!("{}: {e}", path.display())).into())
}

pub struct RunDir {
    pub root: PathBuf,
    pub manifest: Manifest,
    pub records: Vec<RowRecord>,
}

impl RunDir {
    pub fn records_dir(root: &Path) -> PathBuf {
        root.join("records")
    }

    pub fn reports_dir(root: &Path) -> PathBuf {
        root.join("reports")
    }

    pub fn load(root: &Path) -> anyhow::Result<RunDir> {
        let value: serde_json::Value = read_json(&root.join("manifest.json"))?;
        let version = value.get("schema_version").and_then(|v| v.as_u64());
        if version != Some(SCHEMA_VERSION as u64) {
            bail!(SchemaError(format!(
                "manifest schema version {version:?}, this build reads {SCHEMA_VERSION}"
            )));
        }
        let manifest: Manifest =
            serde_json::from_value(value).map_err(|e| SchemaError(format!("manifest.json: {e}")))?;
        let mut records = Vec::with_capacity(manifest.records.len());
        let mut bad = Vec::new();
        for entry in &manifest.records {
            let path = Self::records_dir(root).join(&entry.file);
            if !path.exists() {
                bad.push(format!("{}: missing", entry.file));
                continue;
            }
            match read_json::<RowRecord>(&path) {
                Ok(rec) if rec.schema_version == SCHEMA_VERSION && rec.n == entry.n => records.push(rec),
                Ok(_) => bad.push(format!("{}: does not match the manifest", entry.file)),
                Err(e) => bad.push(format!("{e:#}")),
            }
        }
        if !bad.is_empty() {
            bail!(SchemaError(format!("{} bad record(s):\n  {}", bad.len(), bad.join("\n  "))));
        }
        Ok(RunDir {
            root: root.to_path_buf(),
            manifest,
            records,
        })
    }
}

/// Successful row elements in increasing n.
pub fn approximants(records: &[RowRecord]) -> Vec<HPApproximant> {
    records.iter().filter_map(|r| r.approximant().cloned()).collect()
}

/// The zero sets as the trajectory analysis expects them.
pub fn collected(records: &[RowRecord]) -> Collected {
    let mut out = Collected::default();
    for r in records {
        match &r.status {
            RowStatus::Ok { approximant, zeros, zeros_error } => {
                if !approximant.denominator.is_unique() {
                    out.non_unique.push(r.n);
                } else if let Some(z) = zeros {
                    out.roots.insert(r.n, z.clone());
                } else if let Some(e) = zeros_error {
                    out.failures.insert(r.n, e.clone());
                }
            }
            RowStatus::Failed { error } => {
                out.failures.insert(r.n, error.clone());
            }
        }
    }
    out
}

pub fn failed_rows(records: &[RowRecord]) -> BTreeMap<usize, String> {
    records
        .iter()
        .filter_map(|r| match &r.status {
            RowStatus::Failed { error } => Some((r.n, error.clone())),
            _ => None,
        })
        .collect()
}
