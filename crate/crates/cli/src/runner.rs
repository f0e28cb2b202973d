//! The `run` verb: solve every row element, store it, then analyze.

use std::fs;
use std::path::Path;
use std::time::Instant;

use hprow_core::hp::row_sequence;
use hprow_core::roots::{roots, RootOptions};
use rayon::prelude::*;

use crate::analysis::{self, Reports};
use crate::config::RunConfig;
use crate::record::{record_file, write_json, Manifest, RecordEntry, RowRecord, RowStatus, RunDir, RunSummary, Versions, SCHEMA_VERSION};

/// Row elements and their zeros for every n in the configured range.
pub fn compute_records(cfg: &RunConfig) -> anyhow::Result<Vec<RowRecord>> {
    let prec = cfg.precision_bits;
    let system = cfg.system()?;
    let rows = row_sequence(&system, cfg.range(), cfg.normalization, cfg.method, prec);
    Ok(rows
        .into_par_iter()
        .map(|(n, r)| {
            let status = match r {
                Ok(a) => {
                    let (zeros, zeros_error) = if a.denominator.is_unique() {
                        match roots(a.q(), prec, RootOptions::default()) {
                            Ok(z) => (Some(z), None),
                            Err(e) => (None, Some(e.to_string())),
                        }
                    } else {
                        (None, None)
                    };
                    RowStatus::Ok {
                        approximant: Box::new(a),
                        zeros,
                        zeros_error,
                    }
                }
                Err(e) => RowStatus::Failed { error: e.to_string() },
            };
            RowRecord {
                schema_version: SCHEMA_VERSION,
                n,
                status,
            }
        })
        .collect())
}

pub fn summarize(records: &[RowRecord], reports: &Reports) -> RunSummary {
    let mut s = RunSummary {
        rows: records.len(),
        ..RunSummary::default()
    };
    for r in records {
        match r.approximant() {
            None => s.failed.push(r.n),
            Some(a) => {
                if !a.denominator.is_unique() {
                    s.non_unique.push(r.n);
                }
                if a.denominator.exact_path {
                    s.exact_path += 1;
                }
            }
        }
    }
    for rep in &reports.incomplete {
        s.terminated.insert(
            rep.component,
            rep.records.iter().filter(|r| r.terminated).map(|r| r.n).collect(),
        );
    }
    s
}

/// Replace reports/ with the given set.
pub fn write_reports(root: &Path, reports: &Reports) -> anyhow::Result<Vec<String>> {
    let dir = RunDir::reports_dir(root);
    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::create_dir_all(&dir)?;
    let mut names = Vec::new();
    for (name, text) in reports.files()? {
        fs::write(dir.join(&name), text)?;
        names.push(name);
    }
    Ok(names)
}

pub struct RunOutcome {
    pub records: Vec<RowRecord>,
    pub reports: Reports,
}

/// Compute, analyze and write a run. records/ and reports/ under the output
/// directory are replaced; other files there are left alone.
pub fn run(cfg: &RunConfig, source: &str) -> anyhow::Result<RunOutcome> {
    let start = Instant::now();
    let root = cfg.output_dir.as_path();
    let records = compute_records(cfg)?;
    let reports = analysis::analyze(cfg, &records)?;

    let rec_dir = RunDir::records_dir(root);
    if rec_dir.exists() {
        fs::remove_dir_all(&rec_dir)?;
    }
    fs::create_dir_all(&rec_dir)?;
    let mut index = Vec::with_capacity(records.len());
    for r in &records {
        let file = record_file(r.n);
        write_json(&rec_dir.join(&file), r)?;
        index.push(RecordEntry {
            n: r.n,
            file,
            ok: r.approximant().is_some(),
        });
    }
    let report_names = write_reports(root, &reports)?;
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        config_source: source.to_string(),
        config: cfg.clone(),
        records: index,
        reports: report_names,
        summary: summarize(&records, &reports),
        versions: Versions {
            hprow: env!("CARGO_PKG_VERSION").to_string(),
            hprow_core: hprow_core::VERSION.to_string(),
        },
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    write_json(&root.join("manifest.json"), &manifest)?;
    Ok(RunOutcome { records, reports })
}
