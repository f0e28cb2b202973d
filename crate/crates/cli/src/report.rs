//! The `report` verb: re-derive analyses from stored records, or export them
//! as CSV tables or plot data.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use hprow_core::num::ln_f64;
use hprow_core::trajectory::{ordered_distances, Window};
use hprow_core::Complex;
use serde::Deserialize;

use crate::analysis::{self, Outcome, Reports};
use crate::record::{collected, RunDir, SchemaError};
use crate::runner::write_reports;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Recompute reports/*.json from the records.
    Json,
    /// Tables under csv/.
    Csv,
    /// One whitespace-separated file per trajectory under plot/.
    Plotdata,
}

fn read_opt<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Option<T>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| SchemaError(format!("{}: {e}", path.display())).into())
}

impl Reports {
    /// Read whatever report files a run directory holds.
    pub fn load(root: &Path) -> anyhow::Result<Reports> {
        let dir = RunDir::reports_dir(root);
        let mut incomplete = Vec::new();
        if dir.exists() {
            let mut names: Vec<PathBuf> = fs::read_dir(&dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    p.file_name()
                        .and_then(|s| s.to_str())
                        .is_some_and(|s| s.starts_with("incomplete_k") && s.ends_with(".json"))
                })
                .collect();
            names.sort();
            for p in names {
                incomplete.extend(read_opt(&p)?);
            }
            incomplete.sort_by_key(|r: &analysis::IncompleteReport| r.component);
        }
        Ok(Reports {
            trajectories: read_opt(&dir.join("trajectories.json"))?,
            detect: read_opt(&dir.join("detect.json"))?,
            attraction: read_opt(&dir.join("attraction.json"))?,
            incomplete,
            suetin: read_opt(&dir.join("suetin.json"))?,
            combos: read_opt(&dir.join("combos.json"))?,
            lattice: read_opt(&dir.join("lattice.json"))?,
            evidence: read_opt(&dir.join("evidence.json"))?,
        })
    }
}

fn c(z: &Complex) -> (f64, f64) {
    z.to_c64()
}

fn root_n(x: &rug::Float, n: usize) -> f64 {
    if x.is_zero() {
        0.0
    } else {
        (ln_f64(x) / n as f64).exp()
    }
}

fn csv_tables(dir: &RunDir, reports: &Reports, out: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(out)?;
    let col = collected(&dir.records);
    let roots_by_n = col.root_map();

    let mut w = csv::Writer::from_path(out.join("zeros.csv"))?;
    w.write_record(["n", "re", "im", "abs"])?;
    for (n, zs) in &roots_by_n {
        for z in zs {
            let (re, im) = c(z);
            w.serialize((n, re, im, re.hypot(im)))?;
        }
    }
    w.flush()?;

    if let Some(Outcome::Ok(t)) = &reports.trajectories {
        let mut w = csv::Writer::from_path(out.join("trajectories.csv"))?;
        w.write_record(["trajectory", "n", "re", "im", "abs"])?;
        for tr in &t.trajectories {
            for (n, z) in &tr.path {
                let (re, im) = c(z);
                w.serialize((tr.id, n, re, im, re.hypot(im)))?;
            }
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(out.join("limits.csv"))?;
        w.write_record(["re", "im", "radius", "multiplicity", "lambda_hat", "mu_hat"])?;
        for l in &t.limits {
            let (re, im) = c(&l.limit.location);
            w.serialize((re, im, l.limit.radius, l.limit.multiplicity(), l.lambda_mu.lambda_hat, l.lambda_mu.mu_hat))?;
        }
        w.flush()?;

        // Ordered distances nu = 1, 2, ... to each limit over every n.
        let first = roots_by_n.keys().next().copied().unwrap_or(0);
        let last = roots_by_n.keys().next_back().copied().unwrap_or(0);
        let all = Window { start: first, end: last };
        let mut w = csv::Writer::from_path(out.join("distances.csv"))?;
        w.write_record(["limit", "nu", "n", "distance"])?;
        for (i, l) in t.limits.iter().enumerate() {
            for (nu, series) in ordered_distances(&roots_by_n, &l.limit.location, all).iter().enumerate() {
                for (n, d) in series {
                    w.serialize((i, nu + 1, n, d.to_f64()))?;
                }
            }
        }
        w.flush()?;
    }

    if let Some(Outcome::Ok(d)) = &reports.detect {
        let mut w = csv::Writer::from_path(out.join("detect.csv"))?;
        w.write_record(["re", "im", "radius", "tau_hat", "lambda_hat", "mu_hat", "members", "theta_contrib"])?;
        for p in &d.candidates {
            let (re, im) = c(&p.location);
            w.serialize((re, im, p.radius, p.tau_hat, p.lambda_hat, p.mu_hat, p.members, p.theta_contrib))?;
        }
        w.flush()?;
    }

    for inc in &reports.incomplete {
        let reg = inc.regularization.value();
        let mut w = csv::Writer::from_path(out.join(format!("incomplete_k{}.csv", inc.component)))?;
        w.write_record(["n", "abs_a", "abs_a_root_n", "alpha_star_scaled", "envelope_root_n", "contact", "terminated", "qstar_zeros"])?;
        for r in &inc.records {
            let a = r.a_abs();
            let zeros: Vec<String> = r
                .qstar_zeros
                .iter()
                .map(|z| {
                    let (re, im) = c(z);
                    format!("{re:+.12e}{im:+.12e}i")
                })
                .collect();
            let alpha = reg.and_then(|g| g.alpha_star(r.n)).map(|x| x.to_string()).unwrap_or_default();
            // (alpha*_n)^(1/n) / r majorizes |A_n|^(1/n) and meets it at contacts.
            let envelope = reg
                .and_then(|g| g.log_alpha_star.get(&r.n).map(|l| (l / r.n as f64).exp() / g.scale_r))
                .map(|x| x.to_string())
                .unwrap_or_default();
            let contact = reg.is_some_and(|g| g.is_contact(r.n));
            w.serialize((r.n, a.to_f64(), root_n(&a, r.n), alpha, envelope, contact, r.terminated, zeros.join(";")))?;
        }
        w.flush()?;
    }
    Ok(())
}

fn plotdata(dir: &RunDir, reports: &Reports, out: &Path) -> anyhow::Result<()> {
    let Some(Outcome::Ok(t)) = &reports.trajectories else {
        anyhow::bail!("no trajectory report in {}", dir.root.display());
    };
    fs::create_dir_all(out)?;
    for tr in &t.trajectories {
        // Distance to the limit the trajectory joined, else to its last point.
        let target = t
            .limits
            .iter()
            .find(|l| l.limit.members.contains(&tr.id))
            .map(|l| l.limit.location.clone())
            .or_else(|| tr.path.values().next_back().cloned());
        let mut text = String::from("# n re im dist\n");
        for (n, z) in &tr.path {
            let (re, im) = c(z);
            let d = target.as_ref().map_or(f64::NAN, |t| z.dist(t).to_f64());
            text.push_str(&format!("{n} {re:.17e} {im:.17e} {d:.17e}\n"));
        }
        fs::write(out.join(format!("trajectory_{:03}.dat", tr.id)), text)?;
    }
    Ok(())
}

/// Returns the reports in effect after the command.
pub fn report(root: &Path, format: Format) -> anyhow::Result<Reports> {
    let dir = RunDir::load(root)?;
    match format {
        Format::Json => {
            let reports = analysis::analyze(&dir.manifest.config, &dir.records)?;
            write_reports(root, &reports)?;
            Ok(reports)
        }
        Format::Csv => {
            let reports = Reports::load(root)?;
            csv_tables(&dir, &reports, &root.join("csv"))?;
            Ok(reports)
        }
        Format::Plotdata => {
            let reports = Reports::load(root)?;
            plotdata(&dir, &reports, &root.join("plot"))?;
            Ok(reports)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config;
    use crate::runner::compute_records;

    #[test]
    fn reports_round_trip_byte_identically() {
        let cfg = config::parse(
            r#"
[system]
series = ["1/(z-1) + log(1 - z/2)"]
m = [1]

[run]
n_range = [6, 36]
precision_bits = 192
output_dir = "unused"

[analyses]
detect = true
incomplete = {}
known_poles = [{ zeta = [1.0, 0.0], tau = 1 }]
"#,
        )
        .unwrap();
        let reports = analysis::analyze(&cfg, &compute_records(&cfg).unwrap()).unwrap();
        let tmp = tempfile::tempdir().unwrap();
        write_reports(tmp.path(), &reports).unwrap();
        let loaded = Reports::load(tmp.path()).unwrap();
        let (a, b) = (reports.files().unwrap(), loaded.files().unwrap());
        assert_eq!(a.iter().map(|x| &x.0).collect::<Vec<_>>(), b.iter().map(|x| &x.0).collect::<Vec<_>>());
        for ((name, x), (_, y)) in a.iter().zip(&b) {
            if let Some((i, (l, r))) = x.lines().zip(y.lines()).enumerate().find(|(_, (l, r))| l != r) {
                panic!("{name} line {}: {l} vs {r}", i + 1);
            }
            assert_eq!(x, y, "{name}");
        }
    }
}
