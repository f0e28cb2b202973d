use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SMALL: &str = r#"
[system]
series = ["1/(z-1) + 1/(z-2)"]
m = [1]

[run]
n_range = [10, 40]
precision_bits = 192
output_dir = "unused"

[analyses]
detect = true
incomplete = {}
known_poles = [{ zeta = [1.0, 0.0], tau = 1 }]
"#;

fn hprow(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hprow"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("HPROW_THREADS", t);
    }
    cmd.output().expect("spawn hprow")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, body).unwrap();
    p
}

fn run_into(cfg: &Path, out: &Path, threads: Option<&str>) -> Output {
    hprow(&["run", cfg.to_str().unwrap(), "--output-dir", out.to_str().unwrap()], threads)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files_in(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn config_error_reports_line_and_column() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SMALL.replace("1/(z-2)\"", "1/(z-2\""));
    let o = run_into(&cfg, &tmp.path().join("out"), None);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("line 3, column"), "{}", stderr(&o));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn range_below_row_start_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SMALL.replace("m = [1]", "m = [12]"));
    let o = run_into(&cfg, &tmp.path().join("out"), None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("below max m_k = 12"), "{}", stderr(&o));
}

#[test]
fn unknown_key_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SMALL.replace("detect = true", "detekt = true"));
    let o = run_into(&cfg, &tmp.path().join("out"), None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 12, column 1"), "{}", stderr(&o));
}

#[test]
fn run_writes_manifest_records_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    let o = run_into(&cfg, &out, None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(fs::read_dir(out.join("records")).unwrap().count(), 31);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["schema_version"], 1);
    assert_eq!(manifest["config"]["n_range"], serde_json::json!([10, 40]));
    assert_eq!(manifest["config_source"].as_str().unwrap(), SMALL);
    let detect: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("reports/detect.json")).unwrap()).unwrap();
    let cands = detect["ok"]["candidates"].as_array().unwrap();
    assert_eq!(cands.len(), 1);
    let attraction: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("reports/attraction.json")).unwrap()).unwrap();
    assert_eq!(attraction[0]["pass"], true);
}

#[test]
fn runs_are_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    assert_eq!(run_into(&cfg, &a, Some("1")).status.code(), Some(0));
    assert_eq!(run_into(&cfg, &b, Some("4")).status.code(), Some(0));
    for sub in ["records", "reports"] {
        assert!(files_in(&a.join(sub)) == files_in(&b.join(sub)), "{sub} differ");
    }
}

#[test]
fn report_json_regenerates_identical_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    assert_eq!(run_into(&cfg, &out, None).status.code(), Some(0));
    let before = files_in(&out.join("reports"));
    let o = hprow(&["report", out.to_str().unwrap(), "--format", "json"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(before == files_in(&out.join("reports")));
}

#[test]
fn csv_and_plot_exports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    assert_eq!(run_into(&cfg, &out, None).status.code(), Some(0));
    let d = out.to_str().unwrap();
    assert_eq!(hprow(&["report", d, "--format", "csv"], None).status.code(), Some(0));
    assert_eq!(hprow(&["report", d, "--format", "plotdata"], None).status.code(), Some(0));

    let mut rdr = csv::Reader::from_path(out.join("csv/incomplete_k0.csv")).unwrap();
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "n");
    assert_eq!(&headers[1], "abs_a");
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (root_n, env, contact) = (col("abs_a_root_n"), col("envelope_root_n"), col("contact"));
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(rows.len() >= 25);
    let mut contacts = 0;
    for r in &rows {
        if r[env].is_empty() {
            continue;
        }
        let (a, e): (f64, f64) = (r[root_n].parse().unwrap(), r[env].parse().unwrap());
        assert!(e >= a * (1.0 - 1e-12), "n = {}: {e} < {a}", &r[0]);
        if &r[contact] == "true" {
            contacts += 1;
            assert!((e / a - 1.0).abs() < 1e-9, "n = {}", &r[0]);
        }
    }
    assert!(contacts >= 2);
    let zeros = fs::read_to_string(out.join("csv/zeros.csv")).unwrap();
    assert_eq!(zeros.lines().count(), 32);

    let plots: Vec<_> = fs::read_dir(out.join("plot")).unwrap().collect();
    assert!(!plots.is_empty());
    let text = fs::read_to_string(out.join("plot/trajectory_000.dat")).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split_whitespace().map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 40.0);
    assert!(last[3] < 1e-6, "{text}");
}

#[test]
fn verify_accepts_a_run_and_rejects_tampering() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    assert_eq!(run_into(&cfg, &out, None).status.code(), Some(0));
    let d = out.to_str().unwrap();
    let o = hprow(&["verify", d], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    // Swap two rows' denominators: q_20 no longer interpolates at n = 30.
    let p20 = out.join("records/n_00020.json");
    let p30 = out.join("records/n_00030.json");
    let mut r30: serde_json::Value = serde_json::from_str(&fs::read_to_string(&p30).unwrap()).unwrap();
    let r20: serde_json::Value = serde_json::from_str(&fs::read_to_string(&p20).unwrap()).unwrap();
    r30["approximant"]["denominator"]["q"] = r20["approximant"]["denominator"]["q"].clone();
    fs::write(&p30, serde_json::to_string_pretty(&r30).unwrap()).unwrap();
    let o = hprow(&["verify", d], None);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("n=30: interpolation residual"), "{}", stderr(&o));

    let manifest = out.join("manifest.json");
    let text = fs::read_to_string(&manifest).unwrap().replace("\"schema_version\": 1", "\"schema_version\": 99");
    fs::write(&manifest, text).unwrap();
    let o = hprow(&["verify", d], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("schema version"));
}

#[test]
fn short_window_is_a_hypothesis_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SMALL.replace("[10, 40]", "[4, 12]"));
    let o = run_into(&cfg, &tmp.path().join("out"), None);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("window too short"));
}

#[test]
fn missing_run_directory_is_not_a_schema_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = hprow(&["verify", tmp.path().join("nope").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn rational_runs_note_exact_termination() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SMALL
        .replace("1/(z-1) + 1/(z-2)", "1/((z-1)(z-2))")
        .replace("m = [1]", "m = [2]")
        .replace("[10, 40]", "[4, 20]")
        .replace("precision_bits = 192", "precision_bits = 192\nmethod = \"exact\"");
    let cfg = write_config(tmp.path(), &body);
    let out = tmp.path().join("out");
    let o = run_into(&cfg, &out, None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let summary = &manifest["summary"];
    assert_eq!(summary["rows"], 17);
    assert_eq!(summary["exact_path"], 17);
    assert!(summary["failed"].as_array().unwrap().is_empty());
    let terminated = summary["terminated"]["0"].as_array().unwrap();
    assert!(!terminated.is_empty(), "{summary}");
}

#[test]
fn every_bad_record_is_listed() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL);
    let out = tmp.path().join("out");
    assert_eq!(run_into(&cfg, &out, None).status.code(), Some(0));
    fs::remove_file(out.join("records/n_00012.json")).unwrap();
    fs::write(out.join("records/n_00033.json"), "{ not json").unwrap();
    let o = hprow(&["report", out.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("2 bad record(s)"), "{err}");
    assert!(err.contains("n_00012.json: missing") && err.contains("n_00033.json"), "{err}");
}

#[test]
fn shared_pole_config_plots_a_fast_and_a_slow_trajectory() {
    let tmp = tempfile::tempdir().unwrap();
    let src = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/shared_pole.toml")).unwrap();
    let cfg = write_config(tmp.path(), &src);
    let out = tmp.path().join("out");
    let o = run_into(&cfg, &out, None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(hprow(&["report", out.to_str().unwrap(), "--format", "plotdata"], None).status.code(), Some(0));
    let mut files: Vec<PathBuf> = fs::read_dir(out.join("plot")).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert_eq!(files.len(), 2, "{files:?}");
    let final_dist = |p: &Path| -> f64 {
        let text = fs::read_to_string(p).unwrap();
        text.lines().last().unwrap().split_whitespace().nth(3).unwrap().parse().unwrap()
    };
    let mut d: Vec<f64> = files.iter().map(|p| final_dist(p)).collect();
    d.sort_by(f64::total_cmp);
    // Both zeros approach z = 1, one geometrically and one like 1/n.
    assert!(d[0] < 1e-10 && d[1] > 1e-4 && d[1] < 0.5, "{d:?}");
}
