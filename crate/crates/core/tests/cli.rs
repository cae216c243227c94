//! End-to-end checks of the `mirdet` binary: exit codes, strict parsing,
//! report formats and reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

use mirdet::report::Report;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn mirdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirdet")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_report(args: &[&str]) -> Report {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    serde_json::from_str(&stdout(&mirdet(&all))).unwrap()
}

#[test]
fn exit_codes() {
    let cfg = |f: &str| fixture(f).to_string_lossy().into_owned();
    assert_eq!(mirdet(&["efficiency", "--config", &cfg("empty.toml")]).status.code(), Some(2));
    assert_eq!(mirdet(&["efficiency", "--config", &cfg("negative_power.toml")]).status.code(), Some(2));
    assert_eq!(mirdet(&["sensitivity", "--config", &cfg("dark_pump.toml")]).status.code(), Some(3));
    assert_eq!(mirdet(&["efficiency", "--config", "/no/such/file.toml"]).status.code(), Some(4));
    assert_eq!(mirdet(&["simulate", "--duration", "0", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(mirdet(&["efficiency", "--scenario", "paper_40C"]).status.code(), Some(2));
    assert_eq!(mirdet(&["noise", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(mirdet(&["bogus"]).status.code(), Some(2));
}

#[test]
fn diagnostics_name_the_field() {
    let o = mirdet(&["efficiency", "--config", fixture("negative_power.toml").to_str().unwrap()]);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("pump.power_mw"), "{err}");
    let o = mirdet(&["simulate", "--duration", "0", "--seed", "1"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--duration"));
}

#[test]
fn strict_mode_rejects_typos() {
    let path = fixture("typo.toml");
    let p = path.to_str().unwrap();
    let strict = mirdet(&["efficiency", "--config", p, "--strict"]);
    assert_eq!(strict.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&strict.stderr).contains("pump.powr_mw"));
    let lenient = mirdet(&["efficiency", "--config", p]);
    assert!(lenient.status.success());
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("powr_mw"));
    let r = json_report(&["efficiency", "--config", p]);
    assert_eq!(r.warnings.len(), 1);
}

#[test]
fn simulate_requires_a_seed() {
    let o = mirdet(&["simulate", "--config", fixture("short_run.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed"));
}

#[test]
fn json_is_stable_and_round_trips() {
    let a = json_report(&["sensitivity", "--scenario", "paper_93C"]);
    let mut b = json_report(&["sensitivity", "--scenario", "paper_93C"]);
    b.generated_at = a.generated_at;
    assert_eq!(a, b);
    let again: Report = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
    assert_eq!(again, a);
    assert!(a.results.iter().all(|q| !q.unit.is_empty()));
}

#[test]
fn text_output_carries_units() {
    let text = stdout(&mirdet(&["efficiency"]));
    for line in text.lines().filter(|l| l.starts_with("  ") && !l.starts_with("  -")) {
        assert!(line.trim_end().ends_with(']'), "no unit: {line}");
    }
}

#[test]
fn echoed_inputs_reproduce_the_results() {
    let first = json_report(&["simulate", "--scenario", "paper_25C", "--seed", "5", "--duration", "30"]);
    let dir = tempfile::tempdir().unwrap();
    let echo = dir.path().join("echo.toml");
    let doc: toml::Value = serde_json::from_value(first.inputs["scenario"].clone()).unwrap();
    std::fs::write(&echo, toml::to_string(&doc).unwrap()).unwrap();
    let second = json_report(&["simulate", "--config", echo.to_str().unwrap(), "--strict"]);
    assert_eq!(first.results, second.results);
    assert_eq!(first.table, second.table);
}

#[test]
fn histogram_csv_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fixture("short_run.toml");
    let outs: Vec<String> = (0..2)
        .map(|i| {
            let out = dir.path().join(format!("h{i}.csv"));
            let o = mirdet(&[
                "simulate", "--config", cfg.to_str().unwrap(), "--seed", "99", "--format", "csv", "--out",
                out.to_str().unwrap(),
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read_to_string(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let mut lines = outs[0].lines();
    assert_eq!(lines.next(), Some("bin_start_ns,bin_end_ns,counts"));
    let starts: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(starts.len(), 60);
    assert!(starts.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn comparison_csv_has_the_catalog_rows() {
    let csv = stdout(&mirdet(&["compare", "--format", "csv"]));
    let mut rdr = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    let table: Vec<(String, f64, f64)> = rows
        .iter()
        .map(|r| (r[0].to_string(), r[1].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    assert_eq!(table[0].1, 0.3);
    assert_eq!(table[0].2, 1.24);
    assert_eq!(table[1].1, 20.0);
    assert_eq!(table[1].2, 223.0);
    assert_eq!(table[2].1, 15.0);
    assert_eq!(table[2].2, 1.63e6);

    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("cat.csv");
    std::fs::write(&cat, "name,timing_ns,snr0_pw,note\nA,1,10,\nB,2,5,x\n").unwrap();
    let r = json_report(&["compare", "--catalog", cat.to_str().unwrap(), "--ours-snr0-pw", "2.5"]);
    let t = r.table.unwrap();
    assert_eq!(t.rows.len(), 2);
    assert_eq!(t.rows[0][0].to_string(), "B");
    assert_eq!(t.rows[0][3].to_string(), "2");
}

#[test]
fn sweep_and_optimize_csv() {
    let csv = stdout(&mirdet(&["sweep", "--param", "crystal.temperature", "--values", "366.15,298.15", "--format", "csv"]));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("crystal.temperature,eta_sfg,eta_tot,n_bg_hz,snr0_pw,flags"));
    let bg: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert!(bg[1] > bg[0]);
    assert_eq!(mirdet(&["sweep", "--param", "pump.colour", "--values", "1"]).status.code(), Some(2));
    let csv = stdout(&mirdet(&["optimize", "--powers", "0.063,1", "--format", "csv"]));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn tabulated_filter_scenario() {
    let r = json_report(&["noise", "--config", fixture("tabulated_filter.toml").to_str().unwrap(), "--strict"]);
    let predicted = r.get("background_rate_at_measured_eta").unwrap();
    // the trapezoid band is 160 GHz flat plus two 10 GHz ramps
    assert!((predicted / 17.9 - 170.0 / 160.0).abs() < 0.02, "{predicted}");
}

#[test]
fn paper_reports() {
    let r = json_report(&["efficiency", "--scenario", "paper_25C"]);
    assert!((2.3..=2.5).contains(&r.get("theory_gap").unwrap()));
    let r = json_report(&["sensitivity", "--scenario", "paper_25C"]);
    assert!((r.get("snr0").unwrap() / 1.042 - 1.0).abs() < 0.005);
    assert!(r.notes.iter().any(|n| n.contains("discrepancy")));
}
