use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_absorbing-walk"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    parse_csv(&std::fs::read_to_string(path).unwrap())
}

#[test]
fn survival_without_sink_is_one() {
    let (header, rows) = parse_csv(&run_ok(&["survival", "--kappa", "0", "--s0", "8", "--t-max", "30", "--dt", "0.5"]));
    assert_eq!(header, ["t", "S", "F"]);
    assert_eq!(rows.len(), 61);
    for row in rows {
        assert!((row[1] - 1.0).abs() < 1e-10);
        assert_eq!(row[2], 0.0);
    }
}

#[test]
fn dual_couplings_share_late_survival() {
    let last = |kappa: &str, t_max: &str| {
        let (_, rows) = parse_csv(&run_ok(&["survival", "--kappa", kappa, "--s0", "8", "--t-max", t_max, "--dt", t_max]));
        rows.last().unwrap()[1]
    };
    let gaps: Vec<f64> = ["30", "60", "120"].iter().map(|t| (last("0.25", t) - last("4", t)).abs()).collect();
    assert!(gaps[0] < 2e-2);
    assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
}

#[test]
fn first_passage_peaks_at_ballistic_arrival() {
    let (_, rows) = parse_csv(&run_ok(&["survival", "--kappa", "1", "--s0", "8", "--t-max", "30", "--dt", "0.01"]));
    let peak = rows.iter().max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();
    assert!((peak[0] - 8.0).abs() <= 3.0, "peak at t = {}", peak[0]);
}

#[test]
fn pabs_table() {
    let (header, rows) = parse_csv(&run_ok(&["pabs", "--s0", "8", "--eta-list", "0,0.1,0.25,2,10"]));
    assert_eq!(header, ["s0", "eta", "pabs", "pabs_dual"]);
    assert_eq!(rows[0][2], 0.0);
    for row in &rows {
        assert_eq!(row[0], 8.0);
        assert!((row[2] - row[3]).abs() < 1e-12);
    }
    let (_, rows) = parse_csv(&run_ok(&["pabs", "--s0", "200", "--eta-list", "1"]));
    assert!((rows[0][2] - 0.3634).abs() < 1e-4);
}

#[test]
fn wigner_snapshots() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("snaps");
    run_ok(&["wigner", "--kappa", "1.5", "--s0", "3", "--snapshots", "0,4", "--output", out.to_str().unwrap()]);

    // t = 0: only m = 2 s0 carries weight.
    let (header, rows) = read_csv(&out.join("wigner_000.csv"));
    assert_eq!(header, ["m", "x_c", "k", "W_total", "W_cc", "W_cpPluspc", "W_pp"]);
    for row in &rows {
        assert_eq!(row[1], row[0] / 2.0);
        if row[0] != 6.0 {
            assert!(row[3].abs() < 1e-14);
        }
    }

    // Trace against the survival table.
    let (_, rows) = read_csv(&out.join("wigner_001.csv"));
    let k_nodes = rows.iter().filter(|r| r[0] == 2.0).count();
    let trace: f64 = rows.iter().map(|r| r[3]).sum::<f64>() * 2.0 * PI / k_nodes as f64;
    let (_, s) = parse_csv(&run_ok(&["survival", "--kappa", "1.5", "--s0", "3", "--t-max", "4", "--dt", "4"]));
    assert!((trace - s[1][1]).abs() < 1e-8);

    // Pole channel: even-m k-marginals fall by η^-2 per two steps in m.
    let (header, rows) = read_csv(&out.join("pole_001.csv"));
    assert_eq!(header, ["m", "x_c", "k", "W_pp"]);
    let marginal = |m: f64| rows.iter().filter(|r| r[0] == m).map(|r| r[3]).sum::<f64>() * 2.0 * PI / k_nodes as f64;
    for m in [2.0, 4.0, 6.0, 8.0] {
        let slope = (marginal(m + 2.0) / marginal(m)).ln() / 2.0;
        assert!((slope + 1.5f64.ln()).abs() < 1e-10, "m={m}: {slope}");
    }
}

#[test]
fn weak_wigner_has_no_pole_file() {
    let dir = tempdir().unwrap();
    run_ok(&["wigner", "--kappa", "0.5", "--snapshots", "2", "--m-max", "10", "--k-nodes", "21", "--output", dir.path().to_str().unwrap()]);
    let (header, rows) = read_csv(&dir.path().join("wigner_000.csv"));
    assert_eq!(header, ["m", "x_c", "k", "W_total", "W_DD", "W_DBplusBD", "W_BB"]);
    assert_eq!(rows.len(), 9 * 21);
    assert!(!dir.path().join("pole_000.csv").exists());
}

#[test]
fn output_is_deterministic() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("run.json");
    let args = ["survival", "--kappa", "2", "--t-max", "5", "--format", "json", "--output", path.to_str().unwrap()];
    run_ok(&args);
    let first = std::fs::read(&path).unwrap();
    run_ok(&args);
    assert_eq!(first, std::fs::read(&path).unwrap());
    let csv_args = ["wigner", "--kappa", "1.5", "--snapshots", "2", "--output", dir.path().to_str().unwrap()];
    run_ok(&csv_args);
    let first = std::fs::read(dir.path().join("wigner_000.csv")).unwrap();
    run_ok(&csv_args);
    assert_eq!(first, std::fs::read(dir.path().join("wigner_000.csv")).unwrap());
}

#[test]
fn json_layout_and_precision() {
    let text = run_ok(&["survival", "--kappa", "0.3", "--t-max", "1", "--dt", "0.5", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["config"]["kappa"], 0.3);
    let data = doc["data"].as_array().unwrap();
    assert_eq!(data.len(), 3);
    assert!(text.contains("\"t\": 5.0000000000000000e-1"));
    for row in data {
        assert!(row["S"].is_number() && row["F"].is_number());
    }
}

#[test]
fn config_file_with_overrides() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"s0": 5, "kappa": 0.7, "t_max": 2.0, "dt": 1.0, "format": "json"}"#).unwrap();
    let text = run_ok(&["survival", "--config", cfg.to_str().unwrap(), "--kappa", "0.9"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["config"]["s0"], 5);
    assert_eq!(doc["config"]["kappa"], 0.9);
    assert_eq!(doc["data"].as_array().unwrap().len(), 3);

    std::fs::write(&cfg, r#"{"s0": 5, "bogus": 1}"#).unwrap();
    let out = bin().args(["survival", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["survival", "--dt", "0"]), Some(1));
    assert_eq!(code(&["survival", "--omega=-1"]), Some(1));
    assert_eq!(code(&["survival", "--s0", "nope"]), Some(1));
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["wigner"]), Some(1));
    assert_eq!(code(&["survival", "--output", "/nonexistent/dir/out.csv"]), Some(1));
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["verify", "--level", "quick"]), Some(0));
}

#[test]
fn verify_json_report() {
    let text = run_ok(&["verify", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["passed"], true);
    assert_eq!(doc["criteria"].as_array().unwrap().len(), 11);
}

#[test]
fn library_entry_point_matches_binary() {
    assert_eq!(absorbing_walk::cli::run(["absorbing-walk", "pabs", "--eta-list=-1"]), 1);
    let dir = tempdir().unwrap();
    let report = dir.path().join("verify.txt");
    assert_eq!(absorbing_walk::cli::run(["absorbing-walk", "verify", "--output", report.to_str().unwrap()]), 0);
    assert_eq!(std::fs::read_to_string(&report).unwrap().lines().filter(|l| l.contains("[PASS]")).count(), 11);
}
