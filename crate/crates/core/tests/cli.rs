// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use oisd_lab::cli::{cmd_verify, verify_plan, Fault, RunConfig};

const SMALL: &[&str] = &["--spin-halfwidth", "6", "--fock-cutoff", "12", "--margin-spin", "3", "--margin-fock", "6"];

fn oisd(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oisd")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k]).collect()
}

#[test]
fn list_prints_every_planned_check() {
    let dir = tempfile::tempdir().unwrap();
    let o = oisd(&["list"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let plan = verify_plan(&RunConfig::default());
    assert_eq!(text.lines().count(), plan.len());
    for (line, (name, tag)) in text.lines().zip(&plan) {
        assert_eq!(line, format!("{name}\t{tag}"));
    }
    let same = oisd(&["verify", "--list"], dir.path());
    assert_eq!(stdout(&same), text);
}

#[test]
fn configuration_errors_exit_two_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = oisd(&["evolve", "--gamma", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma"));

    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "# comment\nsigma = 0.5\npoints = many\n").unwrap();
    let o = oisd(&["evolve", "--config", conf.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("points"));

    let o = oisd(&["spectrum", "--fock-cutoff", "8"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("margin"));
}

#[test]
fn verify_plan_matches_the_executed_checks() {
    let cfg = RunConfig::default();
    let report = cmd_verify(&cfg, None).unwrap();
    let executed: Vec<&str> = report.checks.iter().map(|c| c.name.as_str()).collect();
    let planned: Vec<String> = verify_plan(&cfg).into_iter().map(|(n, _)| n).collect();
    assert_eq!(executed, planned);
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    assert!(failed.is_empty(), "failing checks: {failed:?}");
}

#[test]
fn injected_fault_is_caught_by_the_decoupling_checks() {
    let report = cmd_verify(&RunConfig::default(), Some(Fault::NegatedSpinRate)).unwrap();
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|n| n.starts_with("decoupling/")), "{failed:?}");
    assert!(failed.iter().any(|n| n.starts_with("decoupling/sigma=")));
}

#[test]
fn injected_fault_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["verify", "--inject-fault", "negated-spin-rate", "--format", "csv"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(&["--identity-halfwidth", "4", "--identity-cutoff", "4", "--instances", "2"]);
    let o = oisd(&args, dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().any(|l| l.starts_with("FAIL decoupling/sigma=")));
    assert!(dir.path().join("verify-checks.csv").exists());
}

#[test]
fn evolve_without_coupling_relaxes_to_the_thermal_occupation() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "evolve",
        "--lambda",
        "0",
        "--j",
        "0.5",
        "--t-end",
        "20",
        "--points",
        "9",
        "--format",
        "csv,json,svg",
        "--spin-halfwidth",
        "4",
        "--fock-cutoff",
        "20",
        "--margin-spin",
        "2",
        "--margin-fock",
        "10",
    ];
    let o = oisd(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let (header, rows) = read_csv(&dir.path().join("evolve.csv"));
    let n = column(&header, &rows, "mean_n");
    let trace = column(&header, &rows, "trace");
    let t = column(&header, &rows, "t");
    assert_eq!(t[0], 0.0);
    assert!(trace.iter().all(|&x| (x - 1.0).abs() < 1e-10));
    assert!((n[n.len() - 1] - 0.5).abs() < 1e-3, "final ⟨N⟩ = {}", n[n.len() - 1]);
    let gaps: Vec<f64> = n.iter().map(|x| (x - 0.5).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{gaps:?}");
    let svg = fs::read_to_string(dir.path().join("evolve.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("evolve-report.json")).unwrap()).unwrap();
    assert_eq!(json["command"], "evolve");
    assert_eq!(json["environment"]["seed"], 20260101);
}

#[test]
fn spectrum_matches_at_zero_temperature() {
    let dir = tempfile::tempdir().unwrap();
    let o = oisd(
        &[
            "spectrum",
            "--j",
            "0",
            "--fock-cutoff",
            "12",
            "--margin-fock",
            "3",
            "--margin-spin",
            "3",
            "--spin-halfwidth",
            "6",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let (header, rows) = read_csv(&dir.path().join("spectrum.csv"));
    assert_eq!(rows.len(), 49);
    let dev = column(&header, &rows, "deviation");
    assert!(dev.iter().all(|&d| d <= 1e-10));
    let first = &rows[0];
    assert_eq!((first[0], first[1]), (0.0, 0.0));
    assert!(first[4].abs() <= 1e-10);
}

#[test]
fn sync_compare_writes_distance_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sync-compare", "--t-end", "4", "--points", "5", "--sync-times", "1", "--format", "csv"];
    args.extend_from_slice(SMALL);
    let o = oisd(&args, dir.path());
    assert!(matches!(o.status.code(), Some(0 | 1)));
    let text = stdout(&o);
    assert!(text.contains("metric inverse_amplification"));
    let (header, rows) = read_csv(&dir.path().join("sync-compare.csv"));
    assert_eq!(header, ["t", "distance", "bound", "window_population"]);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[1].is_finite() && r[2].is_finite()));
    let (_, ident) = read_csv(&dir.path().join("sync-identity.csv"));
    assert_eq!(ident.len(), 1);
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let default = RunConfig::from_text(&fs::read_to_string(root.join("default.conf")).unwrap()).unwrap();
    assert_eq!(default.render(), RunConfig::default().render());
    for entry in fs::read_dir(&root).unwrap() {
        let path = entry.unwrap().path();
        let cfg = RunConfig::from_text(&fs::read_to_string(&path).unwrap())
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        cfg.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
