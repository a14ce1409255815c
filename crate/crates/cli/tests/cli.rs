use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bmnet_cli::commands::{figure_runs, FigureKind, FigureOptions, EVOLUTION_HEADER};
use tempfile::TempDir;

const MEAN_FIELD: &str = r#"
[dynamics]
kind = "mean_field"

[run]
N = 100
t_end = 1
snapshot_times = [0.5, 1]
seed = 7

[fit]
fit_times = [1]
bootstrap_B = 9
"#;

fn bmnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run_ok(args: &[&str]) -> Output {
    let out = bmnet(args);
    assert!(
        out.status.success(),
        "bmnet {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_smoke() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "mf.toml", MEAN_FIELD);
    let out = tmp.path().join("out");
    run_ok(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    for t in ["0.5", "1"] {
        let text = fs::read_to_string(out.join(format!("snapshot_t{t}.csv"))).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,agent,w");
        assert_eq!(lines.len(), 101);
        assert!(!text.contains('\r'));
        for line in &lines[1..] {
            let w: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
            assert!(w > 0.0);
        }
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["config"]["run"]["N"], 100);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "mf.toml", MEAN_FIELD);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        run_ok(&["simulate", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    }
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&b));
}

#[test]
fn seed_flag_changes_the_run() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "mf.toml", MEAN_FIELD);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(&["simulate", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    run_ok(&["simulate", "--config", cfg.to_str().unwrap(), "--out", b.to_str().unwrap(), "--seed", "8"]);
    let snap = |d: &Path| fs::read(d.join("snapshot_t1.csv")).unwrap();
    assert_ne!(snap(&a), snap(&b));
}

#[test]
fn manifest_replay_reproduces_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "mf.toml", MEAN_FIELD);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(&["evolve", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()]);
    let manifest = a.join("manifest.json");
    run_ok(&["evolve", "--config", manifest.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&b));
}

#[test]
fn fit_times_outside_snapshots_exit_2() {
    let tmp = TempDir::new().unwrap();
    let text = MEAN_FIELD.replace("fit_times = [1]", "fit_times = [0.7]");
    let cfg = write_config(&tmp, "bad.toml", &text);
    let out = bmnet(&["simulate", "--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.toml:12:"), "{err}");
    assert!(err.contains("fit.fit_times"), "{err}");
}

#[test]
fn syntax_error_exit_2_with_line() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "bad.toml", "[dynamics]\nkind = \"mean_field\"\n[run]\nt_end = = 1\n");
    let out = bmnet(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml:4:"));
}

#[test]
fn missing_config_exit_2() {
    assert_eq!(bmnet(&["simulate"]).status.code(), Some(2));
    assert_eq!(bmnet(&["evolve", "--config", "/nonexistent/x.toml"]).status.code(), Some(2));
}

#[test]
fn positivity_violation_exit_3() {
    let tmp = TempDir::new().unwrap();
    let text = "[model]\nJ = 300\n[dynamics]\nkind = \"mean_field\"\n[run]\nN = 100\nt_end = 2\nsnapshot_times = [0, 2]\n";
    let cfg = write_config(&tmp, "hot.toml", text);
    let out_dir = tmp.path().join("o");
    let out = bmnet(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("positivity"), "{err}");
    assert!(out_dir.join("snapshot_t0.csv").exists());
}

#[test]
fn evolve_writes_one_row_per_time_and_family() {
    let tmp = TempDir::new().unwrap();
    let text = MEAN_FIELD.replace("fit_times = [1]", "fit_times = [0.5, 1]");
    let cfg = write_config(&tmp, "mf.toml", &text);
    let out = tmp.path().join("out");
    run_ok(&["evolve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let csv = fs::read_to_string(out.join("evolution.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), EVOLUTION_HEADER.join(","));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    let keys: Vec<(&str, &str)> = rows.iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(
        keys,
        vec![("0.5", "LN"), ("0.5", "IGa"), ("0.5", "GIGa"), ("1", "LN"), ("1", "IGa"), ("1", "GIGa")]
    );
    for r in &rows {
        assert_eq!(r.len(), EVOLUTION_HEADER.len());
        let p: f64 = r[11].parse().unwrap();
        assert!((0.0..=1.0).contains(&p));
        assert_eq!(r[13], "9");
        match r[1] {
            "LN" => assert!(r[4].is_empty() && !r[5].is_empty()),
            "IGa" => assert_eq!(r[4], "1"),
            _ => assert!(!r[7].is_empty() && !r[8].is_empty()),
        }
    }
}

fn theta_rows(out: &Path) -> Vec<[f64; 4]> {
    fs::read_to_string(out.join("theta.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

#[test]
fn theta_table_endpoints_and_monotonicity() {
    let tmp = TempDir::new().unwrap();
    run_ok(&["theta", "--j", "0.1", "--sigma2", "0.05", "--out", tmp.path().to_str().unwrap()]);
    let rows = theta_rows(tmp.path());
    assert_eq!(rows.len(), 101);
    let last = rows[100];
    assert_eq!((last[0], last[1]), (1.0, 1.0));
    assert!((last[2] - 3.0).abs() < 1e-12 && (last[3] - 2.0).abs() < 1e-12);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
    assert!(rows[0][2].is_infinite() && rows[0][3].is_infinite());
    // γ → 0 limit (1 + σ²/J)^(1 + J/σ²) / e.
    assert!((rows[0][1] - 27.0 / (8.0 * std::f64::consts::E)).abs() < 1e-12);
}

#[test]
fn theta_rejects_non_positive_parameters() {
    let tmp = TempDir::new().unwrap();
    let out = bmnet(&["theta", "--j", "0", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn convergence_report_json() {
    let tmp = TempDir::new().unwrap();
    run_ok(&[
        "convergence",
        "--scheme",
        "milstein",
        "--dts",
        "0.0625,0.03125,0.015625",
        "--paths",
        "200",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let text = fs::read_to_string(tmp.path().join("convergence_milstein.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let at: Vec<usize> = ["\"scheme\"", "\"dts\"", "\"strong_errors\"", "\"fitted_slope\""]
        .iter()
        .map(|k| text.find(k).unwrap())
        .collect();
    assert!(at.windows(2).all(|w| w[0] < w[1]), "key order in {text}");
    assert_eq!(v["dts"].as_array().unwrap().len(), 3);
}

#[test]
fn convergence_rejects_non_positive_dt() {
    let out = bmnet(&["convergence", "--dts", "0,0.05", "--out", TempDir::new().unwrap().path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_unknown_figure_exit_2() {
    let tmp = TempDir::new().unwrap();
    let out = bmnet(&["reproduce", "--figure", "6", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn figure_five_run_list() {
    let (kind, runs) = figure_runs(5, &FigureOptions::default()).unwrap();
    assert_eq!(kind, FigureKind::Evolution);
    let g: Vec<f64> = runs.iter().map(|r| r.config.dynamics.gamma_eft.unwrap()).collect();
    assert_eq!(g, [0.8, 0.6, 0.5, 0.4]);
}

#[test]
fn figure_four_run_list() {
    let (_, runs) = figure_runs(4, &FigureOptions::default()).unwrap();
    let p: Vec<f64> = runs.iter().map(|r| r.config.dynamics.p_sw.unwrap()).collect();
    assert_eq!(p, [0.1, 0.003, 0.002, 0.001]);
    let labels: Vec<&str> = runs.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels, ["rann_p0.1", "rann_p0.003", "rann_p0.002", "rann_p0.001"]);
}

#[test]
fn reproduce_small_histogram_figure() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().to_str().unwrap();
    run_ok(&["reproduce", "--figure", "2", "--t-end", "2", "--n", "200", "--bootstrap", "9", "--out", out]);
    let run = tmp.path().join("fig2").join("rann_p0.003");
    let hist = fs::read_to_string(run.join("hist_t2.csv")).unwrap();
    assert!(hist.starts_with("bin_lo,bin_hi,count,density,pdf_LN,pdf_IGa,pdf_GIGa\n"));
    let total: usize = hist.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse::<usize>().unwrap()).sum();
    assert_eq!(total, 200);
    let gof: serde_json::Value = serde_json::from_str(&fs::read_to_string(run.join("gof_t1.json")).unwrap()).unwrap();
    assert_eq!(gof["ranked"].as_array().unwrap().len() + gof["failures"].as_array().unwrap().len(), 3);
}

#[test]
fn reproduce_small_evolution_figure_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let args = |d: &str| {
        vec![
            "reproduce".to_string(),
            "--figure".into(),
            "5".into(),
            "--t-end".into(),
            "1".into(),
            "--n".into(),
            "100".into(),
            "--bootstrap".into(),
            "5".into(),
            "--fit-points".into(),
            "2".into(),
            "--out".into(),
            d.into(),
        ]
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let v = args(d.to_str().unwrap());
        run_ok(&v.iter().map(String::as_str).collect::<Vec<_>>());
    }
    for label in ["eft_g0.8", "eft_g0.6", "eft_g0.5", "eft_g0.4"] {
        let (x, y) = (read_dir_sorted(&a.join("fig5").join(label)), read_dir_sorted(&b.join("fig5").join(label)));
        assert_eq!(x.len(), 2);
        assert_eq!(x, y);
    }
}
