use std::path::Path;
use std::process::{Command, Output};

fn entangle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entangle")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_owned).collect()).collect()
}

#[test]
fn cavity_three_sevenths() {
    let o = entangle(&["cavity", "--lambda-l", "1", "--lambda-r", "1", "--kappa", "0.4714", "--delta-e", "0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("# lambda_L: 1"));
    for row in data_rows(&out) {
        let p_r: f64 = row[2].parse().unwrap();
        assert!((p_r - 0.428571).abs() < 1e-6, "{row:?}");
    }
}

#[test]
fn figure_output_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let o = entangle(&["figure", "5", "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let names = |d: &Path| {
        let mut v: Vec<_> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name()).collect();
        v.sort();
        v
    };
    let files = names(a.path());
    assert_eq!(files.len(), 3);
    assert_eq!(files, names(b.path()));
    for f in files {
        assert_eq!(std::fs::read(a.path().join(&f)).unwrap(), std::fs::read(b.path().join(&f)).unwrap());
    }
}

#[test]
fn recurrence_violation_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"params": {"lambda_L": 1, "lambda_R": 1, "kappa": 0.4714},
            "spectrum": {"shape": "cavity_photon"},
            "grid": {"n_modes": 401, "bandwidth": 20, "t_final": 500, "dt": 0.005}}"#,
    )
    .unwrap();
    let o = entangle(&["oracle", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("recurrence"), "{}", stderr(&o));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"params": {"lambda_L": 5, "lambda_R": 1, "kappa": 0.4714}}"#).unwrap();
    let o = entangle(&["cavity", "--config", cfg.to_str().unwrap(), "--lambda-l", "1", "--engines", "closed_form"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let p_r: f64 = data_rows(&stdout(&o))[0][2].parse().unwrap();
    assert!((p_r - 0.428571).abs() < 1e-6);
}

#[test]
fn invalid_input_exits_two() {
    let bad = [
        vec!["cavity", "--lambda-l", "-1", "--lambda-r", "1", "--kappa", "1"],
        vec!["cavity", "--lambda-l", "1", "--lambda-r", "1", "--kappa", "1", "--engines", "magic"],
        vec!["injected", "--lambda-l", "1", "--lambda-r", "1", "--kappa", "1", "--spectrum", "cavity_photon"],
        vec!["figure", "7"],
        vec!["nonsense"],
    ];
    for args in bad {
        let o = entangle(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn unknown_config_field_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"params": {"lambda_L": 1, "lamda_R": 1, "kappa": 1}}"#).unwrap();
    let o = entangle(&["cavity", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_keeps_failed_rows() {
    // gamma > 0 has no closed form: every row reports the error and the run completes.
    let o = entangle(&[
        "sweep", "--axis", "gamma", "--lo", "0", "--hi", "0.2", "--steps", "3", "--lambda-l", "1", "--lambda-r", "1",
        "--kappa", "0.4714", "--engines", "closed_form,quadrature",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    let axis: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(axis.windows(2).all(|w| w[0] < w[1]));
    assert!(rows[0][5].is_empty());
    assert!(!rows[2][5].is_empty());
    assert!(rows[2][7].parse::<f64>().unwrap() < 3.0 / 7.0);
}

#[test]
fn oracle_trace_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let o = entangle(&[
        "oracle", "--lambda-l", "1", "--lambda-r", "0", "--kappa", "1", "--n-modes", "401", "--bandwidth", "40",
        "--t-final", "20", "--dt", "0.0025", "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&trace).unwrap();
    let rows = data_rows(&text);
    assert!(rows.len() > 10);
    let last = rows.last().unwrap();
    let norm: f64 = last[4].parse().unwrap();
    assert!((norm - 1.0).abs() < 1e-6);
    let p_r: f64 = data_rows(&stdout(&o))[0][2].parse().unwrap();
    assert_eq!(p_r, 0.0);
}

#[test]
fn width_sweep_needs_no_kappa_in() {
    let o = entangle(&[
        "sweep", "--axis", "kappa_in_over_kappa", "--lo", "0.1", "--hi", "1", "--steps", "4", "--lambda-l", "0.25",
        "--lambda-r", "0.3536", "--kappa", "1", "--spectrum", "lorentzian", "--engines", "quadrature",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(!out.contains("# kappa_in:"));
    let p: Vec<f64> = data_rows(&out).iter().map(|r| r[2].parse().unwrap()).collect();
    assert_eq!(p.len(), 4);
    assert!(p.windows(2).all(|w| w[1] <= w[0]));
}
