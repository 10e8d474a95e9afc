use std::process::{Command, Output};

fn pmlopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmlopt")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn evaluate_prints_json_report() {
    let out = pmlopt(&["evaluate", "power:p=3,S=100.4"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let avg = v["avg_reflectivity"].as_f64().unwrap();
    assert!((avg - 0.013).abs() < 0.013 * 0.15, "{avg}");
    assert_eq!(v["profile"], "power:p=3,S=100.4");
    assert_eq!(v["config"]["m"], 5);
    assert_eq!(v["config"]["sampling"], "midpoint-value");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"m": 10, "quad_nodes": 40}"#).unwrap();
    let out = pmlopt(&["--config", cfg.to_str().unwrap(), "--m", "7", "evaluate", "legacy:S=5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["config"]["m"], 7);
    assert_eq!(v["config"]["quad_nodes"], 40);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["evaluate", "power:p=3"][..],
        &["evaluate", "rminus:p=2,a2=1,ap=3"],
        &["optimize", "cubic", "--p", "3"],
        &["optimize", "rminus", "--p", "1"],
        &["scan2d", "--a2", "0,50"],
        &["--m", "0", "evaluate", "legacy:S=1"],
        &["frobnicate"],
    ] {
        let out = pmlopt(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn unresolvable_grid_exits_3() {
    let out = pmlopt(&["--lambda0", "0.5", "--h", "1", "evaluate", "power:p=3,S=1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_config_file_exits_1() {
    let out = pmlopt(&["--config", "/nonexistent/run.json", "evaluate", "legacy:S=1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_csv_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &std::path::Path| {
        vec![
            "sweep".to_string(),
            "power:p=3,S=100.4".into(),
            "rminus:p=5,a2=10,ap=40".into(),
            "--points".into(),
            "25".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    for p in [&a, &b] {
        let out = Command::new(env!("CARGO_BIN_EXE_pmlopt")).args(args(p)).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert_eq!(text.lines().count(), 26);
    assert!(text.starts_with("theta_frac,\"power:p=3,S=100.4\",\"rminus:p=5,a2=10,ap=40\"\n"));
}

#[test]
fn evaluate_writes_sweep_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = pmlopt(&["evaluate", "legacy:S=20", "--points", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(path).unwrap().lines().count(), 6);
}

#[test]
fn small_scan_corner_is_total_reflection() {
    let out = pmlopt(&["scan2d", "--a2", "0,40,3", "--ap", "0,200,3", "--include", "none"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("a2,ap,avg_R"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(&first[..2], &[0.0, 0.0]);
    assert!((first[2] - 1.0).abs() < 1e-9);
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn optimize_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("opt.json");
    let out = pmlopt(&["optimize", "rminus", "--p", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!(v["avg_reflectivity"].as_f64().unwrap() <= 0.0055);
    assert!(v["evals"].as_u64().unwrap() <= 2000 + 3);
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 2);
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(pmlopt(&["--help"]).status.code(), Some(0));
    assert_eq!(pmlopt(&["--version"]).status.code(), Some(0));
}
