use std::process::{Command, Output};

fn heatlab(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_heatlab"));
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("HEATLAB_THREADS", n),
        None => cmd.env_remove("HEATLAB_THREADS"),
    };
    cmd.output().expect("spawn heatlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn kernel_eval_matches_h3_closed_form() {
    let o = heatlab(&["run", "kernel-eval", "--space", "Hr:3", "--t", "1", "--r", "2"], None);
    assert!(o.status.success());
    let rows = body(&stdout(&o));
    assert_eq!(rows.len(), 1);
    let (t, r) = (1.0f64, 2.0f64);
    let exact = (4.0 * std::f64::consts::PI * t).powf(-1.5) * (r / r.sinh()) * (-t - r * r / (4.0 * t)).exp();
    assert!((rows[0][3] / exact - 1.0).abs() < 1e-6);
}

#[test]
fn csv_header_echoes_config() {
    let o = heatlab(&["run", "kernel-eval", "--space", "Hr:2", "--t", "1,2", "--r", "0,1"], None);
    let text = stdout(&o);
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# config: "));
    let cfg: serde_json::Value = serde_json::from_str(&first["# config: ".len()..]).unwrap();
    assert_eq!(cfg["space"], "Hr:2");
    assert_eq!(cfg["t-grid"], serde_json::json!([1.0, 2.0]));
    assert_eq!(text.lines().nth(1).unwrap(), "t,r,ln_h,h");
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        vec!["run", "kernel-eval", "--space", "Zz:3", "--t", "1", "--r", "1"],
        vec!["run", "concentration", "--space", "Hr:2", "--t", "20,10"],
        vec!["run", "kernel-eval", "--space", "Hr:2", "--t", "1"],
        vec!["run", "boundary", "--space", "Hr:3", "--t", "1"],
        vec!["run", "rates", "--space", "Hr:3", "--center", "1"],
        vec!["dump", "kernel", "--t", "nope"],
    ] {
        let o = heatlab(&args, None);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn output_is_identical_across_thread_counts() {
    let args = ["run", "concentration", "--space", "Hr:2", "--t", "10:40:dyadic"];
    let outs: Vec<String> = ["1", "4", "8"].iter().map(|n| stdout(&heatlab(&args, Some(n)))).collect();
    assert!(!outs[0].is_empty());
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[0], outs[2]);
}

#[test]
fn config_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("heatlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("cfg.json");
    let csv = dir.join("out.csv");
    let summary = dir.join("summary.json");
    std::fs::write(
        &cfg,
        r#"{"space": "Hr:3", "experiment": "kernel-eval", "t-grid": [0.5, 1.0], "radii": [0.5, 3.0]}"#,
    )
    .unwrap();
    let o = heatlab(
        &[
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            csv.to_str().unwrap(),
            "--summary",
            summary.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(body(&std::fs::read_to_string(&csv).unwrap()).len(), 4);
    let s: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["passed"], true);
    std::fs::write(&cfg, r#"{"space": "Hr:3", "experiment": "kernel-eval", "t-grid": [1.0], "bogus": 1}"#).unwrap();
    let o = heatlab(&["run", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn space_reports_structure() {
    let o = heatlab(&["space", "A2c"], None);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["rank"], 2);
    assert_eq!(v["pseudo_dimension"], 8);
    assert_eq!(v["weyl_order"], 6);
}

#[test]
fn dump_phi_h3() {
    let o = heatlab(&["dump", "phi", "--space", "Hr:3", "--lambda", "2", "--r", "1,3"], None);
    for row in body(&stdout(&o)) {
        let (l, r) = (row[0], row[1]);
        assert!((row[2] - (l * r).sin() / (l * r.sinh())).abs() < 1e-8);
    }
}

#[test]
fn check_unit_passes() {
    let o = heatlab(&["check", "unit"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.contains("[PASS]")).count(), 2);
}

#[test]
fn failing_acceptance_exits_4() {
    // The complex A₂ outside mass at t = 20 is above the 0.3 target.
    let o = heatlab(&["check", "envelopes"], None);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("final_A2c"));
}
