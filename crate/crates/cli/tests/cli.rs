use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degenerate")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn rows(csv: &[u8]) -> Vec<Vec<f64>> {
    let text = std::str::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y,z,Ex,Ey,Ez,Bx,By,Bz"));
    lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

fn trajectory_config(e0: &str, theta: &str, phi: &str, q: f64) -> Value {
    json!({
        "name": "traj",
        "description": "test trajectory",
        "equation": "weyl_pos_helicity",
        "charge_q": q,
        "trajectory": { "e0": e0, "theta": theta, "phi": phi },
        "grid": { "t": [0, 2, 9], "x": [-1, 1, 3] }
    })
}

#[test]
fn wave_fields_match_the_plane_wave() {
    let out = run(&["fields", "wave_immune"]);
    assert!(out.status.success());
    let rows = rows(&out.stdout);
    assert_eq!(rows.len(), 25);
    for r in rows {
        let (t, z) = (r[0], r[3]);
        let ex = (z + t).cos();
        assert!((r[4] - ex).abs() < 1e-12);
        assert!((r[8] + ex).abs() < 1e-12);
        for k in [5, 6, 7, 9] {
            assert!(r[k].abs() < 1e-12);
        }
    }
}

#[test]
fn json_and_csv_agree() {
    let csv = rows(&run(&["fields", "gaussian_envelope"]).stdout);
    let json: Vec<Value> = serde_json::from_slice(&run(&["fields", "gaussian_envelope", "--format", "json"]).stdout).unwrap();
    assert_eq!(csv.len(), json.len());
    let keys = ["t", "x", "y", "z", "Ex", "Ey", "Ez", "Bx", "By", "Bz"];
    for (r, j) in csv.iter().zip(&json) {
        for (k, key) in keys.iter().enumerate() {
            assert_eq!(r[k], j[key].as_f64().unwrap(), "{key}");
        }
    }
}

#[test]
fn out_file_receives_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fields.csv");
    let out = run(&["fields", "free_particle", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), run(&["fields", "free_particle"]).stdout);
}

#[test]
fn empty_grid_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: Value = serde_json::from_slice(&run(&["catalog", "free_particle"]).stdout).unwrap();
    cfg["grid"] = json!({ "t": [0, 1, 0] });
    let path = write(dir.path(), "empty.json", &cfg);
    let out = run(&["fields", &path]);
    assert!(out.status.success());
    assert_eq!(out.stdout, b"t,x,y,z,Ex,Ey,Ez,Bx,By,Bz\n");
}

#[test]
fn time_only_family_function_gives_uniform_longitudinal_field() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: Value = serde_json::from_slice(&run(&["catalog", "free_particle"]).stdout).unwrap();
    cfg["s"] = json!("t^2");
    cfg["grid"] = json!({ "t": [0, 1, 3], "x": [-1, 1, 3], "z": [-1, 1, 3] });
    let path = write(dir.path(), "s_of_t.json", &cfg);
    let rows = rows(&run(&["fields", &path]).stdout);
    assert_eq!(rows.len(), 27);
    for r in rows {
        // q = −1, n̂ = z: Ez = ṡ/q.
        assert!((r[6] + 2.0 * r[0]).abs() < 1e-12);
        for k in [4, 5, 7, 8, 9] {
            assert!(r[k].abs() < 1e-12);
        }
    }
}

#[test]
fn plan_examples() {
    let dir = tempfile::tempdir().unwrap();

    let constant = write(dir.path(), "constant.json", &trajectory_config("3", "0", "0", -1.0));
    let out = run(&["plan", &constant]);
    assert!(out.status.success());
    assert!(rows(&out.stdout).iter().all(|r| r[4..].iter().all(|v| v.abs() < 1e-12)));

    let ramp = write(dir.path(), "ramp.json", &trajectory_config("1 + 0.5 * t", "0", "0", -1.0));
    for r in rows(&run(&["plan", &ramp]).stdout) {
        assert!((r[6] - 1.0).abs() < 1e-12);
        assert!(r[4].abs() < 1e-12 && r[5].abs() < 1e-12);
    }

    let rotation = write(dir.path(), "rotation.json", &trajectory_config("1", "2 * t", "0", 1.0));
    for r in rows(&run(&["plan", &rotation]).stdout) {
        let t = r[0];
        assert!((r[4] + 4.0 * (2.0 * t).cos()).abs() < 1e-12, "{r:?}");
        assert!(r[5].abs() < 1e-12);
        assert!((r[6] - 4.0 * (2.0 * t).sin()).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn plan_verification_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("plan.json");
    let out = run(&["plan", "control_demo", "--verify", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["sound"], json!(true));
    let samples: Vec<Value> = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(samples.len(), 21);

    let without = run(&["plan", "control_demo", "--verify"]);
    assert!(without.status.success());
    let report: Value = serde_json::from_slice(&without.stderr).unwrap();
    assert_eq!(report["sound"], json!(true));
}

#[test]
fn plan_needs_a_trajectory() {
    let out = run(&["plan", "free_particle"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_rows() {
    let out = run(&["sweep", "--e", "0,0.1,0.5", "--s", "1 + x * t"]);
    assert!(out.status.success());
    let rows: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.len(), 3);
    let coef = rows[1]["coefficient"].as_f64().unwrap();
    assert!((coef - (1.0 - (0.9f64 / 1.1).sqrt())).abs() < 1e-9);
    assert!((rows[2]["bilinear"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(rows[0]["is_degenerate"], json!(true));

    assert_eq!(run(&["sweep", "--e", "-0.1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--s", "x +"]).status.code(), Some(2));
}

#[test]
fn verify_report_shape() {
    let out = run(&["verify", "oscillating_xy", "--points", "30", "--seed", "4"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["passed"], json!(true));
    assert_eq!(report["points"], json!(30));
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"residual.base"));
    assert!(names.contains(&"fields.transverse"));

    assert_eq!(run(&["verify", "free_particle", "--points", "0"]).status.code(), Some(2));
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: Value = serde_json::from_slice(&run(&["catalog", "free_particle"]).stdout).unwrap();
    cfg["colour"] = json!("blue");
    let unknown = write(dir.path(), "unknown.json", &cfg);
    let out = run(&["verify", &unknown]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let mut cfg: Value = serde_json::from_slice(&run(&["catalog", "free_particle"]).stdout).unwrap();
    cfg["h"] = json!("x ^^ 2");
    let bad_expr = write(dir.path(), "bad_expr.json", &cfg);
    assert_eq!(run(&["verify", &bad_expr]).status.code(), Some(2));

    assert_eq!(run(&["catalog", "nope"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn catalog_lists_every_bundled_scenario() {
    let out = run(&["catalog"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    for line in text.lines() {
        let name = line.split('\t').next().unwrap();
        let src = run(&["catalog", name]);
        assert!(src.status.success());
        let v: Value = serde_json::from_slice(&src.stdout).unwrap();
        assert_eq!(v["name"], json!(name));
    }
}
