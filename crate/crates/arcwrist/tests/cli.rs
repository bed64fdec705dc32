use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arcwrist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn num(v: &serde_json::Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("field {key} in {v}"))
}

fn vec3(v: &serde_json::Value, key: &str) -> [f64; 3] {
    let arr = v[key].as_array().expect("array field");
    [
        arr[0].as_f64().unwrap(),
        arr[1].as_f64().unwrap(),
        arr[2].as_f64().unwrap(),
    ]
}

#[test]
fn params_reference_design() {
    let out = run(&["params", "--r1", "27.35", "--r2", "30", "--h", "27.35", "--rl", "25"]);
    let doc = json_stdout(&out);
    assert!((num(&doc, "theta0") - PI / 4.0).abs() < 1e-15);
    assert!((num(&doc, "l1") - 5.0).abs() < 1e-9);
    assert!((num(&doc, "l2") - 13.678740930904148).abs() < 1e-12);
}

#[test]
fn params_rejects_nonpositive_radius() {
    let out = run(&["params", "--r1", "0", "--r2", "30", "--h", "27.35", "--rl", "25"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-positive"));
}

#[test]
fn fk_pure_yaw() {
    let out = run(&["fk", "--theta", "0.3", "4.488790204786391", "2.394395102393195"]);
    let doc = json_stdout(&out);
    let pose = &doc["pose"];
    assert!((num(pose, "alpha") - 0.3).abs() < 1e-9);
    assert!(num(pose, "beta").abs() < 1e-9);
    assert!(num(pose, "gamma").abs() < 1e-9);
    assert!(num(&doc, "residual_norm") < 1e-12);
}

#[test]
fn fk_singular_geometry_exits_3() {
    let out = run(&["fk", "--theta", "0", "0", "0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn fk_requires_three_angles() {
    let out = run(&["fk", "--theta", "0.1", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ik_fk_round_trip() {
    let ik = json_stdout(&run(&["ik", "--rpy", "0.1", "0.3", "-0.2"]));
    let theta = vec3(&ik, "theta");
    let fk = json_stdout(&run(&[
        "fk",
        "--theta",
        &theta[0].to_string(),
        &theta[1].to_string(),
        &theta[2].to_string(),
    ]));
    let pose = &fk["pose"];
    assert!((num(pose, "alpha") - 0.1).abs() < 1e-9);
    assert!((num(pose, "beta") - 0.3).abs() < 1e-9);
    assert!((num(pose, "gamma") + 0.2).abs() < 1e-9);
}

#[test]
fn ik_motion_bound_exits_4() {
    let out = run(&["ik", "--rpy", "0", "0.8", "0.1"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("motion bound"));
}

#[test]
fn ik_degree_mode_matches_radians() {
    let deg = json_stdout(&run(&["ik", "--unit", "deg", "--rpy", "0", "27.5", "27.5"]));
    let rad = json_stdout(&run(&[
        "ik",
        "--rpy",
        "0",
        "0.4799655442984406",
        "0.4799655442984406",
    ]));
    let theta_deg = vec3(&deg, "theta");
    let theta_rad = vec3(&rad, "theta");
    for i in 0..3 {
        assert!((theta_deg[i].to_radians() - theta_rad[i]).abs() < 1e-12);
    }
}

#[test]
fn fk_degree_mode_converts_both_ways() {
    let home2 = (4.0 * PI / 3.0 + 0.3).to_degrees();
    let home3 = (2.0 * PI / 3.0 + 0.3).to_degrees();
    let out = run(&[
        "fk",
        "--unit",
        "deg",
        "--theta",
        &0.3f64.to_degrees().to_string(),
        &home2.to_string(),
        &home3.to_string(),
    ]);
    let doc = json_stdout(&out);
    assert!((num(&doc["pose"], "alpha") - 0.3f64.to_degrees()).abs() < 1e-9);
}

#[test]
fn params_file_changes_geometry() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"r1": 20.0, "r2": 25.0, "h": 27.0, "rl": 18.0}}"#).unwrap();
    let path = file.path().to_str().unwrap();

    let custom = json_stdout(&run(&["--params", path, "ik", "--rpy", "0", "0.3", "0"]));
    let stock = json_stdout(&run(&["ik", "--rpy", "0", "0.3", "0"]));
    let a = vec3(&custom, "theta");
    let b = vec3(&stock, "theta");
    assert!((a[1] - b[1]).abs() > 1e-3);
}

#[test]
fn params_file_missing_field_exits_2() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"r1": 20.0}}"#).unwrap();
    let out = run(&["--params", file.path().to_str().unwrap(), "fk", "--theta", "0", "0", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r2"));
}

#[test]
fn jacobian_identity_and_condition_at_home() {
    let out = run(&[
        "jacobian",
        "--theta",
        "0",
        "4.1887902047863905",
        "2.0943951023931953",
        "--scheme",
        "central",
    ]);
    let doc = json_stdout(&out);
    let jac = doc["jacobian"].as_array().unwrap();
    let expected = [1.0, 0.0, 0.0];
    for (i, row) in jac.iter().enumerate() {
        let sum: f64 = row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).sum();
        assert!((sum - expected[i]).abs() < 1e-5, "row {i} sums to {sum}");
    }
    assert!((num(&doc, "condition_number") - 2.0f64.sqrt()).abs() < 1e-5);
}

#[test]
fn jacobian_needs_exactly_one_mode() {
    assert_eq!(run(&["jacobian"]).status.code(), Some(2));
    let both = run(&["jacobian", "--theta", "0", "1", "2", "sweep"]);
    assert_eq!(both.status.code(), Some(2));
}

#[test]
fn sweep_csv_layout() {
    let out = run(&[
        "jacobian",
        "sweep",
        "--steps",
        "1e-2,1e-3",
        "--fk-tol",
        "1e-6",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,max_error,rmse");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1.00000000e-2,"));
    assert!(lines[2].starts_with("1.00000000e-3,"));
}

#[test]
fn sweep_decade_range_syntax() {
    let out = run(&[
        "jacobian",
        "sweep",
        "--steps",
        "1e-3..1e-5",
        "--fk-tol",
        "1e-6",
    ]);
    let doc = json_stdout(&out);
    let steps = doc["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 3);
    assert!((steps[0].as_f64().unwrap() - 1e-3).abs() < 1e-18);
    assert!((steps[2].as_f64().unwrap() - 1e-5).abs() < 1e-18);
}

#[test]
fn sweep_rejects_garbled_steps() {
    let out = run(&["jacobian", "sweep", "--steps", "big,small"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trajectory_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("traj.csv");
    let out = run(&[
        "--output",
        csv_path.to_str().unwrap(),
        "trajectory",
        "--delay",
        "0.06",
    ]);
    let doc = json_stdout(&out);
    assert_eq!(doc["samples"].as_u64(), Some(401));
    let report = &doc["report"];
    assert!((num(report, "zero_crossing_error") - 0.064064772965114019).abs() < 1e-12);

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "t,alpha_cmd,beta_cmd,gamma_cmd,theta1,theta2,theta3,alpha_state,beta_state,gamma_state"
    );
    assert_eq!(lines.len(), 402);
}

#[test]
fn trajectory_without_output_keeps_stdout_for_csv() {
    let out = run(&["trajectory", "--period", "2", "--rate", "50"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("t,alpha_cmd,beta_cmd,gamma_cmd,theta1,theta2,theta3"));
    let summary: serde_json::Value = serde_json::from_slice(&out.stderr).expect("summary on stderr");
    assert_eq!(summary["samples"].as_u64(), Some(101));
    assert!(summary["report"].is_null());
}

#[test]
fn trajectory_output_is_reproducible() {
    let a = run(&["trajectory", "--period", "1", "--delay", "0.06"]);
    let b = run(&["trajectory", "--period", "1", "--delay", "0.06"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn trajectory_rejects_bad_delay() {
    let out = run(&["trajectory", "--delay", "-0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn workspace_grid_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("grid.csv");
    let out = run(&[
        "--output",
        csv_path.to_str().unwrap(),
        "workspace",
        "--resolution",
        "0.1",
    ]);
    let doc = json_stdout(&out);
    assert_eq!(doc["nodes"].as_u64(), Some(289));
    let fraction = num(&doc, "feasible_fraction");
    assert!(fraction > 0.4 && fraction < 0.8);
    assert!(num(&doc, "max_feasible_radius") < 0.7);

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("beta,gamma,feasible,alpha_min,alpha_max"));
    assert!(csv.contains("\n7.00000000e-1,0.00000000e0,0,"));
    assert!(csv.contains("\n6.00000000e-1,0.00000000e0,1,"));
}

#[test]
fn workspace_rejects_bad_resolution() {
    assert_eq!(run(&["workspace", "--resolution", "0"]).status.code(), Some(2));
    assert_eq!(run(&["workspace", "--resolution", "0.9"]).status.code(), Some(2));
}
