use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn rpr3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rpr3")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = rpr3(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn phis(report: &Value) -> Vec<f64> {
    report["solutions"].as_array().unwrap().iter().map(|s| s["phi_deg"].as_f64().unwrap()).collect()
}

#[test]
fn family_solve() {
    let r = json(&["fk", &path("family.json")]);
    assert_eq!(r["route"], "DegenerateFamily");
    assert_eq!(r["family"]["kind"], "DegenerateFamily");
    let p: Vec<f64> = r["polynomial"].as_array().unwrap().iter().map(|c| c.as_f64().unwrap()).collect();
    let want = [161.0, -239.0, -239.0, 161.0];
    let k = p[0] / want[0];
    for (c, w) in p.iter().zip(want) {
        assert!((c - k * w).abs() < 1e-10 * k.abs(), "{p:?}");
    }
    let phis = phis(&r);
    assert_eq!(phis.len(), 6);
    for (phi, want) in phis.iter().zip([-90.0, -90.0, 53.610, 53.610, 126.389, 126.389]) {
        assert!((phi - want).abs() < 0.01, "{phis:?}");
    }
}

#[test]
fn double_root_degenerate_pair() {
    let r = json(&["fk", &path("double_root.json")]);
    assert_eq!(r["route"], "General");
    assert_eq!(r["solutions"].as_array().unwrap().len(), 6);
    let degenerate: Vec<&Value> =
        r["solutions"].as_array().unwrap().iter().filter(|s| s["kind"] == "DegenerateRoot").collect();
    assert_eq!(degenerate.len(), 2);
    for s in &degenerate {
        assert!(s["phi_deg"].as_f64().unwrap().abs() < 1e-9);
    }
    let (a, b) = (degenerate[0], degenerate[1]);
    let gap = (a["x"].as_f64().unwrap() - b["x"].as_f64().unwrap())
        .hypot(a["y"].as_f64().unwrap() - b["y"].as_f64().unwrap());
    assert!(gap > 0.5);
    assert_eq!(r["active_degeneracies_deg"], serde_json::json!([0.0]));
}

#[test]
fn negative_leg_is_rejected() {
    let out = rpr3(&["fk", &path("bad_rho1.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rho1"));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_files_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("syntax.json", "{ not json"),
        (
            "two_betas.json",
            r#"{"geometry":{"c2":1,"c3":0,"d3":1,"l2":1,"l3":1,"beta_deg":0,"beta_rad":0},"joints":[1,1,1]}"#,
        ),
        ("no_joints.json", r#"{"geometry":{"c2":1,"c3":0,"d3":1,"l2":1,"l3":1,"beta_deg":0}}"#),
        ("negative_l2.json", r#"{"geometry":{"c2":1,"c3":0,"d3":1,"l2":-1,"l3":1,"beta_deg":0},"joints":[1,1,1]}"#),
    ] {
        let file = dir.path().join(name);
        std::fs::write(&file, text).unwrap();
        let out = rpr3(&["fk", file.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
    assert_eq!(rpr3(&["fk", "/nonexistent/problem.json"]).status.code(), Some(2));
    assert_eq!(rpr3(&["fk", &path("double_root.json"), "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(rpr3(&["oracle", &path("double_root.json"), "--samples", "10"]).status.code(), Some(2));
    assert_eq!(rpr3(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn classify_double_root() {
    let r = json(&["classify", &path("double_root.json")]);
    assert_eq!(r["family"]["kind"], "General");
    assert_eq!(r["all_orientations"], false);
    let o = r["degenerate_orientations"].as_array().unwrap();
    assert_eq!(o.len(), 2);
    assert_eq!(o[0]["phi_deg"].as_f64().unwrap(), 0.0);
    assert_eq!(o[0]["active"], true);
    let want = 2.0 * (1.0 / (4.0 + 3.0 * 3f64.sqrt())).atan().to_degrees();
    assert!((o[1]["phi_deg"].as_f64().unwrap() - want).abs() < 1e-9);
    assert!((want - 12.41).abs() < 0.01);
    assert_eq!(o[1]["active"], false);
}

#[test]
fn classify_family_and_generic() {
    let r = json(&["classify", &path("family.json")]);
    assert_eq!(r["family"]["kind"], "DegenerateFamily");
    assert_eq!(r["all_orientations"], true);
    assert_eq!(r["degenerate_orientations"], serde_json::json!([]));

    let r = json(&["classify", &path("generic.json")]);
    assert_eq!(r["family"]["kind"], "General");
    assert_eq!(r["all_orientations"], false);
    assert_eq!(r["degenerate_orientations"], serde_json::json!([]));
}

fn plot(name: &str) -> String {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("modes.svg");
    let out = rpr3(&["plot", &path(name), "--out", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read_to_string(svg).unwrap()
}

#[test]
fn plots_draw_one_group_per_mode() {
    for name in ["double_root.json", "family.json"] {
        let svg = plot(name);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<g class=\"assembly-mode").count(), 6, "{name}");
        assert_eq!(svg.matches("class=\"leg\"").count(), 18, "{name}");
    }
    assert_eq!(plot("double_root.json").matches("assembly-mode degenerate").count(), 2);
}

#[test]
fn unreachable_plot_draws_the_base_only() {
    let r = json(&["oracle", &path("unreachable.json")]);
    assert_eq!(r["oracle"]["solutions"], serde_json::json!([]));
    let svg = plot("unreachable.json");
    assert!(!svg.contains("assembly-mode"));
    assert_eq!(svg.matches("class=\"base\"").count(), 1);
}

#[test]
fn plot_needs_an_output_path() {
    assert_eq!(rpr3(&["plot", &path("double_root.json")]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    for name in ["double_root.json", "family.json", "generic.json"] {
        let a = rpr3(&["fk", &path(name), "--oracle"]);
        let b = rpr3(&["fk", &path(name), "--oracle"]);
        let (a, b) = (String::from_utf8(a.stdout).unwrap(), String::from_utf8(b.stdout).unwrap());
        assert_eq!(a, b, "{name}");
        let value: Value = serde_json::from_str(&a).unwrap();
        let again: Value = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
        assert_eq!(again, value, "{name}");
    }
}

#[test]
fn report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("report.json");
    let out = rpr3(&["fk", &path("family.json"), "--out", file.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let written = std::fs::read(&file).unwrap();
    assert_eq!(written, rpr3(&["fk", &path("family.json")]).stdout);
}

#[test]
fn oracle_cross_check_agrees() {
    for name in ["double_root.json", "family.json", "generic.json", "unreachable.json"] {
        let r = json(&["fk", &path(name), "--oracle"]);
        assert_eq!(r["oracle"]["matches"], true, "{name}");
        assert_eq!(r["oracle"]["samples"], 7200);
    }
    let r = json(&["fk", &path("generic.json"), "--oracle", "--samples", "720"]);
    assert_eq!(r["oracle"]["samples"], 720);
    assert!(json(&["fk", &path("generic.json")]).get("oracle").is_none());
}

#[test]
fn oracle_command_matches_fk() {
    let fk = json(&["fk", &path("generic.json")]);
    let sweep = json(&["oracle", &path("generic.json")]);
    let a = phis(&fk);
    let b = phis(&sweep["oracle"]);
    assert_eq!(a.len(), b.len());
    assert!(!a.is_empty());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 0.01, "{a:?} {b:?}");
    }
}

#[test]
fn ik_then_fk_recovers_the_pose() {
    let ik = json(&["ik", &path("ik.json")]);
    let joints = ik["joints"].clone();
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("fk.json");
    let problem = serde_json::json!({
        "geometry": { "c2": 2, "c3": 0.5, "d3": 1, "l2": 2, "l3": 1.5, "beta_deg": 60 },
        "joints": joints,
    });
    std::fs::write(&file, problem.to_string()).unwrap();
    let fk = json(&["fk", file.to_str().unwrap()]);
    let hit = fk["solutions"].as_array().unwrap().iter().any(|s| {
        (s["phi_deg"].as_f64().unwrap() - 25.0).abs() < 1e-6
            && (s["x"].as_f64().unwrap() - 0.3).abs() < 1e-6
            && (s["y"].as_f64().unwrap() - 0.9).abs() < 1e-6
    });
    assert!(hit, "{fk}");
}

#[test]
fn ik_without_pose_is_invalid() {
    assert_eq!(rpr3(&["ik", &path("double_root.json")]).status.code(), Some(2));
}
