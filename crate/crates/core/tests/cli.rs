use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn endlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endlab")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, v: &Value) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_string_lossy().into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn small_annulus() -> Value {
    json!({ "kind": "annulus", "r_in": 1.0, "r_out": 4.0, "res": 12 })
}

#[test]
fn capacity_report_has_sidecars_and_echoes_the_config() {
    let dir = TempDir::new().unwrap();
    let scenario = json!({ "kind": "annulus", "r_in": 1.0, "r_out": 4.0, "res": 16 });
    let cfg = write(&dir, "c.json", &json!({ "version": 1, "scenario": scenario, "levels": 4 }));
    let out = path(&dir, "r.json");
    let o = endlab(&["capacity", "--config", &cfg, "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["format"], "endlab-report");
    assert_eq!(r["config"]["solver"]["tol"], 1e-10);
    assert!(r["config"]["thresholds"].is_object());
    assert_eq!(r["meshes"].as_array().unwrap().len(), 4);
    assert!(r["meshes"][0]["sha256"].as_str().unwrap().len() == 64);
    for c in r["checks"].as_array().unwrap() {
        assert!(c["tolerance"].is_number() && c["oracle"].is_string() && c["rule"].is_string());
    }
    let csv = std::fs::read_to_string(Path::new(&out).with_extension("csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("level,"));
    assert_eq!(lines.count(), 4);
    let timings = std::fs::read_to_string(format!("{out}.timings.json")).unwrap();
    assert!(serde_json::from_str::<Value>(&timings).unwrap().is_object());
}

#[test]
fn report_goes_to_stdout_without_a_path() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &json!({ "version": 1, "scenario": small_annulus() }));
    let o = endlab(&["betti", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["pipeline"], "betti");
    assert_eq!(r["results"]["rank"], 1);
}

#[test]
fn schema_violations_exit_2_with_the_field_path() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (json!({ "version": 1, "scenario": { "kind": "annulus", "r_in": 1.0, "r_out": 4.0 } }), "res"),
        (json!({ "version": 1, "scenario": small_annulus(), "solver": { "tolerance": 1e-8 } }), "solver"),
        (json!({ "version": 2, "scenario": small_annulus() }), "version"),
        (json!({ "version": 1, "scenario": small_annulus(), "kahler": { "alpha": -1.0 } }), "kahler.alpha"),
    ];
    for (i, (cfg, field)) in cases.iter().enumerate() {
        let p = write(&dir, &format!("bad{i}.json"), cfg);
        let o = endlab(&["capacity", "--config", &p]);
        assert_eq!(o.status.code(), Some(2));
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(field), "{err}");
    }
    let o = endlab(&["capacity", "--config", &path(&dir, "missing.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn pipeline_mismatch_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &json!({ "version": 1, "pipeline": "betti", "scenario": small_annulus() }));
    assert_eq!(endlab(&["capacity", "--config", &cfg]).status.code(), Some(2));
    let cfg = write(&dir, "k.json", &json!({ "version": 1, "scenario": small_annulus() }));
    assert_eq!(endlab(&["kahler", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn solver_breakdown_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        &json!({ "version": 1, "scenario": small_annulus(), "solver": { "max_iter": 2 } }),
    );
    let o = endlab(&["capacity", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("did not converge"));
}

#[test]
fn failed_checks_exit_1() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        &json!({ "version": 1, "scenario": small_annulus(), "levels": 4, "expect": "non-parabolic" }),
    );
    let out = path(&dir, "r.json");
    let o = endlab(&["classify", "--config", &cfg, "--out", &out]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["passed"], false);
}

#[test]
fn flags_override_the_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.json",
        &json!({
            "version": 1,
            "scenario": small_annulus(),
            "converge": { "quantity": "capacity", "refinements": 3, "tolerance": 0.2 }
        }),
    );
    let o = endlab(&["converge", "--config", &cfg, "--levels", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = endlab(&["converge", "--config", &cfg, "--levels", "2", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["config"]["converge"]["refinements"], 2);
    assert_eq!(r["config"]["kahler"]["alpha"], 2.0);
    assert_eq!(r["table"]["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn gen_then_solve_and_periods_on_the_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", &json!({ "version": 1, "scenario": small_annulus() }));
    let mesh = path(&dir, "m.json");
    assert_eq!(endlab(&["gen", "--config", &cfg, "--out", &mesh, "--levels", "1"]).status.code(), Some(0));
    let sol = path(&dir, "s.json");
    let o = endlab(&["solve", "--mesh", &mesh, "--dirichlet", "L0=1", "--dirichlet", "L1=0", "--out", &sol]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    let values = s["values"].as_array().unwrap();
    assert!(values.iter().all(|v| (0.0..=1.0).contains(&v.as_f64().unwrap())));
    assert!(s["residual"].as_f64().unwrap() < 1e-9);
    let o = endlab(&["periods", "--config", &cfg, "--mesh", &mesh]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&mesh).unwrap()).unwrap();
    assert_eq!(r["meshes"][0]["triangles"], m["triangles"].as_array().unwrap().len());
    let o = endlab(&["solve", "--mesh", &mesh, "--dirichlet", "L9=1"]);
    assert_eq!(o.status.code(), Some(2));
}
