use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn conevol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conevol")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const CUBE: &str = r#"{"dim": 3, "name": "cube", "vertices": [[-1,-1,-1],[1,-1,-1],[-1,1,-1],[1,1,-1],[-1,-1,1],[1,-1,1],[-1,1,1],[1,1,1]]}"#;
const TETRA: &str = r#"{"dim": 3, "vertices": [[1,1,1],[1,-1,-1],[-1,1,-1],[-1,-1,1]]}"#;
const SHIFTED: &str = r#"{"dim": 3, "vertices": [[0,0,0],[2,0,0],[0,2,0],[2,2,0],[0,0,2],[2,0,2],[0,2,2],[2,2,2]]}"#;
const HULL: &str = r#"{"dim": 3, "vertices": [[0.3,1.2,-0.4],[-1.1,0.2,0.5],[0.9,-0.8,0.7],[0.1,0.4,1.6],[-0.5,-1.3,-0.6],[1.4,0.6,-1.0],[-0.2,0.9,-1.2],[0.6,-0.1,-1.5]]}"#;

#[test]
fn measure_cube() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "cube.json", CUBE);
    let out = conevol(&["measure", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["surface"]["atoms"].as_array().unwrap().len(), 6);
    assert!((v["surface"]["total"].as_f64().unwrap() - 24.0).abs() < 1e-12);
    assert!((v["cone_volume"]["total"].as_f64().unwrap() - 8.0).abs() < 1e-12);
}

#[test]
fn measure_tetrahedron_log_case() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.json", TETRA);
    let v = json(&conevol(&["measure", s(&f), "--p", "0"]));
    let vol = v["volume"].as_f64().unwrap();
    assert!((vol - 8.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["cone_volume"]["atoms"].as_array().unwrap().len(), 4);
    assert!((v["cone_volume"]["total"].as_f64().unwrap() - vol).abs() < 1e-12);
    // L_0 is n times the cone-volume measure
    assert!((v["lp"]["total"].as_f64().unwrap() - 3.0 * vol).abs() < 1e-12);
}

#[test]
fn measure_off_center_lp_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", SHIFTED);
    let out = conevol(&["measure", s(&f), "--p", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("origin is not interior"));
    // p = 1 needs no origin; the cone-volume measure is omitted
    let v = json(&conevol(&["measure", s(&f)]));
    assert!(v["cone_volume"].is_null());
}

#[test]
fn check_cube_rows() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "cube.json", CUBE);
    let out = conevol(&["check", s(&f)]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r["classification"], "PrismEquality");
        for key in ["direction", "x", "y", "psi", "slack", "scc_value", "gap"] {
            assert!(!r[key].is_null(), "{key}");
        }
    }
    let csv = String::from_utf8(conevol(&["check", s(&f), "--output", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("direction,x,y,psi,slack,scc_value,gap,classification"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn check_random_hull_centered() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "h.json", HULL);
    let out = conevol(&["check", s(&f), "--center"]);
    assert_eq!(out.status.code(), Some(0));
    for r in json(&out).as_array().unwrap() {
        assert_eq!(r["classification"], "Strict");
        assert!(r["psi"].as_f64().unwrap() < 1.0);
    }
    let out = conevol(&["check", s(&f), "--center", "--direction", "0,0,2"]);
    assert_eq!(json(&out).as_array().unwrap().len(), 1);
}

#[test]
fn check_requires_centering() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", SHIFTED);
    let out = conevol(&["check", s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));
    assert_eq!(conevol(&["check", s(&f), "--center"]).status.code(), Some(0));
}

#[test]
fn parse_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.json", "{\"dim\": 3,\n \"vertices\": [[0, 0, 0],\n [1, 0]]}");
    let out = conevol(&["measure", s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertices[1]"));
    let f = write(&dir, "bad2.json", "{\"dim\": 3,\n \"vertices\": [[0, 0, 0],,]}");
    let err = String::from_utf8(conevol(&["measure", s(&f)]).stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
    assert_eq!(conevol(&["measure"]).status.code(), Some(1));
    assert_eq!(conevol(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(conevol(&["cone-table", "--tol", "bogus=1"]).status.code(), Some(1));
}

#[test]
fn off_import() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "cube.off",
        "OFF\n8 6 12\n-1 -1 -1\n1 -1 -1\n-1 1 -1\n1 1 -1\n-1 -1 1\n1 -1 1\n-1 1 1\n1 1 1\n",
    );
    let v = json(&conevol(&["measure", s(&f)]));
    assert!((v["volume"].as_f64().unwrap() - 8.0).abs() < 1e-12);
}

#[test]
fn symmetrize_profile() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "t.json", TETRA);
    let out = conevol(&["symmetrize", s(&f), "--direction", "1,1,1", "--resolution", "64"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,area,radius"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(rows.len() >= 65);
    // a cone along its axis: the radius is affine and vanishes at the apex
    assert!(rows.last().unwrap()[2].abs() < 1e-12);
    let v = json(&conevol(&["symmetrize", s(&f), "--center", "--output", "json", "--resolution", "256"]));
    assert!(v["prop1"]["volume"]["rel"].as_f64().unwrap() < 1e-12);
}

#[test]
fn reduce_balances() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "h.json", HULL);
    let out = conevol(&["reduce", s(&f), "--center", "--resolution", "512"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ok"], true);
    assert!(v["balanced"]["centroid_u"].as_f64().unwrap().abs() < 1e-8);
    let f = write(&dir, "s.json", SHIFTED);
    assert_eq!(conevol(&["reduce", s(&f)]).status.code(), Some(1));
}

#[test]
fn cone_table_rows() {
    let out = conevol(&["cone-table", "--n", "2,3", "--t", "1,2,7/3,inf"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(
        rows[0],
        ["n", "t", "x", "y", "psi", "key_ratio", "x_bound_slack", "y_bound_slack", "sum_bound_slack"]
    );
    for r in &rows[1..] {
        if r[0] == "2" || r[1] == "1" || r[1] == "inf" {
            assert_eq!(r[4], "1", "{r:?}");
        }
    }
    let three_two = rows.iter().find(|r| r[0] == "3" && r[1] == "2").unwrap();
    assert_eq!((three_two[2], three_two[3]), ("11/49", "17/196"));
    let float = String::from_utf8(conevol(&["cone-table", "--n", "3", "--t", "2", "--float"]).stdout).unwrap();
    let psi: f64 = float.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!((psi - 0.97549).abs() < 1e-5);
    assert_eq!(conevol(&["cone-table", "--t", "1/2"]).status.code(), Some(1));
}

#[test]
fn verify_lemmas_all_proven() {
    let out = conevol(&["verify-lemmas", "--n-min", "3", "--n-max", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let certs = json(&out);
    let certs = certs.as_array().unwrap();
    // f1, f2, g, h, p1, F-G and a summary per n
    assert_eq!(certs.len(), 8 * 7);
    assert!(certs.iter().all(|c| c["status"] != "failed"));
}

#[test]
fn verify_lemmas_plane_and_bounds() {
    let out = conevol(&["verify-lemmas", "--n-min", "2", "--n-max", "2", "--allow-n2"]);
    assert_eq!(out.status.code(), Some(0));
    let certs = json(&out);
    assert!(certs.as_array().unwrap().iter().any(|c| c["target"] == "F-G" && c["status"] == "proven-identity"));
    assert_eq!(conevol(&["verify-lemmas", "--n-min", "2"]).status.code(), Some(1));
    assert_eq!(conevol(&["verify-lemmas", "--n-min", "5", "--n-max", "4"]).status.code(), Some(1));
}

#[test]
fn verify_lemmas_fault_injection() {
    let out = conevol(&["verify-lemmas", "--n-min", "4", "--n-max", "4", "--method", "chain", "--corrupt-p1", "3"]);
    assert_eq!(out.status.code(), Some(3));
    let certs = json(&out);
    let p1 = certs.as_array().unwrap().iter().find(|c| c["target"] == "p1").unwrap();
    assert_eq!(p1["status"], "failed");
    assert!(p1["failed_stage"].as_str().unwrap().starts_with("p1 chain"));
}

#[test]
fn audit_random_hulls() {
    let out = conevol(&["audit", "--dim", "3", "--count", "100", "--seed", "42", "--resolution", "512"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    assert!(v["min_slack"].as_f64().unwrap() > 0.0);
    assert_eq!(v["bodies"], 100);
}

#[test]
fn audit_is_deterministic_across_thread_counts() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_conevol"))
            .args(["audit", "--count", "12", "--seed", "5", "--resolution", "128", "--items"])
            .env("CONEVOL_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("3");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("zero").status.code(), Some(1));
}

#[test]
fn audit_frustum_sweep_approaches_equality() {
    let out = conevol(&["audit", "--generator", "frustum", "--count", "60", "--resolution", "256", "--items"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let mut items: Vec<(f64, f64)> = v["items"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| (i["ratio"].as_f64().unwrap(), i["min_slack"].as_f64().unwrap()))
        .collect();
    items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let (lo, hi) = (items[0], items[items.len() - 1]);
    let peak = items.iter().copied().fold((0.0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    assert!(lo.0 < 3.0 && hi.0 > 1e5, "{lo:?} {hi:?}");
    // slack rises away from the prism and falls back to zero at the cone
    assert!(lo.0 < peak.0 && peak.0 < hi.0 && lo.1 < peak.1, "{lo:?} {peak:?}");
    assert!(hi.1.abs() < 1e-9, "{hi:?}");
    assert!(items.iter().all(|i| i.1 > -1e-12));
}

#[test]
fn audit_failures_replay_identically() {
    let dir = TempDir::new().unwrap();
    let failures = dir.path().join("failures.json");
    // a zero closure threshold turns rounding noise into failures
    let out = conevol(&[
        "audit",
        "--count",
        "6",
        "--resolution",
        "128",
        "--tol",
        "closure=0",
        "--failure-file",
        s(&failures),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let summary = json(&out);
    let recorded: Vec<Value> = serde_json::from_str(&std::fs::read_to_string(&failures).unwrap()).unwrap();
    assert!(!recorded.is_empty());
    assert_eq!(summary["failures"].as_array().unwrap().len(), recorded.len());
    let replayed = conevol(&["audit", "--replay", s(&failures)]);
    assert_eq!(replayed.status.code(), Some(2));
    let reports = json(&replayed);
    for (r, rec) in reports.as_array().unwrap().iter().zip(&recorded) {
        assert_eq!(r, &rec["report"]);
    }
    let csv = String::from_utf8(conevol(&["audit", "--replay", s(&failures), "--output", "csv"]).stdout).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(2) == Some("true")), "{csv}");
}
