//! End-to-end command line suite driving the installed binary: determinism,
//! exit codes, file formats, and cross-command consistency.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_periodforge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn solve_to(path: &Path) -> Output {
    run(&[
        "solve",
        "--x",
        "1e-3",
        "--rho",
        "-0.2",
        "--out",
        path.to_str().unwrap(),
    ])
}

#[test]
fn solve_writes_valid_json_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert_eq!(code(&solve_to(&a)), 0);
    assert_eq!(code(&solve_to(&b)), 0);
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap(), "repeated solves differ");

    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["schema"], "periodforge.solve.v1");
    assert_eq!(v["x"], 1e-3);
    let lambda = v["lambda"].as_f64().unwrap();
    assert!((lambda - 3.3737).abs() < 1e-3, "lambda {lambda}");
    for key in ["p1", "p2", "p3"] {
        let r = v["residuals"][key].as_f64().unwrap();
        assert!(r < 1e-7, "residual {key} = {r}");
    }
    assert!(v["residuals"]["residue"].as_f64().unwrap() < 1e-8);
}

#[test]
fn sweep_single_point_matches_solve() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("s.json");
    assert_eq!(code(&solve_to(&json)), 0);
    let v: Value = serde_json::from_slice(&std::fs::read(&json).unwrap()).unwrap();

    let csv = dir.path().join("s.csv");
    let out = run(&[
        "sweep",
        "--rho",
        "-0.2",
        "--x-min",
        "1e-3",
        "--x-max",
        "1e-3",
        "--steps",
        "1",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let schema = lines.next().unwrap();
    assert!(schema.starts_with("# schema=periodforge.sweep"), "{schema}");
    let header = lines.next().unwrap();
    assert!(header.starts_with("x,lambda,"), "header {header}");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let lam_csv: f64 = row[1].parse().unwrap();
    let lam_json = v["lambda"].as_f64().unwrap();
    assert!(
        (lam_csv - lam_json).abs() < 1e-9,
        "sweep {lam_csv} vs solve {lam_json}"
    );
}

#[test]
fn usage_errors_exit_64_without_panic() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--x", "0", "--rho", "-0.2"],
        vec!["solve", "--x", "1.5", "--rho", "-0.2"],
        vec!["solve", "--x", "0.5", "--rho", "0.3"],
        vec!["limits", "--which", "bogus"],
        vec!["nonsense"],
        vec!["solve"],
    ];
    for args in cases {
        let out = run(&args);
        assert_eq!(code(&out), 64, "args {args:?}: {:?}", out);
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(!err.contains("panicked"), "panic on {args:?}");
    }
}

#[test]
fn malformed_params_file_exits_64() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, b"{ not json").unwrap();
    for sub in ["verify", "mesh"] {
        let mesh_out = dir.path().join("m.obj");
        let mut args = vec![sub, "--params", bad.to_str().unwrap()];
        if sub == "mesh" {
            args.extend(["--out", mesh_out.to_str().unwrap()]);
        }
        let out = run(&args);
        assert_eq!(code(&out), 64, "{sub}: {:?}", out);
        assert!(!String::from_utf8_lossy(&out.stderr).contains("panicked"));
    }

    let missing = dir.path().join("nope.json");
    let out = run(&["verify", "--params", missing.to_str().unwrap()]);
    assert_ne!(code(&out), 0);
    assert!(!String::from_utf8_lossy(&out.stderr).contains("panicked"));
}

#[test]
fn rho_zero_solve_reports_bracket_failure() {
    let out = run(&["solve", "--x", "1e-3", "--rho", "0"]);
    assert_eq!(code(&out), 2, "{:?}", out);
    assert!(!String::from_utf8_lossy(&out.stderr).contains("panicked"));
}

#[test]
fn verify_accepts_solved_params() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("p.json");
    assert_eq!(code(&solve_to(&json)), 0);
    let report = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--params",
        json.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{:?}", out);
    let v: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert!(v["residuals"]["p1"].as_f64().unwrap() < 1e-7);
}

#[test]
fn mesh_export_with_sidecar_and_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("p.json");
    assert_eq!(code(&solve_to(&json)), 0);

    let obj = dir.path().join("surface.obj");
    let out = run(&[
        "mesh",
        "--params",
        json.to_str().unwrap(),
        "--resolution",
        "16",
        "--copies",
        "1",
        "--out",
        obj.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{:?}", out);
    let mesh = periodforge::mesh::io::read_obj(&obj).unwrap();
    assert!(!mesh.faces.is_empty());

    let sidecar = dir.path().join("surface.obj.checks.json");
    let v: Value = serde_json::from_slice(&std::fs::read(&sidecar).unwrap()).unwrap();
    assert_eq!(v["schema"], "periodforge.meshchecks.v1");
    assert_eq!(v["resolution"], 16);
    assert!(v["checks"]["rotation_residual"].as_f64().unwrap() < 1e-6);

    // The PLY export of the same params carries the identical face list.
    let ply = dir.path().join("surface.ply");
    let out = run(&[
        "mesh",
        "--params",
        json.to_str().unwrap(),
        "--resolution",
        "16",
        "--copies",
        "1",
        "--format",
        "ply",
        "--out",
        ply.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{:?}", out);
    let mesh_ply = periodforge::mesh::io::read_ply(&ply).unwrap();
    assert_eq!(mesh.faces, mesh_ply.faces);
    assert_eq!(mesh.vertices.len(), mesh_ply.vertices.len());
}

#[test]
fn limits_x1_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "limits",
        "--which",
        "x1",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{:?}", out);
    for name in ["two_i6.csv", "two_i7.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.lines().count() >= 5, "{name} too short");
        assert!(
            text.starts_with("# schema=periodforge.limits"),
            "{name} header"
        );
        assert!(
            text.lines().nth(1).unwrap().starts_with("x,"),
            "{name} columns"
        );
    }
}

#[test]
fn thread_cap_env_still_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let status = bin()
        .args(["solve", "--x", "1e-3", "--rho", "-0.2", "--out"])
        .arg(&a)
        .env("PERIODFORGE_THREADS", "1")
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(code(&solve_to(&b)), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
