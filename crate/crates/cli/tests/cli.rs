use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SZEGO: &str = r#"{"domain":{"kind":"disk","dim":1},"rank":1,"kernel":{"type":"weighted_disk","lambda":1.0}}"#;
const BERGMAN: &str = r#"{"domain":{"kind":"disk","dim":1},"rank":1,"kernel":{"type":"weighted_disk","lambda":2.0}}"#;
const SZEGO_CONJ: &str = r#"{"domain":{"kind":"disk","dim":1},"rank":1,"kernel":{"type":"conjugate",
    "psi":[[{"poly":[{"re":1.0,"im":0.0,"powers":[0]},{"re":0.5,"im":0.0,"powers":[1]}]}]],
    "base":{"type":"weighted_disk","lambda":1.0}}}"#;
// 1/(1 + z/2)
const INVERSE_SHIFT: &str = r#"{"domain":{"kind":"disk","dim":1},"map":[[{"ratio":{
    "num":[{"re":1.0,"im":0.0,"powers":[0]}],
    "den":[{"re":1.0,"im":0.0,"powers":[0]},{"re":0.5,"im":0.0,"powers":[1]}]}}]]}"#;
const ONE: &str = r#"{"domain":{"kind":"disk","dim":1},"map":[[{"poly":[{"re":1.0,"im":0.0,"powers":[0]}]}]]}"#;
const DIAG_Z_1: &str = r#"{"domain":{"kind":"disk","dim":1},"map":[
    [{"poly":[{"re":1.0,"im":0.0,"powers":[1]}]},{"poly":[{"re":0.0,"im":0.0,"powers":[0]}]}],
    [{"poly":[{"re":0.0,"im":0.0,"powers":[0]}]},{"poly":[{"re":1.0,"im":0.0,"powers":[0]}]}]]}"#;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace {
            dir: tempfile::tempdir().unwrap(),
        };
        for (name, text) in [
            ("szego.json", SZEGO),
            ("bergman.json", BERGMAN),
            ("szego_conj.json", SZEGO_CONJ),
            ("inverse_shift.json", INVERSE_SHIFT),
            ("one.json", ONE),
            ("diag.json", DIAG_Z_1),
        ] {
            fs::write(ws.path(name), text).unwrap();
        }
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        self.run_with(args, &[])
    }

    fn run_with(&self, args: &[&str], env: &[(&str, &str)]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_qfhm"))
            .current_dir(self.dir.path())
            .args(args)
            .envs(env.iter().copied())
            .output()
            .unwrap()
    }
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn szego_bergman_is_inequivalent() {
    let ws = Workspace::new();
    let o = ws.run(&[
        "equiv",
        "--kernel-a",
        "szego.json",
        "--kernel-b",
        "bergman.json",
        "--out",
        "v.json",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let v = json(&ws.path("v.json"));
    assert_eq!(v["verdict"], "inequivalent");
    assert_eq!(v["test"], "curvature");
    assert_eq!(v["witness_point"][0]["re"].as_f64(), Some(0.0));
    assert!((v["witness_residual"].as_f64().unwrap() - 1.0).abs() < 1e-4);
    assert_eq!(v["metadata"]["convention"], "per-proof");
    assert_eq!(v["metadata"]["tol"], "1.000000000000e-05");
}

#[test]
fn identical_specs_are_equivalent() {
    let ws = Workspace::new();
    let o = ws.run(&["equiv", "--kernel-a", "szego.json", "--kernel-b", "szego.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "equivalent");
    assert!(v["max_residual"].as_f64().unwrap() < 1e-8);
    assert!(v["witness_point"].is_null());
}

#[test]
fn conjugate_is_equivalent() {
    let ws = Workspace::new();
    let o = ws.run(&[
        "equiv",
        "--kernel-a",
        "szego.json",
        "--kernel-b",
        "szego_conj.json",
        "--grid",
        "11x11",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn grammian_test_never_says_inequivalent() {
    let ws = Workspace::new();
    let o = ws.run(&[
        "equiv",
        "--kernel-a",
        "szego.json",
        "--kernel-b",
        "bergman.json",
        "--test",
        "grammian",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "inconclusive");
}

#[test]
fn factorization_candidates() {
    let ws = Workspace::new();
    let base = [
        "equiv",
        "--kernel-a",
        "szego.json",
        "--test",
        "factorization",
        "--grid",
        "9x9",
    ];
    let pass = ws.run(
        &[
            &base[..],
            &["--kernel-b", "szego_conj.json", "--psi", "inverse_shift.json"],
        ]
        .concat(),
    );
    assert_eq!(pass.status.code(), Some(0), "{}", stderr(&pass));
    let v: Value = serde_json::from_slice(&pass.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert!(v["metadata"]["psi_sha256"].is_string());

    let fail = ws.run(&[&base[..], &["--kernel-b", "bergman.json", "--psi", "one.json"]].concat());
    assert_eq!(fail.status.code(), Some(3), "{}", stderr(&fail));
    let v: Value = serde_json::from_slice(&fail.stdout).unwrap();
    assert_eq!(v["pass"], false);
    // |1 − (1 − |z|²)| = |z|² at the worst point
    let p = &v["worst_point"][0];
    let r2 = p["re"].as_f64().unwrap().powi(2) + p["im"].as_f64().unwrap().powi(2);
    assert!((v["max_residual"].as_f64().unwrap() - r2).abs() < 1e-10);

    let missing = ws.run(&[&base[..], &["--kernel-b", "bergman.json"]].concat());
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("--psi"));
}

#[test]
fn curvature_csv_layout() {
    let ws = Workspace::new();
    let o = ws.run(&["curvature", "--kernel", "bergman.json", "--grid", "3x3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "x,y,re_c11,im_c11");
    assert_eq!(body.len(), 10);
    let centre: Vec<&str> = body[5].split(',').collect();
    assert_eq!(&centre[..2], &["0.000000000000e+00", "0.000000000000e+00"]);
    assert!((centre[2].parse::<f64>().unwrap() - 0.5).abs() < 1e-6);
    for key in [
        "kernel_sha256",
        "grid=3x3",
        "scheme=h=1e-3+richardson",
        "convention=per-proof",
    ] {
        assert!(text.contains(key), "missing {}", key);
    }
}

#[test]
fn outputs_are_deterministic() {
    let ws = Workspace::new();
    let args = [
        "curvature",
        "--kernel",
        "szego_conj.json",
        "--grid",
        "9x9",
        "--format",
        "json",
    ];
    let one = ws.run_with(&args, &[("QFHM_THREADS", "1")]);
    let four = ws.run_with(&args, &[("QFHM_THREADS", "4")]);
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(one.stdout, ws.run(&args).stdout);
}

#[test]
fn bad_thread_count_is_an_error() {
    let ws = Workspace::new();
    let o = ws.run_with(
        &["curvature", "--kernel", "szego.json", "--grid", "3x3"],
        &[("QFHM_THREADS", "zero")],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("QFHM_THREADS"));
}

#[test]
fn modulus_eigenvalues() {
    let ws = Workspace::new();
    let o = ws.run(&[
        "modulus",
        "--kernel-a",
        "szego.json",
        "--kernel-b",
        "bergman.json",
        "--grid",
        "5x5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rows = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(rows.next(), Some("x,y,mu1"));
    for row in rows {
        let v: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        // μ = √(K_A/K_B) = √(1 − |z|²)
        let expected = (1.0 - v[0] * v[0] - v[1] * v[1]).sqrt();
        assert!((v[2] - expected).abs() < 1e-12, "{}", row);
    }
}

#[test]
fn rank_profile_finds_the_origin() {
    let ws = Workspace::new();
    let o = ws.run(&[
        "rank-profile",
        "--map",
        "diag.json",
        "--grid",
        "21x21",
        "--out",
        "p.csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("rank 1: 1 of"));
    let text = fs::read_to_string(ws.path("p.csv")).unwrap();
    let rank_one: Vec<&str> = text.lines().filter(|l| l.contains(",1,")).collect();
    assert_eq!(rank_one.len(), 1);
    assert!(rank_one[0].starts_with("0.000000000000e+00,0.000000000000e+00,1,"));
}

#[test]
fn parse_errors_report_location() {
    let ws = Workspace::new();
    fs::write(
        ws.path("broken.json"),
        "{\n  \"domain\": {\"kind\": \"disk\", \"dim\": 1},\n  \"rank\": 1,\n  \"kernel\": \n}",
    )
    .unwrap();
    let o = ws.run(&["curvature", "--kernel", "broken.json"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("broken.json") && err.contains("line 5"), "{}", err);
}

#[test]
fn validation_errors_name_the_module() {
    let ws = Workspace::new();
    fs::write(ws.path("neg.json"), SZEGO.replace("1.0", "-1.0")).unwrap();
    let o = ws.run(&["curvature", "--kernel", "neg.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kernels: weight"), "{}", stderr(&o));

    let o = ws.run(&[
        "equiv",
        "--kernel-a",
        "szego.json",
        "--kernel-b",
        "bergman.json",
        "--tol",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = ws.run(&["curvature", "--kernel", "szego.json", "--grid", "2x9"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ws.run(&["curvature", "--kernel", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_check_report() {
    let ws = Workspace::new();
    let o = ws.run(&["check", "--oracle", "--out", "r.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("PASS") && !table.contains("FAIL"));
    let r = json(&ws.path("r.json"));
    assert_eq!(r["failed"], 0);
    let records = r["records"].as_array().unwrap();
    assert!(!records.is_empty());
    for rec in records {
        assert!(rec["test"].as_str().unwrap().starts_with("oracle."));
        for key in ["residual", "tolerance", "pass"] {
            assert!(!rec[key].is_null(), "{} missing in {}", key, rec);
        }
    }
}
