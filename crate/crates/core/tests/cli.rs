//! The `bimoment` binary: outputs and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bimoment::bimoment::RecurrenceSystem;
use num_complex::Complex64 as C64;
use tempfile::TempDir;

const QUARTIC: &str = r#"{"A1":[[0,0],[0,0],[0,0],[1,0]],"B1":[[1,0]],"A2":[[0,0],[0,0],[0,0],[1,0]],"B2":[[1,0]]}"#;
const GAUSSIAN: &str = r#"{"A1":[[0,0],[2,0]],"B1":[[1,0]],"A2":[[0,0],[2,0]],"B2":[[1,0]]}"#;
const DEGENERATE: &str = r#"{"A1":[[0,0],[1,0]],"B1":[[1,0]],"A2":[[0,0],[1,0]],"B2":[[1,0]]}"#;
const WEAK: &str = r#"{"A1":[[0,0],[1,0]],"B1":[[1,0]],"A2":[[0,0],[0.5,0]],"B2":[[1,0]]}"#;
const AIRY: &str = r#"{"A1":[[0,0],[0,0],[1,0]],"B1":[[1,0]],"A2":[[0,0],[0,0],[1,0]],"B2":[[1,0]]}"#;
const BRANCH: &str = r#"{"A1":[[-1.3,0],[0,0],[0,0],[0,0],[1,0]],"B1":[[0,0],[1,0]],"A2":[[0,0],[2,0]],"B2":[[1,0]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bimoment")).args(args).output().expect("binary runs")
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn header_value(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with("# ") && l.contains(key)).expect("header present");
    line.rsplit(' ').next().unwrap().parse().unwrap()
}

fn csv_entry(text: &str, n: usize, m: usize) -> (f64, f64) {
    let prefix = format!("{n},{m},");
    let line = text.lines().find(|l| l.starts_with(&prefix)).expect("row present");
    let f: Vec<f64> = line.split(',').skip(2).map(|v| v.parse().unwrap()).collect();
    (f[0], f[1])
}

#[test]
fn validate_reports_and_fails_cleanly() {
    let dir = TempDir::new().unwrap();
    let o = run(&["validate", s(&file(&dir, "q.json", QUARTIC))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("case BB1, s1=3 s2=3 M=9"));
    let o = run(&["validate", s(&file(&dir, "d.json", DEGENERATE))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("determinant"));
    let o = run(&["validate", s(&file(&dir, "bad.json", "{\"A1\": [[0,"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["validate", s(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn moments_csv() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "g.json", GAUSSIAN);
    let out = dir.path().join("g.csv");
    let o = run(&["moments", s(&spec), "--contour-x", "1", "--contour-y", "1", "--order", "4", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let (re, im) = csv_entry(&text, 0, 0);
    assert!((re - 3.627_598_728_468_436).abs() < 1e-8 && im.abs() < 1e-12);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("n,")).count(), 25);

    let o = run(&["moments", s(&spec), "--order", "0"]);
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("n,")).count(), 1);

    let o = run(&["moments", s(&file(&dir, "q.json", QUARTIC)), "--contour-x", "2", "--contour-y", "3", "--order", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(header_value(&stdout(&o), "recurrence residual") < 1e-6);

    let o = run(&["moments", s(&spec), "--contour-x", "2"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["moments", s(&file(&dir, "w.json", WEAK)), "--order", "2"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let spec = file(&dir, "q.json", QUARTIC);
    let a = run(&["moments", s(&spec), "--contour-x", "3", "--contour-y", "1", "--order", "5"]);
    let b = run(&["moments", s(&spec), "--contour-x", "3", "--contour-y", "1", "--order", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn certify() {
    let dir = TempDir::new().unwrap();
    let o = run(&["certify", s(&file(&dir, "q.json", QUARTIC)), "--order", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("rank 9/9"));
    let o = run(&["certify", s(&file(&dir, "g.json", GAUSSIAN)), "--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rank 1/1"));
    let dup = QUARTIC.trim_end_matches('}').to_string() + r#","contours_x":[1,1,2]}"#;
    let o = run(&["certify", s(&file(&dir, "dup.json", &dup)), "--order", "3"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn contour_dump() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("c.json");
    let o = run(&["contours", s(&file(&dir, "a.json", AIRY)), "--marginal", "x", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let cs = v["contours"].as_array().unwrap();
    assert_eq!(cs.len(), 2);
    assert!(cs.iter().all(|c| c["kind"] == "infinity_loop_3" && c["p_flag"] == true));

    let o = run(&["contours", s(&file(&dir, "b.json", BRANCH)), "--marginal", "x"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let cs = v["contours"].as_array().unwrap();
    assert_eq!(cs.len(), 4);
    assert_eq!(cs.iter().filter(|c| c["kind"] == "loop_1a").count(), 1);
    // replay: every ray direction lies strictly inside its declared sector
    let sectors = v["sectors"].as_array().unwrap();
    for c in cs {
        for r in c["rays"].as_array().unwrap() {
            let k = r["sector"].as_u64().unwrap() as usize;
            let angle = r["angle"].as_f64().unwrap();
            let center = sectors[k]["center"].as_f64().unwrap();
            let hw = sectors[k]["half_width"].as_f64().unwrap();
            let off = (C64::from_polar(1.0, angle) / C64::from_polar(1.0, center)).arg();
            assert!(off.abs() < hw);
        }
        for p in c["points"].as_array().unwrap() {
            assert!(p[0].as_f64().unwrap().is_finite() && p[1].as_f64().unwrap().is_finite());
        }
    }
}

#[test]
fn favard_command() {
    let dir = TempDir::new().unwrap();
    let shift = file(&dir, "shift.json", &RecurrenceSystem::<f64>::shift(3).to_json());
    let o = run(&["favard", s(&shift), "--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for n in 0..=3 {
        for m in 0..=3 {
            let want = if n == m { 1.0 } else { 0.0 };
            assert_eq!(csv_entry(&text, n, m), (want, 0.0));
        }
    }

    let mut r = RecurrenceSystem::<f64>::shift(5);
    for n in 0..5 {
        r.gamma[n] = C64::new(0.8 + 0.1 * n as f64, 0.3);
        r.gamma_t[n] = C64::new(1.1, -0.2 * n as f64);
        for j in 0..=n {
            r.a[n][j] = C64::new(0.2 / (j + 1) as f64, -0.1);
            r.b[n][j] = C64::new(-0.15, 0.05 * (n + j) as f64);
        }
    }
    r.pi0 = C64::new(1.3, 0.2);
    let o = run(&["favard", s(&file(&dir, "r.json", &r.to_json()))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(header_value(&stdout(&o), "roundtrip residual") < 1e-9);

    r.gamma[0] = C64::new(0.0, 0.0);
    let o = run(&["favard", s(&file(&dir, "z.json", &r.to_json()))]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(&["favard", s(&file(&dir, "junk.json", "[1, 2"))]);
    assert_eq!(o.status.code(), Some(2));
}
