use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

const SQUARE: &str = r#"{"type":"vpolytope","vertices":[[0,0],[1,0],[1,1],[0,1]]}"#;
const BIG_SQUARE: &str = r#"{"type":"vpolytope","vertices":[[5,5],[8,5],[8,8],[5,8]]}"#;
const FAR_SQUARE: &str = r#"{"type":"vpolytope","vertices":[[3,0],[4,0],[4,1],[3,1]]}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_convex-inclusion"))
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn s(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn nested_squares_with_translate() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", SQUARE);
    let b = write(&dir, "b.json", BIG_SQUARE);
    let out = run(&["check-inclusion", s(&a), s(&b), "--translate"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("x0 = ["));
    let out = run(&["check-inclusion", s(&a), s(&b)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn disjoint_squares_emit_certificate() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", FAR_SQUARE);
    let b = write(&dir, "b.json", SQUARE);
    let out = run(&["check-inclusion", s(&a), s(&b)]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["functional"], "volume");
    assert_eq!(v["eps"], 0.5);
    assert!(v["value_A"].as_f64().unwrap() > v["value_B"].as_f64().unwrap());
    assert!(v.get("flmap").is_some());
}

#[test]
fn malformed_file_exits_2() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", "{not json");
    let b = write(&dir, "b.json", SQUARE);
    assert_eq!(run(&["check-inclusion", s(&a), s(&b)]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["witness", missing.to_str().unwrap(), s(&b)]).status.code(),
        Some(2)
    );
}

#[test]
fn witness_writes_certificate() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", FAR_SQUARE);
    let b = write(&dir, "b.json", SQUARE);
    let cert = dir.path().join("cert.json");
    for f in ["volume", "surface", "W1"] {
        let out = run(&["witness", s(&a), s(&b), "--functional", f, "--eps", "0.5", "--out", s(&cert)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stdout).contains("volume: F(A) ="));
        let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
        assert_eq!(v["functional"], f);
    }
}

#[test]
fn witness_for_included_pair_reports_none() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"type":"ball","center":[0.5,0.5],"radius":0.2}"#);
    let b = write(&dir, "b.json", SQUARE);
    let out = run(&["witness", s(&a), s(&b)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("A ⊆ B: no witness exists"));
}

#[test]
fn bad_functional_and_unknown_suite_exit_2() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", FAR_SQUARE);
    let b = write(&dir, "b.json", SQUARE);
    assert_eq!(run(&["witness", s(&a), s(&b), "--functional", "W2"]).status.code(), Some(2));
    assert_eq!(run(&["suite", "nonsense", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(run(&["suite", "sums"]).status.code(), Some(2));
}

#[test]
fn reuleaux_suite_verdicts() {
    let out = run(&["suite", "reuleaux", "--samples", "10", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["sample_id", "params", "lhs", "rhs", "margin", "verdict"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 191);
    for r in &rows[..190] {
        assert_eq!(&r[5], "holds");
        assert!(r[3].parse::<f64>().unwrap() >= 2.0 - 1e-6);
    }
    assert_eq!(&rows[190][5], "infeasible");
    assert!(String::from_utf8_lossy(&out.stderr).contains("reuleaux: COUNTEREXAMPLE"));
}

#[test]
fn suites_are_deterministic() {
    let dir = TempDir::new().unwrap();
    for name in ["sums", "sections", "projections", "tuples-affine", "tuples-projective"] {
        let p1 = dir.path().join(format!("{name}-1.csv"));
        let p2 = dir.path().join(format!("{name}-2.csv"));
        for p in [&p1, &p2] {
            let out = run(&["suite", name, "--samples", "6", "--seed", "42", "--csv", s(p)]);
            assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
            assert!(String::from_utf8_lossy(&out.stdout).starts_with(name));
        }
        let (a, b) = (fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        assert_eq!(a, b, "{name}");
        assert_eq!(a.iter().filter(|&&c| c == b'\n').count(), 7, "{name}");
    }
}
