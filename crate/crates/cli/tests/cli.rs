use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use paradot_cli::config::SweepConfig;
use paradot_cli::emit::read_csv;
use paradot_cli::sweep::run_sweep;

fn paradot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paradot"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("sweep.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const CONFIG: &str = r#"{"primes":[7,11],"dims":[3],"families":[
    {"family":"random","alpha":"4/3"},
    {"family":"construction","kind":"odd3mod4","k":3}],"trials":2,"seed":42}"#;

#[test]
fn unknown_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"prims":[7],"families":[{"family":"random","alpha":1}]}"#,
    );
    let out = paradot(&["sweep", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prims"));
}

#[test]
fn csv_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let csv = dir.path().join("rows.csv");
    let out = paradot(&["sweep", &cfg, "--out", csv.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let bytes = fs::read(&csv).unwrap();
    assert!(!bytes.contains(&b'\r'));
    let rows = read_csv(bytes.as_slice()).unwrap();
    // k = 3 does not divide 11 − 1, so those cells carry an error instead of counts
    assert!(rows.iter().any(|r| r.error.is_some()));
    let direct = run_sweep(&SweepConfig::parse(CONFIG).unwrap()).unwrap();
    assert_eq!(rows.len(), direct.len());
    for (a, b) in rows.iter().zip(&direct) {
        assert_eq!(a.set_size, b.set_size);
        assert_eq!(a.m_energy, b.m_energy);
        assert_eq!(a.seed, b.seed);
        assert_eq!(a.error, b.error);
        match (a.ratio, b.ratio) {
            (Some(x), Some(y)) => assert!((x - y).abs() < 1e-8),
            (x, y) => assert_eq!(x, y),
        }
    }
}

#[test]
fn thread_count_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let one = paradot(&["sweep", &cfg, "--threads", "1"]);
    let eight = paradot(&["sweep", &cfg, "--threads", "8"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, eight.stdout);
    let json = paradot(&["sweep", &cfg, "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 8);
}

#[test]
fn mean_ratio_grows_with_alpha() {
    let mut means = Vec::new();
    for alpha in ["1/2", "1", "4/3", "3/2", "2"] {
        let config = SweepConfig::parse(&format!(
            r#"{{"primes":[11],"dims":[3],"families":[{{"family":"random","alpha":"{alpha}"}}],"trials":20,"seed":5}}"#
        ))
        .unwrap();
        let rows = run_sweep(&config).unwrap();
        means.push(rows.iter().map(|r| r.ratio.unwrap()).sum::<f64>() / rows.len() as f64);
    }
    for w in means.windows(2) {
        assert!(w[1] >= w[0] - 0.05, "{means:?}");
    }
}

#[test]
fn construct_writes_points_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.txt");
    let out = paradot(&[
        "construct",
        "--kind",
        "even2mod4",
        "--p",
        "7",
        "--d",
        "6",
        "--k",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let set = paradot::PointSet::load(&path).unwrap();
    assert_eq!(set.len(), 147);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("e.txt.json")).unwrap()).unwrap();
    assert_eq!(report["products"], serde_json::json!([2, 6]));

    let counted = paradot(&["count", "--input", path.to_str().unwrap(), "--chain"]);
    assert!(counted.status.success());
    let counts: serde_json::Value = serde_json::from_slice(&counted.stdout).unwrap();
    assert_eq!(counts["prod_size"], 2);
    for key in [
        "p",
        "d",
        "set_size",
        "prod_size",
        "D",
        "D_star",
        "M",
        "t_nde",
        "t_de",
        "t_star",
        "degenerate_pairs",
    ] {
        assert!(counts.get(key).is_some(), "{key}");
    }
}

#[test]
fn verification_subcommands() {
    assert_eq!(paradot(&["fourier-verify"]).status.code(), Some(0));
    assert_eq!(
        paradot(&["oracle-diff", "--instances", "2"]).status.code(),
        Some(0)
    );
    assert_eq!(
        paradot(&["mpprp-check", "--primes", "7,11"]).status.code(),
        Some(0)
    );
    // p ≡ 1 (mod 4) breaks the excess check's hypothesis
    assert_eq!(
        paradot(&["mpprp-check", "--primes", "13"]).status.code(),
        Some(2)
    );
    assert_eq!(
        paradot(&["construct", "--kind", "even0mod4", "--p", "7", "--d", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(paradot(&["product"]).status.code(), Some(2));
    assert_eq!(paradot(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn product_of_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let (e, f) = (dir.path().join("e.txt"), dir.path().join("f.txt"));
    fs::write(&e, "7 2 2\n1 0\n0 1\n").unwrap();
    fs::write(&f, "7 2 1\n3 5\n").unwrap();
    let out = paradot(&[
        "product",
        "--input",
        e.to_str().unwrap(),
        "--other",
        f.to_str().unwrap(),
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["products"], serde_json::json!([3, 5]));
}
