//! End-to-end runs of the `hyperent` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hyperent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperent"))
        .args(args)
        .env_remove("HYPERENT_MAX_QUBITS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn graph(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn state_examples() {
    let dir = tempfile::tempdir().unwrap();
    let bell = graph(dir.path(), "bell.txt", "n 2\n0 1\n");
    let v = json(&hyperent(&[
        "state",
        "--graph-file",
        &bell,
        "--a-mask",
        "1",
        "--format",
        "json",
    ]));
    let row = &v["rows"][0];
    assert_eq!(row["purity"], "1/2^1");
    assert_eq!(row["purity_decimal"], 0.5);
    assert_eq!(row["renyi2"], 1.0);
    assert_eq!(row["cut_rank"], 1);

    let empty = graph(dir.path(), "empty.txt", "n 4\n");
    let v = json(&hyperent(&[
        "state",
        "--graph-file",
        &empty,
        "--format",
        "json",
    ]));
    assert_eq!(v["rows"][0]["purity_decimal"], 1.0);
    assert_eq!(v["rows"][0]["renyi2"], 0.0);

    let ccz = graph(dir.path(), "ccz.txt", "n 3\n0 1 2\n");
    let v = json(&hyperent(&[
        "state",
        "--graph-file",
        &ccz,
        "--a-mask",
        "0b001",
        "--format",
        "json",
    ]));
    assert_eq!(v["rows"][0]["purity"], "5/2^3");
    assert_eq!(v["rows"][0]["cut_rank"], Value::Null);
}

#[test]
fn state_errors_use_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let broken = graph(dir.path(), "broken.txt", "n 3\n0 7\n");
    let out = hyperent(&["state", "--graph-file", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));

    let missing = dir.path().join("nope.txt");
    let out = hyperent(&["state", "--graph-file", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let ccz = graph(dir.path(), "ccz.txt", "n 3\n0 1 2\n");
    let out = hyperent(&["state", "--graph-file", &ccz, "--a-mask", "0b1000"]);
    assert_eq!(out.status.code(), Some(3));

    let out = Command::new(env!("CARGO_BIN_EXE_hyperent"))
        .args(["state", "--graph-file", &ccz])
        .env("HYPERENT_MAX_QUBITS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_hyperent"))
        .args(["state", "--graph-file", &ccz])
        .env("HYPERENT_MAX_QUBITS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhaustive_cz_moments() {
    let out = hyperent(&[
        "moments",
        "--family",
        "cz",
        "--n",
        "8",
        "--na",
        "4",
        "--exhaustive",
    ]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let headers = rdr.headers().unwrap().clone();
    let row = rdr.records().next().unwrap().unwrap();
    let get = |k: &str| {
        row.get(headers.iter().position(|h| h == k).unwrap())
            .unwrap()
            .to_string()
    };
    assert_eq!(get("mean_exact"), "31/256");
    assert_eq!(get("variance_exact"), "225/65536");
    assert_eq!(get("z_score"), "0.0");
    assert_eq!(get("samples"), "65536");
    assert_eq!(get("method"), "rank");
}

#[test]
fn sampled_ccz_moments_and_determinism() {
    let args = [
        "moments",
        "--family",
        "ccz",
        "--n",
        "14",
        "--na",
        "7",
        "--samples",
        "10000",
        "--seed",
        "1",
    ];
    let a = hyperent(&args);
    let v = {
        let mut with_json = args.to_vec();
        with_json.extend(["--format", "json"]);
        json(&hyperent(&with_json))
    };
    let z = v["rows"][0]["z_score"].as_f64().unwrap();
    assert!(z.abs() <= 5.0, "z = {z}");
    let b = hyperent(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut three = args.to_vec();
    three.extend(["--workers", "3"]);
    assert_eq!(hyperent(&three).stdout, a.stdout);
}

#[test]
fn sweep_rows_ascend() {
    let out = hyperent(&[
        "moments",
        "--n",
        "4-8:2",
        "--samples",
        "200",
        "--format",
        "json",
    ]);
    let v = json(&out);
    let ns: Vec<u64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["n"].as_u64().unwrap())
        .collect();
    assert_eq!(ns, vec![4, 6, 8]);
    let keys: Vec<&str> = v["rows"][0]
        .as_object()
        .unwrap()
        .keys()
        .map(|k| k.as_str())
        .collect();
    for k in [
        "n",
        "n_a",
        "family",
        "scope",
        "p",
        "samples",
        "mean",
        "variance",
        "std_err_mean",
        "closed_form_mean",
        "closed_form_variance",
        "z_score",
    ] {
        assert!(keys.contains(&k), "missing {k}");
    }
}

#[test]
fn moments_usage_and_domain_errors() {
    let out = hyperent(&["moments", "--family", "k-uniform", "--n", "6"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hyperent(&["moments", "--family", "ccz", "--n", "6", "--method", "rank"]);
    assert_eq!(out.status.code(), Some(3));
    let out = hyperent(&["moments", "--family", "ccz", "--n", "14", "--exhaustive"]);
    assert_eq!(out.status.code(), Some(3));
    let out = hyperent(&["moments", "--n", "6", "--p", "1.5"]);
    assert_eq!(out.status.code(), Some(3));
    let out = hyperent(&["moments", "--n", "6", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(hyperent(&["--help"]).status.code(), Some(0));
}

#[test]
fn k_uniform_and_all_edges() {
    let out = hyperent(&[
        "moments",
        "--family",
        "k-uniform",
        "--k",
        "4",
        "--n",
        "6",
        "--na",
        "3",
        "--exhaustive",
        "--scope",
        "all",
        "--format",
        "json",
    ]);
    let v = json(&out);
    assert_eq!(v["rows"][0]["scope"], "all");
    assert_eq!(v["rows"][0]["closed_form_mean"], Value::Null);
}

#[test]
fn rankdist_examples() {
    let out = hyperent(&[
        "rankdist",
        "--n",
        "1",
        "--samples",
        "4000",
        "--seed",
        "3",
        "--format",
        "json",
    ]);
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    let f1 = rows[1]["frequency"].as_f64().unwrap();
    assert!((f1 - 0.5).abs() < 5.0 * (0.25f64 / 4000.0).sqrt(), "{f1}");

    let out = hyperent(&["rankdist", "--n", "16", "--samples", "20000"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("s,count,frequency,closed_form_Qs,std_err\n"));

    assert_eq!(
        hyperent(&["rankdist", "--n", "8", "--samples", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn formula_reports() {
    let v = json(&hyperent(&["formula", "ccz-avg-purity", "--n", "6"]));
    assert_eq!(v["label"], "ccz_avg_purity");
    assert_eq!(v["value"], "69/256");
    assert_eq!(v["validity"], "exact");
    assert_eq!(v["inputs"]["n_a"], 3);

    let v = json(&hyperent(&["formula", "sharp4-paper", "--m", "2"]));
    assert_eq!(v["value"], "192");
    assert_eq!(v["validity"], "asymptotic");

    let v = json(&hyperent(&[
        "formula",
        "entropy-variance-bounds",
        "--n",
        "12",
        "--ensemble",
        "ccz",
    ]));
    assert_eq!(v["validity"], "bound");
    assert!((v["value"].as_f64().unwrap() - 0.3).abs() < 1e-12);

    let out = hyperent(&["formula", "sharp4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quick_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("verify.json");
    let out = hyperent(&[
        "verify",
        "--suite",
        "quick",
        "--format",
        "json",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 11);
    for c in v["criteria"].as_array().unwrap() {
        for k in ["id", "name", "passed", "expected", "observed", "tolerance"] {
            assert!(c.get(k).is_some());
        }
    }
}
