use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fortlib"));
    c.env_remove("FORTLIB_CACHE").env_remove("RUST_LOG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn hypercube(dir: &Path, d: usize) -> PathBuf {
    let p = dir.join(format!("q{d}.json"));
    let out = run(&[
        "gen",
        "hypercube",
        &d.to_string(),
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    p
}

#[test]
fn gen_commands() {
    let v = json(&run(&["gen", "hypercube", "3"]));
    assert_eq!(v["n"], 8);
    assert_eq!(v["edges"].as_array().unwrap().len(), 12);

    let dir = TempDir::new().unwrap();
    let q1 = hypercube(dir.path(), 1);
    let v = json(&run(&[
        "gen",
        "product",
        q1.to_str().unwrap(),
        q1.to_str().unwrap(),
    ]));
    assert_eq!(v["n"], 4);
    assert_eq!(
        v["edges"],
        serde_json::json!([[0, 1], [0, 2], [1, 3], [2, 3]])
    );

    assert_eq!(run(&["gen", "hypercube", "0"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "nonsense"]).status.code(), Some(2));

    let el = dir.path().join("path.txt");
    fs::write(&el, "3 2\n0 1\n1 2\n").unwrap();
    let v = json(&run(&["gen", "edgelist", el.to_str().unwrap()]));
    assert_eq!(v["n"], 3);
}

#[test]
fn fort_censuses() {
    let dir = TempDir::new().unwrap();
    let q3 = hypercube(dir.path(), 3);
    let q4 = hypercube(dir.path(), 4);
    let q5 = hypercube(dir.path(), 5);
    assert_eq!(
        json(&run(&["forts", q3.to_str().unwrap(), "--minimal"]))["count"],
        14
    );
    assert_eq!(
        json(&run(&["forts", q4.to_str().unwrap(), "--minimal"]))["count"],
        348
    );

    let out = run(&["forts", q5.to_str().unwrap(), "--minimal"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--size"));

    let v = json(&run(&["forts", q5.to_str().unwrap(), "--size", "5"]));
    assert_eq!(v["count"], 32);

    let out = run(&["forts", q3.to_str().unwrap(), "--csv"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "size,count\n3,8\n4,6\n"
    );
}

#[test]
fn parameters() {
    let dir = TempDir::new().unwrap();
    let q2 = hypercube(dir.path(), 2);
    let q3 = hypercube(dir.path(), 3);
    let q4 = hypercube(dir.path(), 4);
    let v = json(&run(&["params", q4.to_str().unwrap(), "--all"]));
    assert_eq!(v["Z"], 8);
    assert_eq!(v["zstar"], "4");
    assert_eq!(v["ft"], 4);
    assert_eq!(v["gamma"], 4);
    assert_eq!(v["gamma_t"], 4);
    assert_eq!(v["rho_open"], 4);
    assert_eq!(v["failed_zf"], 12);

    let v = json(&run(&["params", q3.to_str().unwrap(), "--zstar"]));
    assert_eq!(v["zstar"], "8/3");
    assert!(v.get("Z").is_none());

    let v = json(&run(&["params", q2.to_str().unwrap(), "--pt"]));
    assert_eq!(
        (v["pt_min"].as_u64(), v["pt_max"].as_u64()),
        (Some(1), Some(1))
    );
}

#[test]
fn zero_forcing_commands() {
    let dir = TempDir::new().unwrap();
    let q2 = hypercube(dir.path(), 2);
    let q3 = hypercube(dir.path(), 3);
    assert_eq!(json(&run(&["zf", "number", q3.to_str().unwrap()]))["Z"], 4);
    let v = json(&run(&["zf", "enumerate", q2.to_str().unwrap()]));
    assert_eq!(
        v["sets"],
        serde_json::json!([[0, 1], [0, 2], [1, 3], [2, 3]])
    );
    let v = json(&run(&["zf", "pt", q3.to_str().unwrap()]));
    assert_eq!(v["spectrum"], serde_json::json!([1, 2]));
}

#[test]
fn construct_and_symmetry() {
    let dir = TempDir::new().unwrap();
    let q1 = hypercube(dir.path(), 1);
    let q3 = hypercube(dir.path(), 3);
    let (q1s, q3s) = (q1.to_str().unwrap(), q3.to_str().unwrap());

    let v = json(&run(&["construct", "product", q3s, "1,2,4", q1s, "0,1"]));
    assert_eq!(v["result"], serde_json::json!([2, 3, 4, 5, 8, 9]));
    assert_eq!(v["guarantee"], "minimal-fort");

    let v = json(&run(&["construct", "parity", q3s, "0,4,7,3", q1s, "0,1"]));
    assert_eq!(v["result"], serde_json::json!([0, 6, 9, 15]));
    assert_eq!(v["guarantee"], "fort");

    let out = run(&["construct", "product", q3s, "1,2", q1s, "0,1"]);
    assert_eq!(out.status.code(), Some(2));

    let v = json(&run(&["construct", "lift", q3s, "[0,2,3,1]"]));
    assert_eq!(v["result"].as_array().unwrap().len(), 8);

    let v = json(&run(&["sym", "canon", "3", "2,4,3,5"]));
    assert_eq!(v["orbit_size"], 6);
    let v = json(&run(&["sym", "classify", "3"]));
    let sizes: Vec<u64> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["orbit_size"].as_u64().unwrap())
        .collect();
    assert_eq!(sizes.iter().sum::<u64>(), 14);
}

#[test]
fn output_is_deterministic_and_manifest_digest_stable() {
    let dir = TempDir::new().unwrap();
    let q4 = hypercube(dir.path(), 4);
    let m1 = dir.path().join("m1.json");
    let m2 = dir.path().join("m2.json");
    let a = run(&[
        "--manifest",
        m1.to_str().unwrap(),
        "params",
        q4.to_str().unwrap(),
        "--all",
    ]);
    let b = run(&[
        "--jobs",
        "1",
        "--manifest",
        m2.to_str().unwrap(),
        "params",
        q4.to_str().unwrap(),
        "--all",
    ]);
    assert_eq!(a.stdout, b.stdout);
    let m1: Value = serde_json::from_str(&fs::read_to_string(m1).unwrap()).unwrap();
    let m2: Value = serde_json::from_str(&fs::read_to_string(m2).unwrap()).unwrap();
    assert_eq!(m1["result_digest"], m2["result_digest"]);
    assert_eq!(m1["input_hashes"], m2["input_hashes"]);
    assert_eq!(m1["exit_code"], 0);
}

#[test]
fn cache_reuse_and_corruption() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let q4 = hypercube(dir.path(), 4);
    let args = [
        "--cache-dir",
        cache.to_str().unwrap(),
        "forts",
        q4.to_str().unwrap(),
    ];
    let first = run(&args);
    assert!(first.status.success());
    let entries: Vec<_> = fs::read_dir(&cache)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(entries.len(), 1);
    assert_eq!(run(&args).stdout, first.stdout);

    fs::write(&entries[0], "{\"truncated\": ").unwrap();
    let again = run(&args);
    assert!(again.status.success());
    assert!(String::from_utf8_lossy(&again.stderr).contains("ignoring cache entry"));
    assert_eq!(again.stdout, first.stdout);

    let env_cache = dir.path().join("from-env");
    let out = bin()
        .env("FORTLIB_CACHE", &env_cache)
        .args(args)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(fs::read_dir(&env_cache).unwrap().count(), 1);
}

#[test]
fn verify_paper_passes() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cache");
    let v = json(&run(&[
        "--cache-dir",
        cache.to_str().unwrap(),
        "verify-paper",
    ]));
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["failed"], 0);
    for c in v["claims"].as_array().unwrap() {
        assert_eq!(c["pass"], true, "{c}");
        assert!(c.get("expected").is_some() && c.get("actual").is_some());
    }

    // a corrupted cached census is recomputed and the suite still passes
    for e in fs::read_dir(&cache).unwrap() {
        fs::write(e.unwrap().path(), "garbage").unwrap();
    }
    let out = run(&["--cache-dir", cache.to_str().unwrap(), "verify-paper"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ignoring cache entry"));

    assert_eq!(
        run(&["verify-paper", "--max-dim", "9"]).status.code(),
        Some(2)
    );
}
