//! End-to-end runs through the library entry point and the binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use sublin_cli::{parse_config, run, CliError, ExperimentConfig, RunStatus, EXIT_CONDITIONS, EXIT_OK, EXIT_USAGE, OUTPUT_FILES};
use tempfile::TempDir;

fn coin() -> Value {
    json!({
        "name": "coin",
        "model": {"coordinates": {"repeat": [
            {"kind": "two_point", "x_minus": -1, "x_plus": 1, "p_plus": 0.4},
            {"kind": "two_point", "x_minus": -1, "x_plus": 1, "p_plus": 0.6}
        ]}},
        "epsilon": [0.2],
        "n_schedule": [5, 20, 50],
        "proof_chain_n": [1, 5, 20],
        "budget": {"mc_reps": 400, "restarts": 1, "max_passes": 2, "seed": 9}
    })
}

fn cauchy() -> Value {
    json!({
        "model": {"coordinates": {"repeat": [{"kind": "cauchy", "location": 0, "scale": 1}]}},
        "epsilon": [1.0],
        "n_schedule": [10, 100],
        "budget": {"mc_reps": 200, "restarts": 0, "max_passes": 1, "seed": 3}
    })
}

fn comonotone() -> Value {
    json!({
        "model": {
            "coordinates": {"repeat": [{"kind": "two_point", "x_minus": -1, "x_plus": 1, "p_plus": 0.5}]},
            "dependence": {"joint_pairs": {"default": [[
                {"first": 1, "second": 1, "prob": 0.5},
                {"first": -1, "second": -1, "prob": 0.5}
            ]]}}
        },
        "epsilon": [0.1],
        "n_schedule": [4, 8],
        "budget": {"mc_reps": 100, "seed": 1}
    })
}

fn config(doc: &Value, dir: &Path) -> ExperimentConfig {
    ExperimentConfig::from_raw(parse_config(&doc.to_string()).unwrap())
        .unwrap()
        .with_output_dir(dir.to_path_buf())
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

fn sublin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sublin")).args(args).output().unwrap()
}

fn write_doc(dir: &TempDir, doc: &Value) -> String {
    let path = dir.path().join("run.json");
    fs::write(&path, doc.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_every_output_and_a_faithful_manifest() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let outcome = run(&config(&coin(), &out)).unwrap();
    assert_eq!(outcome.exit_code(), EXIT_OK);
    assert_eq!(outcome.manifest.status, RunStatus::Ok);

    let listed: Vec<&str> = outcome.manifest.files.iter().map(|f| f.path.as_str()).collect();
    let mut want = OUTPUT_FILES.to_vec();
    let mut got = listed.clone();
    want.sort_unstable();
    got.sort_unstable();
    assert_eq!(got, want);
    for entry in &outcome.manifest.files {
        let bytes = fs::read(out.join(&entry.path)).unwrap();
        if let Some(sha) = &entry.sha256 {
            assert_eq!(*sha, hex::encode(Sha256::digest(&bytes)), "{}", entry.path);
            assert_eq!(entry.bytes, Some(bytes.len() as u64));
        }
    }

    let convergence = read(&out, "convergence.csv");
    assert!(convergence.starts_with("n,epsilon,mu_upper,mu_lower,v_upper_hat,"));
    assert_eq!(convergence.lines().count(), 1 + 3);
    let chain = read(&out, "proof_chain.csv");
    assert_eq!(chain.lines().next(), Some("n,bound,lhs,rhs,holds"));
    assert!(chain.lines().skip(1).all(|l| l.ends_with(",true")));

    let summary: Value = serde_json::from_str(&read(&out, "summary.json")).unwrap();
    assert_eq!(summary["name"], "coin");
    assert_eq!(summary["seed"], 9);
    assert_eq!(summary["proof_chain_levels"], json!([1, 5, 20]));
    assert_eq!(summary["proof_chain_holds"], true);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run(&config(&coin(), &a)).unwrap();
    run(&config(&coin(), &b).with_jobs(3)).unwrap();
    for name in OUTPUT_FILES.iter().filter(|n| **n != "manifest.json") {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn rerun_into_own_output_replaces_it() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    run(&config(&coin(), &out)).unwrap();
    let first = read(&out, "convergence.csv");
    run(&config(&coin(), &out)).unwrap();
    assert_eq!(read(&out, "convergence.csv"), first);
}

#[test]
fn seed_changes_estimates_and_hash() {
    let tmp = TempDir::new().unwrap();
    let base = config(&coin(), &tmp.path().join("a"));
    let other = config(&coin(), &tmp.path().join("b")).with_seed(10);
    assert_ne!(base.hash(), other.hash());
    // output location and thread count are not part of the experiment
    assert_eq!(base.hash(), config(&coin(), &tmp.path().join("c")).with_jobs(2).hash());
    let a = run(&base).unwrap();
    let b = run(&other).unwrap();
    assert_ne!(a.summary.convergence[0].v_upper_hat, b.summary.convergence[0].v_upper_hat);
}

#[test]
fn cauchy_run_completes_with_failed_conditions() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let outcome = run(&config(&cauchy(), &out)).unwrap();
    assert!(!outcome.summary.conditions.psi.pass);
    assert_eq!(outcome.exit_code(), EXIT_CONDITIONS);
    assert_eq!(outcome.manifest.status, RunStatus::ConditionsFailed);
    assert_eq!(read(&out, "convergence.csv").lines().count(), 1 + 2);
    let convergence = read(&out, "convergence.csv");
    let psi_col = convergence.lines().next().unwrap().split(',').position(|c| c == "psi_pass").unwrap();
    assert!(convergence.lines().skip(1).all(|l| l.split(',').nth(psi_col) == Some("false")));
}

#[test]
fn joint_models_skip_path_stages() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let outcome = run(&config(&comonotone(), &out)).unwrap();
    let cesaro = outcome.summary.conditions.cesaro.as_ref().unwrap();
    assert_eq!(cesaro.iter().map(|r| r.n).collect::<Vec<_>>(), vec![4, 8]);
    assert!(cesaro.iter().all(|r| !r.pass));
    assert!(outcome.summary.skipped.is_some());
    assert!(outcome.summary.convergence.is_empty());
    assert_eq!(read(&out, "convergence.csv").lines().count(), 1);
    assert_eq!(read(&out, "proof_chain.csv").lines().count(), 1);
    assert_eq!(outcome.exit_code(), EXIT_CONDITIONS);
}

#[test]
fn foreign_files_block_the_run() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join("notes.txt"), "mine").unwrap();
    let err = run(&config(&coin(), &out)).unwrap_err();
    assert!(matches!(err, CliError::ForeignFiles { ref names, .. } if names == "notes.txt"));
    assert_eq!(err.exit_code(), EXIT_USAGE);
    assert_eq!(read(&out, "notes.txt"), "mine");
}

#[test]
fn binary_reports_success() {
    let tmp = TempDir::new().unwrap();
    let path = write_doc(&tmp, &coin());
    let out = tmp.path().join("out");
    let o = sublin(&["--config", &path, "--out-dir", out.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(i32::from(EXIT_OK)), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("psi     pass"), "{stdout}");
    assert!(out.join("manifest.json").exists());
}

#[test]
fn binary_flags_override_the_document() {
    let tmp = TempDir::new().unwrap();
    let path = write_doc(&tmp, &coin());
    let out = tmp.path().join("out");
    let o = sublin(&["--config", &path, "--out-dir", out.to_str().unwrap(), "--seed", "77", "--quick"]);
    assert_eq!(o.status.code(), Some(i32::from(EXIT_OK)));
    let manifest: Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["seed"], 77);
    assert_eq!(manifest["status"], "ok");
}

#[test]
fn binary_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let out = out.to_str().unwrap();

    let mut bad = coin();
    bad["epsilon"] = json!([0.0]);
    let o = sublin(&["--config", &write_doc(&tmp, &bad), "--out-dir", out]);
    assert_eq!(o.status.code(), Some(i32::from(EXIT_USAGE)));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid epsilon"));

    let path = tmp.path().join("broken.json");
    fs::write(&path, "{\n  \"epsilon\": [0.1,\n").unwrap();
    let o = sublin(&["--config", path.to_str().unwrap(), "--out-dir", out]);
    assert_eq!(o.status.code(), Some(i32::from(EXIT_USAGE)));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    let o = sublin(&["--config", tmp.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(i32::from(EXIT_USAGE)));

    let o = sublin(&["--config", &write_doc(&tmp, &coin()), "--jobs", "0"]);
    assert_eq!(o.status.code(), Some(i32::from(EXIT_USAGE)));

    let o = sublin(&["--config", &write_doc(&tmp, &cauchy()), "--out-dir", out]);
    assert_eq!(o.status.code(), Some(i32::from(EXIT_CONDITIONS)));
    assert!(String::from_utf8_lossy(&o.stdout).contains("psi     FAIL"));
}
