//! End-to-end tests of the lipmin binary: subcommand wiring, file formats,
//! exit codes, and report determinism.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lipmin"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lipmin_cli_{tag}_{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn simulate_minorant_excursions_round_trip() {
    let dir = tmp_dir("roundtrip");
    let path_json = dir.join("path.json");
    let csv = dir.join("path.csv");
    let status = bin()
        .args([
            "simulate", "--process", "brownian", "--beta", "0.0", "--tmin", "-8", "--tmax", "30",
            "--dt", "0.002", "--seed", "11", "--out",
        ])
        .arg(&path_json)
        .arg("--csv")
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let csv_text = fs::read_to_string(&csv).unwrap();
    assert!(csv_text.starts_with("t,x\n"));

    let m_json = dir.join("m.json");
    let status = bin()
        .args(["minorant", "--in"])
        .arg(&path_json)
        .args(["--alpha", "1.0", "--tol", "0", "--out"])
        .arg(&m_json)
        .status()
        .unwrap();
    assert!(status.success());
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(&m_json).unwrap()).unwrap();
    assert!(m["contacts"].as_array().unwrap().len() > 2);
    assert!(m["minorant"].as_array().unwrap().len() > 1000);
    assert!(m["d"].as_f64().unwrap() > 0.0);

    let exc_csv = dir.join("exc.csv");
    let status = bin()
        .args(["excursions", "--in"])
        .arg(&path_json)
        .args(["--alpha", "1.0", "--out"])
        .arg(&exc_csv)
        .status()
        .unwrap();
    assert!(status.success());
    let rows = fs::read_to_string(&exc_csv).unwrap();
    assert!(rows.starts_with("start,zeta,L,w_zeta,h\n"));
    assert!(rows.lines().count() > 5, "expected several excursions:\n{rows}");

    fs::remove_dir_all(&dir).ok();
}

#[test]
fn sample_excursion_features_csv() {
    let dir = tmp_dir("features");
    let out = dir.join("f.csv");
    let status = bin()
        .args([
            "sample-excursion", "--alpha", "1", "--beta", "0", "--n", "50", "--mode", "features",
            "--seed", "3", "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 51); // header + 50 rows
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn laws_eval_single_and_batch() {
    let out = bin()
        .args([
            "laws", "eval", "--quantity", "zeta-density", "--alpha", "1", "--beta", "0", "--at",
            "1.0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((v - 0.16663094117537259677).abs() < 1e-12);

    let dir = tmp_dir("batch");
    let batch = dir.join("batch.json");
    fs::write(
        &batch,
        r#"[{"quantity":"psi","alpha":1.0,"beta":0.0,"rho":[0.5,0,0,0]},
            {"quantity":"hitting-density","mu":1.0,"y":1.0,"at":1.0},
            {"quantity":"zeta-density","alpha":1.0,"beta":0.5,"at":1.0}]"#,
    )
    .unwrap();
    let out = bin().args(["laws", "eval", "--batch"]).arg(&batch).output().unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stdout).trim()).unwrap();
    let arr = parsed.as_array().unwrap();
    assert_eq!(arr.len(), 3);
    assert!((arr[0]["value"].as_f64().unwrap() - 0.8284271247461901).abs() < 1e-12);
    assert!((arr[1]["value"].as_f64().unwrap() - 0.39894228040143267794).abs() < 1e-12);
    // beta != 0 zeta density is unsupported: per-entry error, not a crash
    assert_eq!(arr[2]["ok"].as_bool().unwrap(), false);
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_reports_are_byte_identical_and_exit_codes_work() {
    let dir = tmp_dir("verify");
    let r1 = dir.join("r1.json");
    let r2 = dir.join("r2.json");
    for r in [&r1, &r2] {
        let status = bin()
            .args(["verify", "--suite", "laws", "--n", "500", "--seed", "99", "--report"])
            .arg(r)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let b1 = fs::read(&r1).unwrap();
    let b2 = fs::read(&r2).unwrap();
    assert_eq!(b1, b2, "reports with the same seed must be byte-identical");

    let status = bin().args(["verify", "--suite", "bogus"]).status().unwrap();
    assert_eq!(status.code(), Some(2), "unknown suite is a usage error");

    let status = bin().args(["verify", "--bad-flag"]).status().unwrap();
    assert_eq!(status.code(), Some(2), "clap usage errors exit 2");
    fs::remove_dir_all(&dir).ok();
}

#[test]
fn env_seed_fallback() {
    let out = bin()
        .env("LIPMIN_SEED", "12345")
        .args(["sample-excursion", "--alpha", "1", "--n", "3", "--mode", "features"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let with_env = String::from_utf8_lossy(&out.stdout).to_string();
    let out = bin()
        .args(["sample-excursion", "--alpha", "1", "--n", "3", "--mode", "features", "--seed", "12345"])
        .output()
        .unwrap();
    let with_flag = String::from_utf8_lossy(&out.stdout).to_string();
    assert_eq!(with_env, with_flag);
}
