//! Smoke test: every checked-in fuzz corpus seed goes through the same
//! entry points the fuzz targets exercise, so `cargo test` keeps the seeds
//! valid even without a fuzzing toolchain.

use std::fs;
use std::path::PathBuf;

fn corpus_dir(target: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target)
}

#[test]
fn path_json_corpus_parses_and_round_trips() {
    let dir = corpus_dir("fuzz_path_json");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        if let Ok(parsed) = lipmin::paths::parse_path_json(&text) {
            let json = lipmin::paths::path_to_json(&parsed).unwrap();
            lipmin::paths::parse_path_json(&json).unwrap();
            let _ = lipmin::minorant::compute_minorant(&parsed, 1.0);
        }
        seen += 1;
    }
    assert!(seen >= 3, "expected the checked-in seeds in {dir:?}");
}

#[test]
fn laws_batch_corpus_evaluates() {
    let dir = corpus_dir("fuzz_laws_batch");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let out = lipmin::cli::eval_laws_batch_json(&text).unwrap();
        assert!(out.contains("\"ok\": true"), "{path:?}: {out}");
        seen += 1;
    }
    assert!(seen >= 2, "expected the checked-in seeds in {dir:?}");
}
