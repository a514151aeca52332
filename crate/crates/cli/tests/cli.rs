//! End-to-end command tests driven through the library entry point.

use bdsk_cli::{run_from, EXIT_OK, EXIT_PRECONDITION, EXIT_VALIDATION};
use serde_json::Value;
use std::path::PathBuf;

fn write_file(dir: &std::path::Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bdsk-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> (i32, String) {
    let mut full = vec!["bdsk".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    let out = run_from(full);
    (out.exit_code, out.stdout)
}

const FX_LOOP: &str = r#"{"atoms": ["v"], "labels": ["a"], "theta": {"a": {"v": ["v"]}}}"#;
const FX_LLW: &str = r#"{
    "atoms": ["v", "w"],
    "labels": ["a", "b", "c"],
    "theta": {"a": {"v": ["v"]}, "b": {"v": ["w"]}, "c": {"w": ["w"]}}
}"#;
const FX_ON3: &str = r#"{"atoms": ["v"], "labels": ["a1", "a2", "a3"], "theta": {"a1": {"v": ["v"]}, "a2": {"v": ["v"]}, "a3": {"v": ["v"]}}}"#;
const LOOP_GRAPH: &str =
    r#"{"vertices": ["v"], "edges": [{"name": "a", "source": "v", "range": "v"}]}"#;

#[test]
fn k_theory_loop_text_and_json() {
    let dir = tempdir();
    let f = write_file(&dir, "loop.system", FX_LOOP);
    let (code, out) = run(&["k-theory", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("K0 = Z\n"), "{out}");
    assert!(out.contains("K1 = Z\n"), "{out}");

    let (code, out) = run(&["k-theory", f.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["k_theory"]["k0"]["display"], "Z");
    assert_eq!(v["k_theory"]["k1"]["free_rank"], 1);
}

#[test]
fn condition_k_witness() {
    let dir = tempdir();
    let f = write_file(&dir, "loop2.system", FX_LOOP);
    let (code, out) = run(&["condition-k", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "fails; witness atom v, word a\n");

    let (code, out) = run(&["condition-k", f.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["holds"], false);
    assert_eq!(v["witness"]["atom"], "v");
    assert_eq!(v["witness"]["word"][0], "a");
}

#[test]
fn ideals_lattice() {
    let dir = tempdir();
    let f = write_file(&dir, "llw.system", FX_LLW);
    let (code, out) = run(&["ideals", f.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    assert_eq!(pairs[0]["h"].as_array().unwrap().len(), 0);
    assert_eq!(pairs[1]["h"][0], "w");
    assert_eq!(v["leq"][0].as_array().unwrap().len(), 3);
}

#[test]
fn quotient_and_ideal_k() {
    let dir = tempdir();
    let f = write_file(&dir, "llw2.system", FX_LLW);
    let (code, out) = run(&["quotient", f.to_str().unwrap(), "--pair", "1"]);
    assert_eq!(code, EXIT_OK);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["atoms"].as_array().unwrap().len(), 1);

    let (code, out) = run(&[
        "ideal-k",
        f.to_str().unwrap(),
        "--pair",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["ideal"]["k0"]["display"], "Z");
    assert_eq!(v["six_term_rank_identity"], true);

    let (code, _) = run(&["ideal-k", f.to_str().unwrap(), "--pair", "99"]);
    assert_eq!(code, EXIT_VALIDATION);
}

#[test]
fn k0_class_on3() {
    let dir = tempdir();
    let f = write_file(&dir, "on3.system", FX_ON3);
    let (code, out) = run(&[
        "k0-class",
        f.to_str().unwrap(),
        "--element",
        "v",
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["class"]["torsion_coordinates"][0]["modulus"], 2);
    assert_eq!(v["class"]["torsion_coordinates"][0]["residue"], 1);
    assert_eq!(v["class"]["basis_dependent"], true);

    let (code, out) = run(&[
        "k0-class",
        f.to_str().unwrap(),
        "--element",
        "",
        "--format",
        "json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["class"]["is_zero"], true);

    let (code, _) = run(&["k0-class", f.to_str().unwrap(), "--element", "nope"]);
    assert_eq!(code, EXIT_VALIDATION);
}

#[test]
fn k1_generators_loop() {
    let dir = tempdir();
    let f = write_file(&dir, "loop3.system", FX_LOOP);
    let (code, out) = run(&["k1-generators", f.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let certs = v["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 1);
    assert_eq!(certs[0]["all_passed"], true);
    assert_eq!(certs[0]["u"][0][0], "1 - p(v) + s(a;v)");
}

#[test]
fn liftability_exit_codes() {
    let dir = tempdir();
    let f = write_file(&dir, "loop4.system", FX_LOOP);
    let (code, out) = run(&["liftability", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_PRECONDITION);
    assert!(out.contains("witness (v, a)"), "{out}");

    let on2 = write_file(
        &dir,
        "on2.system",
        r#"{"atoms": ["v"], "labels": ["a", "b"], "theta": {"a": {"v": ["v"]}, "b": {"v": ["v"]}}}"#,
    );
    let (code, out) = run(&["liftability", on2.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["liftable"], true);
}

#[test]
fn import_graph_and_cross_check() {
    let dir = tempdir();
    let f = write_file(&dir, "loop.graph", LOOP_GRAPH);
    let (code, out) = run(&["import-graph", f.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["atoms"][0], "v");
    assert_eq!(doc["J"][0], "v");

    let (code, out) = run(&["cross-check", f.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["match"], true);
    assert_eq!(v["pipeline"]["k0"]["display"], "Z");
}

#[test]
fn validation_failures() {
    let dir = tempdir();
    let (code, _) = run(&["validate", dir.join("missing.system").to_str().unwrap()]);
    assert_eq!(code, EXIT_VALIDATION);

    let bad = write_file(&dir, "bad.system", "{ not json");
    let (code, out) = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_VALIDATION);
    assert!(out.contains("malformed"), "{out}");

    let overlap = write_file(
        &dir,
        "overlap.system",
        r#"{"atoms": ["u", "w", "x"], "labels": ["a"],
            "theta": {"a": {"u": ["x"], "w": ["x"]}}}"#,
    );
    let (code, out) = run(&["validate", overlap.to_str().unwrap()]);
    assert_eq!(code, EXIT_VALIDATION);
    assert!(out.contains("overlap"), "{out}");

    let bad_j = write_file(
        &dir,
        "badj.system",
        r#"{"atoms": ["v", "w"], "labels": ["e"],
            "theta": {"e": {"v": ["w"]}}, "J": ["w"]}"#,
    );
    let (code, out) = run(&["validate", bad_j.to_str().unwrap()]);
    assert_eq!(code, EXIT_VALIDATION);
    assert!(out.contains("B_reg"), "{out}");
}

#[test]
fn validate_emits_canonical_document() {
    let dir = tempdir();
    // Unsorted image array, an empty image entry, and J out of order.
    let messy = write_file(
        &dir,
        "messy.system",
        r#"{"atoms": ["v", "w"], "labels": ["a", "b", "c"],
            "theta": {"a": {"v": ["v"]}, "b": {"v": ["w"], "w": []}, "c": {"w": ["w"]}},
            "J": ["w", "v"]}"#,
    );
    let (code, out) = run(&["validate", messy.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    let canon = serde_json::to_string_pretty(&v["system"]).unwrap();
    // Round-trip: validating the canonical form reproduces it byte for byte.
    let again = write_file(&dir, "canon.system", &canon);
    let (code, out2) = run(&["validate", again.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v2: Value = serde_json::from_str(&out2).unwrap();
    assert_eq!(canon, serde_json::to_string_pretty(&v2["system"]).unwrap());
    assert_eq!(v["system"]["J"][0], "v");
    assert!(v["system"]["theta"]["b"].get("w").is_none());
}

#[test]
fn usage_errors() {
    let (code, _) = run(&["no-such-command"]);
    assert_eq!(code, EXIT_PRECONDITION);
    let (code, out) = run(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("Usage"));
}
