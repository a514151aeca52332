//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line.  Sizes, tolerances, and time budgets are pinned here;
//! `cargo test -p bdsk-cli --test acceptance` runs the whole gate.

use bdsk_cli::run_from;
use bdsk_core::dynamics::AdmissiblePair;
use bdsk_core::ktheory::AbelianGroupPresentation;
use bdsk_core::{fixtures, ideal, suites};
use serde_json::Value;
use std::time::{Duration, Instant};

const SEED: u64 = 20260808;

fn report(name: &str, passed: bool, elapsed: Duration, detail: &str) {
    eprintln!(
        "criterion {name}: {} in {elapsed:.2?}{}{}",
        if passed { "PASS" } else { "FAIL" },
        if detail.is_empty() { "" } else { " — " },
        detail
    );
    assert!(passed, "criterion {name} failed: {detail}");
}

#[test]
fn c01_cuntz_family() {
    let t = Instant::now();
    let outcome = suites::suite_cuntz_family();
    let elapsed = t.elapsed();
    let within = elapsed < Duration::from_secs(1);
    report(
        "01 cuntz-family",
        outcome.passed && within,
        elapsed,
        "n = 2..=6 exact invariant factors; budget 1s",
    );
}

#[test]
fn c02_graph_cross_check() {
    let t = Instant::now();
    let outcome = suites::suite_graph_cross_check(SEED, 200);
    let elapsed = t.elapsed();
    let within = elapsed < Duration::from_secs(30);
    report(
        "02 graph-cross-check",
        outcome.passed && within,
        elapsed,
        "200 digraphs (<=6 vertices, <=12 edges), exact ranks and factors; budget 30s",
    );
}

#[test]
fn c03_snf_soundness() {
    let t = Instant::now();
    let outcome = suites::suite_snf(SEED, 500);
    let elapsed = t.elapsed();
    let within = elapsed < Duration::from_secs(30);
    report(
        "03 snf-soundness",
        outcome.passed && within,
        elapsed,
        "500 matrices up to 8x8, entries in [-9,9], transforms unimodular, oracle agreement; budget 30s",
    );
}

#[test]
fn c04_same_cardinality() {
    let t = Instant::now();
    let outcome = suites::suite_same_cardinality(SEED, 100);
    // The suite must actually exercise kernels, not pass vacuously.
    let nontrivial: usize = outcome
        .detail
        .split_whitespace()
        .next()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    report(
        "04 same-cardinality",
        outcome.passed && nontrivial >= 20,
        t.elapsed(),
        &format!("100 systems (<=5 atoms, <=4 labels); {}", outcome.detail),
    );
}

#[test]
fn c05_k1_certificates() {
    let t = Instant::now();
    let outcome = suites::suite_certificates(SEED, 50);
    report(
        "05 k1-certificates",
        outcome.passed,
        t.elapsed(),
        &format!(
            "fixtures plus 50 random systems; Toeplitz identities exact, unitarity modulo CK; {}",
            outcome.detail
        ),
    );
}

#[test]
fn c06_extension_facets() {
    let t = Instant::now();
    let outcome = suites::suite_extension_facets(SEED, 12, 3);
    report(
        "06 extension-facets",
        outcome.passed,
        t.elapsed(),
        "injectivity, intertwining, J-compatibility, embedding identity for |word| <= 3",
    );
}

#[test]
fn c07_subsystem_sanity() {
    let t = Instant::now();
    let outcome = suites::suite_subsystem_sanity();
    // Pin the headline numbers directly as well.
    let llw = fixtures::fx_llw();
    let pair = AdmissiblePair {
        h_top: llw.algebra().element_from_names(["w"]).unwrap(),
        s_top: llw.algebra().top(),
    };
    let rep = ideal::ideal_k_groups(&llw, &pair).unwrap();
    let z = AbelianGroupPresentation::free(1);
    let values_ok = rep.ideal_k.k0 == z
        && rep.ideal_k.k1() == z
        && rep.quotient_k.k0 == z
        && rep.quotient_k.k1() == z
        && rep.full_k.k0 == z
        && rep.full_k.k1() == z
        && ideal::six_term_rank_check(&rep);
    report(
        "07 subsystem-sanity",
        outcome.passed && values_ok,
        t.elapsed(),
        "full pair reproduces K-groups, trivial pair empty, nontrivial pair (Z,Z)/(Z,Z)/(Z,Z)",
    );
}

#[test]
fn c08_six_term_ranks() {
    let t = Instant::now();
    let outcome = suites::suite_six_term(SEED, 100);
    report(
        "08 six-term-ranks",
        outcome.passed,
        t.elapsed(),
        &format!("100-system suite; {}", outcome.detail),
    );
}

#[test]
fn c09_liftability() {
    let t = Instant::now();
    let outcome = suites::suite_liftability(SEED, 60);
    report(
        "09 liftability",
        outcome.passed,
        t.elapsed(),
        &format!(
            "kernel inclusion and integral independence under Condition (K); {}",
            outcome.detail
        ),
    );
}

#[test]
fn c10_condition_k_oracle() {
    let t = Instant::now();
    let outcome = suites::suite_condition_k(SEED, 400);
    report(
        "10 condition-k-oracle",
        outcome.passed,
        t.elapsed(),
        &format!(
            "exhaustive tiny digraphs plus 400 random (<=5 vertices, <=8 edges); {} cases",
            outcome.cases
        ),
    );
}

// ---- criterion 11: CLI round-trip and report values on the fixtures ----

fn write_fixture(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("bdsk-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, String) {
    let mut full = vec!["bdsk".to_string()];
    full.extend(args.iter().map(|s| s.to_string()));
    let out = run_from(full);
    (out.exit_code, out.stdout)
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut with_fmt = args.to_vec();
    with_fmt.extend(["--format", "json"]);
    let (code, out) = run(&with_fmt);
    let v: Value = serde_json::from_str(&out).unwrap_or(Value::Null);
    (code, v)
}

#[test]
fn c11_cli_round_trip_and_values() {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();

    let loop_doc = r#"{"atoms": ["v"], "labels": ["a"], "theta": {"a": {"v": ["v"]}}}"#;
    let llw_doc = r#"{"atoms": ["v","w"], "labels": ["a","b","c"],
        "theta": {"a": {"v": ["v"]}, "b": {"v": ["w"]}, "c": {"w": ["w"]}}}"#;
    let arrow_doc = r#"{"atoms": ["v","w"], "labels": ["e"], "theta": {"e": {"v": ["w"]}}}"#;
    let toep_doc = r#"{"atoms": ["v"], "labels": ["a"], "theta": {"a": {"v": ["v"]}}, "J": []}"#;
    let on_doc = |n: usize| {
        let labels: Vec<String> = (1..=n).map(|i| format!("\"a{i}\"")).collect();
        let theta: Vec<String> = (1..=n)
            .map(|i| format!("\"a{i}\": {{\"v\": [\"v\"]}}"))
            .collect();
        format!(
            r#"{{"atoms": ["v"], "labels": [{}], "theta": {{{}}}}}"#,
            labels.join(","),
            theta.join(",")
        )
    };

    let fx_loop = write_fixture("fx-loop.system", loop_doc);
    let fx_llw = write_fixture("fx-llw.system", llw_doc);
    let fx_arrow = write_fixture("fx-arrow.system", arrow_doc);
    let fx_toep = write_fixture("fx-toep.system", toep_doc);
    let fx_on2 = write_fixture("fx-on2.system", &on_doc(2));
    let fx_on3 = write_fixture("fx-on3.system", &on_doc(3));
    let loop_graph = write_fixture(
        "loop.graph",
        r#"{"vertices": ["v"], "edges": [{"name": "a", "source": "v", "range": "v"}]}"#,
    );

    // Byte-stable canonical round-trip on every fixture document.
    for f in [&fx_loop, &fx_llw, &fx_arrow, &fx_toep, &fx_on2, &fx_on3] {
        let (code, v) = json(&["validate", f.to_str().unwrap()]);
        ok &= code == 0 && v["schema_version"] == 1 && v["valid"] == true;
        let canon = serde_json::to_string_pretty(&v["system"]).unwrap();
        let canon_file = write_fixture("canon.system", &canon);
        let (code2, v2) = json(&["validate", canon_file.to_str().unwrap()]);
        let stable = code2 == 0 && serde_json::to_string_pretty(&v2["system"]).unwrap() == canon;
        if !stable {
            notes.push(format!("round-trip unstable for {}", f.display()));
        }
        ok &= stable;
    }

    // K-theory values from the worked examples.
    let expect_k = |file: &std::path::Path, k0: &str, k1: &str| -> bool {
        let (code, v) = json(&["k-theory", file.to_str().unwrap()]);
        code == 0 && v["k_theory"]["k0"]["display"] == k0 && v["k_theory"]["k1"]["display"] == k1
    };
    ok &= expect_k(&fx_loop, "Z", "Z");
    ok &= expect_k(&fx_arrow, "Z", "0");
    ok &= expect_k(&fx_on2, "0", "0");
    ok &= expect_k(&fx_on3, "Z/2", "0");
    ok &= expect_k(&fx_toep, "Z", "0");
    ok &= expect_k(&fx_llw, "Z", "Z");

    // Condition (K) text matches the worked example exactly.
    let (code, out) = run(&["condition-k", fx_loop.to_str().unwrap()]);
    ok &= code == 0 && out == "fails; witness atom v, word a\n";
    let (code, v) = json(&["condition-k", fx_on2.to_str().unwrap()]);
    ok &= code == 0 && v["holds"] == true;

    // Ideal lattice of FX-LLW: three pairs in order.
    let (code, v) = json(&["ideals", fx_llw.to_str().unwrap()]);
    ok &= code == 0 && v["pairs"].as_array().map(Vec::len) == Some(3);
    ok &= v["pairs"][1]["h"][0] == "w";

    // Toeplitz fixture: pairs ({},{}), ({},{v}), ({v},{v}).
    let (code, v) = json(&["ideals", fx_toep.to_str().unwrap()]);
    ok &= code == 0 && v["pairs"].as_array().map(Vec::len) == Some(3);
    ok &= v["pairs"][0]["s"].as_array().map(Vec::len) == Some(0);

    // Quotient by (↓w, ⊤) in FX-LLW: one atom, label a loops.
    let (code, v) = json(&["quotient", fx_llw.to_str().unwrap(), "--pair", "1"]);
    ok &= code == 0
        && v["system"]["atoms"].as_array().map(Vec::len) == Some(1)
        && v["system"]["theta"]["a"]["v"][0] == "v";

    // Ideal K-groups at the same pair: (Z,Z) three ways plus the rank identity.
    let (code, v) = json(&["ideal-k", fx_llw.to_str().unwrap(), "--pair", "1"]);
    ok &= code == 0
        && v["ideal"]["k0"]["display"] == "Z"
        && v["ideal"]["k1"]["display"] == "Z"
        && v["quotient"]["k0"]["display"] == "Z"
        && v["full"]["k0"]["display"] == "Z"
        && v["six_term_rank_identity"] == true;

    // K0 class of the generator in FX-ON(3): order-2 generator.
    let (code, v) = json(&["k0-class", fx_on3.to_str().unwrap(), "--element", "v"]);
    ok &= code == 0
        && v["class"]["torsion_coordinates"][0]["modulus"] == 2
        && v["class"]["torsion_coordinates"][0]["residue"] == 1;

    // K1 generator of FX-LOOP is the shift plus the complement.
    let (code, v) = json(&["k1-generators", fx_loop.to_str().unwrap()]);
    ok &= code == 0
        && v["certificates"][0]["all_passed"] == true
        && v["certificates"][0]["u"][0][0] == "1 - p(v) + s(a;v)";

    // Liftability: refused on FX-LOOP with exit 2, passes on FX-ON(2).
    let (code, _) = run(&["liftability", fx_loop.to_str().unwrap()]);
    ok &= code == 2;
    let (code, v) = json(&["liftability", fx_on2.to_str().unwrap()]);
    ok &= code == 0 && v["liftable"] == true;

    // Graph import and cross-check on the single loop.
    let (code, v) = json(&["import-graph", loop_graph.to_str().unwrap()]);
    ok &= code == 0 && v["system"]["atoms"][0] == "v";
    let (code, v) = json(&["cross-check", loop_graph.to_str().unwrap()]);
    ok &= code == 0 && v["match"] == true && v["pipeline"]["k1"]["display"] == "Z";

    // Spot-check exact invariant factors through the JSON encoding.
    let (_, v) = json(&["k-theory", fx_on3.to_str().unwrap()]);
    ok &= v["k_theory"]["invariant_factors"][0] == 2;

    report(
        "11 cli-round-trip-and-values",
        ok,
        t.elapsed(),
        &notes.join("; "),
    );
}
