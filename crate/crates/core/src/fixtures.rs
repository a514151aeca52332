//! Canonical small systems used across tests, the self-test suites, and the
//! benchmarks.
//!
//! Name key: `fx_loop` is one vertex with one loop; `fx_on(n)` the same
//! vertex with `n` loops; `fx_arrow` a single edge `v → w`; `fx_llw` two
//! atoms with a loop at `v`, an edge `v → w`, and a loop at `w`; `fx_toep`
//! is `fx_loop` with the empty relative ideal, giving the Toeplitz algebra.

use crate::dynamics::{Digraph, RelativeGbds, SystemDescription};
use std::collections::HashMap;

fn theta_entry(label: &str, pairs: &[(&str, &[&str])]) -> (String, HashMap<String, Vec<String>>) {
    (
        label.to_string(),
        pairs
            .iter()
            .map(|(a, img)| (a.to_string(), img.iter().map(|s| s.to_string()).collect()))
            .collect(),
    )
}

pub fn fx_loop_doc() -> SystemDescription {
    SystemDescription {
        atoms: vec!["v".into()],
        labels: vec!["a".into()],
        theta: HashMap::from([theta_entry("a", &[("v", &["v"])])]),
        ideal_tops: None,
        j_top: None,
    }
}

pub fn fx_loop() -> RelativeGbds {
    RelativeGbds::validate(&fx_loop_doc()).expect("fixture is valid")
}

pub fn fx_on_doc(n: usize) -> SystemDescription {
    let labels: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    let theta = labels
        .iter()
        .map(|l| theta_entry(l, &[("v", &["v"])]))
        .collect();
    SystemDescription {
        atoms: vec!["v".into()],
        labels,
        theta,
        ideal_tops: None,
        j_top: None,
    }
}

/// `n` loops at one vertex: the Cuntz algebra `O_n` for `n ≥ 2`.
pub fn fx_on(n: usize) -> RelativeGbds {
    RelativeGbds::validate(&fx_on_doc(n)).expect("fixture is valid")
}

pub fn fx_arrow_doc() -> SystemDescription {
    SystemDescription {
        atoms: vec!["v".into(), "w".into()],
        labels: vec!["e".into()],
        theta: HashMap::from([theta_entry("e", &[("v", &["w"])])]),
        ideal_tops: None,
        j_top: None,
    }
}

pub fn fx_arrow() -> RelativeGbds {
    RelativeGbds::validate(&fx_arrow_doc()).expect("fixture is valid")
}

pub fn fx_llw_doc() -> SystemDescription {
    SystemDescription {
        atoms: vec!["v".into(), "w".into()],
        labels: vec!["a".into(), "b".into(), "c".into()],
        theta: HashMap::from([
            theta_entry("a", &[("v", &["v"])]),
            theta_entry("b", &[("v", &["w"])]),
            theta_entry("c", &[("w", &["w"])]),
        ]),
        ideal_tops: None,
        j_top: None,
    }
}

pub fn fx_llw() -> RelativeGbds {
    RelativeGbds::validate(&fx_llw_doc()).expect("fixture is valid")
}

pub fn fx_toep_doc() -> SystemDescription {
    SystemDescription {
        j_top: Some(vec![]),
        ..fx_loop_doc()
    }
}

pub fn fx_toep() -> RelativeGbds {
    RelativeGbds::validate(&fx_toep_doc()).expect("fixture is valid")
}

/// Two double-loop vertices joined by an edge; satisfies Condition (K) and
/// has one nontrivial gauge-invariant ideal.
pub fn fx_dumbbell_doc() -> SystemDescription {
    SystemDescription {
        atoms: vec!["v".into(), "w".into()],
        labels: vec![
            "a1".into(),
            "a2".into(),
            "e".into(),
            "b1".into(),
            "b2".into(),
        ],
        theta: HashMap::from([
            theta_entry("a1", &[("v", &["v"])]),
            theta_entry("a2", &[("v", &["v"])]),
            theta_entry("e", &[("v", &["w"])]),
            theta_entry("b1", &[("w", &["w"])]),
            theta_entry("b2", &[("w", &["w"])]),
        ]),
        ideal_tops: None,
        j_top: None,
    }
}

pub fn fx_dumbbell() -> RelativeGbds {
    RelativeGbds::validate(&fx_dumbbell_doc()).expect("fixture is valid")
}

/// Strongly connected two-atom system with `K₁ = ℤ` that still satisfies
/// Condition (K): two loops plus an exit at `u`, two loops plus a return at
/// `w`.  Kernel generator `χ_u − χ_w`.
pub fn fx_twocycle_doc() -> SystemDescription {
    SystemDescription {
        atoms: vec!["u".into(), "w".into()],
        labels: vec![
            "a1".into(),
            "a2".into(),
            "e".into(),
            "f".into(),
            "b1".into(),
            "b2".into(),
        ],
        theta: HashMap::from([
            theta_entry("a1", &[("u", &["u"])]),
            theta_entry("a2", &[("u", &["u"])]),
            theta_entry("e", &[("u", &["w"])]),
            theta_entry("f", &[("w", &["u"])]),
            theta_entry("b1", &[("w", &["w"])]),
            theta_entry("b2", &[("w", &["w"])]),
        ]),
        ideal_tops: None,
        j_top: None,
    }
}

pub fn fx_twocycle() -> RelativeGbds {
    RelativeGbds::validate(&fx_twocycle_doc()).expect("fixture is valid")
}

pub fn all_fixtures() -> Vec<RelativeGbds> {
    vec![
        fx_loop(),
        fx_on(2),
        fx_on(3),
        fx_arrow(),
        fx_llw(),
        fx_toep(),
        fx_dumbbell(),
        fx_twocycle(),
    ]
}

pub fn graph_single_loop() -> Digraph {
    Digraph::from_names(vec!["v".into()], vec![("a".into(), "v".into(), "v".into())])
        .expect("fixture graph is valid")
}

pub fn graph_double_loop() -> Digraph {
    Digraph::from_names(
        vec!["v".into()],
        vec![
            ("a".into(), "v".into(), "v".into()),
            ("b".into(), "v".into(), "v".into()),
        ],
    )
    .expect("fixture graph is valid")
}

pub fn graph_arrow() -> Digraph {
    Digraph::from_names(
        vec!["v".into(), "w".into()],
        vec![("e".into(), "v".into(), "w".into())],
    )
    .expect("fixture graph is valid")
}
