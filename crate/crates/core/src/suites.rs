//! Seeded randomized suites pairing each pipeline stage with its
//! brute-force oracle.  The `selftest` command runs them; the acceptance
//! test target asserts them with the documented sizes.

use crate::boolean::Element;
use crate::dynamics::{import_graph, Digraph, RelativeGbds, SystemDescription};
use crate::extension::{self, TildeIdeal};
use crate::fixtures;
use crate::ideal;
use crate::k1gen;
use crate::ktheory;
use crate::matrix::{smith_normal_form, IntegerMatrix};
use crate::oracle;
use crate::star::Equality;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} ({} cases{}{})",
            self.name,
            if self.passed { "pass" } else { "FAIL" },
            self.cases,
            if self.detail.is_empty() { "" } else { "; " },
            self.detail
        )
    }
}

fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9e3779b97f4a7c15))
}

pub fn random_digraph(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize) -> Digraph {
    let v = rng.random_range(1..=max_vertices);
    let e = rng.random_range(0..=max_edges);
    let vertices: Vec<String> = (0..v).map(|i| format!("v{i}")).collect();
    let edges = (0..e)
        .map(|i| {
            (
                format!("e{i}"),
                rng.random_range(0..v),
                rng.random_range(0..v),
            )
        })
        .collect();
    Digraph { vertices, edges }
}

/// Random valid system.  Each label's table assigns every target atom to at
/// most one source, which is exactly the disjointness invariant; roughly a
/// third of the labels are full permutations so kernels of `1−Φ` show up
/// often.
pub fn random_system(rng: &mut ChaCha8Rng, max_atoms: usize, max_labels: usize) -> RelativeGbds {
    let n = rng.random_range(1..=max_atoms);
    let l = rng.random_range(1..=max_labels);
    let atoms: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let labels: Vec<String> = (0..l).map(|i| format!("l{i}")).collect();
    let mut theta: HashMap<String, HashMap<String, Vec<String>>> = HashMap::new();
    for li in 0..l {
        let mut table: HashMap<String, Vec<String>> = HashMap::new();
        if rng.random_bool(0.34) {
            // Full permutation label.
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(rng);
            for (src, &dst) in perm.iter().enumerate() {
                table
                    .entry(atoms[src].clone())
                    .or_default()
                    .push(atoms[dst].clone());
            }
        } else {
            // Each target picks a source or stays unreached.
            for dst in 0..n {
                if rng.random_bool(0.55) {
                    let src = rng.random_range(0..n);
                    table
                        .entry(atoms[src].clone())
                        .or_default()
                        .push(atoms[dst].clone());
                }
            }
        }
        theta.insert(labels[li].clone(), table);
    }
    // Occasionally extend some I_α beyond R_α.
    let ideal_tops = if rng.random_bool(0.25) {
        let mut tops: HashMap<String, Vec<String>> = HashMap::new();
        let doc = SystemDescription {
            atoms: atoms.clone(),
            labels: labels.clone(),
            theta: theta.clone(),
            ideal_tops: None,
            j_top: None,
        };
        let base = RelativeGbds::validate(&doc).expect("construction is valid");
        for li in 0..l {
            let mut top = base.r_top(li);
            for a in 0..n {
                if rng.random_bool(0.3) {
                    top = top.join(&base.algebra().atom(a));
                }
            }
            tops.insert(labels[li].clone(), top.atom_names());
        }
        Some(tops)
    } else {
        None
    };
    let doc = SystemDescription {
        atoms,
        labels,
        theta,
        ideal_tops,
        j_top: None,
    };
    let mut sys = RelativeGbds::validate(&doc).expect("construction is valid");
    // Sometimes shrink J to a proper subideal of B_reg.
    if rng.random_bool(0.3) {
        let reg = sys.b_reg_top();
        let keep: Vec<usize> = reg
            .atom_indices()
            .filter(|_| rng.random_bool(0.6))
            .collect();
        let j_names: Vec<String> = keep
            .iter()
            .map(|&i| sys.algebra().atom_name(i).to_string())
            .collect();
        let doc2 = SystemDescription {
            atoms: sys.algebra().atoms().to_vec(),
            labels: sys.labels().to_vec(),
            theta: doc.theta.clone(),
            ideal_tops: doc.ideal_tops.clone(),
            j_top: Some(j_names),
        };
        sys = RelativeGbds::validate(&doc2).expect("construction is valid");
    }
    sys
}

/// `FX-ON(n)` family: `K₀ = ℤ/(n−1)`, `K₁ = 0` for `n ≥ 2`.
pub fn suite_cuntz_family() -> SuiteOutcome {
    let mut passed = true;
    let mut cases = 0;
    for n in 2..=6usize {
        let r = ktheory::k_groups(&fixtures::fx_on(n));
        let expected_torsion: Vec<BigInt> = if n == 2 {
            vec![]
        } else {
            vec![BigInt::from(n as i64 - 1)]
        };
        passed &= r.k0.free_rank == 0 && r.k0.torsion == expected_torsion && r.k1_free_rank == 0;
        cases += 1;
    }
    SuiteOutcome {
        name: "cuntz-family",
        passed,
        cases,
        detail: String::new(),
    }
}

/// Pipeline K-groups versus the classical graph computation on random
/// digraphs.
pub fn suite_graph_cross_check(seed: u64, count: usize) -> SuiteOutcome {
    let mut rng = rng_for(seed, 1);
    let mut passed = true;
    for _ in 0..count {
        let g = random_digraph(&mut rng, 6, 12);
        let check = ktheory::graph_cross_check(&g);
        if !check.matches {
            passed = false;
        }
    }
    SuiteOutcome {
        name: "graph-cross-check",
        passed,
        cases: count,
        detail: String::new(),
    }
}

/// Smith decomposition soundness plus agreement with the gcd-reduction
/// oracle on random matrices.
pub fn suite_snf(seed: u64, count: usize) -> SuiteOutcome {
    let mut rng = rng_for(seed, 2);
    let mut passed = true;
    for _ in 0..count {
        let rows = rng.random_range(1..=8);
        let cols = rng.random_range(1..=8);
        let m =
            IntegerMatrix::from_fn(rows, cols, |_, _| BigInt::from(rng.random_range(-9i64..=9)));
        let snf = smith_normal_form(&m);
        let sound = snf.u.mul(&m).mul(&snf.v) == snf.d
            && snf.u.determinant().abs() == BigInt::one()
            && snf.v.determinant().abs() == BigInt::one()
            && snf
                .invariant_factors
                .windows(2)
                .all(|w| (&w[1] % &w[0]).is_zero());
        let oracle_factors = oracle::gcd_reduction_invariant_factors(&m);
        if !sound || snf.invariant_factors != oracle_factors {
            passed = false;
        }
    }
    SuiteOutcome {
        name: "snf-soundness",
        passed,
        cases: count,
        detail: String::new(),
    }
}

/// `|L_η^+| = |L_η^-|` for every kernel basis element and every atom of
/// random systems.
pub fn suite_same_cardinality(seed: u64, systems: usize) -> SuiteOutcome {
    let mut rng = rng_for(seed, 3);
    let mut passed = true;
    let mut nontrivial = 0;
    for _ in 0..systems {
        let sys = random_system(&mut rng, 5, 4);
        let kt = ktheory::k_groups(&sys);
        if !kt.k1_basis.is_empty() {
            nontrivial += 1;
        }
        for v in &kt.k1_basis {
            let Ok(x) = k1gen::KernelElement::from_basis_vector(&sys, &kt, v) else {
                passed = false;
                continue;
            };
            if !k1gen::same_cardinality_holds(&sys, &x)
                || !k1gen::same_cardinality_holds(&sys, &x.negate())
            {
                passed = false;
            }
        }
    }
    SuiteOutcome {
        name: "same-cardinality",
        passed,
        cases: systems,
        detail: format!("{nontrivial} systems with nonzero kernel"),
    }
}

/// Build and verify a K₁ certificate for every kernel basis vector of the
/// named fixtures and of random systems; FX-LOOP must emit exactly
/// `s(a;v) + (1 − p(v))`.
pub fn suite_certificates(seed: u64, systems: usize) -> SuiteOutcome {
    let mut rng = rng_for(seed, 4);
    let mut passed = true;
    let mut certs = 0;
    let run = |sys: &RelativeGbds, passed: &mut bool, certs: &mut usize| match k1gen::k1_generators(
        sys,
    ) {
        Ok(list) => {
            for cert in list {
                *certs += 1;
                if !cert.transcript.all_passed() {
                    *passed = false;
                }
            }
        }
        Err(_) => *passed = false,
    };
    let loop1 = fixtures::fx_loop();
    match k1gen::k1_generators(&loop1) {
        Ok(list) if list.len() == 1 => {
            certs += 1;
            let cert = &list[0];
            passed &= cert.transcript.all_passed();
            let v = loop1.algebra().top();
            let expected = crate::star::normalize(
                &loop1,
                &crate::star::Expr::Gen(0, v.clone())
                    .plus(crate::star::Expr::Unit)
                    .minus(crate::star::Expr::Proj(v)),
            )
            .expect("fixture expression is well-formed");
            passed &= cert.u.dim == 1 && cert.u[(0, 0)] == expected;
        }
        _ => passed = false,
    }
    run(&fixtures::fx_llw(), &mut passed, &mut certs);
    run(&fixtures::fx_twocycle(), &mut passed, &mut certs);
    for _ in 0..systems {
        let sys = random_system(&mut rng, 4, 3);
        run(&sys, &mut passed, &mut certs);
    }
    SuiteOutcome {
        name: "k1-certificates",
        passed,
        cases: systems + 3,
        detail: format!("{certs} certificates verified"),
    }
}

/// ι injectivity, intertwining, J̃-compatibility (exhaustive element
/// loops), and the symbolic embedding identity for short words.
pub fn suite_extension_facets(seed: u64, systems: usize, max_word_len: usize) -> SuiteOutcome {
    let mut rng = rng_for(seed, 5);
    let mut passed = true;
    let mut sys_list: Vec<RelativeGbds> = vec![
        fixtures::fx_loop(),
        fixtures::fx_on(2),
        fixtures::fx_on(3),
        fixtures::fx_arrow(),
        fixtures::fx_llw(),
        fixtures::fx_toep(),
    ];
    for _ in 0..systems {
        sys_list.push(random_system(&mut rng, 4, 3));
    }
    let cases = sys_list.len();
    for sys in &sys_list {
        let all: Vec<Element> = sys.algebra().elements().collect();
        for a in &all {
            let ia = extension::iota_embed(sys, &[], a).expect("base elements embed");
            for b in &all {
                if a < b {
                    let ib = extension::iota_embed(sys, &[], b).expect("base elements embed");
                    if extension::tilde_equal(sys, &ia, &ib) {
                        passed = false;
                    }
                }
            }
            for l in 0..sys.label_count() {
                let lhs = extension::iota_embed(sys, &[], &sys.theta(l, a)).expect("images embed");
                if !extension::tilde_equal(sys, &lhs, &ia.theta_shift(sys, l)) {
                    passed = false;
                }
            }
            if extension::tilde_membership(sys, &ia, TildeIdeal::J) != a.is_subset_of(sys.j_top()) {
                passed = false;
            }
        }
        // Embedding identity for every word up to the cap and every
        // element of the word's range ideal.
        let mut words: Vec<Vec<usize>> = Vec::new();
        let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
        for _ in 0..max_word_len {
            let mut next = Vec::new();
            for w in &frontier {
                for l in 0..sys.label_count() {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            words.extend(next.iter().cloned());
            frontier = next;
        }
        for gamma in &words {
            let top = sys.theta_word(gamma, &sys.algebra().top());
            if top.is_empty() {
                continue;
            }
            for c in crate::boolean::PrincipalIdeal::new(top).elements() {
                if c.is_empty() {
                    continue;
                }
                match extension::eq1_facet(sys, gamma, &c) {
                    Ok(v) if v >= Equality::EqualModCk => {}
                    _ => passed = false,
                }
            }
        }
    }
    SuiteOutcome {
        name: "extension-facets",
        passed,
        cases,
        detail: String::new(),
    }
}

/// Subsystem sanity on fixtures: the full pair reproduces the system, the
/// trivial pair is empty, and the nontrivial FX-LLW pair gives (ℤ,ℤ) three
/// ways with a vanishing six-term alternating rank sum.
pub fn suite_subsystem_sanity() -> SuiteOutcome {
    let mut passed = true;
    let mut cases = 0;
    for sys in fixtures::all_fixtures() {
        cases += 1;
        let full = crate::dynamics::AdmissiblePair {
            h_top: sys.algebra().top(),
            s_top: sys.algebra().top(),
        };
        match ideal::ideal_k_groups(&sys, &full) {
            Ok(rep) => {
                passed &= rep.ideal_k.k0 == rep.full_k.k0
                    && rep.ideal_k.k1_free_rank == rep.full_k.k1_free_rank
                    && ideal::six_term_rank_check(&rep);
            }
            Err(_) => passed = false,
        }
        let trivial = crate::dynamics::AdmissiblePair {
            h_top: sys.algebra().empty(),
            s_top: sys.j_top().clone(),
        };
        if sys.is_admissible(&trivial) {
            match ideal::ideal_k_groups(&sys, &trivial) {
                Ok(rep) => {
                    passed &= rep.ideal_k.k0.is_trivial()
                        && rep.ideal_k.k1_free_rank == 0
                        && ideal::six_term_rank_check(&rep);
                }
                Err(_) => passed = false,
            }
        }
    }
    let llw = fixtures::fx_llw();
    let pair = crate::dynamics::AdmissiblePair {
        h_top: llw
            .algebra()
            .element_from_names(["w"])
            .expect("fixture atom"),
        s_top: llw.algebra().top(),
    };
    match ideal::ideal_k_groups(&llw, &pair) {
        Ok(rep) => {
            let z = ktheory::AbelianGroupPresentation::free(1);
            passed &= rep.ideal_k.k0 == z
                && rep.ideal_k.k1() == z
                && rep.quotient_k.k0 == z
                && rep.quotient_k.k1() == z
                && rep.full_k.k0 == z
                && rep.full_k.k1() == z
                && ideal::six_term_rank_check(&rep);
        }
        Err(_) => passed = false,
    }
    cases += 1;
    SuiteOutcome {
        name: "subsystem-sanity",
        passed,
        cases,
        detail: String::new(),
    }
}

/// Six-term alternating rank identity over every admissible pair of random
/// systems.
pub fn suite_six_term(seed: u64, systems: usize) -> SuiteOutcome {
    let mut rng = rng_for(seed, 6);
    let mut passed = true;
    let mut pairs_checked = 0;
    for _ in 0..systems {
        let sys = random_system(&mut rng, 4, 3);
        for pair in sys.enumerate_admissible_pairs().pairs {
            match ideal::ideal_k_groups(&sys, &pair) {
                Ok(rep) => {
                    pairs_checked += 1;
                    if !ideal::six_term_rank_check(&rep) {
                        passed = false;
                    }
                }
                Err(_) => passed = false,
            }
        }
    }
    SuiteOutcome {
        name: "six-term-ranks",
        passed,
        cases: systems,
        detail: format!("{pairs_checked} pairs"),
    }
}

/// Liftability on every Condition (K) system in a random suite plus the
/// named fixtures; FX-LOOP must be refused with witness (v, a).
pub fn suite_liftability(seed: u64, systems: usize) -> SuiteOutcome {
    let mut rng = rng_for(seed, 7);
    let mut passed = true;
    let mut checked = 0;
    let mut nonzero_kernels = 0;
    let run = |sys: &RelativeGbds, passed: &mut bool, checked: &mut usize, nz: &mut usize| {
        if !sys.condition_k().holds {
            return;
        }
        match ideal::liftability_report(sys) {
            Ok(rep) => {
                *checked += 1;
                if rep.pairs.iter().any(|p| p.kernel_rank > 0) {
                    *nz += 1;
                }
                if !rep.liftable {
                    *passed = false;
                }
            }
            Err(_) => *passed = false,
        }
    };
    run(
        &fixtures::fx_dumbbell(),
        &mut passed,
        &mut checked,
        &mut nonzero_kernels,
    );
    run(
        &fixtures::fx_twocycle(),
        &mut passed,
        &mut checked,
        &mut nonzero_kernels,
    );
    for _ in 0..systems {
        let sys = random_system(&mut rng, 4, 3);
        run(&sys, &mut passed, &mut checked, &mut nonzero_kernels);
    }
    match ideal::liftability_report(&fixtures::fx_loop()) {
        Err(ideal::IdealError::ConditionKFails { atom, word }) => {
            passed &= atom == "v" && word == "a";
        }
        _ => passed = false,
    }
    SuiteOutcome {
        name: "liftability",
        passed,
        cases: systems + 3,
        detail: format!(
            "{checked} Condition-(K) systems, {nonzero_kernels} with nonzero ideal kernels"
        ),
    }
}

/// Condition (K) decision versus the brute-force first-return enumeration,
/// exhaustively on tiny digraphs and randomized within the stated bounds.
pub fn suite_condition_k(seed: u64, random_graphs: usize) -> SuiteOutcome {
    let mut passed = true;
    let mut cases = 0;
    // Exhaustive: 1..=2 vertices, up to 3 named edges.
    for v in 1..=2usize {
        let slots: Vec<(usize, usize)> = (0..v).flat_map(|s| (0..v).map(move |r| (s, r))).collect();
        for e in 0..=3usize {
            let mut combos = vec![Vec::new()];
            for _ in 0..e {
                combos = combos
                    .into_iter()
                    .flat_map(|c: Vec<(usize, usize)>| {
                        slots
                            .iter()
                            .map(move |&s| {
                                let mut c2 = c.clone();
                                c2.push(s);
                                c2
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect();
            }
            for combo in combos {
                let g = Digraph {
                    vertices: (0..v).map(|i| format!("v{i}")).collect(),
                    edges: combo
                        .iter()
                        .enumerate()
                        .map(|(i, &(s, r))| (format!("e{i}"), s, r))
                        .collect(),
                };
                cases += 1;
                let sys = import_graph(&g);
                let fast = sys.condition_k();
                let slow = oracle::condition_k_oracle(&sys);
                if fast.holds != slow.holds || fast.witness != slow.witness {
                    passed = false;
                }
            }
        }
    }
    let mut rng = rng_for(seed, 8);
    for _ in 0..random_graphs {
        let g = random_digraph(&mut rng, 5, 8);
        cases += 1;
        let sys = import_graph(&g);
        let fast = sys.condition_k();
        let slow = oracle::condition_k_oracle(&sys);
        if fast.holds != slow.holds || fast.witness != slow.witness {
            passed = false;
        }
    }
    SuiteOutcome {
        name: "condition-k-oracle",
        passed,
        cases,
        detail: String::new(),
    }
}

/// Everything, with the documented default sizes.
pub fn run_all(seed: u64, max_word_len: usize) -> Vec<SuiteOutcome> {
    vec![
        suite_cuntz_family(),
        suite_graph_cross_check(seed, 200),
        suite_snf(seed, 500),
        suite_same_cardinality(seed, 100),
        suite_certificates(seed, 50),
        suite_extension_facets(seed, 12, max_word_len),
        suite_subsystem_sanity(),
        suite_six_term(seed, 100),
        suite_liftability(seed, 60),
        suite_condition_k(seed, 400),
    ]
}
