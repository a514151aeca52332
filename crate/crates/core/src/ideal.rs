//! K-theory of gauge-invariant ideals and the Condition (K) liftability
//! check.
//!
//! An ideal is presented by its admissible pair; its K-groups are those of
//! the Morita-equivalent subsystem, computed entirely combinatorially.  The
//! six-term rank identity ties ideal, quotient, and full system together,
//! and the liftability report re-derives the kernel inclusion of the
//! subsystem into the ambient extension by evaluating `1−Φ` on dictionary
//! trees with tree operations — an independent route from the re-atomized
//! integer matrix.

use crate::dynamics::{AdmissiblePair, ConditionK, RelativeGbds};
use crate::extension::{
    build_subsystem, formal_sum_vanishes, is_tilde_empty, ExtensionError, SubsystemResult,
    TreeElement,
};
use crate::ktheory::{k_groups, KTheoryResult};
use crate::matrix::{smith_normal_form, IntegerMatrix};
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IdealError {
    #[error("Condition (K) fails, witness ({atom}, {word})")]
    ConditionKFails { atom: String, word: String },
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error("pair is not admissible")]
    NotAdmissible,
}

/// K-groups of an ideal, its quotient, and the full algebra, plus the
/// subsystem that realizes the ideal up to Morita equivalence.
#[derive(Debug, Clone)]
pub struct IdealKReport {
    pub pair: AdmissiblePair,
    pub subsystem: SubsystemResult,
    pub ideal_k: KTheoryResult,
    pub quotient_k: KTheoryResult,
    pub full_k: KTheoryResult,
}

pub fn ideal_k_groups(
    sys: &RelativeGbds,
    pair: &AdmissiblePair,
) -> Result<IdealKReport, IdealError> {
    if !sys.is_admissible(pair) {
        return Err(IdealError::NotAdmissible);
    }
    let subsystem = build_subsystem(sys, pair)?;
    let ideal_k = k_groups(subsystem.system());
    let quotient = sys
        .quotient_system(pair)
        .map_err(|_| IdealError::NotAdmissible)?;
    Ok(IdealKReport {
        pair: pair.clone(),
        ideal_k,
        quotient_k: k_groups(&quotient),
        full_k: k_groups(sys),
        subsystem,
    })
}

/// The alternating rank identity forced by exactness of the cyclic
/// six-term sequence of the ideal extension.
pub fn six_term_rank_check(report: &IdealKReport) -> bool {
    let r = |k: &KTheoryResult| (k.k0.free_rank as i64, k.k1_free_rank as i64);
    let (i0, i1) = r(&report.ideal_k);
    let (a0, a1) = r(&report.full_k);
    let (q0, q1) = r(&report.quotient_k);
    i0 - a0 + q0 - i1 + a1 - q1 == 0
}

/// Per-pair verdict of the kernel-inclusion check.
#[derive(Debug, Clone)]
pub struct PairLiftability {
    pub pair: AdmissiblePair,
    pub kernel_rank: usize,
    /// Each subsystem kernel basis vector, mapped through the dictionary,
    /// is annihilated by the ambient `1−Φ` evaluated with tree operations.
    pub vectors_vanish: bool,
    /// The mapped vectors stay integrally independent.
    pub independent: bool,
}

impl PairLiftability {
    pub fn passed(&self) -> bool {
        self.vectors_vanish && self.independent
    }
}

#[derive(Debug, Clone)]
pub struct LiftabilityReport {
    pub condition_k: ConditionK,
    pub pairs: Vec<PairLiftability>,
    pub liftable: bool,
}

/// Verify the liftability property: under
/// Condition (K), for every admissible pair the subsystem kernel embeds
/// into the ambient kernel.  Refuses to run when Condition (K) fails.
pub fn liftability_report(sys: &RelativeGbds) -> Result<LiftabilityReport, IdealError> {
    let ck = sys.condition_k();
    if !ck.holds {
        let (atom, word) = ck.witness.expect("failing Condition (K) carries a witness");
        return Err(IdealError::ConditionKFails {
            atom: sys.algebra().atom_name(atom).to_string(),
            word: word
                .iter()
                .map(|&l| sys.label_name(l))
                .collect::<Vec<_>>()
                .join(""),
        });
    }
    let lattice = sys.enumerate_admissible_pairs();
    let mut pairs = Vec::new();
    for pair in &lattice.pairs {
        let subsystem = build_subsystem(sys, pair)?;
        let sub_sys = subsystem.system();
        let kt = k_groups(sub_sys);
        let dict = &subsystem.subalgebra.dictionary;

        let mut vectors_vanish = true;
        let mut coords: Vec<Vec<BigInt>> = Vec::new();
        for v in &kt.k1_basis {
            // The vector over subsystem J-atoms, as trees with coefficients.
            let supported: Vec<(TreeElement, BigInt)> = v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(pos, c)| (dict[kt.j_atoms[pos]].clone(), c.clone()))
                .collect();
            // Ambient evaluation of (1−Φ̃): χ_t − Σ_{α∈Δ̃_t} χ_{θ̃_α(t)}.
            let mut terms: Vec<(TreeElement, BigInt)> = Vec::new();
            for (t, c) in &supported {
                terms.push((t.clone(), c.clone()));
                for l in 0..sys.label_count() {
                    let img = t.theta_shift(sys, l);
                    if !is_tilde_empty(sys, &img) {
                        terms.push((img, -c.clone()));
                    }
                }
            }
            if !formal_sum_vanishes(sys, &terms)? {
                vectors_vanish = false;
            }
            coords.push(v.clone());
        }

        // Integral independence of the image set, re-checked by exact rank.
        let independent = if coords.is_empty() {
            true
        } else {
            let rows = coords.len();
            let cols = coords[0].len();
            let m = IntegerMatrix::from_fn(rows, cols, |i, j| coords[i][j].clone());
            smith_normal_form(&m).rank == rows
        };

        pairs.push(PairLiftability {
            pair: pair.clone(),
            kernel_rank: kt.k1_free_rank,
            vectors_vanish,
            independent,
        });
    }
    let liftable = pairs.iter().all(PairLiftability::passed);
    Ok(LiftabilityReport {
        condition_k: ck,
        pairs,
        liftable,
    })
}
