//! Explicit symbolic generators for K₁ and their verification.
//!
//! A kernel element `x = Σ k_A χ_A` of `(1−Φ)|_J` is turned into signed
//! index data (the `L`, `I`, `J`, `K`, `H` families over a canonical block
//! partition), then into a concrete partial isometry `V_x` and projection
//! `P_x` in a matrix algebra over the symbolic Toeplitz algebra, and finally
//! into the unitary `U_x = V_x + (1 − P_x)` whose K₁ class represents `x`.
//! The verification transcript replays the identities behind that claim:
//! the partial-isometry laws hold at the Toeplitz level, unitarity modulo
//! the Cuntz–Krieger relation.

use crate::boolean::Element;
use crate::dynamics::{DynamicsError, RelativeGbds};
use crate::ktheory::{k_groups, KTheoryResult};
use crate::star::{normalize, AlgebraElement, Equality, Expr, SymbolicMatrix};
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

/// Largest admitted |k_A|; index families enumerate `1..=|k_A|` so huge
/// coefficients would exhaust memory long before correctness matters.
const MAX_COEFFICIENT: i64 = 1 << 20;

/// A kernel element of `(1−Φ)|_J`, finitely supported on elements of `J`.
/// Construction checks kernel membership.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelElement {
    support: Vec<(Element, i64)>,
}

impl KernelElement {
    pub fn new(
        sys: &RelativeGbds,
        support: Vec<(Element, i64)>,
    ) -> Result<KernelElement, DynamicsError> {
        let support: Vec<(Element, i64)> = support.into_iter().filter(|(_, k)| *k != 0).collect();
        for (a, k) in &support {
            if !a.is_subset_of(sys.j_top()) {
                return Err(DynamicsError::NotAdmissible(format!(
                    "support element {a:?} is not in J"
                )));
            }
            if k.abs() > MAX_COEFFICIENT {
                return Err(DynamicsError::CoefficientOverflow);
            }
        }
        for (i, (a, _)) in support.iter().enumerate() {
            for (b, _) in &support[i + 1..] {
                if a == b {
                    return Err(DynamicsError::NotAdmissible(
                        "duplicate support element".to_string(),
                    ));
                }
            }
        }
        let kt = k_groups(sys);
        let mut vec = vec![num_bigint::BigInt::zero(); kt.j_atoms.len()];
        for (a, k) in &support {
            for atom in a.atom_indices() {
                let pos = kt
                    .j_atoms
                    .iter()
                    .position(|&j| j == atom)
                    .expect("support is inside J");
                vec[pos] += *k;
            }
        }
        let image = kt.matrix.mul_vec(&vec);
        if !image.iter().all(Zero::is_zero) {
            return Err(DynamicsError::NotAdmissible(
                "element is not in the kernel of (1-Phi)|_J".to_string(),
            ));
        }
        Ok(KernelElement { support })
    }

    /// Kernel basis vector (coordinates over the J-atoms) as a kernel
    /// element supported on atoms.
    pub fn from_basis_vector(
        sys: &RelativeGbds,
        kt: &KTheoryResult,
        v: &[num_bigint::BigInt],
    ) -> Result<KernelElement, DynamicsError> {
        let mut support = Vec::new();
        for (pos, coeff) in v.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            let k = coeff
                .to_i64()
                .filter(|k| k.abs() <= MAX_COEFFICIENT)
                .ok_or(DynamicsError::CoefficientOverflow)?;
            support.push((sys.algebra().atom(kt.j_atoms[pos]), k));
        }
        KernelElement::new(sys, support)
    }

    pub fn zero() -> KernelElement {
        KernelElement {
            support: Vec::new(),
        }
    }

    pub fn support(&self) -> &[(Element, i64)] {
        &self.support
    }

    pub fn negate(&self) -> KernelElement {
        KernelElement {
            support: self.support.iter().map(|(a, k)| (a.clone(), -k)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }
}

/// A member of `L_x^±`: either `(A, i)` or `(A, α, i)`, with `A` referred to
/// by its position in the support.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum IndexTag {
    /// `(A, i)`
    Direct { elem: usize, i: i64 },
    /// `(A, α, i)`
    Image { elem: usize, label: usize, i: i64 },
}

/// Canonical sort inside a block: `(A,i)` tags first, then `(A,α,i)`; within
/// a kind by support position, label, and counter.
fn tag_sort_key(t: &IndexTag) -> (u8, usize, usize, i64) {
    match *t {
        IndexTag::Direct { elem, i } => (0, elem, 0, i),
        IndexTag::Image { elem, label, i } => (1, elem, label, i),
    }
}

#[derive(Debug, Clone)]
pub struct SignedIndexData {
    /// The support of `x`, fixing element order.
    pub support: Vec<(Element, i64)>,
    pub l_plus: Vec<IndexTag>,
    pub l_minus: Vec<IndexTag>,
    /// `F̄ = F ∪ {θ_α(A)}`, nonempty members only.
    pub f_bar: Vec<Element>,
    /// Canonical block partition `𝓕`: the cells of the subalgebra generated
    /// by `F̄` below its join, in bitmask order.
    pub blocks: Vec<Element>,
    /// Per block, the sorted members of `L_B^+` and `L_B^-`.
    pub l_plus_by_block: Vec<Vec<IndexTag>>,
    pub l_minus_by_block: Vec<Vec<IndexTag>>,
    /// `h_B`: the common size of the two lists.
    pub block_sizes: Vec<usize>,
    /// `(elem, i, label, B, C)` tuples of `I_x^±` (blocks by index).
    pub i_plus: Vec<(usize, i64, usize, usize, usize)>,
    pub i_minus: Vec<(usize, i64, usize, usize, usize)>,
    /// `(elem, i, B)` of `J_x^+` / `K_x^-`.
    pub j_plus: Vec<(usize, i64, usize)>,
    pub k_minus: Vec<(usize, i64, usize)>,
    /// `(elem, i, label, C)` of `J_x^-` / `K_x^+`.
    pub j_minus: Vec<(usize, i64, usize, usize)>,
    pub k_plus: Vec<(usize, i64, usize, usize)>,
    /// `(elem, i, label, B)` of `H_x^±` (α ∈ Δ_A, B ⊆ A).
    pub h_plus: Vec<(usize, i64, usize, usize)>,
    pub h_minus: Vec<(usize, i64, usize, usize)>,
}

impl SignedIndexData {
    /// Dimension of the matrix algebra: `|N| = Σ_B h_B`.
    pub fn dim(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    fn block_offset(&self, block: usize) -> usize {
        self.block_sizes[..block].iter().sum()
    }

    /// Matrix position of `ι_B^+(tag)`.
    pub fn pos_plus(&self, block: usize, tag: &IndexTag) -> usize {
        let at = self.l_plus_by_block[block]
            .iter()
            .position(|t| t == tag)
            .expect("tag belongs to L_B^+");
        self.block_offset(block) + at
    }

    /// Matrix position of `ι_B^-(tag)`.
    pub fn pos_minus(&self, block: usize, tag: &IndexTag) -> usize {
        let at = self.l_minus_by_block[block]
            .iter()
            .position(|t| t == tag)
            .expect("tag belongs to L_B^-");
        self.block_offset(block) + at
    }
}

/// `L_η^±` for a single atom `η`: the tags whose set contains the atom.
pub fn l_eta(
    sys: &RelativeGbds,
    support: &[(Element, i64)],
    tags: &[IndexTag],
    eta: usize,
) -> Vec<IndexTag> {
    tags.iter()
        .filter(|t| match **t {
            IndexTag::Direct { elem, .. } => support[elem].0.contains_atom(eta),
            IndexTag::Image { elem, label, .. } => {
                sys.theta(label, &support[elem].0).contains_atom(eta)
            }
        })
        .cloned()
        .collect()
}

fn build_l_sets(sys: &RelativeGbds, support: &[(Element, i64)]) -> (Vec<IndexTag>, Vec<IndexTag>) {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (elem, (a, k)) in support.iter().enumerate() {
        for i in 1..=k.abs() {
            if *k > 0 {
                plus.push(IndexTag::Direct { elem, i });
                minus.extend(sys.delta_set(a).into_iter().map(|label| IndexTag::Image {
                    elem,
                    label,
                    i,
                }));
            } else {
                minus.push(IndexTag::Direct { elem, i });
                plus.extend(sys.delta_set(a).into_iter().map(|label| IndexTag::Image {
                    elem,
                    label,
                    i,
                }));
            }
        }
    }
    (plus, minus)
}

/// Build the signed index data for a kernel element: the `L_x^±` families,
/// the canonical partition, per-block orderings, and the index sets feeding
/// the matrix construction.  The per-block cardinality identity
/// `|L_B^+| = |L_B^-|` is asserted; a violation means the input escaped the
/// kernel and is reported as an internal consistency failure.
pub fn signed_index_data(
    sys: &RelativeGbds,
    x: &KernelElement,
) -> Result<SignedIndexData, DynamicsError> {
    let support = x.support.clone();
    let (l_plus, l_minus) = build_l_sets(sys, &support);

    // F̄ = F ∪ {θ_α(A)}, dropping ∅ and duplicates, in first-seen order.
    let mut f_bar: Vec<Element> = Vec::new();
    let push = |e: Element, out: &mut Vec<Element>| {
        if !e.is_empty() && !out.contains(&e) {
            out.push(e);
        }
    };
    for (a, _) in &support {
        push(a.clone(), &mut f_bar);
    }
    for (a, _) in &support {
        for l in 0..sys.label_count() {
            push(sys.theta(l, a), &mut f_bar);
        }
    }

    // Canonical 𝓕: atoms of ⋁F̄ grouped by their membership signature.
    let alg = sys.algebra();
    let union = f_bar.iter().fold(alg.empty(), |acc, e| acc.join(e));
    let mut cells: Vec<(Vec<bool>, Element)> = Vec::new();
    for atom in union.atom_indices() {
        let sig: Vec<bool> = f_bar.iter().map(|e| e.contains_atom(atom)).collect();
        match cells.iter_mut().find(|(s, _)| *s == sig) {
            Some((_, cell)) => *cell = cell.join(&alg.atom(atom)),
            None => cells.push((sig, alg.atom(atom))),
        }
    }
    let mut blocks: Vec<Element> = cells.into_iter().map(|(_, c)| c).collect();
    blocks.sort();

    // Per-block restrictions, canonically sorted; the two cardinalities must
    // agree for a kernel element.
    let in_block = |tag: &IndexTag, b: &Element| match *tag {
        IndexTag::Direct { elem, .. } => b.is_subset_of(&support[elem].0),
        IndexTag::Image { elem, label, .. } => b.is_subset_of(&sys.theta(label, &support[elem].0)),
    };
    let mut l_plus_by_block = Vec::new();
    let mut l_minus_by_block = Vec::new();
    let mut block_sizes = Vec::new();
    for b in &blocks {
        let mut lp: Vec<IndexTag> = l_plus.iter().filter(|t| in_block(t, b)).cloned().collect();
        let mut lm: Vec<IndexTag> = l_minus.iter().filter(|t| in_block(t, b)).cloned().collect();
        lp.sort_by_key(tag_sort_key);
        lm.sort_by_key(tag_sort_key);
        if lp.len() != lm.len() {
            return Err(DynamicsError::NotAdmissible(format!(
                "internal consistency failure: |L_B^+| = {} but |L_B^-| = {} at block {b:?}",
                lp.len(),
                lm.len()
            )));
        }
        block_sizes.push(lp.len());
        l_plus_by_block.push(lp);
        l_minus_by_block.push(lm);
    }

    // Index families.  B ⊆ A and C ⊆ θ_α(A) range over blocks.
    let mut i_plus = Vec::new();
    let mut i_minus = Vec::new();
    let mut j_plus = Vec::new();
    let mut j_minus = Vec::new();
    let mut k_plus = Vec::new();
    let mut k_minus = Vec::new();
    let mut h_plus = Vec::new();
    let mut h_minus = Vec::new();
    for (elem, (a, k)) in support.iter().enumerate() {
        let delta = sys.delta_set(a);
        let b_blocks: Vec<usize> = (0..blocks.len())
            .filter(|&bi| blocks[bi].is_subset_of(a))
            .collect();
        for i in 1..=k.abs() {
            let positive = *k > 0;
            for &bi in &b_blocks {
                if positive {
                    j_plus.push((elem, i, bi));
                } else {
                    k_minus.push((elem, i, bi));
                }
            }
            for &label in &delta {
                let image = sys.theta(label, a);
                let c_blocks: Vec<usize> = (0..blocks.len())
                    .filter(|&ci| blocks[ci].is_subset_of(&image))
                    .collect();
                for &ci in &c_blocks {
                    if positive {
                        k_plus.push((elem, i, label, ci));
                    } else {
                        j_minus.push((elem, i, label, ci));
                    }
                }
                for &bi in &b_blocks {
                    if positive {
                        h_plus.push((elem, i, label, bi));
                    } else {
                        h_minus.push((elem, i, label, bi));
                    }
                    for &ci in &c_blocks {
                        if positive {
                            i_plus.push((elem, i, label, bi, ci));
                        } else {
                            i_minus.push((elem, i, label, bi, ci));
                        }
                    }
                }
            }
        }
    }

    Ok(SignedIndexData {
        support,
        l_plus,
        l_minus,
        f_bar,
        blocks,
        l_plus_by_block,
        l_minus_by_block,
        block_sizes,
        i_plus,
        i_minus,
        j_plus,
        j_minus,
        k_plus,
        k_minus,
        h_plus,
        h_minus,
    })
}

/// One verified identity in a certificate transcript.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub name: &'static str,
    pub verdict: Equality,
    pub required: Equality,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.verdict >= self.required
    }
}

#[derive(Debug, Clone, Default)]
pub struct CertificateTranscript {
    pub checks: Vec<CheckRecord>,
}

impl CertificateTranscript {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }
}

impl fmt::Display for CertificateTranscript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:?} (required {:?}): {}",
                c.name,
                c.verdict,
                c.required,
                if c.passed() { "pass" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

/// The symbolic unitary representing a kernel element, with its index data
/// and verification transcript.
#[derive(Debug, Clone)]
pub struct UnitaryCertificate {
    pub x: KernelElement,
    pub data: SignedIndexData,
    pub v: SymbolicMatrix,
    pub p: SymbolicMatrix,
    pub u: SymbolicMatrix,
    pub transcript: CertificateTranscript,
}

fn entry(sys: &RelativeGbds, e: &Expr) -> AlgebraElement {
    normalize(sys, e).expect("certificate entries use well-formed symbols")
}

/// Build `V_x`, `P_x`, and `U_x = V_x + (1 − P_x)` for a kernel element.
/// The transcript starts empty; run [`verify_certificate`] to fill it.
pub fn build_unitary(
    sys: &RelativeGbds,
    x: &KernelElement,
) -> Result<UnitaryCertificate, DynamicsError> {
    let data = signed_index_data(sys, x)?;
    let dim = data.dim();
    let mut v = SymbolicMatrix::zero(dim);
    for &(elem, i, label, bi, ci) in &data.i_plus {
        let b = &data.blocks[bi];
        let c = &data.blocks[ci];
        let term = entry(
            sys,
            &Expr::Proj(b.clone())
                .times(Expr::Gen(label, sys.theta(label, b)))
                .times(Expr::Proj(c.clone())),
        );
        let row = data.pos_plus(bi, &IndexTag::Direct { elem, i });
        let col = data.pos_minus(ci, &IndexTag::Image { elem, label, i });
        v[(row, col)] = v[(row, col)].add(&term);
    }
    for &(elem, i, label, bi, ci) in &data.i_minus {
        let b = &data.blocks[bi];
        let c = &data.blocks[ci];
        let term = entry(
            sys,
            &Expr::Proj(c.clone())
                .times(Expr::Gen(label, sys.theta(label, b)).star())
                .times(Expr::Proj(b.clone())),
        );
        let row = data.pos_plus(ci, &IndexTag::Image { elem, label, i });
        let col = data.pos_minus(bi, &IndexTag::Direct { elem, i });
        v[(row, col)] = v[(row, col)].add(&term);
    }
    let mut p = SymbolicMatrix::zero(dim);
    for &(elem, i, bi) in &data.j_plus {
        let d = data.pos_plus(bi, &IndexTag::Direct { elem, i });
        let term = entry(sys, &Expr::Proj(data.blocks[bi].clone()));
        p[(d, d)] = p[(d, d)].add(&term);
    }
    for &(elem, i, label, ci) in &data.j_minus {
        let d = data.pos_plus(ci, &IndexTag::Image { elem, label, i });
        let term = entry(sys, &Expr::Proj(data.blocks[ci].clone()));
        p[(d, d)] = p[(d, d)].add(&term);
    }
    let u = v.add(&SymbolicMatrix::identity(dim).sub(&p));
    Ok(UnitaryCertificate {
        x: x.clone(),
        data,
        v,
        p,
        u,
        transcript: CertificateTranscript::default(),
    })
}

/// Replay the defining identities of a certificate, entrywise over the
/// symbolic matrix algebra, recording one verdict per identity.
pub fn verify_certificate(sys: &RelativeGbds, cert: &UnitaryCertificate) -> CertificateTranscript {
    let data = &cert.data;
    let dim = data.dim();
    let mut checks = Vec::new();
    let mut record = |name: &'static str, verdict: Equality, required: Equality| {
        checks.push(CheckRecord {
            name,
            verdict,
            required,
        });
    };

    // Alternative expression for P_x through the minus orderings.
    let mut p_alt = SymbolicMatrix::zero(dim);
    for &(elem, i, label, ci) in &data.k_plus {
        let d = data.pos_minus(ci, &IndexTag::Image { elem, label, i });
        let term = entry(sys, &Expr::Proj(data.blocks[ci].clone()));
        p_alt[(d, d)] = p_alt[(d, d)].add(&term);
    }
    for &(elem, i, bi) in &data.k_minus {
        let d = data.pos_minus(bi, &IndexTag::Direct { elem, i });
        let term = entry(sys, &Expr::Proj(data.blocks[bi].clone()));
        p_alt[(d, d)] = p_alt[(d, d)].add(&term);
    }
    record(
        "projection-alt",
        cert.p.equality(sys, &p_alt),
        Equality::EqualToeplitz,
    );

    // Explicit formula for V_x*.
    let mut v_star = SymbolicMatrix::zero(dim);
    for &(elem, i, label, bi, ci) in &data.i_plus {
        let b = &data.blocks[bi];
        let c = &data.blocks[ci];
        let term = entry(
            sys,
            &Expr::Proj(c.clone())
                .times(Expr::Gen(label, sys.theta(label, b)).star())
                .times(Expr::Proj(b.clone())),
        );
        let row = data.pos_minus(ci, &IndexTag::Image { elem, label, i });
        let col = data.pos_plus(bi, &IndexTag::Direct { elem, i });
        v_star[(row, col)] = v_star[(row, col)].add(&term);
    }
    for &(elem, i, label, bi, ci) in &data.i_minus {
        let b = &data.blocks[bi];
        let c = &data.blocks[ci];
        let term = entry(
            sys,
            &Expr::Proj(b.clone())
                .times(Expr::Gen(label, sys.theta(label, b)))
                .times(Expr::Proj(c.clone())),
        );
        let row = data.pos_minus(bi, &IndexTag::Direct { elem, i });
        let col = data.pos_plus(ci, &IndexTag::Image { elem, label, i });
        v_star[(row, col)] = v_star[(row, col)].add(&term);
    }
    record(
        "adjoint-formula",
        cert.v.adjoint().equality(sys, &v_star),
        Equality::EqualToeplitz,
    );

    let vv = cert.v.mul(sys, &cert.v.adjoint());
    let vsv = cert.v.adjoint().mul(sys, &cert.v);

    // Range formula: VV* through H_x^+ and J_x^-.
    let mut range = SymbolicMatrix::zero(dim);
    for &(elem, i, label, bi) in &data.h_plus {
        let b = &data.blocks[bi];
        let s = Expr::Gen(label, sys.theta(label, b));
        let term = entry(sys, &s.clone().times(s.star()));
        let d = data.pos_plus(bi, &IndexTag::Direct { elem, i });
        range[(d, d)] = range[(d, d)].add(&term);
    }
    for &(elem, i, label, ci) in &data.j_minus {
        let term = entry(sys, &Expr::Proj(data.blocks[ci].clone()));
        let d = data.pos_plus(ci, &IndexTag::Image { elem, label, i });
        range[(d, d)] = range[(d, d)].add(&term);
    }
    record(
        "range-formula",
        vv.equality(sys, &range),
        Equality::EqualToeplitz,
    );

    // Source formula: V*V through K_x^+ and H_x^-.
    let mut source = SymbolicMatrix::zero(dim);
    for &(elem, i, label, ci) in &data.k_plus {
        let term = entry(sys, &Expr::Proj(data.blocks[ci].clone()));
        let d = data.pos_minus(ci, &IndexTag::Image { elem, label, i });
        source[(d, d)] = source[(d, d)].add(&term);
    }
    for &(elem, i, label, bi) in &data.h_minus {
        let b = &data.blocks[bi];
        let s = Expr::Gen(label, sys.theta(label, b));
        let term = entry(sys, &s.clone().times(s.star()));
        let d = data.pos_minus(bi, &IndexTag::Direct { elem, i });
        source[(d, d)] = source[(d, d)].add(&term);
    }
    record(
        "source-formula",
        vsv.equality(sys, &source),
        Equality::EqualToeplitz,
    );

    record(
        "partial-isometry",
        vv.mul(sys, &cert.v).equality(sys, &cert.v),
        Equality::EqualToeplitz,
    );
    record(
        "left-support",
        cert.p.mul(sys, &cert.v).equality(sys, &cert.v),
        Equality::EqualToeplitz,
    );
    record(
        "right-support",
        cert.v.mul(sys, &cert.p).equality(sys, &cert.v),
        Equality::EqualToeplitz,
    );
    record(
        "projection-selfadjoint",
        cert.p.adjoint().equality(sys, &cert.p),
        Equality::EqualToeplitz,
    );
    record(
        "projection-idempotent",
        cert.p.mul(sys, &cert.p).equality(sys, &cert.p),
        Equality::EqualToeplitz,
    );

    // Cuntz–Krieger level: V is unitary onto P, U onto 1.
    record(
        "range-projection",
        vv.equality(sys, &cert.p),
        Equality::EqualModCk,
    );
    record(
        "source-projection",
        vsv.equality(sys, &cert.p),
        Equality::EqualModCk,
    );
    let identity = SymbolicMatrix::identity(dim);
    record(
        "unitary-range",
        cert.u.mul(sys, &cert.u.adjoint()).equality(sys, &identity),
        Equality::EqualModCk,
    );
    record(
        "unitary-source",
        cert.u.adjoint().mul(sys, &cert.u).equality(sys, &identity),
        Equality::EqualModCk,
    );

    CertificateTranscript { checks }
}

/// One verified certificate per kernel basis vector, in basis order.
pub fn k1_generators(sys: &RelativeGbds) -> Result<Vec<UnitaryCertificate>, DynamicsError> {
    let kt = k_groups(sys);
    let mut out = Vec::new();
    for vec in &kt.k1_basis {
        let x = KernelElement::from_basis_vector(sys, &kt, vec)?;
        let mut cert = build_unitary(sys, &x)?;
        cert.transcript = verify_certificate(sys, &cert);
        out.push(cert);
    }
    Ok(out)
}

/// The per-ultrafilter cardinality identity: `|L_η^+| = |L_η^-|` for every
/// atom `η`.  True for every kernel element; exercised at scale by the
/// self-test suites.
pub fn same_cardinality_holds(sys: &RelativeGbds, x: &KernelElement) -> bool {
    let (plus, minus) = build_l_sets(sys, &x.support);
    (0..sys.algebra().atom_count()).all(|eta| {
        l_eta(sys, &x.support, &plus, eta).len() == l_eta(sys, &x.support, &minus, eta).len()
    })
}
