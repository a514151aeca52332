//! The canonical extension of a system and its finitely generated
//! subalgebras.
//!
//! An element of the extended algebra is a family `(A_β)` over all words
//! that is eventually θ-propagated; we store only a finite prefix-closed
//! tree of overrides and propagate everything below it.  The extension's
//! quotient by the ideal of eventually vanishing J-valued families is never
//! materialized globally: equality is always the membership test for that
//! ideal, and only finitely generated subalgebras are re-atomized into
//! concrete systems (the subsystem attached to an admissible pair, and the
//! scratch subalgebras used by the embedding facet checks).

use crate::boolean::Element;
use crate::dynamics::{AdmissiblePair, RelativeGbds, Word};
use crate::star::{equal_mod_ck, normalize, Equality, Expr};
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("element {0} is not in the range ideal of the word")]
    OutsideRange(String),
    #[error("pair (H,S) is not admissible")]
    NotAdmissible,
    #[error("subalgebra closure exceeded its bound: {0}")]
    ClosureBound(String),
    #[error("subalgebra closure assertion failed: {0}")]
    ClosureAssertion(String),
    #[error("symbolic check could not be set up: {0}")]
    Symbolic(String),
}

/// Finitely supported representative of an element of the extended Boolean
/// algebra: stored overrides on a prefix-closed carrier, θ-propagation
/// below.  Kept in canonical pruned form: no childless non-root node whose
/// value is already the propagation of its parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeElement {
    nodes: BTreeMap<Word, Element>,
}

impl TreeElement {
    /// The tree with root value `a` and everything below propagated;
    /// `ι(a)` when `a` ranges over the base algebra.
    pub fn propagated(a: Element) -> TreeElement {
        let mut nodes = BTreeMap::new();
        nodes.insert(Vec::new(), a);
        TreeElement { nodes }
    }

    pub fn carrier(&self) -> impl Iterator<Item = &Word> {
        self.nodes.keys()
    }

    pub fn stored(&self) -> &BTreeMap<Word, Element> {
        &self.nodes
    }

    pub fn root_value(&self) -> &Element {
        self.nodes.get(&Vec::new()).expect("root is always stored")
    }

    /// Coordinate `A_β`: the stored value, or the θ-propagation from the
    /// deepest stored ancestor.
    pub fn value_at(&self, sys: &RelativeGbds, word: &[usize]) -> Element {
        if let Some(v) = self.nodes.get(word) {
            return v.clone();
        }
        for cut in (0..word.len()).rev() {
            if let Some(v) = self.nodes.get(&word[..cut]) {
                return sys.theta_word(&word[cut..], v);
            }
        }
        unreachable!("root is always stored")
    }

    fn from_values(sys: &RelativeGbds, values: BTreeMap<Word, Element>) -> TreeElement {
        let mut nodes = values;
        // Prune deepest-first: BTreeMap order puts extensions after their
        // prefixes, so walk in reverse.
        loop {
            let mut removed = false;
            let words: Vec<Word> = nodes.keys().cloned().collect();
            for w in words.iter().rev() {
                if w.is_empty() {
                    continue;
                }
                let has_child = nodes
                    .range(w.clone()..)
                    .skip(1)
                    .take_while(|(k, _)| k.starts_with(w))
                    .next()
                    .is_some();
                if has_child {
                    continue;
                }
                let parent = &w[..w.len() - 1];
                let parent_val = nodes.get(parent).cloned();
                if let Some(pv) = parent_val {
                    let expected = sys.theta(w[w.len() - 1], &pv);
                    if nodes[w] == expected {
                        nodes.remove(w);
                        removed = true;
                    }
                }
            }
            if !removed {
                break;
            }
        }
        TreeElement { nodes }
    }

    fn pointwise(
        &self,
        sys: &RelativeGbds,
        other: &TreeElement,
        op: impl Fn(&Element, &Element) -> Element,
    ) -> TreeElement {
        let mut words: Vec<Word> = self.nodes.keys().cloned().collect();
        for w in other.nodes.keys() {
            if !self.nodes.contains_key(w) {
                words.push(w.clone());
            }
        }
        let values: BTreeMap<Word, Element> = words
            .into_iter()
            .map(|w| {
                let v = op(&self.value_at(sys, &w), &other.value_at(sys, &w));
                (w, v)
            })
            .collect();
        TreeElement::from_values(sys, values)
    }

    pub fn meet(&self, sys: &RelativeGbds, other: &TreeElement) -> TreeElement {
        self.pointwise(sys, other, Element::meet)
    }

    pub fn join(&self, sys: &RelativeGbds, other: &TreeElement) -> TreeElement {
        self.pointwise(sys, other, Element::join)
    }

    pub fn diff(&self, sys: &RelativeGbds, other: &TreeElement) -> TreeElement {
        self.pointwise(sys, other, Element::diff)
    }

    pub fn sym_diff(&self, sys: &RelativeGbds, other: &TreeElement) -> TreeElement {
        self.pointwise(sys, other, Element::sym_diff)
    }

    /// The action `θ̃_α`: the coordinate shift onto the α-subtree.
    pub fn theta_shift(&self, sys: &RelativeGbds, label: usize) -> TreeElement {
        let mut values: BTreeMap<Word, Element> = BTreeMap::new();
        values.insert(Vec::new(), self.value_at(sys, &[label]));
        for (w, v) in &self.nodes {
            if w.first() == Some(&label) {
                values.insert(w[1..].to_vec(), v.clone());
            }
        }
        TreeElement::from_values(sys, values)
    }

    pub fn theta_shift_word(&self, sys: &RelativeGbds, word: &[usize]) -> TreeElement {
        let mut t = self.clone();
        for &l in word {
            t = t.theta_shift(sys, l);
        }
        t
    }

    /// Compact serialization used for subsystem atom names: stored nodes in
    /// word order as `word=atoms`.
    pub fn serialize(&self, sys: &RelativeGbds) -> String {
        let parts: Vec<String> = self
            .nodes
            .iter()
            .map(|(w, v)| {
                let word = w
                    .iter()
                    .map(|&l| sys.label_name(l))
                    .collect::<Vec<_>>()
                    .join(".");
                format!("{word}={}", v.atom_names().join(","))
            })
            .collect();
        format!("{{{}}}", parts.join(";"))
    }
}

// Display needs no system handle, so words print as label indices.
impl fmt::Display for TreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .nodes
            .iter()
            .map(|(w, v)| {
                let word = w.iter().map(usize::to_string).collect::<Vec<_>>().join(".");
                format!("{word}={v:?}")
            })
            .collect();
        write!(f, "{{{}}}", parts.join(";"))
    }
}

/// `ι_γ(A)`: the tree with `θ_{β'}(A)` at `γβ'` and `∅` off the `γ` branch.
/// Requires `A ∈ R_γ`; `γ = ∅` gives the embedding `ι`.
pub fn iota_embed(
    sys: &RelativeGbds,
    gamma: &[usize],
    a: &Element,
) -> Result<TreeElement, ExtensionError> {
    let range_top = sys.theta_word(gamma, &sys.algebra().top());
    if !a.is_subset_of(&range_top) {
        return Err(ExtensionError::OutsideRange(format!("{a:?}")));
    }
    let mut values = BTreeMap::new();
    for cut in 0..gamma.len() {
        values.insert(gamma[..cut].to_vec(), sys.algebra().empty());
    }
    values.insert(gamma.to_vec(), a.clone());
    Ok(TreeElement::from_values(sys, values))
}

/// Membership in the ideal of eventually vanishing J-valued families: every
/// stored value lies in `J` and every propagated tail dies inside `J`.
pub fn in_bar_ideal(sys: &RelativeGbds, t: &TreeElement) -> bool {
    for (w, v) in t.stored() {
        if !v.is_subset_of(sys.j_top()) {
            return false;
        }
        for l in 0..sys.label_count() {
            let mut child = w.clone();
            child.push(l);
            if t.stored().contains_key(&child) {
                continue;
            }
            if !sys.vanishing_tail(&sys.theta(l, v), true) {
                return false;
            }
        }
    }
    true
}

/// Equality in the quotient of the extension.
pub fn tilde_equal(sys: &RelativeGbds, s: &TreeElement, t: &TreeElement) -> bool {
    in_bar_ideal(sys, &s.sym_diff(sys, t))
}

pub fn is_tilde_empty(sys: &RelativeGbds, t: &TreeElement) -> bool {
    in_bar_ideal(sys, t)
}

/// Which extended ideal to test membership in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TildeIdeal {
    /// `Ĩ_α` for the given label.
    Ialpha(usize),
    /// `J̃`.
    J,
}

/// Membership of a class in `J̃` or `Ĩ_α`.  For `J̃` the root decides (an
/// ideal perturbation cannot change the root's J-membership); for `Ĩ_α` the
/// coordinatewise excess over the propagated tree of `top(I_α)` must lie in
/// the vanishing ideal.
pub fn tilde_membership(sys: &RelativeGbds, t: &TreeElement, which: TildeIdeal) -> bool {
    match which {
        TildeIdeal::J => t.root_value().is_subset_of(sys.j_top()),
        TildeIdeal::Ialpha(label) => {
            let bound = TreeElement::propagated(sys.ideal_top(label).clone());
            in_bar_ideal(sys, &t.diff(sys, &bound))
        }
    }
}

/// A finitely generated subalgebra of the extension, re-atomized into a
/// fresh finite system.
#[derive(Debug, Clone)]
pub struct MaterializedSubalgebra {
    pub system: RelativeGbds,
    /// Tree representative of each fresh atom, in atom order.
    pub dictionary: Vec<TreeElement>,
}

impl MaterializedSubalgebra {
    /// Express a tree that lies in the subalgebra as an element of the
    /// fresh algebra; None when it escapes.
    pub fn express(&self, base: &RelativeGbds, t: &TreeElement) -> Option<Element> {
        let alg = self.system.algebra();
        let mut covered: Option<TreeElement> = None;
        let mut out = alg.empty();
        for (i, cell) in self.dictionary.iter().enumerate() {
            if tilde_equal(base, &cell.meet(base, t), cell) {
                out = out.join(&alg.atom(i));
                covered = Some(match covered {
                    None => cell.clone(),
                    Some(c) => c.join(base, cell),
                });
            }
        }
        let covered = covered.unwrap_or_else(|| TreeElement::propagated(base.algebra().empty()));
        tilde_equal(base, &covered, t).then_some(out)
    }
}

/// Close a generating set under the shifts `θ̃_α`, modulo the vanishing
/// ideal.  Shift orbits of finitely supported trees are finite; the bound
/// is defensive.
fn theta_closure(
    sys: &RelativeGbds,
    generators: Vec<TreeElement>,
) -> Result<Vec<TreeElement>, ExtensionError> {
    let mut closed: Vec<TreeElement> = Vec::new();
    for g in generators {
        if !is_tilde_empty(sys, &g) && !closed.iter().any(|c| tilde_equal(sys, c, &g)) {
            closed.push(g);
        }
    }
    let mut next = 0;
    while next < closed.len() {
        if closed.len() > 4096 {
            return Err(ExtensionError::ClosureBound(
                "theta closure exceeded 4096 distinct elements".to_string(),
            ));
        }
        let g = closed[next].clone();
        next += 1;
        for l in 0..sys.label_count() {
            let s = g.theta_shift(sys, l);
            if !is_tilde_empty(sys, &s) && !closed.iter().any(|c| tilde_equal(sys, c, &s)) {
                closed.push(s);
            }
        }
    }
    Ok(closed)
}

/// Atoms of the subalgebra generated by the given trees: partition
/// refinement with all emptiness decided modulo the vanishing ideal.
fn refine_cells(
    sys: &RelativeGbds,
    generators: &[TreeElement],
    bound: usize,
) -> Result<Vec<TreeElement>, ExtensionError> {
    let mut cells: Vec<TreeElement> = Vec::new();
    for g in generators {
        let mut new_cells = Vec::new();
        let mut rem = g.clone();
        for c in &cells {
            let inside = c.meet(sys, g);
            if is_tilde_empty(sys, &inside) {
                new_cells.push(c.clone());
            } else {
                let outside = c.diff(sys, g);
                if is_tilde_empty(sys, &outside) {
                    new_cells.push(c.clone());
                } else {
                    new_cells.push(inside);
                    new_cells.push(outside);
                }
            }
            rem = rem.diff(sys, c);
        }
        if !is_tilde_empty(sys, &rem) {
            new_cells.push(rem);
        }
        cells = new_cells;
        if cells.len() > bound {
            return Err(ExtensionError::ClosureBound(format!(
                "{} cells exceed the generator bound {}",
                cells.len(),
                bound
            )));
        }
    }
    // Deterministic atom order: by serialized representative.
    cells.sort_by_key(|c| c.serialize(sys));
    Ok(cells)
}

/// Re-atomize the θ̃-closed subalgebra generated by the given trees into a
/// fresh finite system carrying `Ĩ_α ∩ S̃` and `J̃ ∩ S̃`.
pub fn materialize_subalgebra(
    sys: &RelativeGbds,
    generators: Vec<TreeElement>,
) -> Result<MaterializedSubalgebra, ExtensionError> {
    let closed = theta_closure(sys, generators)?;
    let bound = closed.len().max(1) * 2;
    let cells = refine_cells(sys, &closed, bound)?;

    let names: Vec<String> = cells
        .iter()
        .map(|c| format!("g{}", c.serialize(sys)))
        .collect();
    let algebra = crate::boolean::FiniteBooleanAlgebra::new(names)
        .map_err(|e| ExtensionError::ClosureAssertion(e.to_string()))?;

    // θ̃ on each cell, re-expressed in cells; closure is asserted.
    let mut table = vec![vec![algebra.empty(); cells.len()]; sys.label_count()];
    for (ci, cell) in cells.iter().enumerate() {
        for l in 0..sys.label_count() {
            let image = cell.theta_shift(sys, l);
            if is_tilde_empty(sys, &image) {
                continue;
            }
            let mut expressed = algebra.empty();
            let mut covered: Option<TreeElement> = None;
            for (cj, other) in cells.iter().enumerate() {
                if tilde_equal(sys, &other.meet(sys, &image), other) {
                    expressed = expressed.join(&algebra.atom(cj));
                    covered = Some(match covered {
                        None => other.clone(),
                        Some(c) => c.join(sys, other),
                    });
                }
            }
            let covered = covered.unwrap_or_else(|| TreeElement::propagated(sys.algebra().empty()));
            if !tilde_equal(sys, &covered, &image) {
                return Err(ExtensionError::ClosureAssertion(format!(
                    "shift of cell {} under label {} escapes the subalgebra",
                    cell.serialize(sys),
                    sys.label_name(l)
                )));
            }
            table[l][ci] = expressed;
        }
    }

    let ideal_tops: Vec<Element> = (0..sys.label_count())
        .map(|l| {
            algebra.element_from_indices(
                (0..cells.len())
                    .filter(|&ci| tilde_membership(sys, &cells[ci], TildeIdeal::Ialpha(l))),
            )
        })
        .collect();
    let j_top = algebra.element_from_indices(
        (0..cells.len()).filter(|&ci| tilde_membership(sys, &cells[ci], TildeIdeal::J)),
    );

    let system = RelativeGbds::from_parts(algebra, sys.labels().to_vec(), table, ideal_tops, j_top);
    Ok(MaterializedSubalgebra {
        system,
        dictionary: cells,
    })
}

/// The subsystem attached to an admissible pair, with its dictionary and
/// the generator table `A ↦ gen_A`.
#[derive(Debug, Clone)]
pub struct SubsystemResult {
    pub subalgebra: MaterializedSubalgebra,
    /// `gen_A` for every `A ∈ S`, in bitmask order of `A`.
    pub generator_table: Vec<(Element, TreeElement)>,
}

impl SubsystemResult {
    pub fn system(&self) -> &RelativeGbds {
        &self.subalgebra.system
    }
}

/// `gen_A = ι(A) ∖ ⋃_{α∈Δ_{[A]}} ι_α(θ_α(A))`, the generator the subsystem
/// construction attaches to `A ∈ S`.
pub fn subsystem_generator(
    sys: &RelativeGbds,
    h_top: &Element,
    a: &Element,
) -> Result<TreeElement, ExtensionError> {
    let mut gen = iota_embed(sys, &[], a)?;
    for l in 0..sys.label_count() {
        let img = sys.theta(l, a);
        if img.diff(h_top).is_empty() {
            continue; // label not in Δ_[A]
        }
        let embedded = iota_embed(sys, &[l], &img)?;
        gen = gen.diff(sys, &embedded);
    }
    Ok(gen)
}

/// Build the Morita-equivalent subsystem for an admissible pair.
pub fn build_subsystem(
    sys: &RelativeGbds,
    pair: &AdmissiblePair,
) -> Result<SubsystemResult, ExtensionError> {
    if !sys.is_admissible(pair) {
        return Err(ExtensionError::NotAdmissible);
    }
    let s_elements = crate::boolean::PrincipalIdeal::new(pair.s_top.clone()).elements();
    let mut generator_table = Vec::new();
    for a in s_elements {
        let gen = subsystem_generator(sys, &pair.h_top, &a)?;
        generator_table.push((a, gen));
    }
    let generators: Vec<TreeElement> = generator_table.iter().map(|(_, g)| g.clone()).collect();
    let subalgebra = materialize_subalgebra(sys, generators)?;
    Ok(SubsystemResult {
        subalgebra,
        generator_table,
    })
}

/// Decide whether `Σ coeff·χ_{tree}` vanishes as an integer combination of
/// indicator functions on the extension: refine the trees into cells and
/// sum coefficients per cell.
pub fn formal_sum_vanishes(
    sys: &RelativeGbds,
    terms: &[(TreeElement, BigInt)],
) -> Result<bool, ExtensionError> {
    let trees: Vec<TreeElement> = terms.iter().map(|(t, _)| t.clone()).collect();
    let nonzero: Vec<TreeElement> = trees
        .iter()
        .filter(|t| !is_tilde_empty(sys, t))
        .cloned()
        .collect();
    if nonzero.is_empty() {
        return Ok(true);
    }
    let bound = nonzero.len().max(1) * 4;
    let cells = refine_cells(sys, &nonzero, bound)?;
    for cell in &cells {
        let mut total = BigInt::zero();
        for (t, coeff) in terms {
            if tilde_equal(sys, &cell.meet(sys, t), cell) {
                total += coeff;
            }
        }
        if !total.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Symbolic check of the first embedding identity over the subalgebra
/// generated by the suffix embeddings of `R_γ`-atoms:
/// `p_{ι_γ(C)} = s_{γ,ι(C)} s*_{γ,ι(C)}`.
pub fn eq1_facet(
    sys: &RelativeGbds,
    gamma: &[usize],
    c: &Element,
) -> Result<Equality, ExtensionError> {
    let range_top = sys.theta_word(gamma, &sys.algebra().top());
    if !c.is_subset_of(&range_top) {
        return Err(ExtensionError::OutsideRange(format!("{c:?}")));
    }
    if c.is_empty() || gamma.is_empty() {
        return Ok(Equality::EqualToeplitz);
    }
    let mut generators = Vec::new();
    for cut in 0..=gamma.len() {
        for atom in range_top.atom_indices() {
            let e = sys.algebra().atom(atom);
            if let Ok(t) = iota_embed(sys, &gamma[cut..], &e) {
                generators.push(t);
            }
        }
    }
    let sub = materialize_subalgebra(sys, generators)?;
    let x = sub
        .express(sys, &iota_embed(sys, gamma, c)?)
        .ok_or_else(|| ExtensionError::Symbolic("ι_γ(C) escapes the subalgebra".to_string()))?;
    let y = sub
        .express(sys, &iota_embed(sys, &[], c)?)
        .ok_or_else(|| ExtensionError::Symbolic("ι(C) escapes the subalgebra".to_string()))?;
    let msys = &sub.system;
    let p = normalize(msys, &Expr::Proj(x)).map_err(|e| ExtensionError::Symbolic(e.to_string()))?;
    let s = normalize(msys, &Expr::WordGen(gamma.to_vec(), y))
        .map_err(|e| ExtensionError::Symbolic(e.to_string()))?;
    let ss = s.mul(msys, &s.adjoint());
    Ok(equal_mod_ck(msys, &p, &ss))
}

/// Symbolic check of the second embedding identity:
/// `s_{α,ι_γ(B)} = s_{α,ι(C)} p_{ι_γ(B)}` with `C = top(I_α)`, for
/// `B ∈ I_{αγ}`.
pub fn eq2_facet(
    sys: &RelativeGbds,
    alpha: usize,
    gamma: &[usize],
    b: &Element,
) -> Result<Equality, ExtensionError> {
    let mut word = vec![alpha];
    word.extend_from_slice(gamma);
    if !b.is_subset_of(&sys.word_ideal_top(&word)) {
        return Err(ExtensionError::OutsideRange(format!("{b:?}")));
    }
    let c_top = sys.ideal_top(alpha).clone();
    let mut generators = vec![iota_embed(sys, &[], &c_top)?];
    for cut in 0..=gamma.len() {
        if let Ok(t) = iota_embed(sys, &gamma[cut..], b) {
            generators.push(t);
        }
        let moved = sys.theta_word(&gamma[..cut], b);
        if let Ok(t) = iota_embed(sys, &gamma[cut..], &moved) {
            generators.push(t);
        }
    }
    let sub = materialize_subalgebra(sys, generators)?;
    let xb = sub
        .express(sys, &iota_embed(sys, gamma, b)?)
        .ok_or_else(|| ExtensionError::Symbolic("ι_γ(B) escapes the subalgebra".to_string()))?;
    let yc = sub
        .express(sys, &iota_embed(sys, &[], &c_top)?)
        .ok_or_else(|| ExtensionError::Symbolic("ι(C) escapes the subalgebra".to_string()))?;
    let msys = &sub.system;
    let lhs = normalize(msys, &Expr::Gen(alpha, xb))
        .map_err(|e| ExtensionError::Symbolic(e.to_string()))?;
    let rhs_expr = Expr::Gen(alpha, yc).times(Expr::Proj(
        sub.express(sys, &iota_embed(sys, gamma, b)?)
            .expect("expressed above"),
    ));
    let rhs = normalize(msys, &rhs_expr).map_err(|e| ExtensionError::Symbolic(e.to_string()))?;
    Ok(equal_mod_ck(msys, &lhs, &rhs))
}
