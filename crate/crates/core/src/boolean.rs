//! Finite Boolean algebras presented as powersets of a fixed, ordered atom
//! list.
//!
//! Every algebra in this crate is the full powerset of its atoms; elements
//! are atom subsets stored as bitsets.  Proper subalgebras that show up
//! later (quotients, extension subalgebras) are re-atomized into this form,
//! so each element has a unique normal form.  Atom order is the construction
//! order and drives every canonical ordering downstream.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BooleanError {
    #[error("operands belong to different Boolean algebras")]
    MixedAlgebras,
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
}

/// A finite Boolean algebra, identified with the powerset of its atoms.
///
/// Zero atoms is allowed and gives the trivial algebra `{∅}`.
#[derive(Debug)]
pub struct FiniteBooleanAlgebra {
    atoms: Vec<String>,
    index: HashMap<String, usize>,
}

/// Shared handle to an algebra; elements hold one of these.
pub type AlgebraRef = Arc<FiniteBooleanAlgebra>;

impl FiniteBooleanAlgebra {
    pub fn new<I, S>(atoms: I) -> Result<AlgebraRef, BooleanError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(atoms.len());
        for (i, a) in atoms.iter().enumerate() {
            if index.insert(a.clone(), i).is_some() {
                return Err(BooleanError::DuplicateAtom(a.clone()));
            }
        }
        Ok(Arc::new(FiniteBooleanAlgebra { atoms, index }))
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn atom_name(&self, i: usize) -> &str {
        &self.atoms[i]
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn blocks(&self) -> usize {
        self.atoms.len().div_ceil(64)
    }

    pub fn empty(self: &Arc<Self>) -> Element {
        Element {
            alg: Arc::clone(self),
            bits: vec![0; self.blocks()],
        }
    }

    pub fn top(self: &Arc<Self>) -> Element {
        let mut e = self.empty();
        for i in 0..self.atom_count() {
            e.set_atom(i);
        }
        e
    }

    pub fn atom(self: &Arc<Self>, i: usize) -> Element {
        assert!(i < self.atom_count(), "atom index out of range");
        let mut e = self.empty();
        e.set_atom(i);
        e
    }

    pub fn element_from_indices<I: IntoIterator<Item = usize>>(self: &Arc<Self>, it: I) -> Element {
        let mut e = self.empty();
        for i in it {
            assert!(i < self.atom_count(), "atom index out of range");
            e.set_atom(i);
        }
        e
    }

    pub fn element_from_names<'a, I>(self: &Arc<Self>, names: I) -> Result<Element, BooleanError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut e = self.empty();
        for n in names {
            let i = self
                .atom_index(n)
                .ok_or_else(|| BooleanError::UnknownAtom(n.to_string()))?;
            e.set_atom(i);
        }
        Ok(e)
    }

    /// Every element of the algebra, in bitmask order.  Only sensible for
    /// small algebras; enumeration callers stay below ~20 atoms.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = Element> + '_ {
        let n = self.atom_count();
        assert!(
            n <= 24,
            "element enumeration is restricted to small algebras"
        );
        (0u32..1u32 << n)
            .map(move |mask| self.element_from_indices((0..n).filter(move |i| mask >> i & 1 == 1)))
    }
}

impl PartialEq for FiniteBooleanAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}
impl Eq for FiniteBooleanAlgebra {}

/// An element of a [`FiniteBooleanAlgebra`]: a subset of its atoms.
#[derive(Clone)]
pub struct Element {
    alg: AlgebraRef,
    bits: Vec<u64>,
}

impl Element {
    pub fn algebra(&self) -> &AlgebraRef {
        &self.alg
    }

    pub fn same_algebra(&self, other: &Element) -> bool {
        Arc::ptr_eq(&self.alg, &other.alg) || self.alg == other.alg
    }

    fn assert_same(&self, other: &Element) {
        assert!(
            self.same_algebra(other),
            "elements of different Boolean algebras combined"
        );
    }

    fn set_atom(&mut self, i: usize) {
        self.bits[i / 64] |= 1u64 << (i % 64);
    }

    pub fn contains_atom(&self, i: usize) -> bool {
        i < self.alg.atom_count() && self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn count_atoms(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn atom_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.alg.atom_count()).filter(move |&i| self.contains_atom(i))
    }

    pub fn atom_names(&self) -> Vec<String> {
        self.atom_indices()
            .map(|i| self.alg.atom_name(i).to_string())
            .collect()
    }

    /// Atoms of this element, each as a singleton element.
    pub fn atoms(&self) -> impl Iterator<Item = Element> + '_ {
        self.atom_indices().map(move |i| self.alg.atom(i))
    }

    pub fn meet(&self, other: &Element) -> Element {
        self.assert_same(other);
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a & b)
            .collect();
        Element {
            alg: Arc::clone(&self.alg),
            bits,
        }
    }

    pub fn join(&self, other: &Element) -> Element {
        self.assert_same(other);
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a | b)
            .collect();
        Element {
            alg: Arc::clone(&self.alg),
            bits,
        }
    }

    /// Relative complement `self ∖ other`.
    pub fn diff(&self, other: &Element) -> Element {
        self.assert_same(other);
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a & !b)
            .collect();
        Element {
            alg: Arc::clone(&self.alg),
            bits,
        }
    }

    pub fn sym_diff(&self, other: &Element) -> Element {
        self.assert_same(other);
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a ^ b)
            .collect();
        Element {
            alg: Arc::clone(&self.alg),
            bits,
        }
    }

    pub fn complement(&self) -> Element {
        self.alg.top().diff(self)
    }

    pub fn is_subset_of(&self, other: &Element) -> bool {
        self.assert_same(other);
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint_from(&self, other: &Element) -> bool {
        self.assert_same(other);
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0)
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other) && self.bits == other.bits
    }
}
impl Eq for Element {}

impl Hash for Element {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.alg.atom_count().hash(state);
        self.bits.hash(state);
    }
}

impl PartialOrd for Element {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Bitmask order: the numeric order of the atom bitmask, with atom 0 the
/// least significant bit.  Used for every deterministic emission order.
impl Ord for Element {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.bits.iter().zip(&other.bits).rev() {
            match a.cmp(b) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.alg.atoms.cmp(&other.alg.atoms)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.atom_names().join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Meet,
    Join,
    Diff,
}

/// Fallible entry point for the three lattice operations; the only way two
/// elements of distinct algebras can meet is through here, and they are
/// rejected.
pub fn element_ops(op: SetOp, x: &Element, y: &Element) -> Result<Element, BooleanError> {
    if !x.same_algebra(y) {
        return Err(BooleanError::MixedAlgebras);
    }
    Ok(match op {
        SetOp::Meet => x.meet(y),
        SetOp::Join => x.join(y),
        SetOp::Diff => x.diff(y),
    })
}

/// The ideal `{B : B ⊆ top}`.  In a finite Boolean algebra every ideal is
/// principal, so ideals are stored by their top element only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrincipalIdeal {
    top: Element,
}

impl PrincipalIdeal {
    pub fn new(top: Element) -> Self {
        PrincipalIdeal { top }
    }

    pub fn top(&self) -> &Element {
        &self.top
    }

    pub fn contains(&self, x: &Element) -> bool {
        x.is_subset_of(&self.top)
    }

    /// All members of the ideal, in bitmask order.
    pub fn elements(&self) -> Vec<Element> {
        let idx: Vec<usize> = self.top.atom_indices().collect();
        let n = idx.len();
        assert!(n <= 24, "ideal enumeration is restricted to small algebras");
        let alg = self.top.algebra();
        let mut out: Vec<Element> = (0u32..1u32 << n)
            .map(|mask| {
                alg.element_from_indices(
                    idx.iter()
                        .enumerate()
                        .filter_map(|(k, &i)| (mask >> k & 1 == 1).then_some(i)),
                )
            })
            .collect();
        out.sort();
        out
    }
}

/// Presentation of the quotient of an algebra by the principal ideal `↓h`:
/// the surviving atoms are those not below `h`, and `[A] = A ∖ h`.
#[derive(Debug, Clone)]
pub struct QuotientPresentation {
    source: AlgebraRef,
    h: Element,
    quotient: AlgebraRef,
    reindex: Vec<Option<usize>>,
}

impl QuotientPresentation {
    pub fn source(&self) -> &AlgebraRef {
        &self.source
    }

    pub fn quotiented_top(&self) -> &Element {
        &self.h
    }

    pub fn quotient_algebra(&self) -> &AlgebraRef {
        &self.quotient
    }

    /// Projection `[A] = A ∖ h`, re-atomized onto the surviving atoms.
    pub fn project(&self, a: &Element) -> Element {
        self.quotient
            .element_from_indices(a.atom_indices().filter_map(|i| self.reindex[i]))
    }

    /// The relation `A ∼ B` modulo `↓h`.
    pub fn equivalent(&self, a: &Element, b: &Element) -> bool {
        a.diff(&self.h) == b.diff(&self.h)
    }
}

/// Quotient of `B` by the principal ideal `↓h`.  `h = ∅` is the identity
/// quotient and `h = ⊤` the trivial one.
pub fn quotient_algebra(h: &Element) -> QuotientPresentation {
    let source = Arc::clone(h.algebra());
    let mut surviving_names = Vec::new();
    let mut reindex = vec![None; source.atom_count()];
    for i in 0..source.atom_count() {
        if !h.contains_atom(i) {
            reindex[i] = Some(surviving_names.len());
            surviving_names.push(source.atom_name(i).to_string());
        }
    }
    let quotient =
        FiniteBooleanAlgebra::new(surviving_names).expect("surviving atom names stay unique");
    QuotientPresentation {
        source,
        h: h.clone(),
        quotient,
        reindex,
    }
}

/// An ultrafilter on a finite Boolean algebra: principal at an atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ultrafilter {
    alg: AlgebraRef,
    atom: usize,
}

impl Ultrafilter {
    pub fn atom_index(&self) -> usize {
        self.atom
    }

    pub fn atom_name(&self) -> &str {
        self.alg.atom_name(self.atom)
    }

    pub fn contains(&self, x: &Element) -> bool {
        x.contains_atom(self.atom)
    }
}

/// Stone-duality data: ultrafilters correspond bijectively to atoms, and
/// `Z(A)` is the set of atoms below `A`.
pub fn stone_ultrafilters(alg: &AlgebraRef) -> Vec<Ultrafilter> {
    (0..alg.atom_count())
        .map(|atom| Ultrafilter {
            alg: Arc::clone(alg),
            atom,
        })
        .collect()
}

/// `Z(A)` as the set of atom indices below `A`.
pub fn z_set(a: &Element) -> Vec<usize> {
    a.atom_indices().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg2() -> AlgebraRef {
        FiniteBooleanAlgebra::new(["v", "w"]).unwrap()
    }

    #[test]
    fn element_ops_examples() {
        let b = alg2();
        let v = b.element_from_names(["v"]).unwrap();
        let w = b.element_from_names(["w"]).unwrap();
        let vw = b.element_from_names(["v", "w"]).unwrap();
        assert_eq!(element_ops(SetOp::Meet, &v, &vw).unwrap(), v);
        assert_eq!(element_ops(SetOp::Join, &v, &w).unwrap(), vw);
        assert_eq!(element_ops(SetOp::Diff, &vw, &w).unwrap(), v);
    }

    #[test]
    fn mixed_algebras_rejected() {
        let b = alg2();
        let c = FiniteBooleanAlgebra::new(["x", "y"]).unwrap();
        let v = b.element_from_names(["v"]).unwrap();
        let x = c.element_from_names(["x"]).unwrap();
        assert_eq!(
            element_ops(SetOp::Meet, &v, &x),
            Err(BooleanError::MixedAlgebras)
        );
    }

    #[test]
    fn duplicate_atom_rejected() {
        assert_eq!(
            FiniteBooleanAlgebra::new(["v", "v"]).unwrap_err(),
            BooleanError::DuplicateAtom("v".into())
        );
    }

    #[test]
    fn trivial_algebra() {
        let b = FiniteBooleanAlgebra::new(Vec::<String>::new()).unwrap();
        assert_eq!(b.empty(), b.top());
        assert!(b.top().is_empty());
        assert_eq!(b.elements().count(), 1);
    }

    #[test]
    fn laws_exhaustive_small() {
        // De Morgan and distributivity, exhaustively up to 4 atoms.
        for n in 0..=4 {
            let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
            let b = FiniteBooleanAlgebra::new(names).unwrap();
            let all: Vec<Element> = b.elements().collect();
            for x in &all {
                for y in &all {
                    assert_eq!(x.join(y).complement(), x.complement().meet(&y.complement()));
                    assert_eq!(x.meet(y).complement(), x.complement().join(&y.complement()));
                    for z in &all {
                        assert_eq!(x.meet(&y.join(z)), x.meet(y).join(&x.meet(z)));
                        assert_eq!(x.join(&y.meet(z)), x.join(y).meet(&x.join(z)));
                    }
                }
            }
        }
    }

    #[test]
    fn quotient_examples() {
        let b = alg2();
        let w = b.element_from_names(["w"]).unwrap();
        let q = quotient_algebra(&w);
        assert_eq!(q.quotient_algebra().atoms(), ["v".to_string()]);
        let vw = b.element_from_names(["v", "w"]).unwrap();
        assert_eq!(q.project(&vw).atom_names(), vec!["v".to_string()]);
        assert!(q.project(&w).is_empty());
        assert!(q.project(&b.empty()).is_empty());
    }

    #[test]
    fn quotient_is_homomorphism_exhaustive() {
        let names: Vec<String> = (0..4).map(|i| format!("a{i}")).collect();
        let b = FiniteBooleanAlgebra::new(names).unwrap();
        let all: Vec<Element> = b.elements().collect();
        for h in &all {
            let q = quotient_algebra(h);
            for x in &all {
                for y in &all {
                    assert_eq!(q.project(&x.meet(y)), q.project(x).meet(&q.project(y)));
                    assert_eq!(q.project(&x.join(y)), q.project(x).join(&q.project(y)));
                    assert_eq!(q.project(&x.diff(y)), q.project(x).diff(&q.project(y)));
                    // A ∼ B modulo ↓h iff the projections agree.
                    assert_eq!(q.equivalent(x, y), q.project(x) == q.project(y));
                }
            }
        }
    }

    #[test]
    fn ideals_are_principal_exhaustive() {
        // Every subset closed under join and downward closure equals ↓(its join),
        // checked by enumerating all candidate subsets on up to 3 atoms.
        for n in 0..=3u32 {
            let names: Vec<String> = (0..n).map(|i| format!("a{i}")).collect();
            let b = FiniteBooleanAlgebra::new(names).unwrap();
            let all: Vec<Element> = b.elements().collect();
            let m = all.len();
            for subset in 1u32..1 << m {
                let members: Vec<&Element> = (0..m)
                    .filter(|i| subset >> i & 1 == 1)
                    .map(|i| &all[i])
                    .collect();
                let closed_down = members.iter().all(|x| {
                    all.iter()
                        .filter(|y| y.is_subset_of(x))
                        .all(|y| members.contains(&y))
                });
                let closed_join = members
                    .iter()
                    .all(|x| members.iter().all(|y| members.contains(&&x.join(y))));
                if closed_down && closed_join {
                    let top = members.iter().fold(b.empty(), |acc, x| acc.join(x));
                    let ideal = PrincipalIdeal::new(top);
                    let listed = ideal.elements();
                    assert_eq!(listed.len(), members.len());
                    assert!(members.iter().all(|x| ideal.contains(x)));
                }
            }
        }
    }

    #[test]
    fn stone_data_examples() {
        let b = alg2();
        let ufs = stone_ultrafilters(&b);
        assert_eq!(ufs.len(), 2);
        assert_eq!(ufs[0].atom_name(), "v");
        let vw = b.top();
        assert_eq!(z_set(&vw), vec![0, 1]);
        assert_eq!(z_set(&b.empty()), Vec::<usize>::new());
        let v = b.element_from_names(["v"]).unwrap();
        let w = b.element_from_names(["w"]).unwrap();
        // Z(A∪B) = Z(A) ∪ Z(B)
        let mut both = z_set(&v);
        both.extend(z_set(&w));
        both.sort();
        assert_eq!(z_set(&v.join(&w)), both);
        assert!(ufs[0].contains(&v) && !ufs[0].contains(&w));
    }

    #[test]
    fn bitmask_order() {
        let b = alg2();
        let mut all: Vec<Element> = b.elements().collect();
        all.sort();
        let names: Vec<Vec<String>> = all.iter().map(|e| e.atom_names()).collect();
        assert_eq!(
            names,
            vec![
                Vec::<String>::new(),
                vec!["v".to_string()],
                vec!["w".to_string()],
                vec!["v".to_string(), "w".to_string()],
            ]
        );
    }
}
