//! Exact symbolic *-algebra of a Toeplitz representation.
//!
//! Elements are rational combinations of path monomials `s(μ,a)s*(ν,a)`
//! where `a` is an atom and each word carries its backward chain of atoms:
//! disjointness of atom images makes the chain of `(word, atom)` unique, so
//! the triple `(μ, a, ν)` is a normal form.  Products of normal forms are
//! again normal forms (or zero), which keeps normalization a finite fold.
//!
//! Equality has three levels: syntactic equality of normal forms decides
//! equality in the Toeplitz algebra; equality modulo the Cuntz–Krieger
//! relation on `J` is decided by a conservative defect-elimination matcher
//! that either exhibits the difference as a combination of conjugated
//! defects or reports `NotProven`.  Inequality in the quotient is never
//! asserted.

use crate::boolean::Element;
use crate::dynamics::{RelativeGbds, Word};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StarError {
    #[error("invalid symbol: set {set:?} is not contained in the ideal of word `{word}`")]
    InvalidSymbol { word: String, set: String },
    #[error("defect is only defined inside J")]
    OutsideJ,
}

/// `s(μ,a)·s*(ν,a)`; `μ = ν = ∅` is the projection `p_a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub mu: Word,
    pub atom: usize,
    pub nu: Word,
}

impl Monomial {
    pub fn projection(atom: usize) -> Self {
        Monomial {
            mu: Vec::new(),
            atom,
            nu: Vec::new(),
        }
    }

    pub fn adjoint(&self) -> Monomial {
        Monomial {
            mu: self.nu.clone(),
            atom: self.atom,
            nu: self.mu.clone(),
        }
    }

    fn degree(&self) -> usize {
        self.mu.len() + self.nu.len()
    }
}

/// Degree order first, so the least monomial of an element is a shortest one
/// — the defect matcher peels those off first.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.mu.cmp(&other.mu))
            .then_with(|| self.nu.cmp(&other.nu))
            .then_with(|| self.atom.cmp(&other.atom))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Backward chain of `(word, atom)`: the atoms visited after each letter,
/// ending at `atom`.  `None` when no path produces `atom` or the initial
/// atom escapes the first letter's ideal.
fn chain(sys: &RelativeGbds, word: &[usize], atom: usize) -> Option<Vec<usize>> {
    let n = word.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut c = vec![0usize; n];
    c[n - 1] = atom;
    for k in (1..n).rev() {
        c[k - 1] = sys.source_atom(word[k], c[k])?;
    }
    sys.ideal_top(word[0]).contains_atom(c[0]).then_some(c)
}

pub fn monomial_is_valid(sys: &RelativeGbds, m: &Monomial) -> bool {
    chain(sys, &m.mu, m.atom).is_some() && chain(sys, &m.nu, m.atom).is_some()
}

/// Product of two path monomials: another monomial, or zero.
fn mono_mul(sys: &RelativeGbds, m1: &Monomial, m2: &Monomial) -> Option<Monomial> {
    if m1.nu.len() > m2.mu.len() {
        return mono_mul(sys, &m2.adjoint(), &m1.adjoint()).map(|m| m.adjoint());
    }
    let split = m1.nu.len();
    if m2.mu[..split] != m1.nu[..] {
        return None;
    }
    let ck = chain(sys, &m2.mu, m2.atom).expect("stored monomials carry valid chains");
    let matched = if split == 0 {
        if m2.mu.is_empty() {
            m1.atom == m2.atom
        } else {
            sys.source_atom(m2.mu[0], ck[0]) == Some(m1.atom)
        }
    } else {
        ck[split - 1] == m1.atom
    };
    if !matched {
        return None;
    }
    let mut mu = m1.mu.clone();
    mu.extend_from_slice(&m2.mu[split..]);
    Some(Monomial {
        mu,
        atom: m2.atom,
        nu: m2.nu.clone(),
    })
}

/// A finite rational combination of monomials, plus a formal unit
/// coefficient for expressions in the unitization.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlgebraElement {
    pub unit: BigRational,
    pub terms: BTreeMap<Monomial, BigRational>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        AlgebraElement::default()
    }

    pub fn one() -> Self {
        AlgebraElement {
            unit: BigRational::one(),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, BigRational::one());
        AlgebraElement {
            unit: BigRational::zero(),
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero() && self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            // no stored zero coefficients
            let key = self
                .terms
                .iter()
                .find(|(_, v)| v.is_zero())
                .map(|(k, _)| k.clone())
                .expect("just zeroed");
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.unit += &other.unit;
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> AlgebraElement {
        if c.is_zero() {
            return AlgebraElement::zero();
        }
        AlgebraElement {
            unit: &self.unit * c,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement {
            unit: self.unit.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.adjoint(), v.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, sys: &RelativeGbds, other: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        out.unit = &self.unit * &other.unit;
        if !other.unit.is_zero() {
            for (m, c) in &self.terms {
                out.add_term(m.clone(), c * &other.unit);
            }
        }
        if !self.unit.is_zero() {
            for (m, c) in &other.terms {
                out.add_term(m.clone(), c * &self.unit);
            }
        }
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some(m) = mono_mul(sys, m1, m2) {
                    out.add_term(m, c1 * c2);
                }
            }
        }
        out
    }

    pub fn max_word_len(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.mu.len().max(m.nu.len()))
            .max()
            .unwrap_or(0)
    }
}

/// Formal expressions over the generators; [`normalize`] evaluates them.
#[derive(Debug, Clone)]
pub enum Expr {
    Zero,
    Unit,
    /// `p_A`
    Proj(Element),
    /// `s_{α,B}`
    Gen(usize, Element),
    /// `s_{μ,A}`, factored through the canonical word decomposition
    WordGen(Word, Element),
    Adjoint(Box<Expr>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Scale(BigRational, Box<Expr>),
}

impl Expr {
    pub fn star(self) -> Expr {
        Expr::Adjoint(Box::new(self))
    }

    pub fn times(self, other: Expr) -> Expr {
        Expr::Product(vec![self, other])
    }

    pub fn plus(self, other: Expr) -> Expr {
        Expr::Sum(vec![self, other])
    }

    pub fn minus(self, other: Expr) -> Expr {
        Expr::Sum(vec![
            self,
            Expr::Scale(-BigRational::one(), Box::new(other)),
        ])
    }
}

/// Evaluate an expression to its normal form.
pub fn normalize(sys: &RelativeGbds, expr: &Expr) -> Result<AlgebraElement, StarError> {
    Ok(match expr {
        Expr::Zero => AlgebraElement::zero(),
        Expr::Unit => AlgebraElement::one(),
        Expr::Proj(a) => {
            let mut out = AlgebraElement::zero();
            for i in a.atom_indices() {
                out.add_term(Monomial::projection(i), BigRational::one());
            }
            out
        }
        Expr::Gen(label, b) => word_gen(sys, &[*label], b)?,
        Expr::WordGen(word, a) => word_gen(sys, word, a)?,
        Expr::Adjoint(e) => normalize(sys, e)?.adjoint(),
        Expr::Sum(es) => {
            let mut out = AlgebraElement::zero();
            for e in es {
                out = out.add(&normalize(sys, e)?);
            }
            out
        }
        Expr::Product(es) => {
            let mut out = AlgebraElement::one();
            for e in es {
                out = out.mul(sys, &normalize(sys, e)?);
            }
            out
        }
        Expr::Scale(c, e) => normalize(sys, e)?.scale(c),
    })
}

fn word_gen(sys: &RelativeGbds, word: &[usize], a: &Element) -> Result<AlgebraElement, StarError> {
    if !a.is_subset_of(&sys.word_ideal_top(word)) {
        let name = word
            .iter()
            .map(|&l| sys.label_name(l))
            .collect::<Vec<_>>()
            .join(".");
        return Err(StarError::InvalidSymbol {
            word: name,
            set: format!("{a:?}"),
        });
    }
    let mut out = AlgebraElement::zero();
    for i in a.atom_indices() {
        let m = Monomial {
            mu: word.to_vec(),
            atom: i,
            nu: Vec::new(),
        };
        debug_assert!(monomial_is_valid(sys, &m));
        out.add_term(m, BigRational::one());
    }
    Ok(out)
}

/// The Cuntz–Krieger defect
/// `d_A = p_A − Σ_{α∈Δ_A} s_{α,θ_α(A)} s*_{α,θ_α(A)}`, in normal form.
/// Vanishes in the quotient exactly when `A ∈ J`.
pub fn ck_defect(sys: &RelativeGbds, a: &Element) -> Result<AlgebraElement, StarError> {
    if !a.is_subset_of(sys.j_top()) {
        return Err(StarError::OutsideJ);
    }
    let mut out = normalize(sys, &Expr::Proj(a.clone()))?;
    for l in sys.delta_set(a) {
        let img = sys.theta(l, a);
        let s = normalize(sys, &Expr::Gen(l, img))?;
        out = out.sub(&s.mul(sys, &s.adjoint()));
    }
    Ok(out)
}

/// `s(μ,a) · d_a · s(ν,a)*` in normal form; the head is the monomial
/// `(μ,a,ν)` and every other term is one letter longer on both sides.
fn sandwiched_defect(
    sys: &RelativeGbds,
    mu: &[usize],
    atom: usize,
    nu: &[usize],
) -> AlgebraElement {
    let mut out = AlgebraElement::monomial(Monomial {
        mu: mu.to_vec(),
        atom,
        nu: nu.to_vec(),
    });
    let atom_elem = sys.algebra().atom(atom);
    for l in sys.delta_set(&atom_elem) {
        for c in sys.theta(l, &atom_elem).atom_indices() {
            let mut m = mu.to_vec();
            m.push(l);
            let mut n = nu.to_vec();
            n.push(l);
            out.add_term(
                Monomial {
                    mu: m,
                    atom: c,
                    nu: n,
                },
                -BigRational::one(),
            );
        }
    }
    out
}

/// Verdict of the three-valued equality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Equality {
    /// The difference fails to reduce: nothing is asserted.
    NotProven,
    /// Equal in the quotient by relation (iv); the difference is a
    /// combination of conjugated defects at atoms of `J`.
    EqualModCk,
    /// The normal forms coincide; equal already in the Toeplitz algebra.
    EqualToeplitz,
}

/// Decide equality of two normal forms, at Toeplitz level or modulo the
/// Cuntz–Krieger relation on `J`.  The matcher greedily eliminates the
/// shortest residual monomial `(μ,a,ν)` against `s(μ,a)·d_a·s(ν,a)*`; word
/// growth is capped, so the check is conservative.
pub fn equal_mod_ck(sys: &RelativeGbds, x: &AlgebraElement, y: &AlgebraElement) -> Equality {
    let mut z = x.sub(y);
    if z.is_zero() {
        return Equality::EqualToeplitz;
    }
    if !z.unit.is_zero() {
        // Defects carry no unit component, so a unit residue can never match.
        return Equality::NotProven;
    }
    let cap = z.max_word_len() + 4;
    let mut iterations = 0usize;
    loop {
        if z.is_zero() {
            return Equality::EqualModCk;
        }
        iterations += 1;
        if iterations > 20_000 {
            return Equality::NotProven;
        }
        let (head, coeff) = {
            let (m, c) = z
                .terms
                .iter()
                .next()
                .expect("nonzero without unit has terms");
            (m.clone(), c.clone())
        };
        if !sys.j_top().contains_atom(head.atom) {
            return Equality::NotProven;
        }
        if head.mu.len() >= cap || head.nu.len() >= cap {
            return Equality::NotProven;
        }
        let d = sandwiched_defect(sys, &head.mu, head.atom, &head.nu);
        z = z.sub(&d.scale(&coeff));
    }
}

/// Square matrix over the symbolic algebra (entries may use the unit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicMatrix {
    pub dim: usize,
    entries: Vec<AlgebraElement>,
}

impl SymbolicMatrix {
    pub fn zero(dim: usize) -> Self {
        SymbolicMatrix {
            dim,
            entries: vec![AlgebraElement::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = SymbolicMatrix::zero(dim);
        for i in 0..dim {
            m[(i, i)] = AlgebraElement::one();
        }
        m
    }

    pub fn add(&self, other: &SymbolicMatrix) -> SymbolicMatrix {
        assert_eq!(self.dim, other.dim);
        SymbolicMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &SymbolicMatrix) -> SymbolicMatrix {
        assert_eq!(self.dim, other.dim);
        SymbolicMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn mul(&self, sys: &RelativeGbds, other: &SymbolicMatrix) -> SymbolicMatrix {
        assert_eq!(self.dim, other.dim);
        let mut out = SymbolicMatrix::zero(self.dim);
        for i in 0..self.dim {
            for k in 0..self.dim {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..self.dim {
                    if other[(k, j)].is_zero() {
                        continue;
                    }
                    let prod = self[(i, k)].mul(sys, &other[(k, j)]);
                    out[(i, j)] = out[(i, j)].add(&prod);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> SymbolicMatrix {
        let mut out = SymbolicMatrix::zero(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(j, i)] = self[(i, j)].adjoint();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(AlgebraElement::is_zero)
    }

    /// Entrywise three-valued equality: the weakest entry verdict wins.
    pub fn equality(&self, sys: &RelativeGbds, other: &SymbolicMatrix) -> Equality {
        assert_eq!(self.dim, other.dim);
        let mut worst = Equality::EqualToeplitz;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            let v = equal_mod_ck(sys, a, b);
            worst = worst.min(v);
            if worst == Equality::NotProven {
                return worst;
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for SymbolicMatrix {
    type Output = AlgebraElement;
    fn index(&self, (i, j): (usize, usize)) -> &AlgebraElement {
        &self.entries[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for SymbolicMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut AlgebraElement {
        &mut self.entries[i * self.dim + j]
    }
}

/// Human-readable rendering, e.g. `s(a;v) + 1 - p(v)`.
pub fn render_element(sys: &RelativeGbds, e: &AlgebraElement) -> String {
    let mut parts: Vec<(bool, String)> = Vec::new();
    if !e.unit.is_zero() {
        parts.push((e.unit.is_negative(), coeff_str(&e.unit.abs(), "1")));
    }
    for (m, c) in &e.terms {
        parts.push((c.is_negative(), coeff_str(&c.abs(), &mono_str(sys, m))));
    }
    if parts.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (neg, body)) in parts.iter().enumerate() {
        if i == 0 {
            if *neg {
                out.push('-');
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        out.push_str(body);
    }
    out
}

fn coeff_str(c: &BigRational, body: &str) -> String {
    if c.is_one() {
        body.to_string()
    } else if c.denom() == &BigInt::one() {
        format!("{}·{}", c.numer(), body)
    } else {
        format!("({c})·{body}")
    }
}

fn mono_str(sys: &RelativeGbds, m: &Monomial) -> String {
    let word_str = |w: &[usize]| {
        w.iter()
            .map(|&l| sys.label_name(l))
            .collect::<Vec<_>>()
            .join(".")
    };
    let atom = sys.algebra().atom_name(m.atom);
    let mut s = String::new();
    if m.mu.is_empty() && m.nu.is_empty() {
        let _ = write!(s, "p({atom})");
        return s;
    }
    if !m.mu.is_empty() {
        let _ = write!(s, "s({};{atom})", word_str(&m.mu));
    } else {
        let _ = write!(s, "p({atom})");
    }
    if !m.nu.is_empty() {
        let _ = write!(s, "s({};{atom})*", word_str(&m.nu));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn ratio(n: i64) -> BigRational {
        BigRational::from(BigInt::from(n))
    }

    #[test]
    fn projection_expands_to_atoms() {
        let sys = fixtures::fx_llw();
        let top = sys.algebra().top();
        let p = normalize(&sys, &Expr::Proj(top)).unwrap();
        assert_eq!(p.terms.len(), 2);
        assert!(p.terms.keys().all(|m| m.mu.is_empty() && m.nu.is_empty()));
    }

    #[test]
    fn empty_generator_is_zero() {
        let sys = fixtures::fx_loop();
        let z = normalize(&sys, &Expr::Gen(0, sys.algebra().empty())).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn invalid_symbol_rejected() {
        let sys = fixtures::fx_arrow();
        let v = sys.algebra().element_from_names(["v"]).unwrap();
        // I_e = ↓{w}, so s_{e,{v}} is ill-formed.
        assert!(matches!(
            normalize(&sys, &Expr::Gen(0, v)),
            Err(StarError::InvalidSymbol { .. })
        ));
    }

    #[test]
    fn left_projection_absorbs() {
        // FX-ARROW: p_{v} · s_{e,{w}} = s_{e,{w}}
        let sys = fixtures::fx_arrow();
        let v = sys.algebra().element_from_names(["v"]).unwrap();
        let w = sys.algebra().element_from_names(["w"]).unwrap();
        let lhs = normalize(&sys, &Expr::Proj(v).times(Expr::Gen(0, w.clone()))).unwrap();
        let rhs = normalize(&sys, &Expr::Gen(0, w)).unwrap();
        assert_eq!(lhs, rhs);
        assert!(!lhs.is_zero());
    }

    #[test]
    fn isometry_relation() {
        // FX-LOOP: s*_{a,v} s_{a,v} = p_v, and the range projection is idempotent.
        let sys = fixtures::fx_loop();
        let v = sys.algebra().top();
        let s = Expr::Gen(0, v.clone());
        let lhs = normalize(&sys, &s.clone().star().times(s.clone())).unwrap();
        let p = normalize(&sys, &Expr::Proj(v)).unwrap();
        assert_eq!(lhs, p);

        let range = normalize(&sys, &s.clone().times(s.clone().star())).unwrap();
        let sq = range.mul(&sys, &range);
        assert_eq!(range, sq);

        let x = normalize(&sys, &s).unwrap();
        assert!(x.mul(&sys, &AlgebraElement::zero()).is_zero());
    }

    #[test]
    fn partial_isometry_for_all_generators() {
        for sys in fixtures::all_fixtures() {
            for l in 0..sys.label_count() {
                let top = sys.ideal_top(l).clone();
                for b in ideal_elements(&top) {
                    let s = Expr::Gen(l, b.clone());
                    let ss = normalize(&sys, &s.clone().star().times(s.clone())).unwrap();
                    let p = normalize(&sys, &Expr::Proj(b)).unwrap();
                    assert_eq!(ss, p);
                    let sss = normalize(&sys, &s.clone().times(s.clone().star()).times(s.clone()))
                        .unwrap();
                    assert_eq!(sss, normalize(&sys, &s).unwrap());
                }
            }
        }
    }

    fn ideal_elements(top: &Element) -> Vec<Element> {
        crate::boolean::PrincipalIdeal::new(top.clone()).elements()
    }

    #[test]
    fn additivity_on_disjoint_sets() {
        for sys in fixtures::all_fixtures() {
            for l in 0..sys.label_count() {
                let top = sys.ideal_top(l).clone();
                let parts = ideal_elements(&top);
                for b in &parts {
                    for b2 in &parts {
                        if !b.is_disjoint_from(b2) {
                            continue;
                        }
                        let joint = normalize(&sys, &Expr::Gen(l, b.join(b2))).unwrap();
                        let split = normalize(&sys, &Expr::Gen(l, b.clone()))
                            .unwrap()
                            .add(&normalize(&sys, &Expr::Gen(l, b2.clone())).unwrap());
                        assert_eq!(joint, split);
                    }
                }
            }
        }
    }

    #[test]
    fn ck_defect_examples() {
        let sys = fixtures::fx_loop();
        let v = sys.algebra().top();
        let d = ck_defect(&sys, &v).unwrap();
        let s = Expr::Gen(0, v.clone());
        let manual = normalize(
            &sys,
            &Expr::Proj(v.clone()).minus(s.clone().times(s.star())),
        )
        .unwrap();
        assert_eq!(d, manual);
        assert!(ck_defect(&sys, &sys.algebra().empty()).unwrap().is_zero());

        // d_A is atomwise additive.
        let llw = fixtures::fx_llw();
        let top = llw.algebra().top();
        let total = ck_defect(&llw, &top).unwrap();
        let sum = top
            .atoms()
            .map(|a| ck_defect(&llw, &a).unwrap())
            .fold(AlgebraElement::zero(), |acc, d| acc.add(&d));
        assert_eq!(total, sum);

        let arrow = fixtures::fx_arrow();
        let w = arrow.algebra().element_from_names(["w"]).unwrap();
        assert!(ck_defect(&arrow, &w).is_err()); // w ∉ J
    }

    #[test]
    fn equal_mod_ck_examples() {
        let sys = fixtures::fx_loop();
        let v = sys.algebra().top();
        let p = normalize(&sys, &Expr::Proj(v.clone())).unwrap();
        let s = Expr::Gen(0, v.clone());
        let ss = normalize(&sys, &s.clone().times(s.clone().star())).unwrap();
        assert_eq!(equal_mod_ck(&sys, &p, &ss), Equality::EqualModCk);
        assert_eq!(equal_mod_ck(&sys, &p, &p), Equality::EqualToeplitz);
        assert_eq!(
            equal_mod_ck(&sys, &p, &AlgebraElement::zero()),
            Equality::NotProven
        );

        // FX-TOEP has J = {∅}: no defect is available, so nothing is proven.
        let toep = fixtures::fx_toep();
        let v = toep.algebra().top();
        let p = normalize(&toep, &Expr::Proj(v.clone())).unwrap();
        let s = Expr::Gen(0, v);
        let ss = normalize(&toep, &s.clone().times(s.star())).unwrap();
        assert_eq!(equal_mod_ck(&toep, &p, &ss), Equality::NotProven);
    }

    #[test]
    fn defect_relation_holds_mod_ck_on_fixtures() {
        for sys in fixtures::all_fixtures() {
            for a in ideal_elements(sys.j_top()) {
                let p = normalize(&sys, &Expr::Proj(a.clone())).unwrap();
                let mut sum = AlgebraElement::zero();
                for l in sys.delta_set(&a) {
                    let s = Expr::Gen(l, sys.theta(l, &a));
                    let ss = normalize(&sys, &s.clone().times(s.star())).unwrap();
                    sum = sum.add(&ss);
                }
                let verdict = equal_mod_ck(&sys, &p, &sum);
                if a.is_empty() {
                    assert_eq!(verdict, Equality::EqualToeplitz);
                } else {
                    assert!(verdict >= Equality::EqualModCk, "failed at {a:?}");
                }
            }
        }
    }

    // Build a valid monomial from raw word/seed data: walk the atom forward
    // along `mu` (truncating where the walk dies so generation is total),
    // then grow `nu` by a backward walk steered by the raw choices.
    fn mk_monomial(
        sys: &RelativeGbds,
        mu: &[usize],
        nu_choices: &[usize],
        seed: usize,
    ) -> Monomial {
        let alg = sys.algebra();
        let mut cur = alg.atom(seed % alg.atom_count());
        let mut mu_kept = Vec::new();
        for &l in mu {
            let next = sys.theta(l, &cur);
            if next.is_empty() {
                break;
            }
            cur = next;
            mu_kept.push(l);
        }
        let atom = cur.atom_indices().next().expect("walk keeps a live atom");
        let mut nu_rev = Vec::new();
        let mut back = atom;
        for &choice in nu_choices {
            let candidates: Vec<usize> = (0..sys.label_count())
                .filter(|&l| sys.source_atom(l, back).is_some())
                .collect();
            if candidates.is_empty() {
                break;
            }
            let l = candidates[choice % candidates.len()];
            back = sys.source_atom(l, back).expect("candidate has a source");
            nu_rev.push(l);
        }
        nu_rev.reverse();
        let m = Monomial {
            mu: mu_kept,
            atom,
            nu: nu_rev,
        };
        assert!(monomial_is_valid(sys, &m));
        m
    }

    fn raw_word(labels: usize) -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(0..labels, 0..=3)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn multiplication_associative(
            mu1 in raw_word(3), nu1 in raw_word(3), s1 in 0usize..2,
            mu2 in raw_word(3), nu2 in raw_word(3), s2 in 0usize..2,
            mu3 in raw_word(3), nu3 in raw_word(3), s3 in 0usize..2,
        ) {
            let sys = fixtures::fx_llw();
            let a = AlgebraElement::monomial(mk_monomial(&sys, &mu1, &nu1, s1));
            let b = AlgebraElement::monomial(mk_monomial(&sys, &mu2, &nu2, s2));
            let c = AlgebraElement::monomial(mk_monomial(&sys, &mu3, &nu3, s3));
            let left = a.mul(&sys, &b).mul(&sys, &c);
            let right = a.mul(&sys, &b.mul(&sys, &c));
            prop_assert_eq!(left, right);
        }

        #[test]
        fn adjoint_is_involutive_and_antimultiplicative(
            mu1 in raw_word(3), nu1 in raw_word(3), s1 in 0usize..2,
            mu2 in raw_word(3), nu2 in raw_word(3), s2 in 0usize..2,
        ) {
            let sys = fixtures::fx_llw();
            let x = AlgebraElement::monomial(mk_monomial(&sys, &mu1, &nu1, s1)).scale(&ratio(3));
            let y = AlgebraElement::monomial(mk_monomial(&sys, &mu2, &nu2, s2));
            prop_assert_eq!(x.adjoint().adjoint(), x.clone());
            let xy_star = x.mul(&sys, &y).adjoint();
            let ystar_xstar = y.adjoint().mul(&sys, &x.adjoint());
            prop_assert_eq!(xy_star, ystar_xstar);
        }

        #[test]
        fn normalize_is_idempotent(
            mu in raw_word(3), nu in raw_word(3), s in 0usize..2,
        ) {
            let sys = fixtures::fx_llw();
            let m = mk_monomial(&sys, &mu, &nu, s);
            // Re-express the normal form as an expression and normalize again.
            let alg = sys.algebra();
            let e = Expr::Product(vec![
                Expr::WordGen(m.mu.clone(), alg.atom(m.atom)),
                Expr::WordGen(m.nu.clone(), alg.atom(m.atom)).star(),
            ]);
            let n1 = normalize(&sys, &e).unwrap();
            prop_assert_eq!(n1.terms.len(), 1);
            let again = normalize(&sys, &e).unwrap();
            prop_assert_eq!(n1, again);
        }
    }

    #[test]
    fn render_examples() {
        let sys = fixtures::fx_loop();
        let v = sys.algebra().top();
        let u = normalize(
            &sys,
            &Expr::Gen(0, v.clone())
                .plus(Expr::Unit)
                .minus(Expr::Proj(v)),
        )
        .unwrap();
        assert_eq!(render_element(&sys, &u), "1 - p(v) + s(a;v)");
    }
}
