//! Dense integer matrices over arbitrary-precision integers, with Smith
//! normal form and the kernel/cokernel presentations derived from it.
//!
//! The pivot rule is fixed (smallest nonzero absolute value, ties broken by
//! row-major position) so decompositions are deterministic; downstream
//! coordinate reports depend on the basis this rule selects.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Dense row-major integer matrix.  Empty (zero-row or zero-column) shapes
/// are legal and show up naturally when an ideal is trivial.
#[derive(Clone, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntegerMatrix::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        IntegerMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().map(BigInt::from).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = IntegerMatrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntegerMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    pub fn transpose(&self) -> IntegerMatrix {
        IntegerMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Determinant by Bareiss fraction-free elimination; exact.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        for j in 0..n {
                            a.entries.swap(i * n + j, k * n + j);
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = &num / &prev;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `D = U · M · V` with `U`, `V` unimodular and `D` diagonal with a
/// divisibility chain `d₁ | d₂ | …` of nonnegative entries.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: IntegerMatrix,
    pub d: IntegerMatrix,
    pub v: IntegerMatrix,
    pub rank: usize,
    /// The nonzero diagonal entries `d₁ | d₂ | … | d_r`.
    pub invariant_factors: Vec<BigInt>,
}

struct SnfState {
    u: IntegerMatrix,
    d: IntegerMatrix,
    v: IntegerMatrix,
}

impl SnfState {
    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.d.cols {
            let c = self.d.cols;
            self.d.entries.swap(a * c + j, b * c + j);
        }
        for j in 0..self.u.cols {
            let c = self.u.cols;
            self.u.entries.swap(a * c + j, b * c + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.d.rows {
            let c = self.d.cols;
            self.d.entries.swap(i * c + a, i * c + b);
        }
        for i in 0..self.v.rows {
            let c = self.v.cols;
            self.v.entries.swap(i * c + a, i * c + b);
        }
    }

    /// row[a] -= q * row[b]
    fn row_sub(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.d.cols {
            let t = q * &self.d[(b, j)];
            self.d[(a, j)] -= t;
        }
        for j in 0..self.u.cols {
            let t = q * &self.u[(b, j)];
            self.u[(a, j)] -= t;
        }
    }

    /// col[a] -= q * col[b]
    fn col_sub(&mut self, a: usize, b: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.d.rows {
            let t = q * &self.d[(i, b)];
            self.d[(i, a)] -= t;
        }
        for i in 0..self.v.rows {
            let t = q * &self.v[(i, b)];
            self.v[(i, a)] -= t;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.d.cols {
            let t = -self.d[(a, j)].clone();
            self.d[(a, j)] = t;
        }
        for j in 0..self.u.cols {
            let t = -self.u[(a, j)].clone();
            self.u[(a, j)] = t;
        }
    }
}

/// Pivot rule: smallest nonzero absolute value in the trailing block, ties
/// broken by row-major position.
fn find_pivot(d: &IntegerMatrix, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..d.rows {
        for j in from..d.cols {
            if d[(i, j)].is_zero() {
                continue;
            }
            match best {
                None => best = Some((i, j)),
                Some(b) => {
                    if d[(i, j)].abs() < d[b].abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

/// Smith normal form with unimodular transforms.
pub fn smith_normal_form(m: &IntegerMatrix) -> SmithDecomposition {
    let mut s = SnfState {
        u: IntegerMatrix::identity(m.rows),
        d: m.clone(),
        v: IntegerMatrix::identity(m.cols),
    };
    let limit = m.rows.min(m.cols);
    let mut t = 0;
    'blocks: while t < limit {
        // Repivot on the smallest entry every round: leftover remainders
        // become the next pivot, which both guarantees termination and
        // keeps quotients (and so entry growth) small.
        loop {
            let Some((pi, pj)) = find_pivot(&s.d, t) else {
                break 'blocks;
            };
            s.swap_rows(t, pi);
            s.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..s.d.rows {
                if s.d[(i, t)].is_zero() {
                    continue;
                }
                let q = s.d[(i, t)].div_floor(&s.d[(t, t)]);
                s.row_sub(i, t, &q);
                if !s.d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..s.d.cols {
                if s.d[(t, j)].is_zero() {
                    continue;
                }
                let q = s.d[(t, j)].div_floor(&s.d[(t, t)]);
                s.col_sub(j, t, &q);
                if !s.d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if s.d[(t, t)].is_negative() {
            s.negate_row(t);
        }
        t += 1;
    }
    let rank = t;

    // Enforce the divisibility chain d_i | d_{i+1}.
    loop {
        let mut fixed = true;
        for i in 0..rank.saturating_sub(1) {
            let a = s.d[(i, i)].clone();
            let b = s.d[(i + 1, i + 1)].clone();
            if (&b % &a).is_zero() {
                continue;
            }
            fixed = false;
            // Fold the offending entry into column i and rediagonalize the
            // 2x2 block with gcd/lcm.
            let minus_one = -BigInt::one();
            s.col_sub(i, i + 1, &minus_one); // col i += col i+1
            loop {
                // Block is [[a,0],[b,b]]-shaped at (i,i); run Euclid on it.
                if s.d[(i + 1, i)].is_zero() {
                    break;
                }
                let q = s.d[(i + 1, i)].div_floor(&s.d[(i, i)]);
                s.row_sub(i + 1, i, &q);
                if !s.d[(i + 1, i)].is_zero() {
                    s.swap_rows(i, i + 1);
                }
            }
            // Clear the fill-in in row i.
            if !s.d[(i, i + 1)].is_zero() {
                let q = s.d[(i, i + 1)].div_floor(&s.d[(i, i)]);
                s.col_sub(i + 1, i, &q);
                debug_assert!(s.d[(i, i + 1)].is_zero());
            }
            if s.d[(i, i)].is_negative() {
                s.negate_row(i);
            }
            if s.d[(i + 1, i + 1)].is_negative() {
                s.negate_row(i + 1);
            }
        }
        if fixed {
            break;
        }
    }

    let invariant_factors: Vec<BigInt> = (0..rank).map(|i| s.d[(i, i)].clone()).collect();
    SmithDecomposition {
        u: s.u,
        d: s.d,
        v: s.v,
        rank,
        invariant_factors,
    }
}

impl SmithDecomposition {
    /// Basis of `ker M`: the columns of `V` beyond the rank.
    pub fn kernel_basis(&self) -> Vec<Vec<BigInt>> {
        (self.rank..self.v.cols())
            .map(|j| self.v.column(j))
            .collect()
    }

    /// Torsion part of `coker M`: invariant factors greater than one.
    pub fn torsion_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| **d > BigInt::one())
            .cloned()
            .collect()
    }
}
