//! Independent brute-force oracles.
//!
//! Everything here recomputes an answer by a route that shares no code with
//! the implementation it checks: Smith invariant factors by plain recursive
//! gcd reduction without transforms, Condition (K) by bounded enumeration of
//! first-return words, graph K-theory straight from the edge list.  The
//! `selftest` command and the acceptance suite run these at scale.

use crate::dynamics::{ConditionK, Digraph, RelativeGbds, Word};
use crate::ktheory::AbelianGroupPresentation;
use crate::matrix::IntegerMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashSet;

/// Invariant factors by textbook gcd reduction: bring the smallest entry to
/// the corner, clear its row and column by division, force divisibility into
/// the rest, recurse on the minor.  No transform bookkeeping.
pub fn gcd_reduction_invariant_factors(m: &IntegerMatrix) -> Vec<BigInt> {
    let mut grid: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)].clone()).collect())
        .collect();
    let mut factors = Vec::new();
    loop {
        if grid.is_empty() || grid[0].is_empty() {
            break;
        }
        if grid.iter().flatten().all(Zero::is_zero) {
            break;
        }
        reduce_corner(&mut grid);
        let d = grid[0][0].abs();
        factors.push(d);
        grid = grid[1..].iter().map(|row| row[1..].to_vec()).collect();
    }
    factors
}

fn reduce_corner(grid: &mut [Vec<BigInt>]) {
    let rows = grid.len();
    let cols = grid[0].len();
    loop {
        // Smallest nonzero absolute value to (0,0).
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in grid.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if !e.is_zero() && best.is_none_or(|(bi, bj)| e.abs() < grid[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let (bi, bj) = best.expect("caller checked for a nonzero entry");
        grid.swap(0, bi);
        for row in grid.iter_mut() {
            row.swap(0, bj);
        }

        let mut repeat = false;
        for i in 1..rows {
            if grid[i][0].is_zero() {
                continue;
            }
            let q = grid[i][0].div_floor(&grid[0][0]);
            for j in 0..cols {
                let t = &q * &grid[0][j];
                grid[i][j] -= t;
            }
            if !grid[i][0].is_zero() {
                repeat = true;
            }
        }
        for j in 1..cols {
            if grid[0][j].is_zero() {
                continue;
            }
            let q = grid[0][j].div_floor(&grid[0][0]);
            for i in 0..rows {
                let t = &q * &grid[i][0];
                grid[i][j] -= t;
            }
            if !grid[0][j].is_zero() {
                repeat = true;
            }
        }
        if repeat {
            continue;
        }
        // Corner divides everything left, or we fold a bad row in and retry.
        let pivot = grid[0][0].clone();
        let mut bad = None;
        'scan: for i in 1..rows {
            for j in 1..cols {
                if !(&grid[i][j] % &pivot).is_zero() {
                    bad = Some(i);
                    break 'scan;
                }
            }
        }
        match bad {
            Some(i) => {
                for j in 0..cols {
                    let t = grid[i][j].clone();
                    grid[0][j] += t;
                }
            }
            None => return,
        }
    }
}

/// First-return words at `atom`, enumerated by depth-first search over paths
/// that avoid `atom` in between, pruned to vertices that can still reach it
/// and capped at two distinct words.  Two distinct first-return paths always
/// exist at length ≤ 2·(atom count) when any two exist at all, so the budget
/// below is conclusive.
pub fn enumerate_first_return_words(sys: &RelativeGbds, atom: usize, cap: usize) -> Vec<Word> {
    let n = sys.algebra().atom_count();
    let edges = sys.atom_edges();
    let budget = 2 * n + 2;
    // Vertices that can reach `atom` (with `atom` itself terminal).
    let mut coreach = vec![false; n];
    let mut changed = true;
    while changed {
        changed = false;
        for &(s, _, t) in &edges {
            if s != atom && !coreach[s] && (t == atom || coreach[t]) {
                coreach[s] = true;
                changed = true;
            }
        }
    }
    let mut words: HashSet<Word> = HashSet::new();
    let mut steps = 0usize;
    let mut stack: Vec<(usize, Word)> = vec![(atom, Vec::new())];
    while let Some((v, prefix)) = stack.pop() {
        if words.len() >= cap {
            break;
        }
        steps += 1;
        assert!(steps < 1_000_000, "oracle search exceeded its step bound");
        for &(s, l, t) in &edges {
            if s != v {
                continue;
            }
            let mut word = prefix.clone();
            word.push(l);
            if t == atom {
                words.insert(word);
                if words.len() >= cap {
                    break;
                }
            } else if coreach[t] && word.len() < budget {
                stack.push((t, word));
            }
        }
    }
    let mut out: Vec<Word> = words.into_iter().collect();
    out.sort();
    out
}

/// Brute-force Condition (K): scan atoms in order; the first atom whose
/// first-return language is a singleton is the witness.
pub fn condition_k_oracle(sys: &RelativeGbds) -> ConditionK {
    for atom in 0..sys.algebra().atom_count() {
        let words = enumerate_first_return_words(sys, atom, 2);
        if words.len() == 1 {
            return ConditionK {
                holds: false,
                witness: Some((atom, words.into_iter().next().expect("length checked"))),
            };
        }
    }
    ConditionK {
        holds: true,
        witness: None,
    }
}

#[derive(Debug, Clone)]
pub struct ClassicalKGroups {
    pub k0: AbelianGroupPresentation,
    pub k1: AbelianGroupPresentation,
}

/// `(I − Aᵗ)` with columns restricted to emitting vertices, straight from
/// the edge list.
pub fn classical_graph_matrix(g: &Digraph) -> IntegerMatrix {
    let n = g.vertices.len();
    let emitting: Vec<usize> = (0..n)
        .filter(|&v| g.edges.iter().any(|&(_, s, _)| s == v))
        .collect();
    IntegerMatrix::from_fn(n, emitting.len(), |w, k| {
        let v = emitting[k];
        let count = g
            .edges
            .iter()
            .filter(|&&(_, s, r)| s == v && r == w)
            .count();
        let diag = if w == v {
            BigInt::one()
        } else {
            BigInt::zero()
        };
        diag - BigInt::from(count)
    })
}

/// Classical graph-algebra K-groups: `K₀ = coker`, `K₁ = ker` of the matrix
/// above, with ranks and factors from the gcd-reduction oracle.
pub fn classical_graph_k_groups(g: &Digraph) -> ClassicalKGroups {
    let m = classical_graph_matrix(g);
    let factors = gcd_reduction_invariant_factors(&m);
    let rank = factors.len();
    let torsion: Vec<BigInt> = factors.into_iter().filter(|d| *d > BigInt::one()).collect();
    ClassicalKGroups {
        k0: AbelianGroupPresentation {
            free_rank: m.rows() - rank,
            torsion,
        },
        k1: AbelianGroupPresentation::free(m.cols() - rank),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::import_graph;
    use crate::fixtures;

    #[test]
    fn gcd_reduction_known_values() {
        let m = IntegerMatrix::from_rows(vec![vec![2, 4], vec![6, 8]]);
        assert_eq!(
            gcd_reduction_invariant_factors(&m),
            vec![BigInt::from(2), BigInt::from(4)]
        );
        let z = IntegerMatrix::zero(3, 2);
        assert!(gcd_reduction_invariant_factors(&z).is_empty());
        let id = IntegerMatrix::identity(3);
        assert_eq!(
            gcd_reduction_invariant_factors(&id),
            vec![BigInt::one(), BigInt::one(), BigInt::one()]
        );
    }

    #[test]
    fn first_return_words_on_fixtures() {
        let loop1 = fixtures::fx_loop();
        assert_eq!(enumerate_first_return_words(&loop1, 0, 8), vec![vec![0]]);

        let on2 = fixtures::fx_on(2);
        assert_eq!(enumerate_first_return_words(&on2, 0, 2).len(), 2);

        let arrow = fixtures::fx_arrow();
        assert!(enumerate_first_return_words(&arrow, 0, 2).is_empty());

        // Loop reached through a detour: first-returns at v are "a" and "ef".
        let sys = import_graph(
            &Digraph::from_names(
                vec!["v".into(), "x".into()],
                vec![
                    ("a".into(), "v".into(), "v".into()),
                    ("e".into(), "v".into(), "x".into()),
                    ("f".into(), "x".into(), "v".into()),
                ],
            )
            .unwrap(),
        );
        assert_eq!(enumerate_first_return_words(&sys, 0, 4).len(), 2);
        assert!(condition_k_oracle(&sys).holds);
    }

    #[test]
    fn classical_matrix_arrow() {
        let m = classical_graph_matrix(&fixtures::graph_arrow());
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert_eq!(m[(0, 0)], BigInt::one());
        assert_eq!(m[(1, 0)], BigInt::from(-1));
    }
}
