//! Invariants of finite relative generalized Boolean dynamical systems:
//! K-groups with explicit K₁-generating unitaries, the gauge-invariant ideal
//! lattice with Morita-equivalent subsystems, and Condition (K) with its
//! structural consequences.  All arithmetic is exact and every major
//! computation has an independent brute-force oracle in [`oracle`].

pub mod boolean;
pub mod dynamics;
pub mod extension;
pub mod fixtures;
pub mod ideal;
pub mod k1gen;
pub mod ktheory;
pub mod matrix;
pub mod oracle;
pub mod star;
pub mod suites;

pub use boolean::{AlgebraRef, Element, FiniteBooleanAlgebra};
pub use dynamics::{AdmissiblePair, Digraph, RelativeGbds, SystemDescription};
pub use ktheory::{AbelianGroupPresentation, KTheoryResult};
pub use matrix::{IntegerMatrix, SmithDecomposition};
