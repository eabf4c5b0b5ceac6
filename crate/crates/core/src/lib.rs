//! Toric code in a uniform Z-field on arbitrary cell complexes, its dual
//! transverse-field Ising model on the same graph, and the string order
//! parameter that the Ising magnetization maps to.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod duality;
pub mod eigensolver;
pub mod error;
pub mod gf2;
pub mod hamiltonian;
pub mod lattice;
pub mod linalg;
pub mod logical;
pub mod observables;
pub mod oracle;
pub mod pauli;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{Boundary, CellComplex, IsingGraph, LatticeKind, LatticeSpec, LogicalOperators};
pub use pauli::{apply, commutes, expectation, multiply, PauliString, StateVector};
