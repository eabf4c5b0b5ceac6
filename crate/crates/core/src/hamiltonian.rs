//! Term-list Hamiltonians for the toric code in a field and for the dual
//! transverse-field Ising model, with a matrix-free matvec.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::CellComplex;
use crate::pauli::{PauliString, StateVector, MAX_STATE_QUBITS};

/// Largest register the dense materialization accepts (dimension 16384).
pub const MAX_DENSE_QUBITS: usize = 14;

const CHUNK: usize = 1 << 10;

/// Real symmetric operator on `R^dim`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`; `y` is overwritten.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelTag {
    ToricCode,
    Ising,
}

impl ModelTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::ToricCode => "tc",
            ModelTag::Ising => "ising",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub op: PauliString,
}

/// Terms sharing one X mask; the Z parts contribute a diagonal factor.
#[derive(Clone, Debug)]
struct FlipGroup {
    x: u64,
    diag: Vec<(u64, f64)>,
}

#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    n_qubits: usize,
    terms: Vec<Term>,
    groups: Vec<FlipGroup>,
    model: ModelTag,
    j: f64,
    h: f64,
    constant: f64,
}

impl HamiltonianSpec {
    /// Validates and compiles a term list. Zero coefficients are dropped.
    pub fn from_terms(
        n_qubits: usize,
        terms: Vec<Term>,
        model: ModelTag,
        j: f64,
        h: f64,
        constant: f64,
    ) -> Result<Self> {
        let mut kept = Vec::with_capacity(terms.len());
        for t in terms {
            if t.op.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    found: t.op.n_qubits(),
                });
            }
            if !t.coefficient.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite coefficient {}",
                    t.coefficient
                )));
            }
            if !t.op.is_hermitian() {
                return Err(Error::NonHermitian);
            }
            if t.coefficient != 0.0 {
                kept.push(t);
            }
        }
        let mut groups: Vec<FlipGroup> = Vec::new();
        if n_qubits <= 64 {
            for t in &kept {
                let (x, z) = t.op.packed()?;
                let c = t.coefficient * f64::from(t.op.sign());
                match groups.iter_mut().find(|g| g.x == x) {
                    Some(g) => g.diag.push((z, c)),
                    None => groups.push(FlipGroup {
                        x,
                        diag: vec![(z, c)],
                    }),
                }
            }
        }
        Ok(HamiltonianSpec {
            n_qubits,
            terms: kept,
            groups,
            model,
            j,
            h,
            constant,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn model(&self) -> ModelTag {
        self.model
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// The constant `C` separating the Ising side from the restricted
    /// toric code: `H_TC = H_Ising - C` on the flux-free sector. Zero for
    /// toric-code specs.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// `sum_k |c_k|`, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// One `<coeff> <pauli>` line per term after a `#` header.
    pub fn term_dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# model={} n_qubits={} J={:.17e} h={:.17e} C={:.17e}",
            self.model.as_str(),
            self.n_qubits,
            self.j,
            self.h,
            self.constant
        );
        for t in &self.terms {
            let _ = writeln!(out, "{:.17e} {}", t.coefficient, t.op);
        }
        out
    }

    fn check_state(&self, len: usize) -> Result<()> {
        if self.n_qubits > MAX_STATE_QUBITS {
            return Err(Error::Capacity {
                n_qubits: self.n_qubits,
                max: MAX_STATE_QUBITS,
            });
        }
        let dim = 1usize << self.n_qubits;
        if len != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: len,
            });
        }
        Ok(())
    }

    /// Materialize the `2^n x 2^n` matrix entry by entry from the terms.
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::Capacity {
                n_qubits: self.n_qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            let (x, z) = t.op.packed()?;
            let c = t.coefficient * f64::from(t.op.sign());
            for b in 0..dim {
                let sign = if (b as u64 & z).count_ones() % 2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                m[(b ^ x as usize, b)] += c * sign;
            }
        }
        Ok(m)
    }

    /// Restrict to the span of the listed computational basis states.
    /// Entries leaking outside the span are dropped, so the caller must
    /// pass an invariant subspace.
    pub fn to_dense_in(&self, basis: &[u64]) -> Result<DMatrix<f64>> {
        if self.n_qubits > 64 {
            return Err(Error::Capacity {
                n_qubits: self.n_qubits,
                max: 64,
            });
        }
        let index: std::collections::HashMap<u64, usize> =
            basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let dim = basis.len();
        let mut m = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            let (x, z) = t.op.packed()?;
            let c = t.coefficient * f64::from(t.op.sign());
            for (col, &b) in basis.iter().enumerate() {
                if let Some(&row) = index.get(&(b ^ x)) {
                    let sign = if (b & z).count_ones() % 2 == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    m[(row, col)] += c * sign;
                }
            }
        }
        Ok(m)
    }

    /// Row `b` of `H x`: sum over flip groups of `x(b ^ g.x)` weighted by
    /// the diagonal factor evaluated at the source configuration. `fetch`
    /// looks up the amplitude of a configuration.
    #[inline]
    pub(crate) fn row_with(&self, b: u64, fetch: impl Fn(u64) -> f64) -> f64 {
        let mut acc = 0.0;
        for g in &self.groups {
            let from = b ^ g.x;
            let mut f = 0.0;
            for &(z, c) in &g.diag {
                if (from & z).count_ones() % 2 == 1 {
                    f -= c;
                } else {
                    f += c;
                }
            }
            acc += f * fetch(from);
        }
        acc
    }
}

impl LinearOperator for HamiltonianSpec {
    fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, out)| {
            let base = ci * CHUNK;
            for (k, o) in out.iter_mut().enumerate() {
                *o = self.row_with((base + k) as u64, |f| x[f as usize]);
            }
        });
    }
}

/// `H |s>` without materializing `H`.
pub fn matvec(h: &HamiltonianSpec, s: &StateVector) -> Result<StateVector> {
    h.check_state(s.len())?;
    let mut out = vec![0.0; s.len()];
    h.apply_into(s.amplitudes(), &mut out);
    StateVector::from_amplitudes(s.n_qubits(), out)
}

fn check_couplings(j: f64, h: f64) -> Result<()> {
    if !(j.is_finite() && h.is_finite()) {
        return Err(Error::InvalidParameter("couplings must be finite".into()));
    }
    if j < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "stabilizer coupling J must be non-negative, got {j}"
        )));
    }
    if h < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "field h must be non-negative, got {h}"
        )));
    }
    Ok(())
}

/// `H = -J sum_v A_v - J sum_p B_p - h sum_e Z_e` on the edge qubits.
pub fn build_tc(c: &CellComplex, j: f64, h: f64) -> Result<HamiltonianSpec> {
    check_couplings(j, h)?;
    let n = c.n_qubits();
    let mut terms = Vec::new();
    for a in c.vertex_operators() {
        terms.push(Term {
            coefficient: -j,
            op: a,
        });
    }
    for b in c.plaquette_operators() {
        terms.push(Term {
            coefficient: -j,
            op: b,
        });
    }
    for e in 0..n {
        terms.push(Term {
            coefficient: -h,
            op: PauliString::single_z(n, e)?,
        });
    }
    HamiltonianSpec::from_terms(n, terms, ModelTag::ToricCode, j, h, 0.0)
}

/// Dual model on the site qubits:
/// `-J sum_i Z_i - h sum_<ij> X_i X_j - h sum_{dangling} X_i`,
/// with `C = J * |plaquettes|` kept as metadata.
pub fn build_dual_ising(c: &CellComplex, j: f64, h: f64) -> Result<HamiltonianSpec> {
    check_couplings(j, h)?;
    let g = c.dual_ising_graph();
    let n = g.n_spins;
    let mut terms = Vec::new();
    for i in 0..n {
        terms.push(Term {
            coefficient: -j,
            op: PauliString::single_z(n, i)?,
        });
    }
    for &(a, b, _) in &g.bonds {
        terms.push(Term {
            coefficient: -h,
            op: PauliString::x_type(n, &[a, b])?,
        });
    }
    for &(a, _) in &g.fields {
        terms.push(Term {
            coefficient: -h,
            op: PauliString::single_x(n, a)?,
        });
    }
    let constant = j * c.n_plaquettes() as f64;
    HamiltonianSpec::from_terms(n, terms, ModelTag::Ising, j, h, constant)
}
