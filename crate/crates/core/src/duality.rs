//! The change to the vertex-qubit basis `|r> = prod_i (1 + (-1)^{r_i} A_i)|0...0>`.
//!
//! In that basis `A_i` acts as `Zbar_i` and `Z_e` as `Xbar_i Xbar_j` (or a
//! single `Xbar_i` on a dangling edge), so the toric code in a Z-field
//! restricted to the span of the dual basis is the transverse-field Ising
//! model on the same graph, shifted by `C = J * |plaquettes|`.
//!
//! The span of the dual basis is spanned by computational basis states: the
//! edge configurations `b = XOR_{i in r} mask(A_i)`. Those are exactly the
//! configurations with even overlap with every cycle of the graph, i.e.
//! every `B_p = +1` and, on a torus, every `T_z = +1` as well. On closed
//! complexes `prod_v A_v = 1`, so `r` and its complement give the same
//! state and only even-parity Ising states are physical.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::eigensolver::{self, LanczosOptions, SpectrumResult};
use crate::error::{Error, Result};
use crate::gf2::Gf2Basis;
use crate::hamiltonian::{self, HamiltonianSpec, LinearOperator};
use crate::lattice::CellComplex;
use crate::pauli::{apply, BitMask, PauliString, StateVector};

/// Largest subspace dimension solved by dense diagonalization.
pub const DENSE_SUBSPACE_MAX: usize = 1 << 9;

/// Largest register for which `dual_state` is built densely.
pub const MAX_DUAL_STATE_QUBITS: usize = 20;

const MAX_SUBSPACE_COORDS: usize = 28;

/// Vertex-qubit labels `r_1 .. r_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBasisState {
    pub r: Vec<bool>,
}

impl DualBasisState {
    pub fn zeros(n_sites: usize) -> Self {
        DualBasisState {
            r: vec![false; n_sites],
        }
    }

    /// Bit `i` of `bits` is `r_i`.
    pub fn from_bits(bits: u64, n_sites: usize) -> Self {
        DualBasisState {
            r: (0..n_sites).map(|i| (bits >> i) & 1 == 1).collect(),
        }
    }

    pub fn parity(&self) -> bool {
        self.r.iter().filter(|&&b| b).count() % 2 == 1
    }
}

/// `prod_i (1 + (-1)^{r_i} A_i) |0...0>`, normalized.
pub fn dual_state(c: &CellComplex, r: &DualBasisState) -> Result<StateVector> {
    if r.r.len() != c.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: c.n_sites(),
            found: r.r.len(),
        });
    }
    let n = c.n_qubits();
    if n > MAX_DUAL_STATE_QUBITS {
        return Err(Error::Capacity {
            n_qubits: n,
            max: MAX_DUAL_STATE_QUBITS,
        });
    }
    let mut s = StateVector::basis(n, 0)?;
    for (v, &flip) in r.r.iter().enumerate() {
        let a = c.vertex_operator(v)?;
        let moved = apply(&a, &s)?;
        let sign = if flip { -1.0 } else { 1.0 };
        for (o, m) in s.amplitudes_mut().iter_mut().zip(moved.amplitudes()) {
            *o += sign * m;
        }
    }
    if s.norm() < 1e-9 {
        return Err(Error::UnphysicalSector);
    }
    s.normalized()
}

/// Span of a set of computational basis states labelled by coordinate
/// bits: the state with label `r` is `configs[r]`, and a configuration
/// `b` in the span has label `sum_j parity((b ^ reference) & decode[j]) << j`.
#[derive(Clone, Debug)]
pub struct Subspace {
    n_qubits: usize,
    configs: Vec<u64>,
    decode: Vec<u64>,
    reference: u64,
}

impl Subspace {
    fn check_coords(n: usize) -> Result<()> {
        if n > MAX_SUBSPACE_COORDS {
            return Err(Error::Capacity {
                n_qubits: n,
                max: MAX_SUBSPACE_COORDS,
            });
        }
        Ok(())
    }

    /// The whole `2^n` space.
    pub fn full(n_qubits: usize) -> Result<Self> {
        Self::check_coords(n_qubits)?;
        Ok(Subspace {
            n_qubits,
            configs: (0..1u64 << n_qubits).collect(),
            decode: (0..n_qubits).map(|j| 1u64 << j).collect(),
            reference: 0,
        })
    }

    /// Even popcount: the states fixed by `prod_i Z_i`.
    pub fn even_parity(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 {
            return Self::full(0);
        }
        Self::check_coords(n_qubits - 1)?;
        let free = n_qubits - 1;
        let configs = (0..1u64 << free)
            .map(|r| r | (u64::from(r.count_ones() % 2) << free))
            .collect();
        Ok(Subspace {
            n_qubits,
            configs,
            decode: (0..free).map(|j| 1u64 << j).collect(),
            reference: 0,
        })
    }

    /// Span of the dual basis built on `|0...0>`.
    pub fn dual_sector(c: &CellComplex) -> Result<Self> {
        Self::dual_sector_from(c, 0)
    }

    /// Span of the dual basis built on the configuration `reference`
    /// (for instance a logical loop applied to `|0...0>`).
    pub fn dual_sector_from(c: &CellComplex, reference: u64) -> Result<Self> {
        let n = c.n_qubits();
        if n > 64 {
            return Err(Error::Capacity {
                n_qubits: n,
                max: 64,
            });
        }
        // gauge: the terminal if there is one, otherwise the last site
        let root = if c.is_closed() {
            c.n_sites()
                .checked_sub(1)
                .ok_or_else(|| Error::UnsupportedLattice("complex has no sites".into()))?
        } else {
            c.n_sites()
        };
        let coords: Vec<usize> = (0..c.n_sites()).filter(|&v| v != root).collect();
        Self::check_coords(coords.len())?;
        let mut decode = Vec::with_capacity(coords.len());
        let mut amask = Vec::with_capacity(coords.len());
        for &v in &coords {
            let path = c.shortest_path(root, v).ok_or_else(|| {
                Error::UnsupportedLattice(format!("site {v} is disconnected from the gauge root"))
            })?;
            decode.push(mask_word(&c.edge_set_mask(&path)?));
            amask.push(mask_word(&c.vertex_mask(v)));
        }
        let dim = 1usize << coords.len();
        let mut configs = vec![reference; dim];
        for r in 1..dim {
            let low = r.trailing_zeros() as usize;
            configs[r] = configs[r & (r - 1)] ^ amask[low];
        }
        Ok(Subspace {
            n_qubits: n,
            configs,
            decode,
            reference,
        })
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn configs(&self) -> &[u64] {
        &self.configs
    }

    #[inline]
    pub fn index_of(&self, b: u64) -> usize {
        let b = b ^ self.reference;
        self.decode.iter().enumerate().fold(0usize, |acc, (j, &m)| {
            acc | (((b & m).count_ones() as usize & 1) << j)
        })
    }

    pub fn contains(&self, b: u64) -> bool {
        self.configs[self.index_of(b)] == b
    }

    /// Scatter subspace amplitudes into a full state vector.
    pub fn embed(&self, v: &[f64]) -> Result<StateVector> {
        let mut s = StateVector::zeros(self.n_qubits)?;
        let a = s.amplitudes_mut();
        for (&b, &x) in self.configs.iter().zip(v) {
            a[b as usize] = x;
        }
        Ok(s)
    }

    /// Gather the subspace amplitudes of a full state vector.
    pub fn restrict(&self, s: &StateVector) -> Vec<f64> {
        self.configs
            .iter()
            .map(|&b| s.amplitudes()[b as usize])
            .collect()
    }

    /// `<v| P |v>` for a diagonal (Z-type) Pauli string and a normalized
    /// subspace vector.
    pub fn diagonal_expectation(&self, p: &PauliString, v: &[f64]) -> Result<f64> {
        if !p.is_z_type() {
            return Err(Error::InvalidParameter(
                "subspace expectation needs a Z-type operator".into(),
            ));
        }
        let (_, z) = p.packed()?;
        let sum = crate::linalg::chunked_sum(v.len(), |i| {
            let w = v[i] * v[i];
            if (self.configs[i] & z).count_ones() % 2 == 1 {
                -w
            } else {
                w
            }
        });
        Ok(f64::from(p.sign()) * sum)
    }

    /// `<v| P |v>` for any Pauli string that maps the subspace into itself.
    pub fn expectation(&self, p: &PauliString, v: &[f64]) -> Result<f64> {
        let (x, z) = p.packed()?;
        let sum = crate::linalg::chunked_sum(v.len(), |i| {
            let b = self.configs[i];
            let to = b ^ x;
            let j = self.index_of(to);
            if self.configs[j] != to {
                return 0.0;
            }
            let w = v[i] * v[j];
            if (b & z).count_ones() % 2 == 1 {
                -w
            } else {
                w
            }
        });
        Ok(f64::from(p.sign()) * sum)
    }
}

fn mask_word(m: &BitMask) -> u64 {
    m.as_u64().expect("n_qubits <= 64 checked by caller")
}

/// A Hamiltonian acting on an invariant subspace.
pub struct RestrictedOperator<'a> {
    h: &'a HamiltonianSpec,
    space: &'a Subspace,
}

impl<'a> RestrictedOperator<'a> {
    pub fn new(h: &'a HamiltonianSpec, space: &'a Subspace) -> Result<Self> {
        if h.n_qubits() != space.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: space.n_qubits,
                found: h.n_qubits(),
            });
        }
        Ok(RestrictedOperator { h, space })
    }
}

impl LinearOperator for RestrictedOperator<'_> {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let sp = self.space;
        y.par_chunks_mut(1 << 10).enumerate().for_each(|(ci, out)| {
            let base = ci << 10;
            for (k, o) in out.iter_mut().enumerate() {
                let b = sp.configs[base + k];
                *o = self.h.row_with(b, |from| x[sp.index_of(from)]);
            }
        });
    }
}

/// `k` lowest eigenpairs of `h` on an invariant subspace: dense up to
/// [`DENSE_SUBSPACE_MAX`], Lanczos beyond.
pub fn solve_in(
    h: &HamiltonianSpec,
    space: &Subspace,
    k: usize,
    opts: &LanczosOptions,
) -> Result<SpectrumResult> {
    if space.dim() <= DENSE_SUBSPACE_MAX {
        let m: DMatrix<f64> = h.to_dense_in(space.configs())?;
        Ok(eigensolver::solve_dense_matrix(m, k))
    } else {
        let op = RestrictedOperator::new(h, space)?;
        let o = LanczosOptions { k, ..opts.clone() };
        eigensolver::solve_lanczos(&op, &o)
    }
}

/// `prod_p (1 + B_p) / 2` applied to a full state.
pub fn sector_projector_apply(c: &CellComplex, s: &StateVector) -> Result<StateVector> {
    if s.n_qubits() != c.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: c.n_qubits(),
            found: s.n_qubits(),
        });
    }
    let mut out = s.clone();
    flux_free_projector(c)?(out.amplitudes_mut());
    Ok(out)
}

/// In-place projector onto the all-`B_p = +1` sector.
pub fn flux_free_projector(c: &CellComplex) -> Result<impl Fn(&mut [f64]) + Sync> {
    let masks: Vec<u64> = c
        .plaquette_operators()
        .iter()
        .map(|p| p.packed().map(|(_, z)| z))
        .collect::<Result<_>>()?;
    Ok(move |v: &mut [f64]| {
        v.par_iter_mut().enumerate().for_each(|(b, a)| {
            if masks.iter().any(|&m| (b as u64 & m).count_ones() % 2 == 1) {
                *a = 0.0;
            }
        });
    })
}

/// Dimension of the all-`B_p = +1` sector, counted as the trace of the
/// projector over computational basis states.
pub fn flux_free_dimension(c: &CellComplex) -> Result<usize> {
    let n = c.n_qubits();
    if n > 26 {
        return Err(Error::Capacity {
            n_qubits: n,
            max: 26,
        });
    }
    let masks: Vec<u64> = c
        .plaquette_operators()
        .iter()
        .map(|p| p.packed().map(|(_, z)| z))
        .collect::<Result<_>>()?;
    Ok((0..1u64 << n)
        .into_par_iter()
        .filter(|b| masks.iter().all(|&m| (b & m).count_ones() % 2 == 0))
        .count())
}

/// Image of an edge-qubit operator on the vertex qubits.
///
/// `A_v -> Zbar_v`, `Z_e -> Xbar_i Xbar_j` (a single `Xbar_i` for a dangling
/// edge), extended multiplicatively. X-type parts must be products of vertex
/// operators; on closed complexes the product is written without the last
/// site, which fixes the `prod_v A_v = 1` ambiguity.
pub fn map_operator(c: &CellComplex, op: &PauliString) -> Result<PauliString> {
    if op.n_qubits() != c.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: c.n_qubits(),
            found: op.n_qubits(),
        });
    }
    let m = c.n_sites();
    let mut xbar = BitMask::zeros(m);
    for e in op.z_mask().ones() {
        let (a, b) = c.edges()[e];
        for v in [a, b] {
            if !c.is_terminal(v) {
                xbar.toggle(v);
            }
        }
    }
    let mut zbar = BitMask::zeros(m);
    if !op.x_mask().is_zero() {
        let rows: Vec<BitMask> = (0..m).map(|v| c.vertex_mask(v)).collect();
        let combo = Gf2Basis::new(&rows).solve(op.x_mask()).ok_or_else(|| {
            Error::NotInDualAlgebra(format!(
                "X part of {op} is not a product of vertex operators"
            ))
        })?;
        zbar = combo;
        if c.is_closed() && m > 0 && zbar.get(m - 1) {
            for v in 0..m {
                zbar.toggle(v);
            }
        }
    }
    // s Zbar^r Xbar^m = s (-1)^{|r & m|} Xbar^m Zbar^r
    let swap = zbar.and_count(&xbar) % 2 == 1;
    PauliString::from_masks(m, xbar, zbar, op.is_negative() ^ swap)
}

/// Eigenvalues of one logical sector on a torus.
#[derive(Clone, Debug)]
pub struct LogicalSectorLevels {
    pub mu: u8,
    pub nu: u8,
    pub eigenvalues: Vec<f64>,
    /// How many of `eigenvalues` also occur in the untwisted Ising spectrum.
    pub matched_untwisted: usize,
}

#[derive(Clone, Debug)]
pub struct DualityReport {
    pub lattice: String,
    pub j: f64,
    pub h: f64,
    pub sector_dim: usize,
    pub ising_dim: usize,
    pub ising_even_only: bool,
    pub c: f64,
    pub tc_eigenvalues: Vec<f64>,
    /// Ising eigenvalues minus `C`.
    pub ising_eigenvalues: Vec<f64>,
    pub max_abs_deviation: f64,
    pub logical_sectors: Vec<LogicalSectorLevels>,
}

impl DualityReport {
    /// Recompute the deviation from the two eigenvalue lists.
    pub fn recompute_deviation(&self) -> f64 {
        self.tc_eigenvalues
            .iter()
            .zip(&self.ising_eigenvalues)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# duality report");
        let _ = writeln!(out, "lattice: {}", self.lattice);
        let _ = writeln!(out, "J: {:.17e}", self.j);
        let _ = writeln!(out, "h: {:.17e}", self.h);
        let _ = writeln!(out, "sector_dim: {}", self.sector_dim);
        let _ = writeln!(
            out,
            "ising_subspace: {} (dim {})",
            if self.ising_even_only {
                "even-parity"
            } else {
                "full"
            },
            self.ising_dim
        );
        let _ = writeln!(out, "C: {:.17e}", self.c);
        let _ = writeln!(out, "level tc ising_minus_C abs_dev");
        for (i, (a, b)) in self
            .tc_eigenvalues
            .iter()
            .zip(&self.ising_eigenvalues)
            .enumerate()
        {
            let _ = writeln!(out, "{i} {a:.17e} {b:.17e} {:.3e}", (a - b).abs());
        }
        let _ = writeln!(out, "max_abs_deviation: {:.3e}", self.max_abs_deviation);
        for s in &self.logical_sectors {
            let levels: Vec<String> = s.eigenvalues.iter().map(|e| format!("{e:.12}")).collect();
            let _ = writeln!(
                out,
                "logical_sector mu={} nu={} matched_untwisted={}/{} levels: {}",
                s.mu,
                s.nu,
                s.matched_untwisted,
                s.eigenvalues.len(),
                levels.join(" ")
            );
        }
        out
    }
}

/// Compare the `k` lowest levels of the toric code on the dual-basis span
/// with those of the dual Ising model shifted by `-C`.
pub fn verify_spectral_duality(c: &CellComplex, j: f64, h: f64, k: usize) -> Result<DualityReport> {
    verify_spectral_duality_with(c, j, h, k, 0.0, &LanczosOptions::default())
}

/// As [`verify_spectral_duality`], with `c_offset` added to `C` (used to
/// check that the comparison detects a wrong constant).
pub fn verify_spectral_duality_with(
    c: &CellComplex,
    j: f64,
    h: f64,
    k: usize,
    c_offset: f64,
    opts: &LanczosOptions,
) -> Result<DualityReport> {
    let tc = hamiltonian::build_tc(c, j, h)?;
    let ising = hamiltonian::build_dual_ising(c, j, h)?;
    let sector = Subspace::dual_sector(c)?;
    let ising_space = if c.is_closed() {
        Subspace::even_parity(ising.n_qubits())?
    } else {
        Subspace::full(ising.n_qubits())?
    };
    let k = k.min(sector.dim()).min(ising_space.dim());
    let tc_spec = solve_in(&tc, &sector, k, opts)?;
    let is_spec = solve_in(&ising, &ising_space, k, opts)?;
    let cst = ising.constant() + c_offset;
    let tc_eigenvalues = tc_spec.eigenvalues.clone();
    let ising_eigenvalues: Vec<f64> = is_spec.eigenvalues.iter().map(|e| e - cst).collect();

    let mut logical_sectors = Vec::new();
    if c.is_torus() {
        if let Ok(t) = c.logical_operators() {
            let tx = [mask_word(t.tx[0].x_mask()), mask_word(t.tx[1].x_mask())];
            for (mu, nu) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
                let reference =
                    (if mu == 1 { tx[0] } else { 0 }) ^ (if nu == 1 { tx[1] } else { 0 });
                let space = Subspace::dual_sector_from(c, reference)?;
                let s = solve_in(&tc, &space, k, opts)?;
                let matched = s
                    .eigenvalues
                    .iter()
                    .filter(|e| {
                        ising_eigenvalues
                            .iter()
                            .any(|i| (*e - i).abs() < 1e-9 * (1.0 + i.abs()))
                    })
                    .count();
                logical_sectors.push(LogicalSectorLevels {
                    mu,
                    nu,
                    eigenvalues: s.eigenvalues,
                    matched_untwisted: matched,
                });
            }
        }
    }

    let mut report = DualityReport {
        lattice: c.spec().to_string(),
        j,
        h,
        sector_dim: sector.dim(),
        ising_dim: ising_space.dim(),
        ising_even_only: c.is_closed(),
        c: cst,
        tc_eigenvalues,
        ising_eigenvalues,
        max_abs_deviation: 0.0,
        logical_sectors,
    };
    report.max_abs_deviation = report.recompute_deviation();
    Ok(report)
}
