//! Closed-form reference values used to check the numerics.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gf2::{symplectic_row, Gf2Basis};
use crate::lattice::CellComplex;
use crate::pauli::{product, PauliString};

/// Lowest `count` levels (with multiplicity) of `-J (sum A_v + sum B_p)`.
///
/// Every stabilizer eigenvalue pattern allowed by the relations among the
/// stabilizers occurs with multiplicity `2^(n - rank)`, at energy
/// `-J (m - 2 * flipped)`.
pub fn stabilizer_spectrum(c: &CellComplex, j: f64, count: usize) -> Result<Vec<f64>> {
    let mut ops: Vec<PauliString> = c.vertex_operators();
    ops.extend(c.plaquette_operators());
    let m = ops.len();
    if m > 24 {
        return Err(Error::Capacity {
            n_qubits: m,
            max: 24,
        });
    }
    let rows: Vec<_> = ops.iter().map(symplectic_row).collect();
    let basis = Gf2Basis::new(&rows);
    let mut constraints = Vec::new();
    for rel in basis.relations() {
        let prod = product(c.n_qubits(), rel.ones().map(|i| &ops[i]))?;
        let mask = rel.ones().fold(0u64, |acc, i| acc | 1 << i);
        constraints.push((mask, u32::from(prod.is_negative())));
    }
    let mut by_weight = vec![0u64; m + 1];
    for s in 0..1u64 << m {
        if constraints
            .iter()
            .all(|&(r, parity)| (s & r).count_ones() % 2 == parity)
        {
            by_weight[s.count_ones() as usize] += 1;
        }
    }
    let mult = 1u64 << (c.n_qubits() - basis.rank());
    let mut out = Vec::with_capacity(count);
    for (w, &n) in by_weight.iter().enumerate() {
        let e = -j * (m as f64 - 2.0 * w as f64);
        for _ in 0..n * mult {
            if out.len() == count {
                return Ok(out);
            }
            out.push(e);
        }
    }
    Ok(out)
}

/// Ground energy of the open chain
/// `-sum_i g_i Z_i - sum_i K_i X_i X_{i+1}` from its free-fermion form:
/// minus the sum of the singular values of the bidiagonal matrix with
/// `g` on the diagonal and `K` above it.
pub fn free_fermion_ground_energy(fields: &[f64], couplings: &[f64]) -> Result<f64> {
    let n = fields.len();
    if n == 0 || couplings.len() + 1 != n {
        return Err(Error::DimensionMismatch {
            expected: n.saturating_sub(1),
            found: couplings.len(),
        });
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, &g) in fields.iter().enumerate() {
        m[(i, i)] = g;
    }
    for (i, &k) in couplings.iter().enumerate() {
        m[(i, i + 1)] = k;
    }
    Ok(-m.singular_values().sum())
}

/// Ground energy of the transverse-field chain dual to a rough path of `m`
/// sites: `-J sum Z_i - h sum X_i X_{i+1} - h X_0`. The end field is
/// absorbed by a field-free ancilla spin coupled to site 0, which leaves
/// the spectrum unchanged up to a twofold doubling.
pub fn rough_chain_ground_energy(m: usize, j: f64, h: f64) -> Result<f64> {
    let mut fields = vec![0.0];
    fields.extend(std::iter::repeat_n(j, m));
    free_fermion_ground_energy(&fields, &vec![h; m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{self, Boundary};

    #[test]
    fn single_spin_and_single_bond() {
        assert!((free_fermion_ground_energy(&[0.7], &[]).unwrap() + 0.7).abs() < 1e-14);
        assert!((free_fermion_ground_energy(&[0.0, 0.0], &[1.3]).unwrap() + 1.3).abs() < 1e-14);
    }

    #[test]
    fn torus_stabilizer_levels() {
        let c = lattice::square_torus(2).unwrap();
        let levels = stabilizer_spectrum(&c, 1.0, 5).unwrap();
        assert_eq!(levels[..4], [-8.0; 4]);
        assert_eq!(levels[4], -4.0);
    }

    #[test]
    fn rough_path_has_unique_ground_state() {
        let c = lattice::path(3, Boundary::Rough).unwrap();
        let levels = stabilizer_spectrum(&c, 1.0, 2).unwrap();
        assert_eq!(levels, vec![-3.0, -1.0]);
    }
}
