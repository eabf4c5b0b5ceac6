//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_ising::hamiltonian::HamiltonianSpec;
use toric_ising::{CellComplex, PauliString, StateVector};

/// `sign * (M_{n-1} (x) ... (x) M_0)` with `M_k = X^{x_k} Z^{z_k}`, built from
/// explicit 2x2 matrices. Qubit 0 is the least significant factor.
pub fn kron_pauli(p: &PauliString) -> DMatrix<f64> {
    let id = DMatrix::<f64>::identity(2, 2);
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let mut m = DMatrix::<f64>::identity(1, 1);
    for k in 0..p.n_qubits() {
        let mut site = id.clone();
        if p.x_mask().get(k) {
            site = &site * &x;
        }
        if p.z_mask().get(k) {
            site = &site * &z;
        }
        m = site.kronecker(&m);
    }
    m * f64::from(p.sign())
}

pub fn kron_hamiltonian(h: &HamiltonianSpec) -> DMatrix<f64> {
    let d = 1usize << h.n_qubits();
    h.terms().iter().fold(DMatrix::zeros(d, d), |acc, t| {
        acc + kron_pauli(&t.op) * t.coefficient
    })
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

pub fn random_vector(n_qubits: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..1usize << n_qubits)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect()
}

pub fn random_state(n_qubits: usize, seed: u64) -> StateVector {
    StateVector::from_amplitudes(n_qubits, random_vector(n_qubits, seed))
        .unwrap()
        .normalized()
        .unwrap()
}

pub fn to_dvector(s: &StateVector) -> DVector<f64> {
    DVector::from_column_slice(s.amplitudes())
}

/// `prod_v (1 + A_v) |0>` by enumerating every subset of vertex operators
/// and adding `|XOR of their masks>`; normalized.
pub fn loop_condensate(c: &CellComplex) -> Vec<f64> {
    let masks: Vec<u64> = (0..c.n_sites())
        .map(|v| c.vertex_operator(v).unwrap().x_mask().as_u64().unwrap())
        .collect();
    let mut amp = vec![0.0; 1usize << c.n_qubits()];
    for s in 0..1u64 << masks.len() {
        let b = masks
            .iter()
            .enumerate()
            .filter(|(i, _)| s >> i & 1 == 1)
            .fold(0u64, |acc, (_, m)| acc ^ m);
        amp[b as usize] += 1.0;
    }
    let n = amp.iter().map(|a| a * a).sum::<f64>().sqrt();
    amp.iter().map(|a| a / n).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
