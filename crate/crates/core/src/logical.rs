//! Degenerate torus ground states and the loop operators that tell them
//! apart.
//!
//! Labels: `|psi_{mu nu}> = (T1x)^mu (T2x)^nu |psi_k>`. `T1x` crosses `T2z`
//! and `T2x` crosses `T1z`, so `<T1z> = (-1)^nu` and `<T2z> = (-1)^mu`.

use crate::duality::{dual_state, DualBasisState};
use crate::error::{Error, Result};
use crate::lattice::CellComplex;
use crate::pauli::{apply, expectation, PauliString, StateVector};

#[derive(Clone, Debug)]
pub struct LogicalSector {
    pub mu: u8,
    pub nu: u8,
    pub state: StateVector,
}

/// `prod_v (1 + A_v) |0...0>`, normalized.
pub fn kitaev_state(c: &CellComplex) -> Result<StateVector> {
    dual_state(c, &DualBasisState::zeros(c.n_sites()))
}

/// The four sectors in the order `(0,0), (0,1), (1,0), (1,1)`.
pub fn four_ground_states(c: &CellComplex) -> Result<Vec<LogicalSector>> {
    if !c.is_torus() {
        return Err(Error::UnsupportedLattice(format!(
            "{} has no logical loops",
            c.spec()
        )));
    }
    let t = c.logical_operators()?;
    let psi = kitaev_state(c)?;
    let mut out = Vec::with_capacity(4);
    for (mu, nu) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
        let mut s = psi.clone();
        if nu == 1 {
            s = apply(&t.tx[1], &s)?;
        }
        if mu == 1 {
            s = apply(&t.tx[0], &s)?;
        }
        out.push(LogicalSector { mu, nu, state: s });
    }
    Ok(out)
}

/// `m[a][i] = <psi_a| ops[i] |psi_a>`.
pub fn distinguishability_matrix(
    states: &[LogicalSector],
    ops: &[PauliString],
) -> Result<Vec<Vec<f64>>> {
    states
        .iter()
        .map(|s| ops.iter().map(|p| expectation(p, &s.state)).collect())
        .collect()
}

/// `m[a][b] = <psi_a| op |psi_b>`.
pub fn transition_matrix(states: &[LogicalSector], op: &PauliString) -> Result<Vec<Vec<f64>>> {
    let moved: Vec<StateVector> = states
        .iter()
        .map(|s| apply(op, &s.state))
        .collect::<Result<_>>()?;
    states
        .iter()
        .map(|a| moved.iter().map(|b| a.state.dot(b)).collect())
        .collect()
}

/// Largest deviation of `m` from `m[0][0] * I`.
pub fn deviation_from_scalar(m: &[Vec<f64>]) -> f64 {
    let d = m.first().and_then(|r| r.first()).copied().unwrap_or(0.0);
    let mut worst: f64 = 0.0;
    for (a, row) in m.iter().enumerate() {
        for (b, &x) in row.iter().enumerate() {
            let want = if a == b { d } else { 0.0 };
            worst = worst.max((x - want).abs());
        }
    }
    worst
}
