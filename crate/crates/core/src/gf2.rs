//! Gaussian elimination over GF(2) on bitmask rows.

use crate::pauli::{BitMask, PauliString};

/// Row-reduced basis of a set of GF(2) vectors, remembering which input rows
/// combine into each basis vector.
#[derive(Clone, Debug)]
pub struct Gf2Basis {
    /// (pivot bit, reduced row, combination of input rows)
    rows: Vec<(usize, BitMask, BitMask)>,
    /// Input-row combinations that sum to zero.
    relations: Vec<BitMask>,
    n_inputs: usize,
}

impl Gf2Basis {
    pub fn new(vectors: &[BitMask]) -> Self {
        let n_inputs = vectors.len();
        let mut rows: Vec<(usize, BitMask, BitMask)> = Vec::new();
        let mut relations = Vec::new();
        for (i, v) in vectors.iter().enumerate() {
            let mut r = v.clone();
            let mut combo = BitMask::zeros(n_inputs);
            combo.set(i, true);
            for (p, row, c) in &rows {
                if r.get(*p) {
                    r.xor_assign(row);
                    combo.xor_assign(c);
                }
            }
            let pivot = r.ones().next();
            if let Some(p) = pivot {
                // keep the basis fully reduced on pivot columns
                for (_, row, c) in rows.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&r);
                        c.xor_assign(&combo);
                    }
                }
                rows.push((p, r, combo));
            } else {
                relations.push(combo);
            }
        }
        Gf2Basis {
            rows,
            relations,
            n_inputs,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Input-row combination summing to `target`, if it is in the span.
    pub fn solve(&self, target: &BitMask) -> Option<BitMask> {
        let mut r = target.clone();
        let mut combo = BitMask::zeros(self.n_inputs);
        for (p, row, c) in &self.rows {
            if r.get(*p) {
                r.xor_assign(row);
                combo.xor_assign(c);
            }
        }
        r.is_zero().then_some(combo)
    }

    /// A basis of the dependencies among the input rows.
    pub fn relations(&self) -> &[BitMask] {
        &self.relations
    }

    pub fn contains(&self, target: &BitMask) -> bool {
        self.solve(target).is_some()
    }
}

pub fn rank(vectors: &[BitMask]) -> usize {
    Gf2Basis::new(vectors).rank()
}

/// Symplectic representation `(x | z)` of a Pauli string as one row.
pub fn symplectic_row(p: &PauliString) -> BitMask {
    let n = p.n_qubits();
    let mut row = BitMask::zeros(2 * n);
    for i in p.x_mask().ones() {
        row.set(i, true);
    }
    for i in p.z_mask().ones() {
        row.set(n + i, true);
    }
    row
}

/// GF(2) rank of a set of Pauli strings, signs ignored.
pub fn pauli_rank(ops: &[PauliString]) -> usize {
    let rows: Vec<BitMask> = ops.iter().map(symplectic_row).collect();
    rank(&rows)
}
