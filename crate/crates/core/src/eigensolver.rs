//! Low-lying spectra: full dense diagonalization for small problems and a
//! Lanczos solver with full reorthogonalization and deflation for large
//! ones.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianSpec, LinearOperator};
use crate::linalg;
use crate::pauli::StateVector;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Relative degeneracy threshold, multiplied by `|lambda_min|`.
pub const DEFAULT_DEGENERACY_RELATIVE: f64 = 1e-8;

/// One Lanczos convergence check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceLine {
    pub iter: usize,
    pub ritz_min: f64,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub degeneracy_clusters: Vec<Range<usize>>,
    /// `||H v - lambda v||` per pair.
    pub residuals: Vec<f64>,
    /// Seed of the Lanczos start vectors; `None` for dense solves.
    pub seed: Option<u64>,
    pub matvecs: usize,
    pub trace: Vec<TraceLine>,
}

impl SpectrumResult {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_vector(&self) -> &[f64] {
        &self.eigenvectors[0]
    }

    /// Eigenvector `i` as an n-qubit state (full-space solves only).
    pub fn state(&self, i: usize, n_qubits: usize) -> Result<StateVector> {
        StateVector::from_amplitudes(n_qubits, self.eigenvectors[i].clone())
    }

    pub fn ground_degeneracy(&self) -> usize {
        self.degeneracy_clusters.first().map_or(0, |r| r.len())
    }

    /// Gap between the ground cluster and the next level.
    pub fn gap(&self) -> Result<f64> {
        match self.degeneracy_clusters.get(1) {
            Some(next) => Ok(self.eigenvalues[next.start] - self.eigenvalues[0]),
            None => Err(Error::InsufficientLevels {
                needed: self.degeneracy_clusters.first().map_or(1, |r| r.len()) + 1,
                got: self.eigenvalues.len(),
            }),
        }
    }

    pub fn recluster(&mut self, threshold: f64) {
        self.degeneracy_clusters = cluster_degeneracies(&self.eigenvalues, threshold);
    }
}

/// Greedy gap clustering of an ascending list: a level joins the current
/// cluster when it lies within `threshold` of the previous level (closed
/// interval, so a gap of exactly `threshold` still joins).
pub fn cluster_degeneracies(eigenvalues: &[f64], threshold: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        if i == eigenvalues.len() || eigenvalues[i] - eigenvalues[i - 1] > threshold {
            out.push(start..i);
            start = i;
        }
    }
    if eigenvalues.is_empty() {
        out.clear();
    }
    out
}

pub fn default_degeneracy_threshold(lambda_min: f64) -> f64 {
    (DEFAULT_DEGENERACY_RELATIVE * lambda_min.abs()).max(1e-12)
}

fn residual(op: &dyn LinearOperator, v: &[f64], lambda: f64) -> f64 {
    let mut hv = vec![0.0; v.len()];
    op.apply_into(v, &mut hv);
    linalg::axpy(-lambda, v, &mut hv);
    linalg::norm(&hv)
}

/// Full diagonalization of a materialized symmetric matrix; `k` lowest pairs.
pub fn solve_dense_matrix(m: DMatrix<f64>, k: usize) -> SpectrumResult {
    let dim = m.nrows();
    let (values, vectors) = symmetric_eigen(&m);
    let k = k.min(dim);
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenvectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (&lambda, v) in values.iter().zip(vectors).take(k) {
        let dv = DVector::from_column_slice(&v);
        let r = (&m * &dv - lambda * &dv).norm();
        eigenvalues.push(lambda);
        eigenvectors.push(v);
        residuals.push(r);
    }
    let threshold = eigenvalues
        .first()
        .map_or(1e-12, |&l| default_degeneracy_threshold(l));
    SpectrumResult {
        degeneracy_clusters: cluster_degeneracies(&eigenvalues, threshold),
        eigenvalues,
        eigenvectors,
        residuals,
        seed: None,
        matvecs: 0,
        trace: Vec::new(),
    }
}

/// All eigenvalues of a symmetric matrix, ascending, without eigenvectors.
pub fn dense_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)])
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("symmetric eigendecomposition")
}

/// Exact diagonalization of the full `2^n` matrix.
pub fn solve_dense(h: &HamiltonianSpec, k: usize) -> Result<SpectrumResult> {
    Ok(solve_dense_matrix(h.to_dense()?, k))
}

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    pub k: usize,
    pub tol: f64,
    /// Budget of operator applications over the whole solve.
    pub max_matvecs: usize,
    pub seed: u64,
    /// Krylov vectors kept before a restart.
    pub krylov_dim: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            k: 1,
            tol: DEFAULT_TOL,
            max_matvecs: 20_000,
            seed: DEFAULT_SEED,
            krylov_dim: 120,
        }
    }
}

impl LanczosOptions {
    pub fn with_k(k: usize) -> Self {
        LanczosOptions {
            k,
            ..Default::default()
        }
    }
}

/// One classical Gram-Schmidt sweep; callers repeat it.
fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    for u in against {
        let c = linalg::dot(u, v);
        linalg::axpy(-c, u, v);
    }
}

/// In-place idempotent map restricting iterates to an invariant subspace.
pub type Projection<'a> = &'a (dyn Fn(&mut [f64]) + Sync);

/// Lanczos for the `k` lowest eigenpairs of a symmetric operator.
pub fn solve_lanczos<O: LinearOperator + ?Sized>(
    op: &O,
    opts: &LanczosOptions,
) -> Result<SpectrumResult> {
    lanczos(&AsDyn(op), opts, None)
}

/// As [`solve_lanczos`], keeping every iterate inside the range of the
/// idempotent `project`, which must commute with the operator.
pub fn solve_lanczos_projected<O: LinearOperator + ?Sized>(
    op: &O,
    opts: &LanczosOptions,
    project: Projection<'_>,
) -> Result<SpectrumResult> {
    lanczos(&AsDyn(op), opts, Some(project))
}

struct AsDyn<'a, O: ?Sized>(&'a O);

impl<O: LinearOperator + ?Sized> LinearOperator for AsDyn<'_, O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply_into(x, y)
    }
}

fn lanczos(
    op: &dyn LinearOperator,
    opts: &LanczosOptions,
    project: Option<Projection<'_>>,
) -> Result<SpectrumResult> {
    if opts.k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter("tol must be > 0".into()));
    }
    let dim = op.dim();
    let k = opts.k.min(dim);
    let m_max = opts.krylov_dim.clamp(2, dim.max(2));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut residuals: Vec<f64> = Vec::new();
    let mut trace = Vec::new();
    let mut matvecs = 0usize;
    let mut best = f64::INFINITY;

    let prep = |v: &mut Vec<f64>, locked: &[Vec<f64>]| -> f64 {
        if let Some(p) = project {
            p(v);
        }
        orthogonalize(v, locked);
        orthogonalize(v, locked);
        let n = linalg::norm(v);
        if n > 0.0 {
            linalg::scale(1.0 / n, v);
        }
        n
    };

    while locked.len() < k {
        let mut start: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
        if prep(&mut start, &locked) < 1e-12 {
            // the complement of the locked vectors is exhausted
            break;
        }
        loop {
            let mut basis: Vec<Vec<f64>> = vec![start.clone()];
            let mut alpha: Vec<f64> = Vec::new();
            let mut beta: Vec<f64> = Vec::new();
            let mut ritz: Option<(f64, Vec<f64>)> = None;
            for j in 0..m_max {
                let mut w = vec![0.0; dim];
                op.apply_into(&basis[j], &mut w);
                matvecs += 1;
                if let Some(p) = project {
                    p(&mut w);
                }
                let a = linalg::dot(&basis[j], &w);
                alpha.push(a);
                let before = linalg::norm(&w);
                for _ in 0..2 {
                    orthogonalize(&mut w, &locked);
                    orthogonalize(&mut w, &basis);
                }
                let b = linalg::norm(&w);
                // the Krylov space is invariant to working precision; what is
                // left of `w` is rounding noise, mostly along locked vectors
                let exhausted = b <= 1e-12 * before;
                let last = j + 1 == m_max || basis.len() == dim || matvecs + 1 >= opts.max_matvecs;
                if exhausted || last || j % 4 == 3 {
                    let (theta, s) = lowest_ritz(&alpha, &beta);
                    let est = if exhausted {
                        0.0
                    } else {
                        b * s[s.len() - 1].abs()
                    };
                    trace.push(TraceLine {
                        iter: matvecs,
                        ritz_min: theta,
                        residual: est,
                    });
                    log::debug!("iter {matvecs}, ritz_min {theta:.15e}, residual {est:.3e}");
                    if exhausted || last || est < 0.1 * opts.tol {
                        ritz = Some((theta, s));
                        break;
                    }
                }
                linalg::scale(1.0 / b, &mut w);
                beta.push(b);
                basis.push(w);
            }
            let (_, s) = ritz.expect("loop always ends with a Ritz pair");
            let mut x = vec![0.0; dim];
            for (c, v) in s.iter().zip(&basis) {
                linalg::axpy(*c, v, &mut x);
            }
            drop(basis);
            prep(&mut x, &locked);
            let mut hx = vec![0.0; dim];
            op.apply_into(&x, &mut hx);
            matvecs += 1;
            let theta = linalg::dot(&x, &hx);
            linalg::axpy(-theta, &x, &mut hx);
            let r = linalg::norm(&hx);
            best = best.min(r);
            if r < opts.tol {
                locked.push(x);
                values.push(theta);
                residuals.push(r);
                best = f64::INFINITY;
                break;
            }
            if matvecs >= opts.max_matvecs {
                return Err(Error::Convergence {
                    iterations: matvecs,
                    best_residual: best,
                });
            }
            start = x;
        }
    }

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order.iter().map(|&i| locked[i].clone()).collect();
    let residuals: Vec<f64> = order.iter().map(|&i| residuals[i]).collect();
    let threshold = eigenvalues
        .first()
        .map_or(1e-12, |&l| default_degeneracy_threshold(l));
    Ok(SpectrumResult {
        degeneracy_clusters: cluster_degeneracies(&eigenvalues, threshold),
        eigenvalues,
        eigenvectors,
        residuals,
        seed: Some(opts.seed),
        matvecs,
        trace,
    })
}

/// Lowest eigenpair of the tridiagonal matrix with diagonal `alpha` and
/// off-diagonal `beta` (`beta.len() == alpha.len() - 1`).
fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let (values, mut vectors) = symmetric_eigen(&t);
    (values[0], vectors.swap_remove(0))
}

/// Full eigendecomposition of a symmetric matrix, ascending, eigenvectors
/// as columns. Only the lower triangle is read.
fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.nrows();
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    // the decomposition of a finite symmetric matrix cannot fail to converge
    let eig = a
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("symmetric eigendecomposition");
    let s = eig.S().column_vector();
    let u = eig.U();
    let values = (0..n).map(|i| s[i]).collect();
    let vectors = (0..n)
        .map(|j| (0..n).map(|i| u[(i, j)]).collect())
        .collect();
    (values, vectors)
}

/// Explicit residuals of a result against an operator (post-solve check).
pub fn verify_residuals(op: &dyn LinearOperator, spec: &SpectrumResult) -> Vec<f64> {
    spec.eigenvalues
        .iter()
        .zip(&spec.eigenvectors)
        .map(|(&l, v)| residual(op, v, l))
        .collect()
}

/// Largest `|<v_i, v_j> - delta_ij|`.
pub fn orthonormality_error(vectors: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..vectors.len() {
        for j in 0..=i {
            let d = linalg::dot(&vectors[i], &vectors[j]);
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((d - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{ModelTag, Term};
    use crate::pauli::PauliString;

    #[test]
    fn single_qubit_field() {
        let h = HamiltonianSpec::from_terms(
            1,
            vec![Term {
                coefficient: -2.0,
                op: PauliString::single_z(1, 0).unwrap(),
            }],
            ModelTag::Ising,
            2.0,
            0.0,
            0.0,
        )
        .unwrap();
        let s = solve_dense(&h, 2).unwrap();
        assert_eq!(s.eigenvalues, vec![-2.0, 2.0]);
    }

    #[test]
    fn clustering_rules() {
        let c = cluster_degeneracies(&[-8.0, -8.0, -8.0, -8.0, -6.0, -6.0], 1e-6);
        assert_eq!(c, vec![0..4, 4..6]);
        assert!(cluster_degeneracies(&[], 1e-6).is_empty());
        // closed interval: a gap equal to the threshold joins
        assert_eq!(
            cluster_degeneracies(&[0.0, 0.5, 1.5], 0.5),
            vec![0..2, 2..3]
        );
    }

    #[test]
    fn gap_needs_two_clusters() {
        let s = solve_dense_matrix(DMatrix::from_diagonal_element(3, 3, 1.0), 3);
        assert!(matches!(s.gap(), Err(Error::InsufficientLevels { .. })));
    }

    #[test]
    fn lanczos_rejects_bad_options() {
        let h = HamiltonianSpec::from_terms(1, vec![], ModelTag::Ising, 0.0, 0.0, 0.0).unwrap();
        let mut o = LanczosOptions::with_k(0);
        assert!(solve_lanczos(&h, &o).is_err());
        o.k = 1;
        o.tol = 0.0;
        assert!(solve_lanczos(&h, &o).is_err());
    }
}
