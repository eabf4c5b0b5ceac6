//! String order parameter, Ising magnetization and transition locators.

use crate::duality::Subspace;
use crate::eigensolver::SpectrumResult;
use crate::error::{Error, Result};
use crate::lattice::CellComplex;
use crate::pauli::{expectation, PauliString, StateVector};

/// Step in `h/J` for the fidelity susceptibility (central difference).
pub const FIDELITY_DELTA: f64 = 1e-3;

/// An open edge walk starting at the site `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringPath {
    edges: Vec<usize>,
    f: usize,
    end: usize,
    boundary_anchored: bool,
}

impl StringPath {
    /// Walk `edges` from `f`. Consecutive edges must share a vertex and no
    /// edge may repeat. The path is boundary-anchored when it ends on a
    /// terminal vertex.
    pub fn new(c: &CellComplex, edges: Vec<usize>, f: usize) -> Result<Self> {
        if f >= c.n_sites() {
            return Err(Error::InvalidPath(format!(
                "start vertex {f} is not a site"
            )));
        }
        if edges.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        let mut seen = vec![false; c.n_edges()];
        let mut at = f;
        for &e in &edges {
            let (a, b) = c
                .edge(e)
                .map_err(|_| Error::InvalidPath(format!("no edge {e}")))?;
            if std::mem::replace(&mut seen[e], true) {
                return Err(Error::InvalidPath(format!("edge {e} repeats")));
            }
            at = if a == at {
                b
            } else if b == at {
                a
            } else {
                return Err(Error::InvalidPath(format!(
                    "edge {e} does not touch vertex {at}"
                )));
            };
            if c.is_terminal(at) && e != *edges.last().unwrap_or(&e) {
                return Err(Error::InvalidPath(
                    "path passes through the boundary".into(),
                ));
            }
        }
        if at == f {
            return Err(Error::InvalidPath("path is closed".into()));
        }
        Ok(StringPath {
            edges,
            f,
            end: at,
            boundary_anchored: c.is_terminal(at),
        })
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn boundary_anchored(&self) -> bool {
        self.boundary_anchored
    }

    fn endpoints(&self) -> (usize, usize) {
        (self.f.min(self.end), self.f.max(self.end))
    }
}

/// `S_z = prod_{e in path} Z_e`.
pub fn string_operator(c: &CellComplex, path: &StringPath) -> Result<PauliString> {
    PauliString::z_type(c.n_qubits(), path.edges())
}

/// `<gs| S_z |gs>` for a full toric-code state.
pub fn string_order_parameter(gs: &StateVector, c: &CellComplex, path: &StringPath) -> Result<f64> {
    expectation(&string_operator(c, path)?, gs)
}

/// `<v| S_z |v>` for a state stored in a subspace of the edge register.
pub fn string_order_parameter_in(
    space: &Subspace,
    v: &[f64],
    c: &CellComplex,
    path: &StringPath,
) -> Result<f64> {
    space.diagonal_expectation(&string_operator(c, path)?, v)
}

/// `<X_f>` on the Ising register.
pub fn magnetization(gs_ising: &StateVector, f: usize) -> Result<f64> {
    expectation(&PauliString::single_x(gs_ising.n_qubits(), f)?, gs_ising)
}

/// `<X_f X_g>` on the Ising register.
pub fn two_point(gs_ising: &StateVector, f: usize, g: usize) -> Result<f64> {
    let n = gs_ising.n_qubits();
    if f == g {
        return Err(Error::InvalidParameter("two-point sites coincide".into()));
    }
    expectation(&PauliString::x_type(n, &[f, g])?, gs_ising)
}

/// `|<S_z(path1)> - <S_z(path2)>|`; the paths must share their endpoints.
pub fn deformation_check(
    gs: &StateVector,
    c: &CellComplex,
    path1: &StringPath,
    path2: &StringPath,
) -> Result<f64> {
    if path1.endpoints() != path2.endpoints() {
        return Err(Error::EndpointMismatch);
    }
    let a = string_order_parameter(gs, c, path1)?;
    let b = string_order_parameter(gs, c, path2)?;
    Ok((a - b).abs())
}

/// The site farthest from the boundary terminal (lowest index on ties), or
/// site 0 on a closed complex.
pub fn canonical_site(c: &CellComplex) -> usize {
    let Some(t) = c.terminals().next() else {
        return 0;
    };
    let dist = c.distances_from(t);
    let mut best = 0;
    for v in 0..c.n_sites() {
        if dist[v].unwrap_or(0) > dist[best].unwrap_or(0) {
            best = v;
        }
    }
    best
}

/// Shortest path from `f` to the boundary terminal, or on a closed complex
/// to the site farthest from `f`.
pub fn canonical_path(c: &CellComplex, f: usize) -> Result<StringPath> {
    if f >= c.n_sites() {
        return Err(Error::IndexOutOfRange {
            what: "site",
            index: f,
            len: c.n_sites(),
        });
    }
    let target = match c.terminals().next() {
        Some(t) => t,
        None => {
            let dist = c.distances_from(f);
            (0..c.n_sites())
                .max_by_key(|&v| (dist[v].unwrap_or(0), std::cmp::Reverse(v)))
                .unwrap_or(f)
        }
    };
    let edges = c
        .shortest_path(f, target)
        .ok_or_else(|| Error::InvalidPath(format!("no path from {f} to {target}")))?;
    StringPath::new(c, edges, f)
}

/// Spectral and state-overlap transition locators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    pub gap: f64,
    pub fidelity_susceptibility: Option<f64>,
}

/// Gap above the ground cluster.
pub fn gap(spectrum: &SpectrumResult) -> Result<f64> {
    spectrum.gap()
}

/// `2 (1 - |<a|b>|) / delta^2` for normalized ground vectors at `h - delta/2`
/// and `h + delta/2`.
pub fn fidelity_susceptibility(a: &[f64], b: &[f64], delta: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("bad step {delta}")));
    }
    let overlap = crate::linalg::dot(a, b).abs().min(1.0);
    Ok(2.0 * (1.0 - overlap) / (delta * delta))
}

/// Gap, plus the fidelity susceptibility when neighbouring ground vectors
/// `(gs(h - delta/2), gs(h + delta/2), delta)` are supplied.
pub fn diagnostics(
    spectrum: &SpectrumResult,
    neighbours: Option<(&[f64], &[f64], f64)>,
) -> Result<Diagnostics> {
    let gap = gap(spectrum)?;
    let fidelity_susceptibility = neighbours
        .map(|(a, b, d)| fidelity_susceptibility(a, b, d))
        .transpose()?;
    Ok(Diagnostics {
        gap,
        fidelity_susceptibility,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{self, Boundary};

    #[test]
    fn canonical_choices_on_rough_square() {
        let c = lattice::square_open(3, Boundary::Rough).unwrap();
        let f = canonical_site(&c);
        assert_eq!(f, 4);
        let p = canonical_path(&c, f).unwrap();
        assert_eq!(p.edges().len(), 2);
        assert!(p.boundary_anchored());
    }

    #[test]
    fn canonical_site_on_rough_path_is_far_end() {
        let c = lattice::path(5, Boundary::Rough).unwrap();
        assert_eq!(canonical_site(&c), 4);
        assert_eq!(canonical_path(&c, 4).unwrap().edges().len(), 5);
    }

    #[test]
    fn disconnected_walk_rejected() {
        let c = lattice::path(4, Boundary::Plain).unwrap();
        // edges 0: (0,1), 2: (2,3)
        assert!(matches!(
            StringPath::new(&c, vec![0, 2], 0),
            Err(Error::InvalidPath(_))
        ));
    }

    #[test]
    fn susceptibility_is_non_negative() {
        let a = [0.6, 0.8];
        let b = [-0.6, -0.8];
        assert_eq!(fidelity_susceptibility(&a, &b, 1e-3).unwrap(), 0.0);
    }
}
