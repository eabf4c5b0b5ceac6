use std::collections::HashMap;

use proptest::prelude::*;
use toric_ising::gf2::pauli_rank;
use toric_ising::lattice::{self, build};
use toric_ising::pauli::product;
use toric_ising::{commutes, Boundary, CellComplex, Error, LatticeKind};

/// Every vertex met by the plaquette has even degree 2 inside it and the
/// edges form one connected walk.
fn is_cycle(c: &CellComplex, edges: &[usize]) -> bool {
    let mut deg: HashMap<usize, usize> = HashMap::new();
    for &e in edges {
        let (a, b) = c.edge(e).unwrap();
        *deg.entry(a).or_default() += 1;
        *deg.entry(b).or_default() += 1;
    }
    if deg.values().any(|&d| d != 2) {
        return false;
    }
    let mut seen = vec![false; edges.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        let (a, b) = c.edge(edges[i]).unwrap();
        for (j, &f) in edges.iter().enumerate() {
            let (p, q) = c.edge(f).unwrap();
            if !seen[j] && [p, q].iter().any(|v| *v == a || *v == b) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.iter().all(|&s| s)
}

fn check_invariants(c: &CellComplex) {
    for (e, &(a, b)) in c.edges().iter().enumerate() {
        assert_ne!(a, b, "edge {e} is a self-loop");
        assert!(a < c.n_vertices() && b < c.n_vertices());
    }
    for (p, edges) in c.plaquettes().iter().enumerate() {
        assert!(is_cycle(c, edges), "plaquette {p} is not a cycle");
    }
    for a in c.vertex_operators() {
        for b in c.plaquette_operators() {
            assert!(commutes(&a, &b).unwrap());
        }
    }
    if c.is_torus() {
        let n = c.n_qubits();
        assert!(product(n, &c.vertex_operators()).unwrap().is_identity());
        assert!(product(n, &c.plaquette_operators()).unwrap().is_identity());
    }
}

#[test]
fn small_torus_counts() {
    let c = build(LatticeKind::SquareTorus, &[2], Boundary::Plain).unwrap();
    assert_eq!((c.n_vertices(), c.n_edges(), c.n_plaquettes()), (4, 8, 4));
    for l in 2..=4 {
        let c = lattice::square_torus(l).unwrap();
        assert_eq!(c.n_qubits(), 2 * l * l);
        assert_eq!(c.n_plaquettes(), l * l);
        check_invariants(&c);
    }
}

#[test]
fn open_square_counts() {
    let c = build(LatticeKind::SquareOpen, &[3], Boundary::Plain).unwrap();
    assert_eq!(c.n_vertices(), 9);
    assert_eq!(c.n_edges(), 12);
    assert_eq!(c.n_plaquettes(), 4);
    assert_eq!(c.boundary_vertices().len(), 8);
    check_invariants(&c);
}

#[test]
fn rough_square_counts() {
    for (l, qubits) in [(2, 8), (3, 20), (4, 36)] {
        let c = lattice::square_open(l, Boundary::Rough).unwrap();
        assert_eq!(c.n_sites(), l * l);
        assert_eq!(c.n_qubits(), qubits);
        check_invariants(&c);
    }
}

#[test]
fn path_counts() {
    let c = build(LatticeKind::Path, &[5], Boundary::Plain).unwrap();
    assert_eq!((c.n_vertices(), c.n_edges(), c.n_plaquettes()), (5, 4, 0));
    let r = lattice::path(5, Boundary::Rough).unwrap();
    assert_eq!((r.n_sites(), r.n_qubits()), (5, 5));
}

#[test]
fn star_weights() {
    let c = lattice::square_open(3, Boundary::Plain).unwrap();
    let weights: Vec<usize> = c.vertex_operators().iter().map(|a| a.weight()).collect();
    // row-major 3x3: corners 2, edge midpoints 3, centre 4
    assert_eq!(weights, vec![2, 3, 2, 3, 4, 3, 2, 3, 2]);
    for a in c.vertex_operators() {
        assert!(a.is_x_type() && a.sign() == 1);
    }
    let p = lattice::path(4, Boundary::Plain).unwrap();
    assert_eq!(p.vertex_operator(0).unwrap().weight(), 1);
    assert_eq!(p.vertex_operator(3).unwrap().weight(), 1);
    assert!(matches!(
        p.vertex_operator(9),
        Err(Error::IndexOutOfRange { .. })
    ));
}

#[test]
fn plaquette_weights() {
    let plain = lattice::square_open(3, Boundary::Plain).unwrap();
    assert!(plain.plaquette_operators().iter().all(|b| b.weight() == 4));
    let rough = lattice::square_open(3, Boundary::Rough).unwrap();
    let mut w: Vec<usize> = rough
        .plaquette_operators()
        .iter()
        .map(|b| b.weight())
        .collect();
    w.sort();
    assert_eq!(w, [vec![3; 8], vec![4; 4]].concat());
    let hex = build(LatticeKind::HexTorus, &[2, 2], Boundary::Plain).unwrap();
    assert!(hex.plaquette_operators().iter().all(|b| b.weight() == 6));
    assert!(hex.vertex_operators().iter().all(|a| a.weight() == 3));
    check_invariants(&hex);
    assert!(matches!(
        rough.plaquette_operator(99),
        Err(Error::IndexOutOfRange { .. })
    ));
}

#[test]
fn hex_open_and_cubic() {
    let h = build(LatticeKind::HexOpen, &[2, 2], Boundary::Plain).unwrap();
    check_invariants(&h);
    assert!(h.plaquette_operators().iter().all(|b| b.weight() == 6));
    let cube = build(LatticeKind::CubicPeriodic, &[3], Boundary::Plain).unwrap();
    check_invariants(&cube);
    assert!(cube.vertex_operators().iter().all(|a| a.weight() == 6));
    assert!(cube.plaquette_operators().iter().all(|b| b.weight() == 4));
    let open = build(LatticeKind::CubicOpen, &[2, 2, 2], Boundary::Plain).unwrap();
    check_invariants(&open);
    assert_eq!(open.n_sites(), 8);
    assert_eq!(open.n_plaquettes(), 6);
}

#[test]
fn stabilizer_ranks() {
    for l in 2..=4 {
        let c = lattice::square_torus(l).unwrap();
        assert_eq!(pauli_rank(&c.vertex_operators()), c.n_sites() - 1);
        assert_eq!(pauli_rank(&c.plaquette_operators()), c.n_plaquettes() - 1);
        let mut all = c.vertex_operators();
        all.extend(c.plaquette_operators());
        assert_eq!(c.n_qubits() - pauli_rank(&all), 2);
        assert_eq!(c.logical_qubits(), 2);
    }
    for b in [Boundary::Plain, Boundary::Rough] {
        for l in 2..=4 {
            let c = lattice::square_open(l, b).unwrap();
            let mut all = c.vertex_operators();
            all.extend(c.plaquette_operators());
            assert_eq!(pauli_rank(&all), c.n_qubits(), "{b} L={l}");
            assert_eq!(c.logical_qubits(), 0);
        }
    }
}

#[test]
fn torus_logical_loops() {
    let c = lattice::square_torus(2).unwrap();
    let t = c.logical_operators().unwrap();
    for p in t.tx.iter().chain(&t.tz) {
        assert_eq!(p.weight(), 2);
    }
    for a in c.vertex_operators().iter().chain(&c.plaquette_operators()) {
        for p in t.tx.iter().chain(&t.tz) {
            assert!(commutes(a, p).unwrap());
        }
    }
    assert!(!commutes(&t.tx[0], &t.tz[1]).unwrap());
    assert!(!commutes(&t.tx[1], &t.tz[0]).unwrap());
    assert!(commutes(&t.tx[0], &t.tz[0]).unwrap());
    assert!(commutes(&t.tx[1], &t.tz[1]).unwrap());

    let open = lattice::square_open(3, Boundary::Plain).unwrap();
    assert!(matches!(
        open.logical_operators(),
        Err(Error::UnsupportedLattice(_))
    ));
}

#[test]
fn dual_ising_graphs() {
    for l in 3..=4 {
        let c = lattice::square_torus(l).unwrap();
        let g = c.dual_ising_graph();
        assert_eq!(g.n_spins, l * l);
        assert!(g.fields.is_empty());
        assert!(g.parity_constrained);
        assert_eq!(g.bonds.len(), 2 * l * l);
        let mut deg = vec![0; g.n_spins];
        for &(i, j, _) in &g.bonds {
            deg[i] += 1;
            deg[j] += 1;
        }
        assert!(deg.iter().all(|&d| d == 4));
    }
    let rough = lattice::square_open(3, Boundary::Rough).unwrap();
    let g = rough.dual_ising_graph();
    let mut field_sites: Vec<usize> = g.fields.iter().map(|f| f.0).collect();
    field_sites.sort();
    let mut boundary = rough.boundary_vertices().to_vec();
    boundary.retain(|&v| v < rough.n_sites());
    boundary.sort();
    assert_eq!(field_sites, boundary);
    assert!(!g.parity_constrained);

    let chain = lattice::path(4, Boundary::Rough)
        .unwrap()
        .dual_ising_graph();
    assert_eq!(chain.bonds.len(), 3);
    assert_eq!(chain.fields.len(), 1);
    assert!(lattice::square_open(3, Boundary::Plain)
        .unwrap()
        .dual_ising_graph()
        .fields
        .is_empty());
}

#[test]
fn bad_shapes_rejected() {
    assert!(build(LatticeKind::SquareTorus, &[1], Boundary::Plain).is_err());
    assert!(build(LatticeKind::SquareOpen, &[0], Boundary::Plain).is_err());
    assert!(build(LatticeKind::SquareTorus, &[3], Boundary::Rough).is_err());
    assert!(build(LatticeKind::SquareOpen, &[2, 2], Boundary::Plain).is_err());
}

#[test]
fn dump_format_and_determinism() {
    let a = lattice::square_open(2, Boundary::Rough).unwrap();
    let b = lattice::square_open(2, Boundary::Rough).unwrap();
    assert_eq!(a.dump(), b.dump());
    let text = a.dump();
    assert_eq!(text.lines().filter(|l| l.starts_with("edge ")).count(), 8);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("plaq ")).count(),
        a.n_plaquettes()
    );
    assert!(text.contains("edge 0: 0 1"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn built_complexes_satisfy_invariants(kind in 0usize..5, l in 2usize..5, rough in any::<bool>()) {
        let (k, dims, b) = match kind {
            0 => (LatticeKind::SquareTorus, vec![l], Boundary::Plain),
            1 => (LatticeKind::SquareOpen, vec![l], if rough { Boundary::Rough } else { Boundary::Plain }),
            2 => (LatticeKind::Path, vec![l + 1], if rough { Boundary::Rough } else { Boundary::Plain }),
            3 => (LatticeKind::HexTorus, vec![l, 2], Boundary::Plain),
            _ => (LatticeKind::HexOpen, vec![l, 2], Boundary::Plain),
        };
        check_invariants(&build(k, &dims, b).unwrap());
    }
}
