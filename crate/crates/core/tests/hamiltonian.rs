mod common;

use common::{
    eigenvalues, kron_hamiltonian, loop_condensate, max_abs_diff, random_state, to_dvector,
};
use proptest::prelude::*;
use toric_ising::hamiltonian::{
    build_dual_ising, build_tc, matvec, HamiltonianSpec, ModelTag, Term,
};
use toric_ising::lattice::{self, Boundary};
use toric_ising::{apply, CellComplex, Error, PauliString, StateVector};

fn small_complexes() -> Vec<CellComplex> {
    vec![
        lattice::path(3, Boundary::Plain).unwrap(),
        lattice::path(4, Boundary::Rough).unwrap(),
        lattice::path(6, Boundary::Rough).unwrap(),
        lattice::square_open(2, Boundary::Plain).unwrap(),
    ]
}

#[test]
fn torus_term_counts_and_ground_energy() {
    let c = lattice::square_torus(2).unwrap();
    let h0 = build_tc(&c, 1.0, 0.0).unwrap();
    assert_eq!(h0.terms().len(), 8);
    assert_eq!(build_tc(&c, 1.0, 0.3).unwrap().terms().len(), 16);
    let e = eigenvalues(kron_hamiltonian(&h0));
    assert!((e[0] + 8.0).abs() < 1e-12);
}

#[test]
fn path_terms() {
    let c = lattice::path(3, Boundary::Plain).unwrap();
    let h = build_tc(&c, 1.0, 0.4).unwrap();
    let stars = h.terms().iter().filter(|t| t.op.is_x_type()).count();
    let fields = h.terms().iter().filter(|t| t.op.is_z_type()).count();
    assert_eq!((stars, fields, h.terms().len()), (3, 2, 5));
}

#[test]
fn dual_ising_terms() {
    let torus = lattice::square_torus(3).unwrap();
    let h = build_dual_ising(&torus, 1.0, 0.5).unwrap();
    assert_eq!(h.n_qubits(), 9);
    assert!(h
        .terms()
        .iter()
        .all(|t| !t.op.is_x_type() || t.op.weight() == 2));
    assert_eq!(h.constant(), 9.0);

    let rough = lattice::square_open(3, Boundary::Rough).unwrap();
    let h = build_dual_ising(&rough, 1.0, 0.5).unwrap();
    let singles = h
        .terms()
        .iter()
        .filter(|t| t.op.is_x_type() && t.op.weight() == 1)
        .count();
    assert_eq!(singles, 8);
    assert_eq!(h.constant(), rough.n_plaquettes() as f64);
}

#[test]
fn ising_ground_energy_without_field() {
    for c in [
        lattice::square_open(3, Boundary::Rough).unwrap(),
        lattice::square_torus(3).unwrap(),
    ] {
        let h = build_dual_ising(&c, 1.3, 0.0).unwrap();
        let e = eigenvalues(kron_hamiltonian(&h));
        assert!((e[0] + 1.3 * c.n_sites() as f64).abs() < 1e-12);
    }
}

#[test]
fn loop_condensate_is_an_eigenvector() {
    let c = lattice::square_torus(2).unwrap();
    let j = 0.7;
    let h = build_tc(&c, j, 0.0).unwrap();
    let psi = StateVector::from_amplitudes(c.n_qubits(), loop_condensate(&c)).unwrap();
    let hpsi = matvec(&h, &psi).unwrap();
    let want: Vec<f64> = psi.amplitudes().iter().map(|a| -j * 8.0 * a).collect();
    assert!(max_abs_diff(hpsi.amplitudes(), &want) < 1e-12);
}

#[test]
fn zero_vector_maps_to_zero() {
    let c = lattice::square_open(2, Boundary::Rough).unwrap();
    let h = build_tc(&c, 1.0, 0.5).unwrap();
    let z = StateVector::zeros(c.n_qubits()).unwrap();
    assert!(matvec(&h, &z)
        .unwrap()
        .amplitudes()
        .iter()
        .all(|&a| a == 0.0));
}

#[test]
fn bad_couplings_and_terms_rejected() {
    let c = lattice::path(3, Boundary::Rough).unwrap();
    assert!(matches!(
        build_tc(&c, -1.0, 0.5),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        build_dual_ising(&c, 1.0, -0.1),
        Err(Error::InvalidParameter(_))
    ));
    assert!(build_tc(&c, 1.0, f64::NAN).is_err());
    let y: PauliString = "YI".parse().unwrap();
    let t = vec![Term {
        coefficient: 1.0,
        op: y,
    }];
    assert!(matches!(
        HamiltonianSpec::from_terms(2, t, ModelTag::ToricCode, 1.0, 0.0, 0.0),
        Err(Error::NonHermitian)
    ));
    let h = build_tc(&c, 1.0, 0.5).unwrap();
    let wrong = StateVector::zeros(2).unwrap();
    assert!(matches!(
        matvec(&h, &wrong),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn term_dump_lists_every_term() {
    let c = lattice::path(3, Boundary::Rough).unwrap();
    let h = build_tc(&c, 1.0, 0.25).unwrap();
    let dump = h.term_dump();
    let lines: Vec<&str> = dump.lines().collect();
    assert!(lines[0].starts_with("# model=tc n_qubits=3"));
    assert_eq!(lines.len(), 1 + h.terms().len());
    assert!(lines[1..].iter().all(|l| l.split_whitespace().count() == 2));
}

#[test]
fn logical_x_commutes_only_without_field() {
    let c = lattice::square_torus(2).unwrap();
    let t = c.logical_operators().unwrap();
    let s = random_state(c.n_qubits(), 3);
    for (h, commutes) in [(0.0, true), (0.4, false)] {
        let ham = build_tc(&c, 1.0, h).unwrap();
        for tx in &t.tx {
            let a = matvec(&ham, &apply(tx, &s).unwrap()).unwrap();
            let b = apply(tx, &matvec(&ham, &s).unwrap()).unwrap();
            let d = max_abs_diff(a.amplitudes(), b.amplitudes());
            assert_eq!(d < 1e-12, commutes, "h={h}: commutator {d}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matvec_matches_kronecker(which in 0usize..4, j in 0.0f64..2.0, h in 0.0f64..2.0, ising in any::<bool>(), seed in any::<u64>()) {
        let c = &small_complexes()[which];
        let ham = if ising { build_dual_ising(c, j, h) } else { build_tc(c, j, h) }.unwrap();
        let s = random_state(ham.n_qubits(), seed);
        let got = to_dvector(&matvec(&ham, &s).unwrap());
        let want = kron_hamiltonian(&ham) * to_dvector(&s);
        prop_assert!((got - want).amax() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn field_commutes_with_plaquettes(l in 2usize..4, h in 0.0f64..3.0, seed in any::<u64>()) {
        let c = lattice::square_open(l, Boundary::Rough).unwrap();
        prop_assume!(c.n_qubits() <= 20);
        let ham = build_tc(&c, 1.0, h).unwrap();
        let s = random_state(c.n_qubits(), seed);
        let hs = matvec(&ham, &s).unwrap();
        for b in c.plaquette_operators().iter().take(4) {
            let lhs = matvec(&ham, &apply(b, &s).unwrap()).unwrap();
            let rhs = apply(b, &hs).unwrap();
            prop_assert!(max_abs_diff(lhs.amplitudes(), rhs.amplitudes()) < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rayleigh_quotient_is_bounded(which in 0usize..4, h in 0.0f64..2.0, seed in any::<u64>()) {
        let c = &small_complexes()[which];
        let ham = build_tc(c, 1.0, h).unwrap();
        let s = random_state(ham.n_qubits(), seed);
        let r = s.dot(&matvec(&ham, &s).unwrap()).unwrap();
        prop_assert!(r.is_finite());
        let e = eigenvalues(kron_hamiltonian(&ham));
        prop_assert!(e[0] >= -ham.norm_bound() - 1e-12);
        prop_assert!(r >= e[0] - 1e-10);
    }
}
