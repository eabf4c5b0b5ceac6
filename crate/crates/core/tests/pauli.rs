mod common;

use common::{kron_pauli, loop_condensate, random_state, to_dvector};
use proptest::prelude::*;
use toric_ising::lattice::{self, Boundary};
use toric_ising::pauli::{product, BitMask};
use toric_ising::{apply, commutes, expectation, multiply, Error, PauliString, StateVector};

fn pauli(n: usize, x: u64, z: u64, negative: bool) -> PauliString {
    let mask = |m: u64| {
        let idx: Vec<usize> = (0..n).filter(|k| m >> k & 1 == 1).collect();
        BitMask::from_indices(n, &idx).unwrap()
    };
    PauliString::from_masks(n, mask(x), mask(z), negative).unwrap()
}

fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
    (0..1u64 << n, 0..1u64 << n, any::<bool>()).prop_map(move |(x, z, s)| pauli(n, x, z, s))
}

#[test]
fn z_squared_is_identity() {
    let z = PauliString::single_z(3, 0).unwrap();
    let p = multiply(&z, &z).unwrap();
    assert!(p.is_identity());
    assert_eq!(p.sign(), 1);
}

#[test]
fn x_and_z_anticommute_as_products() {
    let x = PauliString::single_x(1, 0).unwrap();
    let z = PauliString::single_z(1, 0).unwrap();
    let xz = multiply(&x, &z).unwrap();
    let zx = multiply(&z, &x).unwrap();
    assert!(xz.x_mask().get(0) && xz.z_mask().get(0));
    assert_eq!(xz.sign(), -zx.sign());
    assert!(!commutes(&x, &z).unwrap());
}

#[test]
fn crossing_loops_anticommute_on_small_torus() {
    let c = lattice::square_torus(2).unwrap();
    let t = c.logical_operators().unwrap();
    // oracle: overlap of the X support with the Z support
    let overlap = t.tx[0].x_mask().and_count(t.tz[1].z_mask());
    assert_eq!(overlap % 2, 1);
    let ab = multiply(&t.tx[0], &t.tz[1]).unwrap();
    let ba = multiply(&t.tz[1], &t.tx[0]).unwrap();
    assert_eq!(ab.sign(), -ba.sign());
    assert!(!commutes(&t.tx[0], &t.tz[1]).unwrap());
    assert!(commutes(&t.tx[0], &t.tz[0]).unwrap());
}

#[test]
fn stars_and_plaquettes_commute() {
    for c in [
        lattice::square_open(3, Boundary::Rough).unwrap(),
        lattice::square_torus(3).unwrap(),
    ] {
        for a in c.vertex_operators() {
            for b in c.plaquette_operators() {
                let shared = a.x_mask().and_count(b.z_mask());
                assert!(shared == 0 || shared == 2);
                assert!(commutes(&a, &b).unwrap());
            }
        }
    }
}

#[test]
fn apply_on_all_zeros() {
    let zero = StateVector::basis(4, 0).unwrap();
    let z = PauliString::single_z(4, 0).unwrap();
    assert_eq!(apply(&z, &zero).unwrap(), zero);
    let x = PauliString::single_x(4, 0).unwrap();
    assert_eq!(apply(&x, &zero).unwrap(), StateVector::basis(4, 1).unwrap());
}

#[test]
fn expectations_on_all_zeros() {
    let zero = StateVector::basis(5, 0).unwrap();
    for e in 0..5 {
        assert_eq!(
            expectation(&PauliString::single_z(5, e).unwrap(), &zero).unwrap(),
            1.0
        );
        assert_eq!(
            expectation(&PauliString::single_x(5, e).unwrap(), &zero).unwrap(),
            0.0
        );
    }
}

#[test]
fn loop_condensate_is_stabilized_by_stars() {
    let c = lattice::square_torus(2).unwrap();
    let psi = StateVector::from_amplitudes(c.n_qubits(), loop_condensate(&c)).unwrap();
    for a in c.vertex_operators() {
        assert!((expectation(&a, &psi).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn dimension_and_normalization_errors() {
    let a = PauliString::single_x(2, 0).unwrap();
    let b = PauliString::single_x(3, 0).unwrap();
    assert!(matches!(
        multiply(&a, &b),
        Err(Error::DimensionMismatch { .. })
    ));
    assert!(matches!(
        commutes(&a, &b),
        Err(Error::DimensionMismatch { .. })
    ));
    let s = StateVector::basis(3, 0).unwrap();
    assert!(matches!(
        apply(&a, &s),
        Err(Error::DimensionMismatch { .. })
    ));
    let unnormalized = StateVector::from_amplitudes(2, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
    assert!(matches!(
        expectation(&a, &unnormalized),
        Err(Error::NotNormalized(_))
    ));
}

#[test]
fn single_y_is_not_hermitian() {
    let y: PauliString = "IY".parse().unwrap();
    assert!(!y.is_hermitian());
    let yy: PauliString = "YY".parse().unwrap();
    assert!(yy.is_hermitian());
}

#[test]
fn text_round_trip() {
    let p: PauliString = "-XZYI".parse().unwrap();
    assert_eq!(p.to_string(), "-XZYI");
    assert_eq!(p.weight(), 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlap_parities_add(a in arb_pauli(6), b in arb_pauli(6), c in arb_pauli(6)) {
        let ab = multiply(&a, &b).unwrap();
        let lhs = commutes(&ab, &c).unwrap();
        let rhs = commutes(&a, &c).unwrap() == commutes(&b, &c).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_is_associative(a in arb_pauli(5), b in arb_pauli(5), c in arb_pauli(5)) {
        let l = multiply(&multiply(&a, &b).unwrap(), &c).unwrap();
        let r = multiply(&a, &multiply(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(&l, &r);
        prop_assert_eq!(product(5, [&a, &b, &c]).unwrap(), l);
    }

    #[test]
    fn product_matches_matrix_product(a in arb_pauli(4), b in arb_pauli(4)) {
        let want = kron_pauli(&a) * kron_pauli(&b);
        let got = kron_pauli(&multiply(&a, &b).unwrap());
        prop_assert!((want - got).amax() < 1e-12);
    }

    #[test]
    fn apply_matches_kronecker(n in 1usize..=6, x in any::<u64>(), z in any::<u64>(), s in any::<bool>(), seed in any::<u64>()) {
        let m = (1u64 << n) - 1;
        let p = pauli(n, x & m, z & m, s);
        let psi = random_state(n, seed);
        let got = to_dvector(&apply(&p, &psi).unwrap());
        let want = kron_pauli(&p) * to_dvector(&psi);
        prop_assert!((got - want).amax() < 1e-12);
    }

    #[test]
    fn apply_is_linear_and_norm_preserving(p in arb_pauli(5), s1 in any::<u64>(), s2 in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let u = random_state(5, s1);
        let v = random_state(5, s2);
        let mix: Vec<f64> = u.amplitudes().iter().zip(v.amplitudes()).map(|(x, y)| a * x + b * y).collect();
        let mix = StateVector::from_amplitudes(5, mix).unwrap();
        let lhs = apply(&p, &mix).unwrap();
        let pu = apply(&p, &u).unwrap();
        let pv = apply(&p, &v).unwrap();
        for i in 0..lhs.len() {
            let rhs = a * pu.amplitudes()[i] + b * pv.amplitudes()[i];
            prop_assert!((lhs.amplitudes()[i] - rhs).abs() < 1e-12);
        }
        prop_assert!((pu.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_strings_square_to_identity(p in arb_pauli(5), seed in any::<u64>()) {
        prop_assume!(p.is_hermitian());
        let s = random_state(5, seed);
        let twice = apply(&p, &apply(&p, &s).unwrap()).unwrap();
        prop_assert!(common::max_abs_diff(twice.amplitudes(), s.amplitudes()) < 1e-12);
    }

    #[test]
    fn expectation_is_bounded(p in arb_pauli(5), seed in any::<u64>()) {
        let e = expectation(&p, &random_state(5, seed)).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&e));
    }

    #[test]
    fn expectation_saturates_on_eigenstates(z in 1u64..32, b in 0usize..32) {
        // every computational basis state is a +-1 eigenvector of a Z string
        let p = pauli(5, 0, z, false);
        let s = StateVector::basis(5, b).unwrap();
        let want = if (b as u64 & z).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        prop_assert_eq!(expectation(&p, &s).unwrap(), want);
    }
}
