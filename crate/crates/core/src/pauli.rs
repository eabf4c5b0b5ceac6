//! Pauli strings as paired X/Z bitmasks, and their action on dense real
//! state vectors.
//!
//! A `PauliString` with masks `(x, z)` and sign `s` is the operator
//! `s * prod_k X_k^{x_k} Z_k^{z_k}`, with the X factor to the left of the Z
//! factor on every qubit. A qubit with both bits set therefore carries
//! `X Z = -iY`, a real matrix, and every product of two strings is again a
//! real signed string. Qubit `k` is bit `k` of the computational basis
//! index, so `apply` maps `|b>` to `s * (-1)^{|b & z|} |b ^ x>`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest register that can be materialized as a dense state vector.
pub const MAX_STATE_QUBITS: usize = 30;

const NORM_TOL: f64 = 1e-8;

/// Fixed-length bitset over qubit indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BitMask {
    words: Vec<u64>,
}

impl BitMask {
    pub fn zeros(n_bits: usize) -> Self {
        BitMask {
            words: vec![0; n_bits.div_ceil(64).max(1)],
        }
    }

    pub fn from_indices(n_bits: usize, indices: &[usize]) -> Result<Self> {
        let mut m = BitMask::zeros(n_bits);
        for &i in indices {
            if i >= n_bits {
                return Err(Error::IndexOutOfRange {
                    what: "qubit",
                    index: i,
                    len: n_bits,
                });
            }
            m.toggle(i);
        }
        Ok(m)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let bit = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= bit;
        } else {
            self.words[i / 64] &= !bit;
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &BitMask) -> BitMask {
        BitMask {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        }
    }

    pub fn xor_assign(&mut self, other: &BitMask) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_count(&self, other: &BitMask) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    /// The mask as a single word; `None` if any bit above 63 is set.
    pub fn as_u64(&self) -> Option<u64> {
        if self.words[1..].iter().any(|&w| w != 0) {
            None
        } else {
            Some(self.words[0])
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// Signed n-qubit Pauli operator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: BitMask,
    z: BitMask,
    negative: bool,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        PauliString {
            n_qubits,
            x: BitMask::zeros(n_qubits),
            z: BitMask::zeros(n_qubits),
            negative: false,
        }
    }

    pub fn from_masks(n_qubits: usize, x: BitMask, z: BitMask, negative: bool) -> Result<Self> {
        let words = n_qubits.div_ceil(64).max(1);
        if x.words.len() != words || z.words.len() != words {
            return Err(Error::DimensionMismatch {
                expected: words,
                found: x.words.len().max(z.words.len()),
            });
        }
        let p = PauliString {
            n_qubits,
            x,
            z,
            negative,
        };
        let high = (0..words * 64).skip(n_qubits);
        for i in high {
            if p.x.get(i) || p.z.get(i) {
                return Err(Error::IndexOutOfRange {
                    what: "qubit",
                    index: i,
                    len: n_qubits,
                });
            }
        }
        Ok(p)
    }

    /// `X` on every listed site (repeats cancel).
    pub fn x_type(n_qubits: usize, sites: &[usize]) -> Result<Self> {
        Ok(PauliString {
            n_qubits,
            x: BitMask::from_indices(n_qubits, sites)?,
            z: BitMask::zeros(n_qubits),
            negative: false,
        })
    }

    /// `Z` on every listed site (repeats cancel).
    pub fn z_type(n_qubits: usize, sites: &[usize]) -> Result<Self> {
        Ok(PauliString {
            n_qubits,
            x: BitMask::zeros(n_qubits),
            z: BitMask::from_indices(n_qubits, sites)?,
            negative: false,
        })
    }

    pub fn single_x(n_qubits: usize, site: usize) -> Result<Self> {
        Self::x_type(n_qubits, &[site])
    }

    pub fn single_z(n_qubits: usize, site: usize) -> Result<Self> {
        Self::z_type(n_qubits, &[site])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> &BitMask {
        &self.x
    }

    pub fn z_mask(&self) -> &BitMask {
        &self.z
    }

    /// +1 or -1.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn negated(&self) -> Self {
        let mut p = self.clone();
        p.negative = !p.negative;
        p
    }

    pub fn with_sign(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero() && !self.negative
    }

    /// Identity up to sign.
    pub fn is_trivial(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn is_x_type(&self) -> bool {
        self.z.is_zero()
    }

    pub fn is_z_type(&self) -> bool {
        self.x.is_zero()
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .words
            .iter()
            .zip(&self.z.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Hermitian (equivalently, real symmetric) iff the number of sites
    /// carrying both X and Z is even.
    pub fn is_hermitian(&self) -> bool {
        self.x.and_count(&self.z).is_multiple_of(2)
    }

    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.x.ones().chain(self.z.ones()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    fn check_same_size(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(())
    }

    /// Masks packed into single words, for operators on at most 64 qubits.
    pub fn packed(&self) -> Result<(u64, u64)> {
        match (self.x.as_u64(), self.z.as_u64()) {
            (Some(x), Some(z)) if self.n_qubits <= 64 => Ok((x, z)),
            _ => Err(Error::Capacity {
                n_qubits: self.n_qubits,
                max: 64,
            }),
        }
    }
}

/// Group product `a * b`.
///
/// Moving the Z block of `a` past the X block of `b` contributes
/// `(-1)^{|a.z & b.x|}`; in the XZ-ordered convention no imaginary phase can
/// arise.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    a.check_same_size(b)?;
    let swap = a.z.and_count(&b.x) % 2 == 1;
    Ok(PauliString {
        n_qubits: a.n_qubits,
        x: a.x.xor(&b.x),
        z: a.z.xor(&b.z),
        negative: a.negative ^ b.negative ^ swap,
    })
}

/// True iff the symplectic overlap `|a.x & b.z| + |a.z & b.x|` is even.
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    a.check_same_size(b)?;
    Ok((a.x.and_count(&b.z) + a.z.and_count(&b.x)).is_multiple_of(2))
}

/// Product of a sequence of strings, left to right.
pub fn product<'a, I>(n_qubits: usize, ops: I) -> Result<PauliString>
where
    I: IntoIterator<Item = &'a PauliString>,
{
    ops.into_iter()
        .try_fold(PauliString::identity(n_qubits), |acc, p| multiply(&acc, p))
}

impl fmt::Display for PauliString {
    /// Sign followed by one letter per qubit, qubit 0 first. `Y` marks a
    /// site carrying the real product `X Z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.negative { "-" } else { "+" })?;
        for k in 0..self.n_qubits {
            let c = match (self.x.get(k), self.z.get(k)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let n = body.chars().count();
        let mut x = BitMask::zeros(n);
        let mut z = BitMask::zeros(n);
        for (k, c) in body.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x.set(k, true),
                'Z' => z.set(k, true),
                'Y' => {
                    x.set(k, true);
                    z.set(k, true);
                }
                other => {
                    return Err(Error::Config(format!(
                        "bad Pauli letter '{other}' in {s:?}"
                    )));
                }
            }
        }
        PauliString::from_masks(n, x, z, negative)
    }
}

/// Dense real state over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<f64>,
}

impl StateVector {
    fn check_capacity(n_qubits: usize) -> Result<()> {
        if n_qubits > MAX_STATE_QUBITS {
            return Err(Error::Capacity {
                n_qubits,
                max: MAX_STATE_QUBITS,
            });
        }
        Ok(())
    }

    pub fn zeros(n_qubits: usize) -> Result<Self> {
        Self::check_capacity(n_qubits)?;
        Ok(StateVector {
            n_qubits,
            amplitudes: vec![0.0; 1usize << n_qubits],
        })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zeros(n_qubits)?;
        if index >= s.amplitudes.len() {
            return Err(Error::IndexOutOfRange {
                what: "basis state",
                index,
                len: s.amplitudes.len(),
            });
        }
        s.amplitudes[index] = 1.0;
        Ok(s)
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<f64>) -> Result<Self> {
        Self::check_capacity(n_qubits)?;
        if amplitudes.len() != 1usize << n_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1usize << n_qubits,
                found: amplitudes.len(),
            });
        }
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [f64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<f64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.amplitudes)
    }

    /// Scales to unit norm. The zero vector cannot be normalized.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn dot(&self, other: &StateVector) -> Result<f64> {
        self.check_dims(other.n_qubits)?;
        Ok(crate::linalg::dot(&self.amplitudes, &other.amplitudes))
    }

    fn check_dims(&self, n_qubits: usize) -> Result<()> {
        if self.n_qubits != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: self.n_qubits,
            });
        }
        Ok(())
    }
}

/// `p |s>`.
pub fn apply(p: &PauliString, s: &StateVector) -> Result<StateVector> {
    s.check_dims(p.n_qubits)?;
    let (x, z) = p.packed()?;
    let sign = f64::from(p.sign());
    let src = &s.amplitudes;
    let mut out = vec![0.0; src.len()];
    out.par_iter_mut().enumerate().for_each(|(b, o)| {
        let from = b ^ x as usize;
        let phase = if (from as u64 & z).count_ones() % 2 == 1 {
            -sign
        } else {
            sign
        };
        *o = phase * src[from];
    });
    Ok(StateVector {
        n_qubits: s.n_qubits,
        amplitudes: out,
    })
}

/// `<s|p|s>` for a normalized real state.
pub fn expectation(p: &PauliString, s: &StateVector) -> Result<f64> {
    s.check_dims(p.n_qubits)?;
    let n = s.norm();
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    let (x, z) = p.packed()?;
    let a = &s.amplitudes;
    let v = crate::linalg::chunked_sum(a.len(), |b| {
        let from = b ^ x as usize;
        let parity = (from as u64 & z).count_ones() % 2;
        let term = a[b] * a[from];
        if parity == 1 {
            -term
        } else {
            term
        }
    });
    Ok(f64::from(p.sign()) * v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_squared_is_identity() {
        let z = PauliString::single_z(3, 0).unwrap();
        let p = multiply(&z, &z).unwrap();
        assert!(p.is_identity());
    }

    #[test]
    fn xz_and_zx_have_opposite_signs() {
        let x = PauliString::single_x(1, 0).unwrap();
        let z = PauliString::single_z(1, 0).unwrap();
        let xz = multiply(&x, &z).unwrap();
        let zx = multiply(&z, &x).unwrap();
        assert!(xz.x_mask().get(0) && xz.z_mask().get(0));
        assert_eq!(xz.sign(), 1);
        assert_eq!(zx.sign(), -1);
        assert_eq!(xz.x_mask(), zx.x_mask());
        assert!(!xz.is_hermitian());
    }

    #[test]
    fn x_and_z_on_same_qubit_anticommute() {
        let x = PauliString::single_x(2, 0).unwrap();
        let z = PauliString::single_z(2, 0).unwrap();
        let z1 = PauliString::single_z(2, 1).unwrap();
        assert!(!commutes(&x, &z).unwrap());
        assert!(commutes(&x, &z1).unwrap());
    }

    #[test]
    fn mismatched_sizes_rejected() {
        let a = PauliString::single_x(2, 0).unwrap();
        let b = PauliString::single_x(3, 0).unwrap();
        assert!(matches!(
            multiply(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(commutes(&a, &b).is_err());
        let s = StateVector::basis(3, 0).unwrap();
        assert!(apply(&a, &s).is_err());
    }

    #[test]
    fn z_fixes_all_zero_and_x_flips_bit() {
        let s = StateVector::basis(4, 0).unwrap();
        let z = PauliString::single_z(4, 0).unwrap();
        assert_eq!(apply(&z, &s).unwrap(), s);
        let x = PauliString::single_x(4, 0).unwrap();
        assert_eq!(apply(&x, &s).unwrap(), StateVector::basis(4, 1).unwrap());
    }

    #[test]
    fn expectation_on_basis_states() {
        let s = StateVector::basis(3, 0).unwrap();
        let z = PauliString::single_z(3, 2).unwrap();
        let x = PauliString::single_x(3, 2).unwrap();
        assert_eq!(expectation(&z, &s).unwrap(), 1.0);
        assert_eq!(expectation(&x, &s).unwrap(), 0.0);
        let unnormalized = StateVector::from_amplitudes(1, vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            expectation(&PauliString::single_z(1, 0).unwrap(), &unnormalized),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn display_round_trip() {
        let p: PauliString = "-IXZY".parse().unwrap();
        assert_eq!(p.n_qubits(), 4);
        assert_eq!(p.sign(), -1);
        assert_eq!(p.to_string(), "-IXZY");
        assert!("+XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn wide_masks_beyond_one_word() {
        let a = PauliString::z_type(130, &[0, 70, 129]).unwrap();
        let b = PauliString::x_type(130, &[70, 100]).unwrap();
        assert!(!commutes(&a, &b).unwrap());
        assert_eq!(a.weight(), 3);
        assert!(a.packed().is_err());
        assert_eq!(a.support(), vec![0, 70, 129]);
    }

    #[test]
    fn zero_vector_cannot_normalize() {
        let mut s = StateVector::zeros(2).unwrap();
        assert!(s.normalize().is_err());
    }
}
