//! Dense state vectors with gate application, expectation values, subspace
//! fidelity and shot sampling.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::pauli::{i_pow, parity_sign, PauliOperator, PauliString, PauliSum, MAX_DENSE_QUBITS};
use crate::{Error, Result};

pub type Amplitude = Complex64;

/// Tolerance on normalization at algorithm entry and exit points.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Gates understood by [`StateVector::apply_gate`]. Rotation angles follow
/// `R_P(theta) = exp(-i theta P / 2)`; `PauliRotation` is `exp(-i theta c P)`
/// for the string's real coefficient `c`.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    Rx(usize, f64),
    Ry(usize, f64),
    Rz(usize, f64),
    Cx { control: usize, target: usize },
    PauliRotation(f64, PauliString),
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_QUBITS {
        return Err(Error::DenseGuard { n, max: MAX_DENSE_QUBITS });
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range for {n_qubits} qubits")));
        }
        let mut amps = vec![Complex64::default(); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// `|0...0>`.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// Equal superposition `|+>^n`.
    pub fn plus_state(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = (dim as f64).sqrt().recip();
        Ok(Self { n_qubits, amps: vec![Complex64::new(a, 0.0); dim] })
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::LengthMismatch { expected: 1 << n_qubits, got: amps.len() });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::NonFinite(format!("cannot normalize state with norm {n}")));
        }
        let inv = n.recip();
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_size(other.n_qubits)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn same_size(&self, n: usize) -> Result<()> {
        if self.n_qubits != n {
            return Err(Error::QubitMismatch { left: self.n_qubits, right: n });
        }
        Ok(())
    }

    /// `<psi|H|psi>` evaluated term by term from the Pauli action on amplitudes.
    pub fn expectation(&self, h: &PauliSum) -> Result<f64> {
        self.same_size(h.n_qubits())?;
        let mut acc = Complex64::default();
        for t in h.terms() {
            let (x, z) = t.masks();
            let base = t.coeff * i_pow((x & z).count_ones());
            for (c, a) in self.amps.iter().enumerate() {
                acc += self.amps[c ^ x].conj() * base * parity_sign(z & c) * a;
            }
        }
        debug_assert!(!h.is_hermitian() || acc.im.abs() < 1e-10 * acc.re.abs().max(1.0));
        Ok(acc.re)
    }

    /// Expectation against a precompiled operator.
    pub fn expectation_op(&self, op: &PauliOperator) -> Result<f64> {
        self.same_size(op.n_qubits())?;
        Ok(op.expectation_raw(&self.amps).re)
    }

    /// Dense quadratic form `psi^dagger H psi`, kept as a cross-check for [`Self::expectation`].
    pub fn expectation_dense(&self, h: &PauliSum) -> Result<f64> {
        self.same_size(h.n_qubits())?;
        let m = h.to_matrix()?;
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        Ok(v.dotc(&(m * &v)).re)
    }

    fn check_target(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::InvalidTarget(format!("qubit {q} out of range for {} qubits", self.n_qubits)));
        }
        Ok(())
    }

    /// Applies a 2x2 matrix `[[a, b], [c, d]]` to qubit `q`.
    fn apply_single(&mut self, q: usize, m: [Complex64; 4]) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0] * a0 + m[1] * a1;
                self.amps[i | bit] = m[2] * a0 + m[3] * a1;
            }
        }
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let zero = Complex64::default();
        match gate {
            Gate::H(q) => {
                self.check_target(*q)?;
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(*q, [h, h, h, -h]);
            }
            Gate::X(q) => {
                self.check_target(*q)?;
                let one = Complex64::new(1.0, 0.0);
                self.apply_single(*q, [zero, one, one, zero]);
            }
            Gate::Rx(q, theta) => {
                self.check_target(*q)?;
                let (s, c) = (theta / 2.0).sin_cos();
                let c = Complex64::new(c, 0.0);
                let mis = Complex64::new(0.0, -s);
                self.apply_single(*q, [c, mis, mis, c]);
            }
            Gate::Ry(q, theta) => {
                self.check_target(*q)?;
                let (s, c) = (theta / 2.0).sin_cos();
                let (s, c) = (Complex64::new(s, 0.0), Complex64::new(c, 0.0));
                self.apply_single(*q, [c, -s, s, c]);
            }
            Gate::Rz(q, theta) => {
                self.check_target(*q)?;
                let bit = 1usize << q;
                let lo = Complex64::from_polar(1.0, -theta / 2.0);
                let hi = lo.conj();
                for (i, a) in self.amps.iter_mut().enumerate() {
                    *a *= if i & bit == 0 { lo } else { hi };
                }
            }
            Gate::Cx { control, target } => {
                self.check_target(*control)?;
                self.check_target(*target)?;
                if control == target {
                    return Err(Error::InvalidTarget("CX control and target coincide".into()));
                }
                let (cb, tb) = (1usize << control, 1usize << target);
                for i in 0..self.amps.len() {
                    if i & cb != 0 && i & tb == 0 {
                        self.amps.swap(i, i | tb);
                    }
                }
            }
            Gate::PauliRotation(theta, p) => {
                self.same_size(p.n_qubits())?;
                if p.coeff.im.abs() > 1e-12 {
                    return Err(Error::InvalidArgument("rotation generator must have a real coefficient".into()));
                }
                let angle = theta * p.coeff.re;
                let (s, c) = angle.sin_cos();
                let (x, z) = p.masks();
                let base = i_pow((x & z).count_ones()) * Complex64::new(0.0, -s);
                let old = std::mem::take(&mut self.amps);
                let mut new: Vec<Complex64> = old.iter().map(|a| a * c).collect();
                for (cidx, a) in old.iter().enumerate() {
                    new[cidx ^ x] += base * parity_sign(z & cidx) * a;
                }
                self.amps = new;
            }
        }
        Ok(())
    }

    /// Multiplies amplitude `b` by `exp(-i angle * energies[b])`.
    pub fn apply_diagonal_phase(&mut self, energies: &[f64], angle: f64) -> Result<()> {
        if energies.len() != self.amps.len() {
            return Err(Error::LengthMismatch { expected: self.amps.len(), got: energies.len() });
        }
        for (a, e) in self.amps.iter_mut().zip(energies) {
            *a *= Complex64::from_polar(1.0, -angle * e);
        }
        Ok(())
    }

    /// Population in the span of an orthonormal basis, `sum_k |<basis_k|psi>|^2`.
    pub fn fidelity_to_subspace(&self, basis: &[StateVector]) -> Result<f64> {
        check_orthonormal(basis, 1e-8)?;
        let mut f = 0.0;
        for b in basis {
            f += self.inner(b)?.norm_sqr();
        }
        Ok(f.clamp(0.0, 1.0))
    }

    /// Multinomial draw of `shots` basis outcomes by inverse CDF.
    pub fn sample<R: Rng + ?Sized>(&self, shots: usize, rng: &mut R) -> Result<BTreeMap<usize, usize>> {
        if shots == 0 {
            return Err(Error::InvalidArgument("zero shots requested".into()));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut counts = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
            *counts.entry(idx).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// Errors unless `<b_i|b_j> = delta_ij` within `tol`.
pub fn check_orthonormal(basis: &[StateVector], tol: f64) -> Result<()> {
    let mut worst: f64 = 0.0;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let ip = a.inner(b)?;
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((ip - Complex64::new(target, 0.0)).norm());
        }
    }
    if worst > tol {
        return Err(Error::NonOrthonormal(worst));
    }
    Ok(())
}

/// Formats a basis index as a ket-ordered bitstring, qubit `n-1` first.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits).rev().map(|q| if index >> q & 1 == 1 { '1' } else { '0' }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn plus_states() {
        let s = StateVector::plus_state(1).unwrap();
        assert!(close(s.amplitudes(), &[c(FRAC_1_SQRT_2, 0.0); 2], 1e-15));
        let s = StateVector::plus_state(2).unwrap();
        assert!(close(s.amplitudes(), &[c(0.5, 0.0); 4], 1e-15));
        for n in 1..=10 {
            assert!((StateVector::plus_state(n).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(StateVector::plus_state(0).is_err());
        assert!(StateVector::plus_state(15).is_err());
    }

    #[test]
    fn simple_expectations() {
        let x = PauliSum::uniform_field(1, Pauli::X, 1.0);
        let z = PauliSum::uniform_field(1, Pauli::Z, 1.0);
        let plus = StateVector::plus_state(1).unwrap();
        let zero = StateVector::zero_state(1).unwrap();
        assert!((plus.expectation(&x).unwrap() - 1.0).abs() < 1e-15);
        assert!((zero.expectation(&z).unwrap() - 1.0).abs() < 1e-15);
        assert!(plus.expectation(&z).unwrap().abs() < 1e-15);
        assert!(plus.expectation(&PauliSum::zero(2)).is_err());
    }

    #[test]
    fn gate_examples() {
        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_gate(&Gate::H(0)).unwrap();
        assert!(close(s.amplitudes(), StateVector::plus_state(1).unwrap().amplitudes(), 1e-15));

        // |10> means qubit 1 set.
        let mut s = StateVector::basis(2, 0b10).unwrap();
        s.apply_gate(&Gate::Cx { control: 1, target: 0 }).unwrap();
        assert!(close(s.amplitudes(), StateVector::basis(2, 0b11).unwrap().amplitudes(), 1e-15));

        let mut s = StateVector::zero_state(1).unwrap();
        let x = PauliString::from_letters(1.0, "X").unwrap();
        s.apply_gate(&Gate::PauliRotation(PI / 2.0, x)).unwrap();
        assert!(close(s.amplitudes(), &[c(0.0, 0.0), c(0.0, -1.0)], 1e-15));

        let mut s = StateVector::zero_state(2).unwrap();
        assert!(matches!(s.apply_gate(&Gate::H(2)), Err(Error::InvalidTarget(_))));
        assert!(matches!(s.apply_gate(&Gate::Cx { control: 1, target: 1 }), Err(Error::InvalidTarget(_))));
    }

    #[test]
    fn rotations_match_pauli_exponentials() {
        let theta = 0.37;
        let cases = [(Gate::Rx(1, theta), "IX"), (Gate::Ry(1, theta), "IY"), (Gate::Rz(1, theta), "IZ")];
        let psi0: Vec<Complex64> = (0..4).map(|k| c(0.3 + 0.1 * k as f64, -0.2 * k as f64)).collect();
        for (gate, letters) in cases {
            let mut a = StateVector::from_amplitudes(2, psi0.clone()).unwrap();
            a.apply_gate(&gate).unwrap();
            let mut b = StateVector::from_amplitudes(2, psi0.clone()).unwrap();
            b.apply_gate(&Gate::PauliRotation(theta / 2.0, PauliString::from_letters(1.0, letters).unwrap()))
                .unwrap();
            assert!(close(a.amplitudes(), b.amplitudes(), 1e-14), "{letters}");
        }
    }

    #[test]
    fn subspace_fidelity_examples() {
        let pp = StateVector::plus_state(2).unwrap();
        let basis = vec![StateVector::basis(2, 0b01).unwrap(), StateVector::basis(2, 0b10).unwrap()];
        assert!((pp.fidelity_to_subspace(&basis).unwrap() - 0.5).abs() < 1e-15);
        assert!((pp.fidelity_to_subspace(std::slice::from_ref(&pp)).unwrap() - 1.0).abs() < 1e-15);
        let zero = StateVector::zero_state(2).unwrap();
        assert_eq!(zero.fidelity_to_subspace(&[StateVector::basis(2, 3).unwrap()]).unwrap(), 0.0);
        let bad = vec![zero.clone(), zero.clone()];
        assert!(matches!(pp.fidelity_to_subspace(&bad), Err(Error::NonOrthonormal(_))));
    }

    #[test]
    fn sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = StateVector::zero_state(5).unwrap();
        let counts = zero.sample(1000, &mut rng).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&0], 1000);

        let plus = StateVector::plus_state(1).unwrap();
        let counts = plus.sample(1_000_000, &mut rng).unwrap();
        let sigma = (1e6f64 * 0.25).sqrt();
        for k in [0, 1] {
            assert!((counts[&k] as f64 - 5e5).abs() < 5.0 * sigma);
        }

        let a = plus.sample(500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = plus.sample(500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(plus.sample(0, &mut rng).is_err());
    }

    #[test]
    fn bitstrings_are_ket_ordered() {
        assert_eq!(bitstring(0b01, 2), "01");
        assert_eq!(bitstring(0b110, 3), "110");
    }

    fn random_state(n: usize) -> impl Strategy<Value = StateVector> {
        proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n).prop_map(move |v| {
            let mut s = StateVector::from_amplitudes(n, v.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap();
            s.normalize().unwrap();
            s
        })
    }

    fn random_sum(n: usize) -> impl Strategy<Value = PauliSum> {
        let letter = prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)];
        proptest::collection::vec((proptest::collection::vec(letter, n), -1.0..1.0f64), 1..6).prop_map(move |ts| {
            let terms = ts.into_iter().map(|(l, w)| PauliString::new(c(w, 0.0), l).unwrap()).collect();
            PauliSum::from_terms(n, terms).unwrap()
        })
    }

    fn random_gate(n: usize) -> impl Strategy<Value = Gate> {
        (0..6usize, 0..n, 0..n, -3.0..3.0f64).prop_map(move |(k, a, b, t)| {
            let b = if a == b { (a + 1) % n } else { b };
            match k {
                0 => Gate::H(a),
                1 => Gate::Rx(a, t),
                2 => Gate::Ry(a, t),
                3 => Gate::Rz(a, t),
                4 if n > 1 => Gate::Cx { control: a, target: b },
                _ => Gate::PauliRotation(t, PauliString::pair(n.max(2), a, Pauli::X, b, Pauli::Y, 1.0)),
            }
        })
    }

    proptest! {
        #[test]
        fn termwise_expectation_matches_dense((s, h) in (1usize..=4).prop_flat_map(|n| (random_state(n), random_sum(n)))) {
            let a = s.expectation(&h).unwrap();
            let b = s.expectation_dense(&h).unwrap();
            prop_assert!((a - b).abs() < 1e-10);
            let op = h.compile();
            prop_assert!((s.expectation_op(&op).unwrap() - a).abs() < 1e-10);
        }

        #[test]
        fn gates_preserve_norm((s, gates) in (2usize..=4).prop_flat_map(|n| (random_state(n), proptest::collection::vec(random_gate(n), 1..200)))) {
            let mut s = s;
            for g in &gates {
                let before = s.norm();
                s.apply_gate(g).unwrap();
                prop_assert!((s.norm() - before).abs() < 1e-12);
            }
            prop_assert!((s.norm() - 1.0).abs() < 1e-8);
        }

        #[test]
        fn fidelity_invariant_under_basis_rotation(s in random_state(3), t in -3.0..3.0f64, phi in -3.0..3.0f64) {
            let e0 = StateVector::basis(3, 1).unwrap();
            let e1 = StateVector::basis(3, 6).unwrap();
            let f = s.fidelity_to_subspace(&[e0.clone(), e1.clone()]).unwrap();
            let (st, ct) = t.sin_cos();
            let ph = Complex64::from_polar(1.0, phi);
            let mix = |a: Complex64, b: Complex64| -> StateVector {
                let amps = e0.amplitudes().iter().zip(e1.amplitudes()).map(|(x, y)| a * x + b * y).collect();
                StateVector::from_amplitudes(3, amps).unwrap()
            };
            let r0 = mix(c(ct, 0.0), ph * st);
            let r1 = mix(c(-st, 0.0), ph * ct);
            let g = s.fidelity_to_subspace(&[r0, r1]).unwrap();
            prop_assert!((f - g).abs() < 1e-9);
        }
    }
}
