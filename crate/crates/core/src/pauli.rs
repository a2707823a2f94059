//! Pauli strings and weighted Pauli sums.
//!
//! Basis convention used everywhere in the crate: qubit `i` is bit `i` of the
//! basis index (qubit 0 least significant), and `Z|0> = +|0>`. A string's
//! `letters[i]` acts on qubit `i`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Terms whose coefficient magnitude falls below this are dropped by `simplify`.
pub const DROP_TOLERANCE: f64 = 1e-12;

/// Largest qubit count for which dense matrices and state vectors are built.
pub const MAX_DENSE_QUBITS: usize = 14;

const IMAG: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Single-qubit product `self * rhs` as `(phase, letter)`.
    pub fn product(self, rhs: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (ONE, p),
            (X, X) | (Y, Y) | (Z, Z) => (ONE, I),
            (X, Y) => (IMAG, Z),
            (Y, Z) => (IMAG, X),
            (Z, X) => (IMAG, Y),
            (Y, X) => (-IMAG, Z),
            (Z, Y) => (-IMAG, X),
            (X, Z) => (-IMAG, Y),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Result<Pauli> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::Parse(format!("invalid Pauli letter '{other}'"))),
        }
    }
}

/// A coefficient times a tensor product of single-qubit Paulis.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliString {
    pub coeff: Complex64,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(coeff: Complex64, letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidArgument("Pauli string needs at least one qubit".into()));
        }
        if letters.len() > 64 {
            return Err(Error::InvalidArgument("at most 64 qubits supported".into()));
        }
        Ok(Self { coeff, letters })
    }

    /// Parses letters written qubit 0 first, e.g. `"ZIX"` is Z on qubit 0 and X on qubit 2.
    pub fn from_letters(coeff: impl Into<Complex64>, letters: &str) -> Result<Self> {
        let letters = letters.chars().map(Pauli::from_char).collect::<Result<Vec<_>>>()?;
        Self::new(coeff.into(), letters)
    }

    pub fn identity(n: usize) -> Self {
        Self { coeff: ONE, letters: vec![Pauli::I; n.max(1)] }
    }

    /// `coeff` times `p` acting on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, p: Pauli, coeff: f64) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[qubit] = p;
        Self { coeff: Complex64::new(coeff, 0.0), letters }
    }

    /// `coeff` times `p_a` on `a` and `p_b` on `b`.
    pub fn pair(n: usize, a: usize, p_a: Pauli, b: usize, p_b: Pauli, coeff: f64) -> Self {
        let mut letters = vec![Pauli::I; n];
        letters[a] = p_a;
        letters[b] = p_b;
        Self { coeff: Complex64::new(coeff, 0.0), letters }
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Bit masks of the X-type (X or Y) and Z-type (Z or Y) positions.
    pub fn masks(&self) -> (usize, usize) {
        let mut x = 0usize;
        let mut z = 0usize;
        for (i, p) in self.letters.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => x |= 1 << i,
                Pauli::Y => {
                    x |= 1 << i;
                    z |= 1 << i;
                }
                Pauli::Z => z |= 1 << i,
            }
        }
        (x, z)
    }

    pub fn is_diagonal(&self) -> bool {
        self.letters.iter().all(|p| matches!(p, Pauli::I | Pauli::Z))
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|p| *p == Pauli::I)
    }

    pub fn mul(&self, rhs: &PauliString) -> Result<PauliString> {
        if self.n_qubits() != rhs.n_qubits() {
            return Err(Error::QubitMismatch { left: self.n_qubits(), right: rhs.n_qubits() });
        }
        let mut coeff = self.coeff * rhs.coeff;
        let letters = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .map(|(a, b)| {
                let (phase, p) = a.product(*b);
                coeff *= phase;
                p
            })
            .collect();
        Ok(PauliString { coeff, letters })
    }

    pub fn scaled(&self, factor: Complex64) -> PauliString {
        PauliString { coeff: self.coeff * factor, letters: self.letters.clone() }
    }

    pub fn letters_string(&self) -> String {
        self.letters.iter().map(|p| p.as_char()).collect()
    }
}

fn fmt_real(x: f64) -> String {
    // `{:?}` gives the shortest round-trip form and always keeps a decimal point.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:?}")
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{} {}", fmt_real(self.coeff.re), fmt_real(self.coeff.im), self.letters_string())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split_whitespace();
        let (coeff, letters) = match (parts.next(), parts.next(), parts.next()) {
            (Some(c), Some(l), None) => (c, l),
            _ => return Err(Error::Parse(format!("expected '<re>,<im> <letters>', got '{s}'"))),
        };
        let (re, im) = coeff
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("coefficient '{coeff}' is not '<re>,<im>'")))?;
        let re: f64 = re.parse().map_err(|_| Error::Parse(format!("bad real part '{re}'")))?;
        let im: f64 = im.parse().map_err(|_| Error::Parse(format!("bad imaginary part '{im}'")))?;
        PauliString::from_letters(Complex64::new(re, im), letters)
    }
}

/// A weighted sum of Pauli strings over a fixed number of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliString>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<PauliString>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("Pauli sum needs at least one qubit".into()));
        }
        for t in &terms {
            if t.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch { left: n_qubits, right: t.n_qubits() });
            }
        }
        Ok(Self { n_qubits, terms })
    }

    /// `coeff * I`.
    pub fn constant(n_qubits: usize, coeff: f64) -> Self {
        Self { n_qubits, terms: vec![PauliString::identity(n_qubits).scaled(coeff.into())] }
    }

    /// `sum_i coeff * P_i` for the same single-qubit Pauli on every qubit.
    pub fn uniform_field(n_qubits: usize, p: Pauli, coeff: f64) -> Self {
        let terms = (0..n_qubits).map(|q| PauliString::single(n_qubits, q, p, coeff)).collect();
        Self { n_qubits, terms }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: PauliString) -> Result<()> {
        if term.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch { left: self.n_qubits, right: term.n_qubits() });
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn plus(&self, rhs: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != rhs.n_qubits {
            return Err(Error::QubitMismatch { left: self.n_qubits, right: rhs.n_qubits });
        }
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        Ok(PauliSum { n_qubits: self.n_qubits, terms }.simplify())
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        let terms = self.terms.iter().map(|t| t.scaled(factor.into())).collect();
        PauliSum { n_qubits: self.n_qubits, terms }
    }

    /// Operator product, simplified.
    pub fn product(&self, rhs: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != rhs.n_qubits {
            return Err(Error::QubitMismatch { left: self.n_qubits, right: rhs.n_qubits });
        }
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                terms.push(a.mul(b)?);
            }
        }
        Ok(PauliSum { n_qubits: self.n_qubits, terms }.simplify())
    }

    /// Merges equal letter arrays, drops near-zero terms and sorts terms
    /// lexicographically by letters (I < X < Y < Z, qubit 0 first).
    pub fn simplify(&self) -> PauliSum {
        let mut sorted: Vec<PauliString> = self.terms.clone();
        sorted.sort_by(|a, b| a.letters.cmp(&b.letters));
        let mut merged: Vec<PauliString> = Vec::with_capacity(sorted.len());
        for t in sorted {
            match merged.last_mut() {
                Some(last) if last.letters == t.letters => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.norm() >= DROP_TOLERANCE);
        PauliSum { n_qubits: self.n_qubits, terms: merged }
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(PauliString::is_diagonal)
    }

    /// True when every coefficient of the simplified sum is real to within `DROP_TOLERANCE`.
    pub fn is_hermitian(&self) -> bool {
        self.simplify().terms.iter().all(|t| t.coeff.im.abs() < DROP_TOLERANCE)
    }

    /// Coefficient of the identity string (the trace divided by the dimension).
    pub fn identity_coefficient(&self) -> Complex64 {
        self.terms.iter().filter(|t| t.is_identity()).map(|t| t.coeff).sum()
    }

    /// The sum restricted to its I/Z-only terms.
    pub fn diagonal_part(&self) -> PauliSum {
        let terms = self.terms.iter().filter(|t| t.is_diagonal()).cloned().collect();
        PauliSum { n_qubits: self.n_qubits, terms }
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::DenseGuard { n: self.n_qubits, max: MAX_DENSE_QUBITS });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            let (x, z) = t.masks();
            let base = t.coeff * i_pow((x & z).count_ones());
            for c in 0..dim {
                m[(c ^ x, c)] += base * parity_sign(z & c);
            }
        }
        Ok(m)
    }

    /// Diagonal entries `<b|H|b>` for every basis state. Off-diagonal terms are ignored.
    pub fn diagonal_values(&self) -> Result<Vec<f64>> {
        if self.n_qubits > MAX_DENSE_QUBITS + 10 {
            return Err(Error::DenseGuard { n: self.n_qubits, max: MAX_DENSE_QUBITS + 10 });
        }
        let dim = 1usize << self.n_qubits;
        let mut diag = vec![0.0; dim];
        for t in self.terms.iter().filter(|t| t.is_diagonal()) {
            let (_, z) = t.masks();
            for (b, d) in diag.iter_mut().enumerate() {
                *d += t.coeff.re * parity_sign(z & b);
            }
        }
        Ok(diag)
    }

    /// Canonical text form, one `<re>,<im> <letters>` term per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(n_qubits: usize, text: &str) -> Result<PauliSum> {
        let terms = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(PauliString::from_str)
            .collect::<Result<Vec<_>>>()?;
        PauliSum::from_terms(n_qubits, terms)
    }

    pub fn compile(&self) -> PauliOperator {
        PauliOperator::new(self)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[inline]
pub(crate) fn parity_sign(bits: usize) -> f64 {
    if bits.count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[inline]
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k & 3 {
        0 => ONE,
        1 => IMAG,
        2 => -ONE,
        _ => -IMAG,
    }
}

/// A Pauli sum prepared for repeated application to state vectors.
///
/// Terms are grouped by X-mask: for each group `(H psi)[b] += phase[b] * psi[b ^ x]`.
#[derive(Clone, Debug)]
pub struct PauliOperator {
    n_qubits: usize,
    diagonal: Option<Vec<Complex64>>,
    flips: Vec<(usize, Vec<Complex64>)>,
}

impl PauliOperator {
    pub fn new(h: &PauliSum) -> Self {
        let n = h.n_qubits();
        let dim = 1usize << n;
        let mut diagonal: Option<Vec<Complex64>> = None;
        let mut flips: Vec<(usize, Vec<Complex64>)> = Vec::new();
        for t in h.terms() {
            let (x, z) = t.masks();
            let base = t.coeff * i_pow((x & z).count_ones());
            let slot = if x == 0 {
                diagonal.get_or_insert_with(|| vec![Complex64::default(); dim])
            } else {
                match flips.iter().position(|(m, _)| *m == x) {
                    Some(k) => &mut flips[k].1,
                    None => {
                        flips.push((x, vec![Complex64::default(); dim]));
                        &mut flips.last_mut().expect("just pushed").1
                    }
                }
            };
            for (b, v) in slot.iter_mut().enumerate() {
                *v += base * parity_sign(z & (b ^ x));
            }
        }
        flips.sort_by_key(|(m, _)| *m);
        Self { n_qubits: n, diagonal, flips }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn is_diagonal(&self) -> bool {
        self.flips.is_empty()
    }

    pub fn diagonal(&self) -> Option<&[Complex64]> {
        self.diagonal.as_deref()
    }

    /// `out += scale * H psi`.
    pub fn apply_add(&self, scale: Complex64, psi: &[Complex64], out: &mut [Complex64]) {
        if let Some(d) = &self.diagonal {
            for ((o, p), d) in out.iter_mut().zip(psi).zip(d) {
                *o += scale * d * p;
            }
        }
        for (x, phase) in &self.flips {
            for (b, (o, ph)) in out.iter_mut().zip(phase).enumerate() {
                *o += scale * ph * psi[b ^ x];
            }
        }
    }

    /// `out = H psi`.
    pub fn apply(&self, psi: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::default());
        self.apply_add(ONE, psi, out);
    }

    /// `<psi|H|psi>` without normalization.
    pub fn expectation_raw(&self, psi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::default();
        if let Some(d) = &self.diagonal {
            for (p, d) in psi.iter().zip(d) {
                acc += p.norm_sqr() * d;
            }
        }
        for (x, phase) in &self.flips {
            for (b, (p, ph)) in psi.iter().zip(phase).enumerate() {
                acc += p.conj() * ph * psi[b ^ x];
            }
        }
        acc
    }

    /// Real part of the diagonal and off-diagonal absolute row sums, the
    /// ingredients of a Gershgorin bound on the spectrum.
    pub fn row_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let dim = self.dim();
        let diag = match &self.diagonal {
            Some(d) => d.iter().map(|v| v.re).collect(),
            None => vec![0.0; dim],
        };
        let mut off = vec![0.0; dim];
        for (_, ph) in &self.flips {
            for (o, p) in off.iter_mut().zip(ph) {
                *o += p.norm();
            }
        }
        (diag, off)
    }

    /// Max absolute row sum, an upper bound on the operator 2-norm.
    pub fn norm_bound(&self) -> f64 {
        let dim = self.dim();
        (0..dim)
            .map(|b| {
                let mut s = self.diagonal.as_ref().map_or(0.0, |d| d[b].norm());
                for (_, ph) in &self.flips {
                    s += ph[b].norm();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_qubit_products() {
        // Ket-order X⊗I: letters [I, X].
        let x = PauliString::from_letters(1.0, "IX").unwrap();
        let z = PauliString::from_letters(1.0, "IZ").unwrap();
        let p = x.mul(&z).unwrap();
        assert_eq!(p.letters_string(), "IY");
        assert_eq!(p.coeff, c(0.0, -1.0));

        let x1 = PauliString::from_letters(1.0, "X").unwrap();
        let p = x1.mul(&x1).unwrap();
        assert_eq!(p.letters_string(), "I");
        assert_eq!(p.coeff, c(1.0, 0.0));

        let a = PauliString::from_letters(2.0, "IZ").unwrap();
        let b = PauliString::from_letters(3.0, "XZ").unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.letters_string(), "XI");
        assert_eq!(p.coeff, c(6.0, 0.0));
    }

    #[test]
    fn mul_rejects_mismatched_sizes() {
        let a = PauliString::from_letters(1.0, "X").unwrap();
        let b = PauliString::from_letters(1.0, "XX").unwrap();
        assert!(matches!(a.mul(&b), Err(Error::QubitMismatch { .. })));
    }

    #[test]
    fn simplify_merges_and_cancels() {
        let z = PauliString::from_letters(1.0, "Z").unwrap();
        let s = PauliSum::from_terms(1, vec![z.clone(), z.clone()]).unwrap().simplify();
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.terms()[0].coeff, c(2.0, 0.0));

        let s = PauliSum::from_terms(1, vec![z.clone(), z.scaled(c(-1.0, 0.0))]).unwrap().simplify();
        assert!(s.is_empty());

        let zi = PauliString::from_letters(1.0, "IZ").unwrap();
        let iz = PauliString::from_letters(1.0, "ZI").unwrap();
        let s = PauliSum::from_terms(2, vec![zi.clone(), iz.clone(), zi.clone()]).unwrap().simplify();
        assert_eq!(s.to_text(), "2.0,0.0 IZ\n1.0,0.0 ZI\n");
    }

    #[test]
    fn dense_realizations() {
        let z = PauliSum::from_terms(1, vec![PauliString::from_letters(1.0, "Z").unwrap()]).unwrap();
        let m = z.to_matrix().unwrap();
        assert_eq!(m[(0, 0)], c(1.0, 0.0));
        assert_eq!(m[(1, 1)], c(-1.0, 0.0));
        assert_eq!(m[(0, 1)], c(0.0, 0.0));

        let zero = PauliSum::zero(2).to_matrix().unwrap();
        assert!(zero.iter().all(|v| *v == c(0.0, 0.0)));
        assert_eq!(zero.nrows(), 4);

        let mix = PauliSum::uniform_field(2, Pauli::X, 1.0).to_matrix().unwrap();
        for r in 0..4usize {
            for col in 0..4usize {
                let expect = if (r ^ col).count_ones() == 1 { 1.0 } else { 0.0 };
                assert_eq!(mix[(r, col)], c(expect, 0.0));
            }
        }
        assert!(matches!(PauliSum::zero(15).to_matrix(), Err(Error::DenseGuard { .. })));
    }

    #[test]
    fn diagonal_detection() {
        let zz = PauliString::pair(3, 0, Pauli::Z, 2, Pauli::Z, 0.5);
        let h = PauliSum::from_terms(3, vec![PauliString::identity(3).scaled(c(-0.5, 0.0)), zz]).unwrap();
        assert!(h.is_diagonal());
        assert!(!PauliSum::uniform_field(3, Pauli::X, 1.0).is_diagonal());
        assert!(PauliSum::zero(3).is_diagonal());
    }

    #[test]
    fn text_round_trip() {
        let t: PauliString = "0.5,0.0 ZIIZI".parse().unwrap();
        assert_eq!(t.to_string(), "0.5,0.0 ZIIZI");
        let t: PauliString = "-0.0,-1.25 XY".parse().unwrap();
        assert_eq!(t.to_string(), "0.0,-1.25 XY");
        assert!("1.0 XQ".parse::<PauliString>().is_err());
        assert!("1.0,0.0".parse::<PauliString>().is_err());
    }

    #[test]
    fn compiled_operator_matches_dense() {
        let h = PauliSum::from_text(
            3,
            "0.3,0.0 XYZ\n-1.1,0.0 ZZI\n0.7,0.0 IYY\n0.25,0.0 XXI\n0.5,0.0 III\n",
        )
        .unwrap();
        let op = h.compile();
        let m = h.to_matrix().unwrap();
        let psi: Vec<Complex64> = (0..8).map(|k| c(0.1 * k as f64, 0.3 - 0.05 * k as f64)).collect();
        let mut out = vec![Complex64::default(); 8];
        op.apply(&psi, &mut out);
        for r in 0..8 {
            let want: Complex64 = (0..8).map(|k| m[(r, k)] * psi[k]).sum();
            assert!((want - out[r]).norm() < 1e-12);
        }
    }

    fn letter() -> impl Strategy<Value = Pauli> {
        prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
    }

    fn string(n: usize) -> impl Strategy<Value = PauliString> {
        (proptest::collection::vec(letter(), n), -2.0..2.0f64, -2.0..2.0f64)
            .prop_map(|(l, re, im)| PauliString::new(c(re, im), l).unwrap())
    }

    fn sum_of(n: usize) -> impl Strategy<Value = PauliSum> {
        proptest::collection::vec(string(n), 0..8)
            .prop_map(move |ts| PauliSum::from_terms(n, ts).unwrap())
    }

    fn dense(s: &PauliString) -> DMatrix<Complex64> {
        PauliSum::from_terms(s.n_qubits(), vec![s.clone()]).unwrap().to_matrix().unwrap()
    }

    proptest! {
        #[test]
        fn product_matches_matrix_product((a, b, c3) in (1usize..=4).prop_flat_map(|n| (string(n), string(n), string(n)))) {
            let ab = a.mul(&b).unwrap();
            prop_assert!((ab.coeff.norm() - a.coeff.norm() * b.coeff.norm()).abs() < 1e-12);
            let lhs = dense(&ab);
            let rhs = dense(&a) * dense(&b);
            prop_assert!((lhs - rhs).iter().all(|v| v.norm() < 1e-12));
            let left = ab.mul(&c3).unwrap();
            let right = a.mul(&b.mul(&c3).unwrap()).unwrap();
            prop_assert_eq!(left.letters(), right.letters());
            prop_assert!((left.coeff - right.coeff).norm() < 1e-12);
        }

        #[test]
        fn real_sums_are_hermitian(h in (1usize..=4).prop_flat_map(sum_of)) {
            let real_terms: Vec<_> = h.terms().iter().map(|t| PauliString::new(c(t.coeff.re, 0.0), t.letters().to_vec()).unwrap()).collect();
            let h = PauliSum::from_terms(h.n_qubits(), real_terms).unwrap();
            let m = h.to_matrix().unwrap();
            prop_assert!((m.clone() - m.adjoint()).iter().all(|v| v.norm() < 1e-12));
            prop_assert!(h.is_hermitian());
        }

        #[test]
        fn simplify_is_idempotent(h in (1usize..=4).prop_flat_map(sum_of)) {
            let once = h.simplify();
            let twice = once.simplify();
            prop_assert_eq!(&once, &twice);
            let mut seen = std::collections::HashSet::new();
            for t in once.terms() {
                prop_assert!(t.coeff.norm() >= DROP_TOLERANCE);
                prop_assert!(seen.insert(t.letters().to_vec()));
            }
        }
    }
}
