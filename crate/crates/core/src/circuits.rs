//! Parameterized circuits: the QAOA alternating ansatz and the
//! hardware-efficient SU(2) ansatz, with state Jacobians.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::HermitianEigen;
use crate::pauli::{i_pow, parity_sign, Pauli, PauliString, PauliSum};
use crate::statevector::{Gate, StateVector};
use crate::{Error, Result};

/// Default finite-difference step for [`ParamCircuit::state_jacobian`].
pub const JACOBIAN_EPS: f64 = 1e-6;

/// One circuit operation; parameterized rotations are `exp(-i theta_j G / 2)`
/// for the generator `G` (a single-qubit Pauli or a unit Pauli string).
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Fixed(Gate),
    Rx { qubit: usize, param: usize },
    Ry { qubit: usize, param: usize },
    Rz { qubit: usize, param: usize },
    Pauli { string: PauliString, param: usize },
}

impl Op {
    fn param(&self) -> Option<usize> {
        match self {
            Op::Fixed(_) => None,
            Op::Rx { param, .. } | Op::Ry { param, .. } | Op::Rz { param, .. } | Op::Pauli { param, .. } => Some(*param),
        }
    }

    fn gate(&self, theta: &[f64]) -> Gate {
        match self {
            Op::Fixed(g) => g.clone(),
            Op::Rx { qubit, param } => Gate::Rx(*qubit, theta[*param]),
            Op::Ry { qubit, param } => Gate::Ry(*qubit, theta[*param]),
            Op::Rz { qubit, param } => Gate::Rz(*qubit, theta[*param]),
            Op::Pauli { string, param } => Gate::PauliRotation(0.5 * theta[*param], string.clone()),
        }
    }

    /// `out = G psi` for the rotation generator.
    fn apply_generator(&self, n: usize, psi: &[Complex64], out: &mut [Complex64]) {
        let string = match self {
            Op::Fixed(_) => unreachable!("fixed gates have no generator"),
            Op::Rx { qubit, .. } => PauliString::single(n, *qubit, Pauli::X, 1.0),
            Op::Ry { qubit, .. } => PauliString::single(n, *qubit, Pauli::Y, 1.0),
            Op::Rz { qubit, .. } => PauliString::single(n, *qubit, Pauli::Z, 1.0),
            Op::Pauli { string, .. } => string.clone(),
        };
        let (x, z) = string.masks();
        let base = string.coeff * i_pow((x & z).count_ones());
        for (c, a) in psi.iter().enumerate() {
            out[c ^ x] = base * parity_sign(z & c) * a;
        }
    }
}

/// A gate sequence applied to `|0...0>` with `parameter_count` real parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamCircuit {
    n_qubits: usize,
    ops: Vec<Op>,
    parameter_count: usize,
}

impl ParamCircuit {
    /// Validates qubit indices and that every parameter index is in range and used.
    pub fn new(n_qubits: usize, ops: Vec<Op>, parameter_count: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::pauli::MAX_DENSE_QUBITS {
            return Err(Error::DenseGuard { n: n_qubits, max: crate::pauli::MAX_DENSE_QUBITS });
        }
        let mut used = vec![false; parameter_count];
        for op in &ops {
            let qubits_ok = match op {
                Op::Fixed(Gate::H(q) | Gate::X(q) | Gate::Rx(q, _) | Gate::Ry(q, _) | Gate::Rz(q, _)) => *q < n_qubits,
                Op::Fixed(Gate::Cx { control, target }) => {
                    *control < n_qubits && *target < n_qubits && control != target
                }
                Op::Fixed(Gate::PauliRotation(_, s)) => s.n_qubits() == n_qubits,
                Op::Rx { qubit, .. } | Op::Ry { qubit, .. } | Op::Rz { qubit, .. } => *qubit < n_qubits,
                Op::Pauli { string, .. } => {
                    string.n_qubits() == n_qubits && string.coeff == Complex64::new(1.0, 0.0) && !string.is_identity()
                }
            };
            if !qubits_ok {
                return Err(Error::InvalidArgument(format!("invalid operation {op:?}")));
            }
            if let Some(j) = op.param() {
                if j >= parameter_count {
                    return Err(Error::InvalidArgument(format!("parameter index {j} >= {parameter_count}")));
                }
                used[j] = true;
            }
        }
        if let Some(j) = used.iter().position(|u| !u) {
            return Err(Error::UnusedParameter(j));
        }
        Ok(Self { n_qubits, ops, parameter_count })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn parameter_count(&self) -> usize {
        self.parameter_count
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.parameter_count {
            return Err(Error::LengthMismatch { expected: self.parameter_count, got: theta.len() });
        }
        Ok(())
    }

    pub fn evaluate(&self, theta: &[f64]) -> Result<StateVector> {
        self.check_theta(theta)?;
        let mut s = StateVector::zero_state(self.n_qubits)?;
        for op in &self.ops {
            s.apply_gate(&op.gate(theta))?;
        }
        Ok(s)
    }

    /// Central-difference Jacobian of the amplitudes, one column per parameter.
    pub fn state_jacobian(&self, theta: &[f64], eps: f64) -> Result<DMatrix<Complex64>> {
        self.check_theta(theta)?;
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::InvalidArgument("eps must be positive".into()));
        }
        let dim = 1usize << self.n_qubits;
        let mut jac = DMatrix::zeros(dim, self.parameter_count);
        let mut shifted = theta.to_vec();
        for j in 0..self.parameter_count {
            shifted[j] = theta[j] + eps;
            let plus = self.evaluate(&shifted)?;
            shifted[j] = theta[j] - eps;
            let minus = self.evaluate(&shifted)?;
            shifted[j] = theta[j];
            for (r, (a, b)) in plus.amplitudes().iter().zip(minus.amplitudes()).enumerate() {
                jac[(r, j)] = (a - b) / (2.0 * eps);
            }
        }
        Ok(jac)
    }

    /// Exact Jacobian by forward propagation of the generator insertions,
    /// together with the state itself.
    pub fn state_and_jacobian(&self, theta: &[f64]) -> Result<(StateVector, DMatrix<Complex64>)> {
        self.check_theta(theta)?;
        let n = self.n_qubits;
        let dim = 1usize << n;
        let mut psi = StateVector::zero_state(n)?;
        let mut columns: Vec<Option<StateVector>> = vec![None; self.parameter_count];
        let mut scratch = vec![Complex64::default(); dim];
        let half_i = Complex64::new(0.0, -0.5);
        for op in &self.ops {
            let gate = op.gate(theta);
            psi.apply_gate(&gate)?;
            for col in columns.iter_mut().flatten() {
                col.apply_gate(&gate)?;
            }
            if let Some(j) = op.param() {
                op.apply_generator(n, psi.amplitudes(), &mut scratch);
                match &mut columns[j] {
                    Some(col) => {
                        for (c, g) in col.amplitudes_mut().iter_mut().zip(&scratch) {
                            *c += half_i * g;
                        }
                    }
                    slot @ None => {
                        let amps = scratch.iter().map(|g| half_i * g).collect();
                        *slot = Some(StateVector::from_amplitudes(n, amps)?);
                    }
                }
            }
        }
        let mut jac = DMatrix::zeros(dim, self.parameter_count);
        for (j, col) in columns.iter().enumerate() {
            let col = col.as_ref().expect("every parameter is used");
            for (r, a) in col.amplitudes().iter().enumerate() {
                jac[(r, j)] = *a;
            }
        }
        Ok((psi, jac))
    }
}

/// Hardware-efficient SU(2) ansatz: Hadamards, then `reps` blocks of
/// `[RY each qubit, RZ each qubit, CX chain i -> i+1]`, then a final
/// `[RY, RZ]` layer; `2 n (reps + 1)` parameters in order of appearance.
pub fn su2_ansatz(n: usize, reps: usize) -> Result<ParamCircuit> {
    if n < 1 || reps < 1 {
        return Err(Error::InvalidArgument("SU(2) ansatz needs n >= 1 and reps >= 1".into()));
    }
    let mut ops: Vec<Op> = (0..n).map(|q| Op::Fixed(Gate::H(q))).collect();
    let mut param = 0;
    let mut rotation_layer = |ops: &mut Vec<Op>| {
        for qubit in 0..n {
            ops.push(Op::Ry { qubit, param });
            param += 1;
        }
        for qubit in 0..n {
            ops.push(Op::Rz { qubit, param });
            param += 1;
        }
    };
    for _ in 0..reps {
        rotation_layer(&mut ops);
        for q in 0..n.saturating_sub(1) {
            ops.push(Op::Fixed(Gate::Cx { control: q, target: q + 1 }));
        }
    }
    rotation_layer(&mut ops);
    ParamCircuit::new(n, ops, 2 * n * (reps + 1))
}

/// The QAOA phase separator `exp(-i gamma H_prob)`.
#[derive(Clone, Debug)]
pub enum PhaseSeparator {
    /// Exact elementwise phases from the diagonal of a classical Hamiltonian.
    Diagonal(Vec<f64>),
    /// Dense spectral exponential for non-diagonal Hamiltonians.
    Dense(HermitianEigen),
}

impl PhaseSeparator {
    pub fn diagonal(h: &PauliSum) -> Result<Self> {
        if !h.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        Ok(Self::Diagonal(h.diagonal_values()?))
    }

    /// Diagonal when possible, otherwise a dense eigendecomposition (N <= 12).
    pub fn for_hamiltonian(h: &PauliSum) -> Result<Self> {
        if h.is_diagonal() {
            return Self::diagonal(h);
        }
        if h.n_qubits() > crate::problems::MAX_EXACT_QUBITS {
            return Err(Error::DenseGuard { n: h.n_qubits(), max: crate::problems::MAX_EXACT_QUBITS });
        }
        Ok(Self::Dense(HermitianEigen::new(h.to_matrix()?)?))
    }

    pub fn is_dense(&self) -> bool {
        matches!(self, PhaseSeparator::Dense(_))
    }

    fn apply(&self, s: &mut StateVector, gamma: f64) -> Result<()> {
        match self {
            PhaseSeparator::Diagonal(e) => s.apply_diagonal_phase(e, gamma),
            PhaseSeparator::Dense(eig) => {
                let out = eig.apply_fn(s.amplitudes(), |l| Complex64::from_polar(1.0, -gamma * l));
                s.amplitudes_mut().copy_from_slice(&out);
                Ok(())
            }
        }
    }
}

/// QAOA state: `|+>^n`, then for each layer `exp(-i gamma_k H)` followed by
/// `RX(2 beta_k)` on every qubit.
pub fn qaoa_state_with(
    n: usize,
    phase: &PhaseSeparator,
    gammas: &[f64],
    betas: &[f64],
) -> Result<StateVector> {
    if gammas.len() != betas.len() {
        return Err(Error::LengthMismatch { expected: gammas.len(), got: betas.len() });
    }
    let mut s = StateVector::plus_state(n)?;
    for (&g, &b) in gammas.iter().zip(betas) {
        phase.apply(&mut s, g)?;
        for q in 0..n {
            s.apply_gate(&Gate::Rx(q, 2.0 * b))?;
        }
    }
    Ok(s)
}

/// QAOA state for a diagonal (classical) problem Hamiltonian.
pub fn qaoa_state(h_prob: &PauliSum, gammas: &[f64], betas: &[f64]) -> Result<StateVector> {
    qaoa_state_with(h_prob.n_qubits(), &PhaseSeparator::diagonal(h_prob)?, gammas, betas)
}
