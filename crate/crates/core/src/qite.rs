//! Imaginary-time solvers on a quantum-circuit footing: the ansatz-based
//! McLachlan projection and the ansatz-free unitary fit, each with a constant
//! Hamiltonian (QITE) or the annealing schedule (ITQA).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{su2_ansatz, ParamCircuit, JACOBIAN_EPS};
use crate::dynamics::{qa_schedule, step_count, Observer, Recorder, Schedule, Trajectory};
use crate::linalg::{exp_action, solve_regularized};
use crate::pauli::{Pauli, PauliOperator, PauliString, PauliSum};
use crate::problems::GroundTruth;
use crate::statevector::StateVector;
use crate::variational::near_zero_parameters;
use crate::{Error, Result};

/// Default Tikhonov regularization of the normal equations.
pub const DEFAULT_LAMBDA: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QiteMode {
    AnsatzBased,
    AnsatzFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    /// Constant problem Hamiltonian (QITE).
    Constant,
    /// Annealing interpolation from `-sum X` (ITQA).
    Qa,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianMethod {
    /// Forward propagation of generator insertions.
    #[default]
    Analytic,
    /// Central differences with step [`JACOBIAN_EPS`].
    FiniteDifference,
}

/// Pauli strings available to the ansatz-free fit.
#[derive(Clone, Debug, PartialEq)]
pub enum AfBasis {
    /// All `4^n - 1` non-identity strings, handled in closed form.
    Complete,
    /// Explicit Hermitian unit-coefficient strings.
    Strings(Vec<PauliString>),
}

impl AfBasis {
    pub fn size(&self, n: usize) -> usize {
        match self {
            AfBasis::Complete => (1usize << (2 * n)) - 1,
            AfBasis::Strings(s) => s.len(),
        }
    }

    /// Every non-identity string on `n` qubits, in canonical order.
    pub fn all_strings(n: usize) -> Vec<PauliString> {
        let letters = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        (1..1usize << (2 * n))
            .map(|code| {
                let word = (0..n).map(|q| letters[code >> (2 * (n - 1 - q)) & 3]).collect();
                PauliString::new(Complex64::new(1.0, 0.0), word).expect("valid letters")
            })
            .collect()
    }

    fn validate(&self, n: usize) -> Result<()> {
        if let AfBasis::Strings(strings) = self {
            if strings.is_empty() {
                return Err(Error::InvalidArgument("ansatz-free basis is empty".into()));
            }
            let mut seen = std::collections::HashSet::new();
            for s in strings {
                if s.n_qubits() != n {
                    return Err(Error::QubitMismatch { left: n, right: s.n_qubits() });
                }
                if s.coeff != Complex64::new(1.0, 0.0) || s.is_identity() {
                    return Err(Error::InvalidArgument(format!(
                        "basis strings must be non-identity with unit coefficient, got {s}"
                    )));
                }
                if !seen.insert(s.letters_string()) {
                    return Err(Error::InvalidArgument(format!("duplicate basis string {}", s.letters_string())));
                }
            }
        }
        Ok(())
    }
}

/// Normalized `exp(-dt H) psi`, computed exactly for diagonal `H` and by a
/// converged Taylor series otherwise (with `H` shifted by its expectation).
pub fn imaginary_time_target(s: &StateVector, op: &PauliOperator, dt: f64) -> Result<StateVector> {
    let e = s.expectation_op(op)?;
    let amps = match op.diagonal().filter(|_| op.is_diagonal()) {
        Some(d) => s.amplitudes().iter().zip(d).map(|(a, d)| a * (-dt * (d.re - e)).exp()).collect(),
        None if op.is_diagonal() => s.amplitudes().to_vec(),
        None => exp_action(
            |v, out| {
                op.apply(v, out);
                for (o, x) in out.iter_mut().zip(v) {
                    *o -= e * x;
                }
            },
            op.norm_bound() + e.abs(),
            Complex64::new(-dt, 0.0),
            s.amplitudes(),
        ),
    };
    let mut target = StateVector::from_amplitudes(s.n_qubits(), amps)?;
    target.normalize()?;
    Ok(target)
}

/// The fitted Hermitian generator `A` of one ansatz-free step.
#[derive(Clone, Debug)]
pub enum AfGenerator {
    /// `A = sum_I a_I sigma_I` over explicit strings.
    Coefficients(Vec<(PauliString, f64)>),
    /// Complete-basis solution `A = -i 2^(n-1) (|z><psi| - |psi><z|) - Im<psi|z> I`.
    LowRank { psi: Vec<Complex64>, z: Vec<Complex64>, scale: f64, shift: f64 },
}

impl AfGenerator {
    /// Coefficient of string `sigma` in `A`.
    pub fn coefficient(&self, sigma: &PauliString) -> f64 {
        match self {
            AfGenerator::Coefficients(terms) => terms
                .iter()
                .find(|(s, _)| s.letters() == sigma.letters())
                .map_or(0.0, |(_, a)| *a),
            AfGenerator::LowRank { psi, z, .. } => {
                // a_I = Im <psi|sigma_I|z>
                let n = sigma.n_qubits();
                let op = PauliSum::from_terms(n, vec![sigma.clone()]).expect("sizes agree").compile();
                let mut sz = vec![Complex64::default(); z.len()];
                op.apply(z, &mut sz);
                psi.iter().zip(&sz).map(|(p, s)| p.conj() * s).sum::<Complex64>().im
            }
        }
    }

    /// `exp(-i dt A) psi`.
    fn evolve(&self, s: &StateVector, dt: f64) -> Result<StateVector> {
        let scale = Complex64::new(0.0, -dt);
        let amps = match self {
            AfGenerator::Coefficients(terms) => {
                let n = s.n_qubits();
                let sum = PauliSum::from_terms(
                    n,
                    terms.iter().map(|(p, a)| p.scaled(Complex64::new(*a, 0.0))).collect(),
                )?;
                let op = sum.compile();
                exp_action(|v, out| op.apply(v, out), op.norm_bound(), scale, s.amplitudes())
            }
            AfGenerator::LowRank { psi, z, scale: k, shift } => {
                let zn = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                let bound = 2.0 * k * zn + shift.abs();
                let factor = Complex64::new(0.0, -*k);
                exp_action(
                    |v, out| {
                        let pv: Complex64 = psi.iter().zip(v).map(|(p, x)| p.conj() * x).sum();
                        let zv: Complex64 = z.iter().zip(v).map(|(p, x)| p.conj() * x).sum();
                        for (((o, x), zi), pi) in out.iter_mut().zip(v).zip(z).zip(psi) {
                            *o = factor * (zi * pv - pi * zv) - shift * x;
                        }
                    },
                    bound,
                    scale,
                    s.amplitudes(),
                )
            }
        };
        let mut out = StateVector::from_amplitudes(s.n_qubits(), amps)?;
        out.normalize()?;
        Ok(out)
    }
}

fn check_finite_values(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("{what} produced non-finite values")))
    }
}

/// Least-squares fit of `A` so that `-i A psi` matches
/// `Delta = (psi' - psi) / dt`, where `psi'` is the normalized
/// imaginary-time target.
///
/// Over explicit strings the real normal equations are
/// `(S + S^T + lambda) a = 2 Im <Delta|sigma_I|psi>` with
/// `S_IJ = Re <psi|sigma_I sigma_J|psi>`. For the complete basis the
/// equivalent minimum-norm solution is evaluated in closed form.
pub fn fit_ansatz_free_generator(
    s: &StateVector,
    op: &PauliOperator,
    dt: f64,
    basis: &AfBasis,
    lambda: f64,
) -> Result<AfGenerator> {
    if !s.is_normalized() {
        return Err(Error::InvalidArgument(format!("state has norm {}", s.norm())));
    }
    if dt.is_nan() || dt <= 0.0 || lambda.is_nan() || lambda < 0.0 {
        return Err(Error::InvalidArgument("dt must be positive and lambda non-negative".into()));
    }
    let n = s.n_qubits();
    basis.validate(n)?;
    let target = imaginary_time_target(s, op, dt)?;
    let psi = s.amplitudes();
    let delta: Vec<Complex64> = target.amplitudes().iter().zip(psi).map(|(t, p)| (t - p) / dt).collect();
    match basis {
        AfBasis::Complete => {
            let half = (1usize << (n - 1)) as f64;
            let full = (1usize << n) as f64 - 1.0;
            let overlap: Complex64 = psi.iter().zip(&delta).map(|(p, d)| p.conj() * d).sum();
            let m = overlap.im;
            let perp_den = half + 0.5 * lambda;
            let phase_den = full + 0.5 * lambda;
            let z: Vec<Complex64> = psi
                .iter()
                .zip(&delta)
                .map(|(p, d)| -((d - overlap * p) / perp_den + Complex64::new(0.0, m) * p / phase_den))
                .collect();
            check_finite_values(&z.iter().flat_map(|v| [v.re, v.im]).collect::<Vec<_>>(), "ansatz-free fit")?;
            Ok(AfGenerator::LowRank { psi: psi.to_vec(), z, scale: half, shift: -m / phase_den })
        }
        AfBasis::Strings(strings) => {
            let k = strings.len();
            let dim = psi.len();
            let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(k);
            for sigma in strings {
                let (x, zm) = sigma.masks();
                let base = crate::pauli::i_pow((x & zm).count_ones());
                let mut w = vec![Complex64::default(); dim];
                for (c, a) in psi.iter().enumerate() {
                    w[c ^ x] = base * crate::pauli::parity_sign(zm & c) * a;
                }
                columns.push(w);
            }
            let dot = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>();
            let mut s2 = DMatrix::<f64>::zeros(k, k);
            for i in 0..k {
                for j in i..k {
                    let v = 2.0 * dot(&columns[i], &columns[j]).re;
                    s2[(i, j)] = v;
                    s2[(j, i)] = v;
                }
            }
            let b = DVector::from_iterator(k, columns.iter().map(|w| 2.0 * dot(&delta, w).im));
            let a = solve_regularized(&s2, &b, lambda)?;
            check_finite_values(a.as_slice(), "ansatz-free fit")?;
            Ok(AfGenerator::Coefficients(strings.iter().cloned().zip(a.iter().copied()).collect()))
        }
    }
}

/// One ansatz-free step: fit `A` and return `exp(-i dt A) psi`, renormalized.
pub fn ansatz_free_step(s: &StateVector, h_now: &PauliSum, dt: f64, basis: &AfBasis, lambda: f64) -> Result<StateVector> {
    let op = h_now.compile();
    let generator = fit_ansatz_free_generator(s, &op, dt, basis, lambda)?;
    generator.evolve(s, dt)
}

/// Parameter velocity from `(M + lambda) theta_dot = -C` with
/// `M = Re J^dag J` and `C = Re J^dag H psi`.
fn mclachlan_rate(
    c: &ParamCircuit,
    theta: &[f64],
    op: &PauliOperator,
    lambda: f64,
    method: JacobianMethod,
) -> Result<Vec<f64>> {
    let (psi, jac) = match method {
        JacobianMethod::Analytic => c.state_and_jacobian(theta)?,
        JacobianMethod::FiniteDifference => (c.evaluate(theta)?, c.state_jacobian(theta, JACOBIAN_EPS)?),
    };
    let mut hpsi = vec![Complex64::default(); psi.dim()];
    op.apply(psi.amplitudes(), &mut hpsi);
    let jh = jac.adjoint();
    let m = (&jh * &jac).map(|v| v.re);
    let rhs = (&jh * DVector::from_vec(hpsi)).map(|v| -v.re);
    let rate = solve_regularized(&m, &rhs, lambda)?;
    check_finite_values(rate.as_slice(), "McLachlan solve")?;
    Ok(rate.as_slice().to_vec())
}

/// One explicit-Euler McLachlan step `theta + dt theta_dot`.
pub fn mclachlan_step(c: &ParamCircuit, theta: &[f64], h_now: &PauliSum, dt: f64, lambda: f64) -> Result<Vec<f64>> {
    mclachlan_step_with(c, theta, h_now, dt, lambda, JacobianMethod::FiniteDifference)
}

pub fn mclachlan_step_with(
    c: &ParamCircuit,
    theta: &[f64],
    h_now: &PauliSum,
    dt: f64,
    lambda: f64,
    method: JacobianMethod,
) -> Result<Vec<f64>> {
    if h_now.n_qubits() != c.n_qubits() {
        return Err(Error::QubitMismatch { left: c.n_qubits(), right: h_now.n_qubits() });
    }
    let rate = mclachlan_rate(c, theta, &h_now.compile(), lambda, method)?;
    Ok(theta.iter().zip(&rate).map(|(t, r)| t + dt * r).collect())
}

/// Instantaneous operators of a schedule, compiled once when constant.
struct Instantaneous<'s> {
    sched: &'s Schedule,
    fixed: Option<PauliOperator>,
}

impl<'s> Instantaneous<'s> {
    fn new(sched: &'s Schedule) -> Self {
        let fixed = sched.is_constant().then(|| sched.hamiltonian_at(0.0).compile());
        Self { sched, fixed }
    }

    fn at(&self, t: f64) -> std::borrow::Cow<'_, PauliOperator> {
        match &self.fixed {
            Some(op) => std::borrow::Cow::Borrowed(op),
            None => std::borrow::Cow::Owned(self.sched.hamiltonian_at(t).compile()),
        }
    }
}

fn check_schedule(sched: &Schedule, n: usize) -> Result<()> {
    if sched.n_qubits() != n {
        return Err(Error::QubitMismatch { left: sched.n_qubits(), right: n });
    }
    if !sched.parts().iter().all(|(_, h)| h.is_hermitian()) {
        return Err(Error::NonHermitian);
    }
    Ok(())
}

/// Ansatz-based imaginary-time evolution; returns the trajectory and the
/// final parameters. The Hamiltonian of each step is taken at its start.
pub fn mclachlan_evolve(
    c: &ParamCircuit,
    theta0: &[f64],
    sched: &Schedule,
    dt: f64,
    lambda: f64,
    method: JacobianMethod,
    observer: &Observer,
) -> Result<(Trajectory, Vec<f64>)> {
    check_schedule(sched, c.n_qubits())?;
    let steps = step_count(sched.duration(), dt)?;
    let h = sched.duration() / steps as f64;
    let ops = Instantaneous::new(sched);
    let mut rec = Recorder::new(observer, steps);
    let mut theta = theta0.to_vec();
    let psi = c.evaluate(&theta)?;
    rec.record(0.0, psi.expectation_op(&ops.at(0.0))?, &psi)?;
    for step in 1..=steps {
        let t = (step - 1) as f64 * h;
        let rate = mclachlan_rate(c, &theta, &ops.at(t), lambda, method)?;
        for (th, r) in theta.iter_mut().zip(&rate) {
            *th += h * r;
        }
        if rec.wants(step) {
            let tn = step as f64 * h;
            let psi = c.evaluate(&theta)?;
            rec.record(tn, psi.expectation_op(&ops.at(tn))?, &psi)?;
        }
    }
    let final_state = c.evaluate(&theta)?;
    Ok((rec.finish(final_state, 0.0, 0.0), theta))
}

/// Ansatz-free imaginary-time evolution from `s0`. The Hamiltonian of each
/// step is taken at its start.
pub fn ansatz_free_evolve(
    s0: &StateVector,
    sched: &Schedule,
    dt: f64,
    basis: &AfBasis,
    lambda: f64,
    observer: &Observer,
) -> Result<Trajectory> {
    check_schedule(sched, s0.n_qubits())?;
    let steps = step_count(sched.duration(), dt)?;
    let h = sched.duration() / steps as f64;
    let ops = Instantaneous::new(sched);
    let mut rec = Recorder::new(observer, steps);
    let mut psi = s0.clone();
    rec.record(0.0, psi.expectation_op(&ops.at(0.0))?, &psi)?;
    for step in 1..=steps {
        let t = (step - 1) as f64 * h;
        let generator = fit_ansatz_free_generator(&psi, &ops.at(t), h, basis, lambda)?;
        psi = generator.evolve(&psi, h)?;
        if rec.wants(step) {
            let tn = step as f64 * h;
            rec.record(tn, psi.expectation_op(&ops.at(tn))?, &psi)?;
        }
    }
    Ok(rec.finish(psi, 0.0, 0.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct QiteConfig {
    pub mode: QiteMode,
    pub schedule: ScheduleKind,
    pub dt: f64,
    pub total_time: f64,
    pub lambda: f64,
    pub basis: AfBasis,
    /// SU(2) repetitions of the ansatz-based circuit.
    pub reps: usize,
    pub jacobian: JacobianMethod,
    pub seed: u64,
}

impl QiteConfig {
    pub fn new(mode: QiteMode, schedule: ScheduleKind, dt: f64, total_time: f64) -> Self {
        Self {
            mode,
            schedule,
            dt,
            total_time,
            lambda: DEFAULT_LAMBDA,
            basis: AfBasis::Complete,
            reps: 2,
            jacobian: JacobianMethod::default(),
            seed: 0,
        }
    }
}

/// Per-run description stored alongside a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiteMetadata {
    pub mode: QiteMode,
    pub schedule: ScheduleKind,
    pub dt: f64,
    pub total_time: f64,
    pub lambda: f64,
    /// Pauli strings (ansatz-free) or circuit parameters (ansatz-based).
    pub basis_size: usize,
}

#[derive(Clone, Debug)]
pub struct QiteRun {
    pub trajectory: Trajectory,
    pub metadata: QiteMetadata,
}

/// QITE / ITQA from `|+>^n` (ansatz-based: SU(2) circuit with parameters
/// near zero), scored against `truth` when given.
pub fn run_qite(h_prob: &PauliSum, cfg: &QiteConfig, truth: Option<&GroundTruth>) -> Result<QiteRun> {
    let n = h_prob.n_qubits();
    let sched = match cfg.schedule {
        ScheduleKind::Constant => Schedule::constant(h_prob.clone(), cfg.total_time)?,
        ScheduleKind::Qa => qa_schedule(h_prob, cfg.total_time)?,
    };
    let observer = Observer { reference: truth.map(|t| t.subspace.as_slice()), every: None };
    let (trajectory, basis_size) = match cfg.mode {
        QiteMode::AnsatzFree => {
            let s0 = StateVector::plus_state(n)?;
            let tr = ansatz_free_evolve(&s0, &sched, cfg.dt, &cfg.basis, cfg.lambda, &observer)?;
            (tr, cfg.basis.size(n))
        }
        QiteMode::AnsatzBased => {
            let circuit = su2_ansatz(n, cfg.reps)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let theta0 = near_zero_parameters(circuit.parameter_count(), &mut rng);
            let (tr, _) = mclachlan_evolve(&circuit, &theta0, &sched, cfg.dt, cfg.lambda, cfg.jacobian, &observer)?;
            (tr, circuit.parameter_count())
        }
    };
    let metadata = QiteMetadata {
        mode: cfg.mode,
        schedule: cfg.schedule,
        dt: cfg.dt,
        total_time: cfg.total_time,
        lambda: cfg.lambda,
        basis_size,
    };
    Ok(QiteRun { trajectory, metadata })
}
