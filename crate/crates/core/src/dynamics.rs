//! Real- and imaginary-time integration of (possibly time-dependent) Pauli
//! Hamiltonians, the annealing schedule, and bond-dimension truncation.

use std::io::Write;

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::pauli::{Pauli, PauliOperator, PauliSum};
use crate::statevector::StateVector;
use crate::{Error, Result};

/// Maximum allowed `|1 - ||psi|||` for a real-time run.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;
/// Upper limit on `dt` times the spectral spread of `H - <H>` for one
/// imaginary-time RK4 step.
pub const SPREAD_LIMIT: f64 = 1.5;
/// `dt` times the energy standard deviation above which a warning is logged.
pub const SMOOTHNESS_WARNING: f64 = 0.1;
/// Default maximum number of trajectory records.
pub const MAX_RECORDS: usize = 1000;
/// Amplitudes below this fraction of the largest are zeroed before truncation.
const TRUNCATION_FLOOR: f64 = 1e-60;

/// Time dependence of one schedule component on `[0, T]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ramp {
    Constant,
    /// `t / T`
    Rising,
    /// `1 - t / T`
    Falling,
}

impl Ramp {
    fn weight(self, t: f64, duration: f64) -> f64 {
        match self {
            Ramp::Constant => 1.0,
            Ramp::Rising => t / duration,
            Ramp::Falling => 1.0 - t / duration,
        }
    }
}

/// A Hamiltonian `H(t) = sum_k w_k(t) H_k` on `[0, duration]`.
#[derive(Clone, Debug)]
pub struct Schedule {
    duration: f64,
    parts: Vec<(Ramp, PauliSum)>,
    tag: String,
}

impl Schedule {
    pub fn constant(h: PauliSum, duration: f64) -> Result<Self> {
        check_duration(duration)?;
        Ok(Self { duration, parts: vec![(Ramp::Constant, h)], tag: "constant".into() })
    }

    pub fn from_parts(duration: f64, parts: Vec<(Ramp, PauliSum)>, tag: impl Into<String>) -> Result<Self> {
        check_duration(duration)?;
        let n = parts.first().map(|(_, h)| h.n_qubits()).ok_or_else(|| Error::InvalidArgument("empty schedule".into()))?;
        for (_, h) in &parts {
            if h.n_qubits() != n {
                return Err(Error::QubitMismatch { left: n, right: h.n_qubits() });
            }
        }
        Ok(Self { duration, parts, tag: tag.into() })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn n_qubits(&self) -> usize {
        self.parts[0].1.n_qubits()
    }

    pub fn parts(&self) -> &[(Ramp, PauliSum)] {
        &self.parts
    }

    pub fn is_constant(&self) -> bool {
        self.parts.iter().all(|(r, _)| *r == Ramp::Constant)
    }

    /// The instantaneous Hamiltonian, simplified.
    pub fn hamiltonian_at(&self, t: f64) -> PauliSum {
        let mut h = PauliSum::zero(self.n_qubits());
        for (ramp, part) in &self.parts {
            h = h.plus(&part.scaled(ramp.weight(t, self.duration))).expect("sizes checked at construction");
        }
        h.simplify()
    }

    fn compile(&self) -> CompiledSchedule {
        CompiledSchedule {
            duration: self.duration,
            parts: self.parts.iter().map(|(r, h)| (*r, h.compile())).collect(),
        }
    }
}

fn check_duration(duration: f64) -> Result<()> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Error::InvalidArgument(format!("duration must be positive, got {duration}")));
    }
    Ok(())
}

/// Linear interpolation from the transverse-field driver `-sum_i X_i` at
/// `t = 0` to `h_prob` at `t = duration`.
pub fn qa_schedule(h_prob: &PauliSum, duration: f64) -> Result<Schedule> {
    let driver = PauliSum::uniform_field(h_prob.n_qubits(), Pauli::X, -1.0);
    Schedule::from_parts(duration, vec![(Ramp::Falling, driver), (Ramp::Rising, h_prob.clone())], "qa")
}

struct CompiledSchedule {
    duration: f64,
    parts: Vec<(Ramp, PauliOperator)>,
}

impl CompiledSchedule {
    /// `out = alpha (H(t) - shift) psi`
    fn apply(&self, t: f64, alpha: Complex64, shift: f64, psi: &[Complex64], out: &mut [Complex64]) {
        for (o, p) in out.iter_mut().zip(psi) {
            *o = -alpha * shift * p;
        }
        for (ramp, op) in &self.parts {
            let w = ramp.weight(t, self.duration);
            if w != 0.0 {
                op.apply_add(alpha * w, psi, out);
            }
        }
    }

    /// `<psi|H(t)|psi> / <psi|psi>`
    fn energy(&self, t: f64, psi: &[Complex64]) -> f64 {
        let norm2: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let mut e = 0.0;
        for (ramp, op) in &self.parts {
            let w = ramp.weight(t, self.duration);
            if w != 0.0 {
                e += w * op.expectation_raw(psi).re;
            }
        }
        e / norm2
    }

    /// Gershgorin bound on `max |lambda - center|` over the spectrum of `H(t)`.
    fn spread(&self, t: f64, center: f64, bounds: &[(Vec<f64>, Vec<f64>)]) -> f64 {
        let dim = bounds[0].0.len();
        let mut worst: f64 = 0.0;
        for b in 0..dim {
            let mut d = 0.0;
            let mut r = 0.0;
            for ((ramp, _), (diag, off)) in self.parts.iter().zip(bounds) {
                let w = ramp.weight(t, self.duration);
                d += w * diag[b];
                r += w.abs() * off[b];
            }
            worst = worst.max((d - center).abs() + r);
        }
        worst
    }
}

/// What to record during an integration.
#[derive(Clone, Copy, Debug, Default)]
pub struct Observer<'a> {
    /// Orthonormal basis of the target subspace; fidelities are NaN without it.
    pub reference: Option<&'a [StateVector]>,
    /// Record every this many steps; defaults to `max(1, steps / 1000)`.
    pub every: Option<usize>,
}

impl<'a> Observer<'a> {
    pub fn with_reference(reference: &'a [StateVector]) -> Self {
        Self { reference: Some(reference), every: None }
    }

    pub fn every_step(mut self) -> Self {
        self.every = Some(1);
        self
    }

    fn cadence(&self, steps: usize) -> usize {
        self.every.unwrap_or((steps / MAX_RECORDS).max(1)).max(1)
    }

    fn fidelity(&self, psi: &StateVector) -> Result<f64> {
        match self.reference {
            None => Ok(f64::NAN),
            Some(basis) => {
                let norm2 = psi.norm().powi(2);
                let mut f = 0.0;
                for b in basis {
                    f += b.inner(psi)?.norm_sqr();
                }
                Ok((f / norm2).clamp(0.0, 1.0))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub energies: Vec<f64>,
    pub fidelities: Vec<f64>,
    pub final_state: StateVector,
    /// Largest `|1 - ||psi|||` seen (real-time runs only).
    pub norm_drift: f64,
    /// Total weight discarded by bond-dimension truncation.
    pub discarded_weight: f64,
}

impl Trajectory {
    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("trajectories always hold the initial record")
    }

    pub fn final_fidelity(&self) -> f64 {
        *self.fidelities.last().expect("trajectories always hold the initial record")
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "energy", "fidelity"])?;
        for ((t, e), f) in self.times.iter().zip(&self.energies).zip(&self.fidelities) {
            out.write_record([t.to_string(), e.to_string(), f.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Number of steps of size `dt` covering `duration`, which must be integral
/// to within `1e-9`.
pub fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let ratio = duration / dt;
    let steps = ratio.round();
    if steps < 1.0 || (ratio - steps).abs() > 1e-9 * steps.max(1.0) {
        return Err(Error::InvalidArgument(format!("duration {duration} is not an integer multiple of dt {dt}")));
    }
    Ok(steps as usize)
}

pub(crate) struct Recorder<'o, 'a> {
    observer: &'o Observer<'a>,
    cadence: usize,
    steps: usize,
    times: Vec<f64>,
    energies: Vec<f64>,
    fidelities: Vec<f64>,
}

impl<'o, 'a> Recorder<'o, 'a> {
    pub(crate) fn new(observer: &'o Observer<'a>, steps: usize) -> Self {
        let cap = steps / observer.cadence(steps) + 2;
        Self {
            observer,
            cadence: observer.cadence(steps),
            steps,
            times: Vec::with_capacity(cap),
            energies: Vec::with_capacity(cap),
            fidelities: Vec::with_capacity(cap),
        }
    }

    pub(crate) fn wants(&self, step: usize) -> bool {
        step.is_multiple_of(self.cadence) || step == self.steps
    }

    pub(crate) fn record(&mut self, t: f64, energy: f64, psi: &StateVector) -> Result<()> {
        self.times.push(t);
        self.energies.push(energy);
        self.fidelities.push(self.observer.fidelity(psi)?);
        Ok(())
    }

    pub(crate) fn finish(self, final_state: StateVector, norm_drift: f64, discarded_weight: f64) -> Trajectory {
        Trajectory {
            times: self.times,
            energies: self.energies,
            fidelities: self.fidelities,
            final_state,
            norm_drift,
            discarded_weight,
        }
    }
}

/// Scratch buffers for one linear RK4 step.
struct Rk4 {
    k: Vec<Complex64>,
    stage: Vec<Complex64>,
    acc: Vec<Complex64>,
}

impl Rk4 {
    fn new(dim: usize) -> Self {
        let z = Complex64::default();
        Self { k: vec![z; dim], stage: vec![z; dim], acc: vec![z; dim] }
    }

    /// One step of `d psi/dt = alpha (H(t) - shift) psi`.
    fn step(&mut self, sched: &CompiledSchedule, t: f64, h: f64, alpha: Complex64, shift: f64, psi: &mut [Complex64]) {
        let Self { k, stage, acc } = self;
        sched.apply(t, alpha, shift, psi, k);
        for ((a, s), (p, kv)) in acc.iter_mut().zip(stage.iter_mut()).zip(psi.iter().zip(k.iter())) {
            *a = *kv;
            *s = p + 0.5 * h * kv;
        }
        sched.apply(t + 0.5 * h, alpha, shift, stage, k);
        for ((a, s), (p, kv)) in acc.iter_mut().zip(stage.iter_mut()).zip(psi.iter().zip(k.iter())) {
            *a += 2.0 * kv;
            *s = p + 0.5 * h * kv;
        }
        sched.apply(t + 0.5 * h, alpha, shift, stage, k);
        for ((a, s), (p, kv)) in acc.iter_mut().zip(stage.iter_mut()).zip(psi.iter().zip(k.iter())) {
            *a += 2.0 * kv;
            *s = p + h * kv;
        }
        sched.apply(t + h, alpha, shift, stage, k);
        for ((p, a), kv) in psi.iter_mut().zip(acc.iter()).zip(k.iter()) {
            *p += h / 6.0 * (a + kv);
        }
    }
}

fn check_input(sched: &Schedule, s0: &StateVector) -> Result<()> {
    if sched.n_qubits() != s0.n_qubits() {
        return Err(Error::QubitMismatch { left: sched.n_qubits(), right: s0.n_qubits() });
    }
    if !s0.is_normalized() {
        return Err(Error::InvalidArgument(format!("initial state has norm {}", s0.norm())));
    }
    if !sched.parts.iter().all(|(_, h)| h.is_hermitian()) {
        return Err(Error::NonHermitian);
    }
    Ok(())
}

fn check_finite(psi: &[Complex64], t: f64) -> Result<()> {
    if psi.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(format!("non-finite amplitude at t = {t}")))
    }
}

/// Integrates `i d psi/dt = H(t) psi` with classical RK4 over the schedule.
///
/// Each step runs in the frame shifted by the step-start energy, which only
/// changes the global phase. The norm is not corrected; a drift beyond
/// [`NORM_DRIFT_LIMIT`] is an error.
pub fn real_time_evolve(sched: &Schedule, s0: &StateVector, dt: f64, observer: &Observer) -> Result<Trajectory> {
    check_input(sched, s0)?;
    let steps = step_count(sched.duration, dt)?;
    let h = sched.duration / steps as f64;
    let compiled = sched.compile();
    let alpha = Complex64::new(0.0, -1.0);
    let mut rec = Recorder::new(observer, steps);
    let mut psi = s0.clone();
    let mut rk = Rk4::new(psi.dim());
    rec.record(0.0, compiled.energy(0.0, psi.amplitudes()), &psi)?;
    let mut drift: f64 = 0.0;
    for step in 1..=steps {
        let t = (step - 1) as f64 * h;
        let shift = compiled.energy(t, psi.amplitudes());
        rk.step(&compiled, t, h, alpha, shift, psi.amplitudes_mut());
        check_finite(psi.amplitudes(), t + h)?;
        drift = drift.max((psi.norm() - 1.0).abs());
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift(drift));
        }
        if rec.wants(step) {
            let tn = step as f64 * h;
            rec.record(tn, compiled.energy(tn, psi.amplitudes()), &psi)?;
        }
    }
    Ok(rec.finish(psi, drift, 0.0))
}

/// Integrates the normalized imaginary-time flow `d psi/dtau = -(H - <H>) psi`
/// with RK4 and renormalization after every step.
///
/// Before each step the Gershgorin bound on the spread of `H - <H>` times
/// `dt` must stay below [`SPREAD_LIMIT`], which keeps the RK4 amplification
/// positive and monotone over the spectrum.
pub fn imag_time_evolve(sched: &Schedule, s0: &StateVector, dt: f64, observer: &Observer) -> Result<Trajectory> {
    imag_time_evolve_inner(sched, s0, dt, observer, None)
}

/// [`imag_time_evolve`] with [`truncate_bond_dimension`] applied after every step.
pub fn imag_time_evolve_truncated(
    sched: &Schedule,
    s0: &StateVector,
    dt: f64,
    observer: &Observer,
    chi: usize,
) -> Result<Trajectory> {
    if chi == 0 {
        return Err(Error::InvalidArgument("bond dimension must be at least 1".into()));
    }
    imag_time_evolve_inner(sched, s0, dt, observer, Some(chi))
}

fn imag_time_evolve_inner(
    sched: &Schedule,
    s0: &StateVector,
    dt: f64,
    observer: &Observer,
    chi: Option<usize>,
) -> Result<Trajectory> {
    check_input(sched, s0)?;
    let steps = step_count(sched.duration, dt)?;
    let h = sched.duration / steps as f64;
    let compiled = sched.compile();
    let bounds: Vec<_> = compiled.parts.iter().map(|(_, op)| op.row_bounds()).collect();
    let alpha = Complex64::new(-1.0, 0.0);
    let mut rec = Recorder::new(observer, steps);
    let mut psi = s0.clone();
    let mut discarded = 0.0;
    if let Some(chi) = chi {
        let (s, w) = truncate_bond_dimension(&psi, chi)?;
        psi = s;
        discarded += w;
    }
    let mut rk = Rk4::new(psi.dim());
    let mut scratch = vec![Complex64::default(); psi.dim()];
    let mut energy = compiled.energy(0.0, psi.amplitudes());
    rec.record(0.0, energy, &psi)?;
    let mut warned = false;
    for step in 1..=steps {
        let t = (step - 1) as f64 * h;
        if step > 1 {
            energy = compiled.energy(t, psi.amplitudes());
        }
        let spread = compiled.spread(t, energy, &bounds);
        if spread * h > SPREAD_LIMIT {
            return Err(Error::StepGuard(format!(
                "dt * spread(H - <H>) = {:.3} exceeds {SPREAD_LIMIT} at tau = {t}",
                spread * h
            )));
        }
        if !warned {
            compiled.apply(t, Complex64::new(1.0, 0.0), energy, psi.amplitudes(), &mut scratch);
            let sigma = scratch.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if sigma * h > SMOOTHNESS_WARNING {
                warn!("dt * sigma_E = {:.3} exceeds {SMOOTHNESS_WARNING} at tau = {t}", sigma * h);
                warned = true;
            }
        }
        rk.step(&compiled, t, h, alpha, energy, psi.amplitudes_mut());
        check_finite(psi.amplitudes(), t + h)?;
        psi.normalize()?;
        if let Some(chi) = chi {
            let (s, w) = truncate_bond_dimension(&psi, chi)?;
            psi = s;
            discarded += w;
        }
        if rec.wants(step) {
            let tn = step as f64 * h;
            rec.record(tn, compiled.energy(tn, psi.amplitudes()), &psi)?;
        }
    }
    Ok(rec.finish(psi, 0.0, discarded))
}

/// Truncates the Schmidt rank at every cut `{0..k} | {k+1..n-1}` to at most
/// `chi` by a left-to-right sweep starting at qubit 0. Returns the
/// renormalized state and the discarded weight `1 - ||psi'||^2`.
///
/// Each cut keeps the dominant singular subspace, found from the
/// eigenvectors of the smaller Gram matrix, so retaining full rank is an
/// exact projection rather than a recomposed factorization.
pub fn truncate_bond_dimension(s: &StateVector, chi: usize) -> Result<(StateVector, f64)> {
    if chi == 0 {
        return Err(Error::InvalidArgument("bond dimension must be at least 1".into()));
    }
    let n = s.n_qubits();
    // Amplitudes far below the largest one would underflow when squared
    // inside the eigensolver and poison it with NaN.
    let floor = s.amplitudes().iter().map(|a| a.norm()).fold(0.0, f64::max) * TRUNCATION_FLOOR;
    let amps: Vec<Complex64> =
        s.amplitudes().iter().map(|&a| if a.norm() < floor { Complex64::default() } else { a }).collect();
    let amps = amps.as_slice();
    // left: 2^k x D isometry over qubits 0..k; rest: D x 2^(n-k) remainder.
    let mut left = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    let mut rest = DMatrix::from_row_slice(1, amps.len(), amps);
    for _ in 0..n.saturating_sub(1) {
        let bond = rest.nrows();
        let cols = rest.ncols() / 2;
        // Row (alpha, b_k) -> alpha + bond * b_k; column = remaining bits.
        let m = DMatrix::from_fn(2 * bond, cols, |r, c| {
            let (alpha, bk) = (r % bond, r / bond);
            rest[(alpha, bk + 2 * c)]
        });
        let (iso, remainder) = if m.nrows() <= cols {
            let u = dominant_eigenvectors(&m * m.adjoint(), chi);
            let r = u.adjoint() * &m;
            (u, r)
        } else {
            let v = dominant_eigenvectors(m.adjoint() * &m, chi);
            let qr = (&m * &v).qr();
            (qr.q(), qr.r() * v.adjoint())
        };
        let left_rows = left.nrows();
        left = DMatrix::from_fn(2 * left_rows, iso.ncols(), |r, j| {
            let (l, bk) = (r % left_rows, r / left_rows);
            let mut acc = Complex64::default();
            for alpha in 0..bond {
                acc += left[(l, alpha)] * iso[(alpha + bond * bk, j)];
            }
            acc
        });
        rest = remainder;
    }
    let psi = &left * &rest;
    let left_dim = left.nrows();
    let mut out = vec![Complex64::default(); amps.len()];
    for (c, chunk) in (0..psi.ncols()).zip(out.chunks_mut(left_dim)) {
        for (l, o) in chunk.iter_mut().enumerate() {
            *o = psi[(l, c)];
        }
    }
    let mut state = StateVector::from_amplitudes(n, out)?;
    let kept = state.norm().powi(2) / s.norm().powi(2);
    state.normalize()?;
    Ok((state, (1.0 - kept).max(0.0)))
}

/// Orthonormal eigenvectors of the `k` largest eigenvalues of a Hermitian
/// positive semi-definite matrix, as columns.
fn dominant_eigenvectors(gram: DMatrix<Complex64>, k: usize) -> DMatrix<Complex64> {
    let dim = gram.nrows();
    let eig = nalgebra::SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let keep = k.min(dim);
    DMatrix::from_fn(dim, keep, |r, j| eig.eigenvectors[(r, order[j])])
}
