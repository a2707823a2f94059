//! Classical simulated annealing over diagonal Hamiltonians.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::pauli::{parity_sign, PauliSum};
use crate::problems::GroundTruth;
use crate::{Error, Result};

const PROBES: usize = 100;
const COLD_FACTOR: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SaConfig {
    pub sweeps: usize,
    pub shots: usize,
    pub seed: u64,
    /// Anneal only the Z-type terms of a non-diagonal Hamiltonian.
    pub diagonal_part: bool,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self { sweeps: 10_000, shots: 1000, seed: 0, diagonal_part: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaResult {
    /// Final bitstring of every shot.
    pub counts: BTreeMap<usize, usize>,
    /// Share of shots ending in an optimal bitstring; `None` when only the
    /// diagonal part was annealed.
    pub success_fraction: Option<f64>,
    /// Mean ground-subspace population of the final bitstrings.
    pub fidelity: f64,
    /// Lowest final energy over all shots.
    pub best_energy: f64,
    pub t_hot: f64,
    pub t_cold: f64,
    /// True when a non-diagonal Hamiltonian was reduced to its diagonal part.
    pub diagonal_part: bool,
}

/// Diagonal Hamiltonian as Z-mask terms, indexed per qubit for O(degree)
/// single-flip energy differences.
#[derive(Clone, Debug)]
struct IsingForm {
    n: usize,
    constant: f64,
    terms: Vec<(usize, f64)>,
    by_qubit: Vec<Vec<(usize, f64)>>,
}

impl IsingForm {
    fn new(h: &PauliSum) -> Result<Self> {
        if !h.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        let n = h.n_qubits();
        let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
        for t in h.terms() {
            let (_, z) = t.masks();
            *merged.entry(z).or_default() += t.coeff.re;
        }
        let constant = merged.remove(&0).unwrap_or(0.0);
        let terms: Vec<(usize, f64)> = merged.into_iter().filter(|(_, c)| *c != 0.0).collect();
        let by_qubit = (0..n).map(|q| terms.iter().copied().filter(|(m, _)| m >> q & 1 == 1).collect()).collect();
        Ok(Self { n, constant, terms, by_qubit })
    }

    fn energy(&self, bits: usize) -> f64 {
        self.constant + self.terms.iter().map(|(m, c)| c * parity_sign(m & bits)).sum::<f64>()
    }

    /// `E(bits ^ (1 << q)) - E(bits)`.
    fn flip_delta(&self, bits: usize, q: usize) -> f64 {
        -2.0 * self.by_qubit[q].iter().map(|(m, c)| c * parity_sign(m & bits)).sum::<f64>()
    }

    /// `T_hot` = largest |dE| over random probes, `T_cold` = a small
    /// fraction of their mean nonzero magnitude.
    fn temperatures(&self, rng: &mut ChaCha8Rng) -> (f64, f64) {
        let mut max: f64 = 0.0;
        let (mut sum, mut count) = (0.0, 0usize);
        for _ in 0..PROBES {
            let bits = rng.random_range(0..1usize << self.n);
            let q = rng.random_range(0..self.n);
            let d = self.flip_delta(bits, q).abs();
            max = max.max(d);
            if d > 0.0 {
                sum += d;
                count += 1;
            }
        }
        if count == 0 {
            return (1.0, COLD_FACTOR);
        }
        let cold = COLD_FACTOR * sum / count as f64;
        (max.max(cold * 10.0), cold)
    }
}

fn geometric(t_hot: f64, t_cold: f64, sweep: usize, sweeps: usize) -> f64 {
    if sweeps == 1 {
        return t_cold;
    }
    t_hot * (t_cold / t_hot).powf(sweep as f64 / (sweeps - 1) as f64)
}

/// Ground-subspace population of a basis state.
fn basis_population(truth: &GroundTruth, bits: usize) -> f64 {
    if !truth.optimal_bitstrings.is_empty() {
        return if truth.is_optimal(bits) { 1.0 } else { 0.0 };
    }
    truth.subspace.iter().map(|v| v.amplitudes()[bits].norm_sqr()).sum::<f64>().min(1.0)
}

/// Runs `shots` independent anneals, each from a uniformly random bitstring
/// with `sweeps` sweeps of sequential single-bit Metropolis proposals along
/// a geometric temperature schedule. Shot `k` draws from stream `k` of the
/// seeded generator, so results do not depend on execution order.
pub fn sa_solve(h: &PauliSum, cfg: &SaConfig, truth: &GroundTruth) -> Result<SaResult> {
    if cfg.sweeps == 0 || cfg.shots == 0 {
        return Err(Error::InvalidArgument("sweeps and shots must be at least 1".into()));
    }
    let reduced = !h.is_diagonal();
    if reduced && !cfg.diagonal_part {
        return Err(Error::NotDiagonal);
    }
    let form = IsingForm::new(&if reduced { h.diagonal_part() } else { h.clone() })?;
    if form.n == 0 {
        return Err(Error::InvalidArgument("annealing needs at least one qubit".into()));
    }
    let mut probe_rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    probe_rng.set_stream(u64::MAX);
    let (t_hot, t_cold) = form.temperatures(&mut probe_rng);
    let betas: Vec<f64> = (0..cfg.sweeps).map(|k| 1.0 / geometric(t_hot, t_cold, k, cfg.sweeps)).collect();

    let mut counts = BTreeMap::new();
    for shot in 0..cfg.shots {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(shot as u64);
        let mut bits = rng.random_range(0..1usize << form.n);
        for &beta in &betas {
            for q in 0..form.n {
                let d = form.flip_delta(bits, q);
                if d <= 0.0 || rng.random::<f64>() < (-beta * d).exp() {
                    bits ^= 1 << q;
                }
            }
        }
        *counts.entry(bits).or_insert(0) += 1;
    }

    let shots = cfg.shots as f64;
    let best_energy = counts.keys().map(|&b| form.energy(b)).fold(f64::INFINITY, f64::min);
    let fidelity = counts.iter().map(|(&b, &c)| c as f64 * basis_population(truth, b)).sum::<f64>() / shots;
    let success_fraction = (!reduced).then(|| {
        counts.iter().filter(|(&b, _)| basis_population(truth, b) >= 1.0 - 1e-9).map(|(_, &c)| c).sum::<usize>() as f64
            / shots
    });
    Ok(SaResult { counts, success_fraction, fidelity, best_energy, t_hot, t_cold, diagonal_part: reduced })
}
