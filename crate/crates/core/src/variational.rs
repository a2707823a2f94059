//! VQE and QAOA drivers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::{qaoa_state_with, su2_ansatz, PhaseSeparator};
use crate::optimizers::{simplex_minimize, spsa_minimize, OptResult, SpsaGains};
use crate::pauli::PauliSum;
use crate::statevector::StateVector;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Spsa,
    Simplex,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Spsa => "spsa",
            OptimizerKind::Simplex => "simplex",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationalConfig {
    /// QAOA depth.
    pub p: usize,
    /// SU(2) ansatz repetitions for VQE.
    pub reps: usize,
    /// Optimizer override; QAOA defaults to simplex and VQE to SPSA.
    pub optimizer: Option<OptimizerKind>,
    /// Objective evaluation budget.
    pub budget: usize,
    pub spsa: SpsaGains,
    pub seed: u64,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        Self { p: 100, reps: 2, optimizer: None, budget: 5000, spsa: SpsaGains::default(), seed: 0 }
    }
}

impl VariationalConfig {
    fn validate(&self) -> Result<()> {
        if self.reps == 0 || self.budget == 0 {
            return Err(Error::InvalidArgument("reps and budget must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct VariationalRun {
    pub opt: OptResult,
    /// State prepared at `opt.best_theta`.
    pub state: StateVector,
    pub optimizer: OptimizerKind,
    /// True when the QAOA phase separator was a dense matrix exponential.
    pub dense_phase: bool,
}

fn minimize(
    kind: OptimizerKind,
    f: impl FnMut(&[f64]) -> f64,
    theta0: &[f64],
    cfg: &VariationalConfig,
    rng: &mut ChaCha8Rng,
) -> Result<OptResult> {
    match kind {
        OptimizerKind::Spsa => spsa_minimize(f, theta0, cfg.budget, &cfg.spsa, rng),
        OptimizerKind::Simplex => simplex_minimize(f, theta0, cfg.budget),
    }
}

/// Linear-ramp starting angles for depth `p`, layers `k = 1..p`:
/// `gamma_k = 0.5 k / p`, `beta_k = -0.5 (1 - k / p)`.
///
/// With the mixer `exp(-i beta sum X)` this mimics an anneal from the
/// ground state of `-sum X` towards the problem Hamiltonian.
pub fn qaoa_ramp(p: usize) -> (Vec<f64>, Vec<f64>) {
    let gammas = (1..=p).map(|k| 0.5 * k as f64 / p as f64).collect();
    let betas = (1..=p).map(|k| -0.5 * (1.0 - k as f64 / p as f64)).collect();
    (gammas, betas)
}

/// Minimizes `<gamma, beta| H |gamma, beta>` over `2p` angles packed as
/// `[gamma_1..gamma_p, beta_1..beta_p]`.
pub fn run_qaoa(h_prob: &PauliSum, cfg: &VariationalConfig) -> Result<VariationalRun> {
    cfg.validate()?;
    let n = h_prob.n_qubits();
    let phase = PhaseSeparator::for_hamiltonian(h_prob)?;
    let op = h_prob.compile();
    let p = cfg.p;
    let objective = |theta: &[f64]| -> f64 {
        match qaoa_state_with(n, &phase, &theta[..p], &theta[p..]) {
            Ok(s) => s.expectation_op(&op).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    let (gammas, betas) = qaoa_ramp(p);
    let theta0: Vec<f64> = gammas.into_iter().chain(betas).collect();
    let kind = cfg.optimizer.unwrap_or(OptimizerKind::Simplex);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let opt = minimize(kind, objective, &theta0, cfg, &mut rng)?;
    let state = qaoa_state_with(n, &phase, &opt.best_theta[..p], &opt.best_theta[p..])?;
    Ok(VariationalRun { opt, state, optimizer: kind, dense_phase: phase.is_dense() })
}

/// Starting parameters near zero: uniform in `[-1e-2, 1e-2]`.
pub fn near_zero_parameters<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    (0..count).map(|_| rng.random_range(-1e-2..=1e-2)).collect()
}

/// Minimizes the energy of the SU(2) ansatz state.
pub fn run_vqe(h_prob: &PauliSum, cfg: &VariationalConfig) -> Result<VariationalRun> {
    cfg.validate()?;
    let circuit = su2_ansatz(h_prob.n_qubits(), cfg.reps)?;
    let op = h_prob.compile();
    let objective = |theta: &[f64]| -> f64 {
        match circuit.evaluate(theta) {
            Ok(s) => s.expectation_op(&op).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let theta0 = near_zero_parameters(circuit.parameter_count(), &mut rng);
    let kind = cfg.optimizer.unwrap_or(OptimizerKind::Spsa);
    let opt = minimize(kind, objective, &theta0, cfg, &mut rng)?;
    let state = circuit.evaluate(&opt.best_theta)?;
    Ok(VariationalRun { opt, state, optimizer: kind, dense_phase: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::qaoa_state;
    use crate::pauli::Pauli;
    use crate::problems::{build_hamiltonian, exact_ground_subspace, gen_maxcut, ProblemInstance};

    fn single_edge() -> PauliSum {
        build_hamiltonian(&ProblemInstance::max_cut(2, vec![(0, 1)], 0).unwrap()).unwrap()
    }

    #[test]
    fn ramp_direction_lowers_energy() {
        // The ramp should start below the p = 0 baseline on typical instances.
        let mut better = 0;
        for seed in 0..20 {
            let h = build_hamiltonian(&gen_maxcut(5, 0.5, seed).unwrap()).unwrap();
            let base = StateVector::plus_state(5).unwrap().expectation(&h).unwrap();
            let (g, b) = qaoa_ramp(5);
            let e = qaoa_state(&h, &g, &b).unwrap().expectation(&h).unwrap();
            let flipped: Vec<f64> = b.iter().map(|x| -x).collect();
            let e_flipped = qaoa_state(&h, &g, &flipped).unwrap().expectation(&h).unwrap();
            assert!(e <= e_flipped + 1e-12);
            better += usize::from(e < base);
        }
        assert_eq!(better, 20);
    }

    #[test]
    fn qaoa_single_edge_p1() {
        let cfg = VariationalConfig { p: 1, budget: 400, ..Default::default() };
        let run = run_qaoa(&single_edge(), &cfg).unwrap();
        assert!((run.opt.best_value + 1.0).abs() < 1e-3, "{}", run.opt.best_value);
        assert_eq!(run.optimizer, OptimizerKind::Simplex);
        assert!((run.state.expectation(&single_edge()).unwrap() - run.opt.best_value).abs() < 1e-9);
        assert_eq!(run.opt.best_theta, run_qaoa(&single_edge(), &cfg).unwrap().opt.best_theta);
    }

    #[test]
    fn qaoa_depth_zero() {
        let h = single_edge();
        let run = run_qaoa(&h, &VariationalConfig { p: 0, ..Default::default() }).unwrap();
        assert_eq!(run.opt.evaluations, 1);
        assert_eq!(run.opt.best_value, StateVector::plus_state(2).unwrap().expectation(&h).unwrap());
    }

    #[test]
    fn qaoa_dense_phase_for_spin_glass() {
        let h = PauliSum::from_text(2, "0.3,0.0 XX\n-0.2,0.0 YY\n0.5,0.0 ZZ\n").unwrap();
        let run = run_qaoa(&h, &VariationalConfig { p: 2, budget: 200, ..Default::default() }).unwrap();
        assert!(run.dense_phase);
        let e0 = exact_ground_subspace(&h, None).unwrap().energy;
        assert!(run.opt.best_value >= e0 - 1e-9);
    }

    #[test]
    fn vqe_single_qubit() {
        let h = PauliSum::uniform_field(1, Pauli::Z, 1.0);
        let cfg = VariationalConfig { reps: 1, budget: 4001, seed: 5, ..Default::default() };
        let run = run_vqe(&h, &cfg).unwrap();
        assert!(run.opt.best_value <= -0.99, "{}", run.opt.best_value);
        assert!(run.opt.best_value >= -1.0 - 1e-9);
    }

    #[test]
    fn vqe_single_edge_median() {
        let h = single_edge();
        let mut values: Vec<f64> = (0..20)
            .map(|seed| run_vqe(&h, &VariationalConfig { seed, ..Default::default() }).unwrap().opt.best_value)
            .collect();
        values.sort_by(f64::total_cmp);
        let median = 0.5 * (values[9] + values[10]);
        assert!(median <= -0.95, "{median}");
        assert!(values[0] >= -1.0 - 1e-9);
    }

    #[test]
    fn vqe_budget_one_and_consistency() {
        let h = single_edge();
        let run = run_vqe(&h, &VariationalConfig { budget: 1, ..Default::default() }).unwrap();
        assert_eq!(run.opt.evaluations, 1);
        assert!((run.state.expectation(&h).unwrap() - run.opt.best_value).abs() < 1e-9);
        let a = run_vqe(&h, &VariationalConfig { budget: 50, seed: 3, ..Default::default() }).unwrap();
        let b = run_vqe(&h, &VariationalConfig { budget: 50, seed: 3, ..Default::default() }).unwrap();
        assert_eq!(a.opt, b.opt);
    }
}
