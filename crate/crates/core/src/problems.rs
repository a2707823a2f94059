//! The four benchmark problem families: instance generation, Hamiltonian
//! construction and exact ground-truth oracles.
//!
//! Classical costs are evaluated with `z_i = +1` for bit `i = 0` and
//! `z_i = -1` for bit `i = 1`. In the knapsack encoding `q_i = (1 + Z_i)/2`,
//! so item `i` is selected exactly when bit `i` is 0.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::linalg::HermitianEigen;
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::statevector::StateVector;
use crate::{Error, Result};

/// Largest size accepted by the exhaustive classical oracle.
pub const MAX_BRUTE_FORCE_QUBITS: usize = 24;
/// Largest size accepted by the dense eigen-solver oracle.
pub const MAX_EXACT_QUBITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProblemKind {
    #[serde(rename = "maxcut")]
    MaxCut,
    #[serde(rename = "numpart")]
    NumberPartition,
    #[serde(rename = "knapsack")]
    Knapsack,
    #[serde(rename = "spinglass")]
    SpinGlass,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 4] =
        [ProblemKind::MaxCut, ProblemKind::NumberPartition, ProblemKind::Knapsack, ProblemKind::SpinGlass];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::MaxCut => "maxcut",
            ProblemKind::NumberPartition => "numpart",
            ProblemKind::Knapsack => "knapsack",
            ProblemKind::SpinGlass => "spinglass",
        }
    }

    pub fn is_classical(self) -> bool {
        self != ProblemKind::SpinGlass
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProblemKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            Error::InvalidArgument(format!("unknown problem kind '{s}' (valid kinds: maxcut, numpart, knapsack, spinglass)"))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Payload {
    #[serde(rename = "maxcut")]
    MaxCut { edges: Vec<(usize, usize)> },
    #[serde(rename = "numpart")]
    NumberPartition { numbers: Vec<u64> },
    #[serde(rename = "knapsack")]
    Knapsack { weights: Vec<u64>, values: Vec<u64>, capacity: u64, penalty: f64 },
    /// Couplings are stored as full `n x n` matrices with only `i < j` entries used.
    #[serde(rename = "spinglass")]
    SpinGlass { jx: Vec<Vec<f64>>, jy: Vec<Vec<f64>>, jz: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub n: usize,
    pub seed: u64,
    #[serde(flatten)]
    pub payload: Payload,
}

impl ProblemInstance {
    pub fn kind(&self) -> ProblemKind {
        match self.payload {
            Payload::MaxCut { .. } => ProblemKind::MaxCut,
            Payload::NumberPartition { .. } => ProblemKind::NumberPartition,
            Payload::Knapsack { .. } => ProblemKind::Knapsack,
            Payload::SpinGlass { .. } => ProblemKind::SpinGlass,
        }
    }

    pub fn id(&self) -> String {
        format!("{}-n{}-s{}", self.kind(), self.n, self.seed)
    }

    pub fn max_cut(n: usize, edges: Vec<(usize, usize)>, seed: u64) -> Result<Self> {
        let inst = Self { n, seed, payload: Payload::MaxCut { edges } };
        inst.validate()?;
        Ok(inst)
    }

    pub fn number_partition(numbers: Vec<u64>, seed: u64) -> Result<Self> {
        let inst = Self { n: numbers.len(), seed, payload: Payload::NumberPartition { numbers } };
        inst.validate()?;
        Ok(inst)
    }

    /// Knapsack instance with the penalty fixed to twice the largest value.
    pub fn knapsack(weights: Vec<u64>, values: Vec<u64>, capacity: u64, seed: u64) -> Result<Self> {
        let penalty = 2.0 * values.iter().copied().max().unwrap_or(0) as f64;
        let inst = Self { n: weights.len(), seed, payload: Payload::Knapsack { weights, values, capacity, penalty } };
        inst.validate()?;
        Ok(inst)
    }

    pub fn spin_glass(jx: Vec<Vec<f64>>, jy: Vec<Vec<f64>>, jz: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        let inst = Self { n: jx.len(), seed, payload: Payload::SpinGlass { jx, jy, jz } };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidArgument("instance needs at least one qubit".into()));
        }
        match &self.payload {
            Payload::MaxCut { edges } => {
                let mut seen = std::collections::HashSet::new();
                for &(a, b) in edges {
                    if a == b || a >= n || b >= n {
                        return Err(Error::InvalidArgument(format!("invalid edge ({a}, {b})")));
                    }
                    if !seen.insert((a.min(b), a.max(b))) {
                        return Err(Error::InvalidArgument(format!("duplicate edge ({a}, {b})")));
                    }
                }
            }
            Payload::NumberPartition { numbers } => {
                if numbers.len() != n || numbers.contains(&0) {
                    return Err(Error::InvalidArgument("numbers must be n positive integers".into()));
                }
            }
            Payload::Knapsack { weights, values, capacity, penalty } => {
                if weights.len() != n || values.len() != n || weights.contains(&0) || values.contains(&0) || *capacity == 0 {
                    return Err(Error::InvalidArgument("knapsack needs n positive weights/values and positive capacity".into()));
                }
                let expect = 2.0 * *values.iter().max().expect("non-empty") as f64;
                if *penalty != expect {
                    return Err(Error::InvalidArgument(format!("penalty must be 2 max(c) = {expect}")));
                }
            }
            Payload::SpinGlass { jx, jy, jz } => {
                for m in [jx, jy, jz] {
                    if m.len() != n || m.iter().any(|r| r.len() != n) {
                        return Err(Error::InvalidArgument("coupling matrices must be n x n".into()));
                    }
                    for (i, row) in m.iter().enumerate() {
                        for (j, &v) in row.iter().enumerate() {
                            if j <= i && v != 0.0 {
                                return Err(Error::InvalidArgument("couplings must be strictly upper triangular".into()));
                            }
                            if !(v > -1.0 && v < 1.0) {
                                return Err(Error::InvalidArgument(format!("coupling {v} outside (-1, 1)")));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Classical cost of basis state `bits`; `None` for the spin glass.
    pub fn classical_cost(&self, bits: usize) -> Option<f64> {
        let spin = |i: usize| if bits >> i & 1 == 0 { 1i64 } else { -1i64 };
        let sel = |i: usize| (bits >> i & 1 == 0) as i64;
        match &self.payload {
            Payload::MaxCut { edges } => Some(-(edges.iter().filter(|&&(a, b)| spin(a) != spin(b)).count() as f64)),
            Payload::NumberPartition { numbers } => {
                let s: i64 = numbers.iter().enumerate().map(|(i, &v)| v as i64 * spin(i)).sum();
                Some((s * s) as f64)
            }
            Payload::Knapsack { weights, values, capacity, penalty } => {
                let value: i64 = values.iter().enumerate().map(|(i, &c)| c as i64 * sel(i)).sum();
                let weight: i64 = weights.iter().enumerate().map(|(i, &w)| w as i64 * sel(i)).sum();
                let excess = weight - *capacity as i64;
                Some(-(value as f64) + penalty * (excess * excess) as f64)
            }
            Payload::SpinGlass { .. } => None,
        }
    }
}

fn q_operator(n: usize, i: usize) -> PauliSum {
    PauliSum::from_terms(
        n,
        vec![PauliString::identity(n).scaled(0.5.into()), PauliString::single(n, i, Pauli::Z, 0.5)],
    )
    .expect("sizes agree")
}

/// Problem Hamiltonian as a simplified Pauli sum.
pub fn build_hamiltonian(p: &ProblemInstance) -> Result<PauliSum> {
    p.validate()?;
    let n = p.n;
    let h = match &p.payload {
        Payload::MaxCut { edges } => {
            let mut terms = Vec::with_capacity(2 * edges.len());
            for &(a, b) in edges {
                terms.push(PauliString::identity(n).scaled((-0.5).into()));
                terms.push(PauliString::pair(n, a, Pauli::Z, b, Pauli::Z, 0.5));
            }
            PauliSum::from_terms(n, terms)?
        }
        Payload::NumberPartition { numbers } => {
            let terms = numbers.iter().enumerate().map(|(i, &v)| PauliString::single(n, i, Pauli::Z, v as f64)).collect();
            let linear = PauliSum::from_terms(n, terms)?;
            linear.product(&linear)?
        }
        Payload::Knapsack { weights, values, capacity, penalty } => {
            let mut reward = PauliSum::zero(n);
            let mut load = PauliSum::constant(n, -(*capacity as f64));
            for i in 0..n {
                let q = q_operator(n, i);
                reward = reward.plus(&q.scaled(-(values[i] as f64)))?;
                load = load.plus(&q.scaled(weights[i] as f64))?;
            }
            reward.plus(&load.product(&load)?.scaled(*penalty))?
        }
        Payload::SpinGlass { jx, jy, jz } => {
            let mut terms = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    terms.push(PauliString::pair(n, i, Pauli::X, j, Pauli::X, jx[i][j]));
                    terms.push(PauliString::pair(n, i, Pauli::Y, j, Pauli::Y, jy[i][j]));
                    terms.push(PauliString::pair(n, i, Pauli::Z, j, Pauli::Z, jz[i][j]));
                }
            }
            PauliSum::from_terms(n, terms)?
        }
    };
    Ok(h.simplify())
}

/// Erdős–Rényi graph; the draw is repeated until at least one edge exists.
pub fn gen_maxcut(n: usize, edge_probability: f64, seed: u64) -> Result<ProblemInstance> {
    if n < 2 || !(edge_probability > 0.0 && edge_probability <= 1.0) {
        return Err(Error::InvalidArgument("max-cut needs n >= 2 and 0 < p <= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < edge_probability {
                    edges.push((a, b));
                }
            }
        }
        if !edges.is_empty() {
            return ProblemInstance::max_cut(n, edges, seed);
        }
    }
}

pub fn gen_numpart(n: usize, value_max: u64, seed: u64) -> Result<ProblemInstance> {
    if n < 2 || value_max == 0 {
        return Err(Error::InvalidArgument("number partitioning needs n >= 2 and value_max >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let numbers = (0..n).map(|_| rng.random_range(1..=value_max)).collect();
    ProblemInstance::number_partition(numbers, seed)
}

/// Values in `[1, value_max]`, weights in `[1, weight_max]`, capacity `ceil(sum(w)/2)`.
pub fn gen_knapsack(n: usize, value_max: u64, weight_max: u64, seed: u64) -> Result<ProblemInstance> {
    if n < 2 || value_max == 0 || weight_max == 0 {
        return Err(Error::InvalidArgument("knapsack needs n >= 2 and positive ranges".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<u64> = (0..n).map(|_| rng.random_range(1..=value_max)).collect();
    let weights: Vec<u64> = (0..n).map(|_| rng.random_range(1..=weight_max)).collect();
    let capacity = weights.iter().sum::<u64>().div_ceil(2);
    ProblemInstance::knapsack(weights, values, capacity, seed)
}

/// Truncated normal sampler: draws from `Normal(mu, sigma)` until the value
/// lies strictly inside `bounds`.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedNormal {
    normal: Normal<f64>,
    lo: f64,
    hi: f64,
}

impl TruncatedNormal {
    pub fn new(mu: f64, sigma: f64, bounds: (f64, f64)) -> Result<Self> {
        let (lo, hi) = bounds;
        if !(lo < mu && mu < hi) || sigma <= 0.0 {
            return Err(Error::InvalidArgument("bounds must straddle the mean and sigma must be positive".into()));
        }
        let normal = Normal::new(mu, sigma).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self { normal, lo, hi })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let v = self.normal.sample(rng);
            if v > self.lo && v < self.hi {
                return v;
            }
        }
    }
}

pub fn gen_spinglass(n: usize, mu: f64, sigma: f64, bounds: (f64, f64), seed: u64) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::InvalidArgument("spin glass needs n >= 2".into()));
    }
    let dist = TruncatedNormal::new(mu, sigma, bounds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jx = vec![vec![0.0; n]; n];
    let mut jy = vec![vec![0.0; n]; n];
    let mut jz = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            jx[i][j] = dist.sample(&mut rng);
            jy[i][j] = dist.sample(&mut rng);
            jz[i][j] = dist.sample(&mut rng);
        }
    }
    ProblemInstance::spin_glass(jx, jy, jz, seed)
}

/// Generator parameters for every family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorParams {
    pub edge_probability: f64,
    pub numpart_value_max: u64,
    pub knapsack_value_max: u64,
    pub knapsack_weight_max: u64,
    pub spinglass_mu: f64,
    pub spinglass_sigma: f64,
    pub spinglass_bounds: (f64, f64),
}

impl Default for GeneratorParams {
    fn default() -> Self {
        Self {
            edge_probability: 0.5,
            numpart_value_max: 100,
            knapsack_value_max: 50,
            knapsack_weight_max: 50,
            spinglass_mu: 0.0,
            spinglass_sigma: 0.3,
            spinglass_bounds: (-1.0, 1.0),
        }
    }
}

pub fn generate(kind: ProblemKind, n: usize, seed: u64, params: &GeneratorParams) -> Result<ProblemInstance> {
    match kind {
        ProblemKind::MaxCut => gen_maxcut(n, params.edge_probability, seed),
        ProblemKind::NumberPartition => gen_numpart(n, params.numpart_value_max, seed),
        ProblemKind::Knapsack => gen_knapsack(n, params.knapsack_value_max, params.knapsack_weight_max, seed),
        ProblemKind::SpinGlass => {
            gen_spinglass(n, params.spinglass_mu, params.spinglass_sigma, params.spinglass_bounds, seed)
        }
    }
}

/// Ground energy, degeneracy and an orthonormal basis of the ground subspace.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub energy: f64,
    pub degeneracy: usize,
    pub subspace: Vec<StateVector>,
    /// Optimal basis indices; empty for non-classical problems.
    pub optimal_bitstrings: Vec<usize>,
}

impl GroundTruth {
    pub fn is_optimal(&self, bits: usize) -> bool {
        self.optimal_bitstrings.binary_search(&bits).is_ok()
    }
}

/// Exhaustive minimization of the classical cost over all `2^n` bitstrings.
pub fn brute_force_classical(p: &ProblemInstance) -> Result<GroundTruth> {
    if !p.kind().is_classical() {
        return Err(Error::Unsupported("brute-force oracle needs a classical problem".into()));
    }
    if p.n > MAX_BRUTE_FORCE_QUBITS {
        return Err(Error::DenseGuard { n: p.n, max: MAX_BRUTE_FORCE_QUBITS });
    }
    let mut best = f64::INFINITY;
    let mut argmins = Vec::new();
    for bits in 0..1usize << p.n {
        let cost = p.classical_cost(bits).expect("classical");
        if cost < best {
            best = cost;
            argmins.clear();
        }
        if cost == best {
            argmins.push(bits);
        }
    }
    let subspace = if p.n <= crate::pauli::MAX_DENSE_QUBITS {
        argmins.iter().map(|&b| StateVector::basis(p.n, b)).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    Ok(GroundTruth { energy: best, degeneracy: argmins.len(), subspace, optimal_bitstrings: argmins })
}

/// Default degeneracy tolerance, relative to the ground energy scale.
pub fn default_degeneracy_tol(e0: f64) -> f64 {
    1e-9 * e0.abs().max(1.0)
}

/// Dense diagonalization oracle; eigenvalues within `degeneracy_tol` of the
/// minimum span the ground subspace (default [`default_degeneracy_tol`]).
pub fn exact_ground_subspace(h: &PauliSum, degeneracy_tol: Option<f64>) -> Result<GroundTruth> {
    if h.n_qubits() > MAX_EXACT_QUBITS {
        return Err(Error::DenseGuard { n: h.n_qubits(), max: MAX_EXACT_QUBITS });
    }
    if !h.is_hermitian() {
        return Err(Error::NonHermitian);
    }
    let eig = HermitianEigen::new(h.to_matrix()?)?;
    let e0 = eig.values[0];
    let tol = degeneracy_tol.unwrap_or_else(|| default_degeneracy_tol(e0));
    let n = h.n_qubits();
    let mut subspace = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam - e0 > tol {
            break;
        }
        let amps = eig.vectors.column(k).iter().copied().collect();
        subspace.push(StateVector::from_amplitudes(n, amps)?);
    }
    Ok(GroundTruth { energy: e0, degeneracy: subspace.len(), subspace, optimal_bitstrings: Vec::new() })
}

/// Oracle matching the problem kind: exhaustive for classical families,
/// dense diagonalization for the spin glass.
pub fn ground_truth(p: &ProblemInstance) -> Result<GroundTruth> {
    if p.kind().is_classical() {
        brute_force_classical(p)
    } else {
        exact_ground_subspace(&build_hamiltonian(p)?, None)
    }
}

/// Knapsack selection encoded by a basis state (item `i` taken iff bit `i` is 0).
pub fn knapsack_selection(bits: usize, n: usize) -> Vec<bool> {
    (0..n).map(|i| bits >> i & 1 == 0).collect()
}

/// Best total value over all selections within capacity, by enumeration.
pub fn knapsack_constrained_optimum(p: &ProblemInstance) -> Result<u64> {
    let Payload::Knapsack { weights, values, capacity, .. } = &p.payload else {
        return Err(Error::InvalidArgument("not a knapsack instance".into()));
    };
    let mut best = 0;
    for bits in 0..1usize << p.n {
        let sel = knapsack_selection(bits, p.n);
        let w: u64 = sel.iter().zip(weights).filter(|(s, _)| **s).map(|(_, w)| w).sum();
        let v: u64 = sel.iter().zip(values).filter(|(s, _)| **s).map(|(_, v)| v).sum();
        if w <= *capacity {
            best = best.max(v);
        }
    }
    Ok(best)
}

pub fn instance_to_line(p: &ProblemInstance) -> Result<String> {
    Ok(serde_json::to_string(p)?)
}

pub fn instance_from_line(line: &str) -> Result<ProblemInstance> {
    let p: ProblemInstance = serde_json::from_str(line)?;
    p.validate()?;
    Ok(p)
}

pub fn write_instances(path: &Path, instances: &[ProblemInstance]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for p in instances {
        writeln!(w, "{}", instance_to_line(p)?)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_instances(path: &Path) -> Result<Vec<ProblemInstance>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(instance_from_line(&line).map_err(|e| Error::Parse(format!("line {}: {e}", k + 1)))?);
    }
    Ok(out)
}
