//! Benchmark suites, algorithm dispatch, scoring, persistence and summaries.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{mpsc, OnceLock};
use std::time::Instant;

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::annealer::{sa_solve, SaConfig};
use crate::dynamics::{
    imag_time_evolve, imag_time_evolve_truncated, qa_schedule, real_time_evolve, step_count, Observer, Schedule,
};
use crate::pauli::PauliSum;
use crate::problems::{build_hamiltonian, generate, ground_truth, GeneratorParams, GroundTruth, ProblemInstance, ProblemKind};
use crate::qite::{run_qite, JacobianMethod, QiteConfig, QiteMode, ScheduleKind, DEFAULT_LAMBDA};
use crate::statevector::StateVector;
use crate::variational::{run_qaoa, run_vqe, VariationalConfig};
use crate::{Error, Result};

/// Largest register accepted by sweeps.
pub const MAX_SWEEP_QUBITS: usize = 12;

pub const RESULTS_HEADER: [&str; 12] = [
    "instance_id",
    "kind",
    "n",
    "algorithm",
    "fidelity",
    "success_fraction",
    "final_energy",
    "ground_energy",
    "wall_time_s",
    "seed",
    "config_hash",
    "error",
];

pub const SUMMARY_HEADER: [&str; 8] = ["kind", "algorithm", "count", "min", "q1", "median", "q3", "max"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Vqe,
    Qaoa,
    QiteA,
    QiteAf,
    ItqaA,
    ItqaAf,
    QiteSim,
    ItqaSim,
    QiteTn,
    ItqaTn,
    QaSim,
    Sa,
    /// QAOA at a fixed depth, as used by sweeps.
    QaoaDepth(usize),
}

impl Algorithm {
    pub const ALL: [Algorithm; 12] = [
        Algorithm::Vqe,
        Algorithm::Qaoa,
        Algorithm::QiteA,
        Algorithm::QiteAf,
        Algorithm::ItqaA,
        Algorithm::ItqaAf,
        Algorithm::QiteSim,
        Algorithm::ItqaSim,
        Algorithm::QiteTn,
        Algorithm::ItqaTn,
        Algorithm::QaSim,
        Algorithm::Sa,
    ];

    pub fn tag(self) -> String {
        match self {
            Algorithm::Vqe => "vqe".into(),
            Algorithm::Qaoa => "qaoa".into(),
            Algorithm::QiteA => "qite_a".into(),
            Algorithm::QiteAf => "qite_af".into(),
            Algorithm::ItqaA => "itqa_a".into(),
            Algorithm::ItqaAf => "itqa_af".into(),
            Algorithm::QiteSim => "qite_sim".into(),
            Algorithm::ItqaSim => "itqa_sim".into(),
            Algorithm::QiteTn => "qite_tn".into(),
            Algorithm::ItqaTn => "itqa_tn".into(),
            Algorithm::QaSim => "qa_sim".into(),
            Algorithm::Sa => "sa".into(),
            Algorithm::QaoaDepth(p) => format!("qaoa_p{p}"),
        }
    }

    /// Whether the run draws random numbers.
    pub fn uses_seed(self) -> bool {
        matches!(
            self,
            Algorithm::Vqe | Algorithm::QiteA | Algorithm::ItqaA | Algorithm::QaSim | Algorithm::Sa
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(a) = Algorithm::ALL.into_iter().find(|a| a.tag() == s) {
            return Ok(a);
        }
        if let Some(p) = s.strip_prefix("qaoa_p").and_then(|p| p.parse().ok()) {
            return Ok(Algorithm::QaoaDepth(p));
        }
        if s.ends_with("_hw") {
            return Err(Error::Unsupported(format!("hardware backends unsupported ('{s}')")));
        }
        let valid: Vec<String> = Algorithm::ALL.iter().map(|a| a.tag()).collect();
        Err(Error::InvalidArgument(format!("unknown algorithm '{s}' (valid: {}, qaoa_p<depth>)", valid.join(", "))))
    }
}

/// Parses a comma-separated tag list; `all` expands to every standard tag.
pub fn parse_algorithms(list: &str) -> Result<Vec<Algorithm>> {
    let mut out: Vec<Algorithm> = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let items = if item == "all" { Algorithm::ALL.to_vec() } else { vec![item.parse()?] };
        for a in items {
            if !out.contains(&a) {
                out.push(a);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidArgument("no algorithms given".into()));
    }
    Ok(out)
}

/// Imaginary-time step and horizon.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeParams {
    pub dt: f64,
    pub total_time: f64,
}

impl TimeParams {
    pub fn steps(&self) -> Result<usize> {
        step_count(self.total_time, self.dt)
    }
}

/// Default `(dt, T, steps)` per problem family.
pub fn default_schedule_params(kind: ProblemKind) -> (f64, f64, usize) {
    match kind {
        ProblemKind::MaxCut | ProblemKind::SpinGlass => (0.1, 1000.0, 10_000),
        ProblemKind::NumberPartition => (1e-5, 0.2, 20_000),
        ProblemKind::Knapsack => (1e-7, 1e-3, 10_000),
    }
}

fn default_time(kind: ProblemKind) -> TimeParams {
    let (dt, total_time, _) = default_schedule_params(kind);
    TimeParams { dt, total_time }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeTable {
    pub maxcut: TimeParams,
    pub numpart: TimeParams,
    pub knapsack: TimeParams,
    pub spinglass: TimeParams,
}

impl Default for TimeTable {
    fn default() -> Self {
        Self {
            maxcut: default_time(ProblemKind::MaxCut),
            numpart: default_time(ProblemKind::NumberPartition),
            knapsack: default_time(ProblemKind::Knapsack),
            spinglass: default_time(ProblemKind::SpinGlass),
        }
    }
}

impl TimeTable {
    pub fn get(&self, kind: ProblemKind) -> TimeParams {
        match kind {
            ProblemKind::MaxCut => self.maxcut,
            ProblemKind::NumberPartition => self.numpart,
            ProblemKind::Knapsack => self.knapsack,
            ProblemKind::SpinGlass => self.spinglass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QiteSettings {
    pub lambda: f64,
    /// SU(2) repetitions of the ansatz-based circuit.
    pub reps: usize,
    pub jacobian: JacobianMethod,
}

impl Default for QiteSettings {
    fn default() -> Self {
        Self { lambda: DEFAULT_LAMBDA, reps: 2, jacobian: JacobianMethod::Analytic }
    }
}

/// Simulated quantum annealing by real-time integration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QaSettings {
    pub dt: f64,
    pub total_time: f64,
    pub shots: usize,
    /// Divide the problem Hamiltonian by its largest coefficient magnitude
    /// when that exceeds one, as annealing hardware rescales couplings.
    pub normalize: bool,
}

impl Default for QaSettings {
    fn default() -> Self {
        Self { dt: 1e-2, total_time: 20.0, shots: 1000, normalize: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TnSettings {
    /// Bond dimension; defaults to the number of qubits.
    pub chi: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteSettings {
    pub count: usize,
    pub n: usize,
    pub seed: u64,
    pub generator: GeneratorParams,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        Self { count: 250, n: 5, seed: 0, generator: GeneratorParams::default() }
    }
}

/// Everything that determines a run. Seeds inside `variational` and `sa`
/// are replaced by per-run seeds derived from the instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchConfig {
    pub suite: SuiteSettings,
    pub time: TimeTable,
    pub variational: VariationalConfig,
    pub qite: QiteSettings,
    pub qa: QaSettings,
    pub sa: SaConfig,
    pub tn: TnSettings,
}

impl BenchConfig {
    /// Short hash of the settings that affect `algorithm` on `kind`.
    pub fn config_hash(&self, algorithm: Algorithm, kind: ProblemKind) -> String {
        let time = self.time.get(kind);
        let params = match algorithm {
            Algorithm::Vqe | Algorithm::Qaoa | Algorithm::QaoaDepth(_) => serde_json::to_value(&self.variational),
            Algorithm::QiteA | Algorithm::QiteAf | Algorithm::ItqaA | Algorithm::ItqaAf => {
                serde_json::to_value((&self.qite, time))
            }
            Algorithm::QiteSim | Algorithm::ItqaSim => serde_json::to_value(time),
            Algorithm::QiteTn | Algorithm::ItqaTn => serde_json::to_value((time, &self.tn)),
            Algorithm::QaSim => serde_json::to_value(&self.qa),
            Algorithm::Sa => serde_json::to_value(&self.sa),
        }
        .expect("settings serialize");
        let text = format!("{}|{}", algorithm.tag(), params);
        Sha256::digest(text.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Per-run seed from the instance seed and the algorithm tag.
pub fn run_seed(instance_seed: u64, algorithm: Algorithm) -> u64 {
    let digest = Sha256::digest(format!("{instance_seed}|{}", algorithm.tag()).as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// `count` instances with seeds `base_seed + i`.
pub fn make_suite(
    kind: ProblemKind,
    count: usize,
    n: usize,
    base_seed: u64,
    params: &GeneratorParams,
) -> Result<Vec<ProblemInstance>> {
    if count == 0 {
        return Err(Error::InvalidArgument("suite count must be at least 1".into()));
    }
    (0..count as u64).map(|i| generate(kind, n, base_seed + i, params)).collect()
}

/// Ground-subspace population of a final state.
pub fn score_state(state: &StateVector, truth: &GroundTruth) -> Result<f64> {
    state.fidelity_to_subspace(&truth.subspace)
}

/// Share of shots landing on an optimal bitstring.
pub fn score_samples(counts: &BTreeMap<usize, usize>, truth: &GroundTruth) -> Result<f64> {
    if truth.optimal_bitstrings.is_empty() {
        return Err(Error::InvalidArgument("sample scoring needs a classical optimum".into()));
    }
    let total: usize = counts.values().sum();
    if total == 0 {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let hits: usize = counts.iter().filter(|(b, _)| truth.is_optimal(**b)).map(|(_, c)| c).sum();
    Ok(hits as f64 / total as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub kind: ProblemKind,
    pub n: usize,
    pub algorithm: String,
    pub fidelity: Option<f64>,
    pub success_fraction: Option<f64>,
    pub final_energy: Option<f64>,
    pub ground_energy: Option<f64>,
    pub wall_time_s: Option<f64>,
    pub seed: u64,
    pub config_hash: String,
    /// Empty on success.
    pub error: String,
}

impl RunRecord {
    pub fn is_error(&self) -> bool {
        !self.error.is_empty()
    }

    /// Tag of the requested algorithm, mapping labelled variants back.
    pub fn base_algorithm(&self) -> &str {
        match self.algorithm.as_str() {
            "sa_diag" => "sa",
            other => other,
        }
    }
}

struct Outcome {
    fidelity: f64,
    success_fraction: Option<f64>,
    final_energy: f64,
    label: Option<&'static str>,
}

fn plus(n: usize) -> Result<StateVector> {
    StateVector::plus_state(n)
}

fn execute(
    alg: Algorithm,
    h: &PauliSum,
    truth: &GroundTruth,
    kind: ProblemKind,
    cfg: &BenchConfig,
    seed: u64,
) -> Result<Outcome> {
    let n = h.n_qubits();
    let time = cfg.time.get(kind);
    let state_outcome = |state: &StateVector, energy: f64| -> Result<Outcome> {
        Ok(Outcome { fidelity: score_state(state, truth)?, success_fraction: None, final_energy: energy, label: None })
    };
    match alg {
        Algorithm::Vqe | Algorithm::Qaoa | Algorithm::QaoaDepth(_) => {
            let mut vc = VariationalConfig { seed, ..cfg.variational.clone() };
            let run = match alg {
                Algorithm::Vqe => run_vqe(h, &vc)?,
                Algorithm::QaoaDepth(p) => {
                    vc.p = p;
                    run_qaoa(h, &vc)?
                }
                _ => run_qaoa(h, &vc)?,
            };
            state_outcome(&run.state, run.state.expectation(h)?)
        }
        Algorithm::QiteA | Algorithm::QiteAf | Algorithm::ItqaA | Algorithm::ItqaAf => {
            let mode = if matches!(alg, Algorithm::QiteA | Algorithm::ItqaA) {
                QiteMode::AnsatzBased
            } else {
                QiteMode::AnsatzFree
            };
            let schedule =
                if matches!(alg, Algorithm::QiteA | Algorithm::QiteAf) { ScheduleKind::Constant } else { ScheduleKind::Qa };
            let mut qc = QiteConfig::new(mode, schedule, time.dt, time.total_time);
            qc.lambda = cfg.qite.lambda;
            qc.reps = cfg.qite.reps;
            qc.jacobian = cfg.qite.jacobian;
            qc.seed = seed;
            let run = run_qite(h, &qc, None)?;
            let state = &run.trajectory.final_state;
            state_outcome(state, state.expectation(h)?)
        }
        Algorithm::QiteSim | Algorithm::ItqaSim | Algorithm::QiteTn | Algorithm::ItqaTn => {
            let sched = if matches!(alg, Algorithm::QiteSim | Algorithm::QiteTn) {
                Schedule::constant(h.clone(), time.total_time)?
            } else {
                qa_schedule(h, time.total_time)?
            };
            let s0 = plus(n)?;
            let observer = Observer::default();
            let tr = if matches!(alg, Algorithm::QiteTn | Algorithm::ItqaTn) {
                imag_time_evolve_truncated(&sched, &s0, time.dt, &observer, cfg.tn.chi.unwrap_or(n))?
            } else {
                imag_time_evolve(&sched, &s0, time.dt, &observer)?
            };
            state_outcome(&tr.final_state, tr.final_state.expectation(h)?)
        }
        Algorithm::QaSim => {
            let scale = h
                .terms()
                .iter()
                .filter(|t| !t.is_identity())
                .map(|t| t.coeff.norm())
                .fold(0.0, f64::max);
            let driven = if cfg.qa.normalize && scale > 1.0 { h.scaled(1.0 / scale) } else { h.clone() };
            let sched = qa_schedule(&driven, cfg.qa.total_time)?;
            let tr = real_time_evolve(&sched, &plus(n)?, cfg.qa.dt, &Observer::default())?;
            let state = &tr.final_state;
            let success = if truth.optimal_bitstrings.is_empty() {
                None
            } else {
                let counts = state.sample(cfg.qa.shots, &mut ChaCha8Rng::seed_from_u64(seed))?;
                Some(score_samples(&counts, truth)?)
            };
            Ok(Outcome {
                fidelity: score_state(state, truth)?,
                success_fraction: success,
                final_energy: state.expectation(h)?,
                label: None,
            })
        }
        Algorithm::Sa => {
            let r = sa_solve(h, &SaConfig { seed, ..cfg.sa.clone() }, truth)?;
            Ok(Outcome {
                fidelity: r.fidelity,
                success_fraction: r.success_fraction,
                final_energy: r.best_energy,
                label: r.diagonal_part.then_some("sa_diag"),
            })
        }
    }
}

/// Runs one algorithm on one instance. Failures become error records.
pub fn run_one(
    instance: &ProblemInstance,
    prepared: std::result::Result<&(PauliSum, GroundTruth), &str>,
    alg: Algorithm,
    cfg: &BenchConfig,
    wall_time: bool,
) -> RunRecord {
    let kind = instance.kind();
    let seed = run_seed(instance.seed, alg);
    let mut record = RunRecord {
        instance_id: instance.id(),
        kind,
        n: instance.n,
        algorithm: alg.tag(),
        fidelity: None,
        success_fraction: None,
        final_energy: None,
        ground_energy: None,
        wall_time_s: None,
        seed,
        config_hash: cfg.config_hash(alg, kind),
        error: String::new(),
    };
    let (h, truth) = match prepared {
        Ok(p) => p,
        Err(e) => {
            record.error = format!("ground truth: {e}");
            return record;
        }
    };
    record.ground_energy = Some(truth.energy);
    let start = Instant::now();
    let outcome = execute(alg, h, truth, kind, cfg, seed);
    if wall_time {
        record.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    match outcome {
        Ok(o) => {
            record.fidelity = Some(o.fidelity);
            record.success_fraction = o.success_fraction;
            record.final_energy = Some(o.final_energy);
            if let Some(label) = o.label {
                record.algorithm = label.into();
            }
            let floor = truth.energy - 1e-6 * truth.energy.abs().max(1.0);
            if o.final_energy < floor {
                record.error = format!("final energy {} below ground energy {}", o.final_energy, truth.energy);
            } else if !(0.0..=1.0).contains(&o.fidelity) {
                record.error = format!("fidelity {} outside [0, 1]", o.fidelity);
            }
        }
        Err(e) => record.error = e.to_string().replace(['\n', '\r'], " "),
    }
    record
}

fn prepare(instance: &ProblemInstance) -> std::result::Result<(PauliSum, GroundTruth), String> {
    let h = build_hamiltonian(instance).map_err(|e| e.to_string())?;
    let truth = ground_truth(instance).map_err(|e| e.to_string())?;
    Ok((h, truth))
}

/// Runs every `(instance, algorithm)` pair not in `done` on `workers`
/// threads and hands records to `sink` in canonical order (instance-major,
/// then algorithm order), regardless of completion order.
pub fn execute_matrix(
    instances: &[ProblemInstance],
    algorithms: &[Algorithm],
    cfg: &BenchConfig,
    workers: usize,
    wall_time: bool,
    done: &HashSet<(String, String)>,
    mut sink: impl FnMut(RunRecord) -> Result<()>,
) -> Result<()> {
    let tasks: Vec<(usize, Algorithm)> = instances
        .iter()
        .enumerate()
        .flat_map(|(i, inst)| {
            let id = inst.id();
            algorithms
                .iter()
                .filter(move |a| !done.contains(&(id.clone(), a.tag())))
                .map(move |a| (i, *a))
                .collect::<Vec<_>>()
        })
        .collect();
    let prepared: Vec<OnceLock<std::result::Result<(PauliSum, GroundTruth), String>>> =
        instances.iter().map(|_| OnceLock::new()).collect();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, RunRecord)>();
    std::thread::scope(|scope| {
        for _ in 0..workers.max(1).min(tasks.len().max(1)) {
            let tx = tx.clone();
            let (tasks, prepared, next) = (&tasks, &prepared, &next);
            scope.spawn(move || loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, alg)) = tasks.get(k) else { break };
                let inst = &instances[i];
                let prep = prepared[i].get_or_init(|| prepare(inst));
                let record = run_one(inst, prep.as_ref().map_err(String::as_str), alg, cfg, wall_time);
                if tx.send((k, record)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut pending = BTreeMap::new();
        let mut expected = 0;
        for (k, record) in rx {
            pending.insert(k, record);
            while let Some(record) = pending.remove(&expected) {
                sink(record)?;
                expected += 1;
            }
        }
        Ok(())
    })
}

#[derive(Clone, Debug)]
pub struct MatrixOptions {
    pub workers: usize,
    pub wall_time: bool,
    pub resume: bool,
}

impl Default for MatrixOptions {
    fn default() -> Self {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self { workers, wall_time: true, resume: false }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatrixSummary {
    pub written: usize,
    pub skipped: usize,
    pub failed: usize,
}

fn parse_record(header: &csv::StringRecord, row: &csv::StringRecord, line: usize) -> Result<RunRecord> {
    row.deserialize(Some(header)).map_err(|e| Error::Parse(format!("line {line}: {e}")))
}

/// Reads a results file, naming the first malformed line.
pub fn read_results(path: &Path) -> Result<Vec<RunRecord>> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_results(&text)
}

fn parse_results(text: &str) -> Result<Vec<RunRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(RESULTS_HEADER) {
        return Err(Error::Parse(format!("line 1: unexpected header '{}'", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for (k, row) in reader.records().enumerate() {
        let line = k + 2;
        let row = row.map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        out.push(parse_record(&header, &row, line)?);
    }
    Ok(out)
}

/// Runs the matrix into `out`, one flushed CSV row per finished run.
///
/// With `resume`, rows already in `out` are kept, a partially written last
/// line is dropped, and only missing pairs run. Since rows are emitted in
/// canonical order, a resumed file equals an uninterrupted one.
pub fn run_matrix(
    instances: &[ProblemInstance],
    algorithms: &[Algorithm],
    cfg: &BenchConfig,
    opts: &MatrixOptions,
    out: &Path,
) -> Result<MatrixSummary> {
    let mut done = HashSet::new();
    let mut summary = MatrixSummary::default();
    let mut needs_header = true;
    if opts.resume && out.exists() {
        let mut text = String::new();
        File::open(out)?.read_to_string(&mut text)?;
        let complete = text.rfind('\n').map_or(0, |i| i + 1);
        if complete < text.len() {
            warn!("dropping partial trailing line of {}", out.display());
            OpenOptions::new().write(true).open(out)?.set_len(complete as u64)?;
            text.truncate(complete);
        }
        if !text.is_empty() {
            for r in parse_results(&text)? {
                done.insert((r.instance_id.clone(), r.base_algorithm().to_string()));
            }
            needs_header = false;
        }
    }
    let file = if needs_header { File::create(out)? } else { OpenOptions::new().append(true).open(out)? };
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    if needs_header {
        writer.write_record(RESULTS_HEADER)?;
        writer.flush()?;
    }
    let wanted: HashSet<(String, String)> =
        instances.iter().flat_map(|i| algorithms.iter().map(move |a| (i.id(), a.tag()))).collect();
    summary.skipped = wanted.intersection(&done).count();
    execute_matrix(instances, algorithms, cfg, opts.workers, opts.wall_time, &done, |record| {
        summary.written += 1;
        summary.failed += usize::from(record.is_error());
        writer.serialize(&record)?;
        writer.flush()?;
        Ok(())
    })?;
    Ok(summary)
}

/// QAOA depth sweep: for each `n`, a suite of `per_cell` instances with
/// seeds `base_seed + i`, each run at every depth in `p_values`.
pub fn sweep_instances(
    kind: ProblemKind,
    n_values: &[usize],
    per_cell: usize,
    base_seed: u64,
    params: &GeneratorParams,
) -> Result<Vec<ProblemInstance>> {
    if let Some(&n) = n_values.iter().find(|&&n| n > MAX_SWEEP_QUBITS) {
        return Err(Error::DenseGuard { n, max: MAX_SWEEP_QUBITS });
    }
    let mut out = Vec::new();
    for &n in n_values {
        out.extend(make_suite(kind, per_cell, n, base_seed, params)?);
    }
    Ok(out)
}

pub fn sweep_algorithms(p_values: &[usize]) -> Vec<Algorithm> {
    p_values.iter().map(|&p| Algorithm::QaoaDepth(p)).collect()
}

/// Sweep driver returning records in memory.
pub fn sweep_qaoa(
    kind: ProblemKind,
    p_values: &[usize],
    n_values: &[usize],
    per_cell: usize,
    base_seed: u64,
    cfg: &BenchConfig,
    workers: usize,
) -> Result<Vec<RunRecord>> {
    let instances = sweep_instances(kind, n_values, per_cell, base_seed, &cfg.suite.generator)?;
    let mut out = Vec::new();
    execute_matrix(&instances, &sweep_algorithms(p_values), cfg, workers, false, &HashSet::new(), |r| {
        out.push(r);
        Ok(())
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub kind: String,
    pub algorithm: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linearly interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Fidelity distribution per `(kind, algorithm)`; error rows are skipped.
pub fn aggregate(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(ProblemKind, String), Vec<f64>> = BTreeMap::new();
    let mut seen = BTreeMap::new();
    for r in records {
        *seen.entry((r.kind, r.algorithm.clone())).or_insert(0usize) += 1;
        if let (false, Some(f)) = (r.is_error(), r.fidelity) {
            cells.entry((r.kind, r.algorithm.clone())).or_default().push(f);
        }
    }
    for key in seen.keys() {
        if !cells.contains_key(key) {
            warn!("no successful runs for {} / {}", key.0, key.1);
        }
    }
    cells
        .into_iter()
        .map(|((kind, algorithm), mut v)| {
            v.sort_by(f64::total_cmp);
            SummaryRow {
                kind: kind.name().into(),
                algorithm,
                count: v.len(),
                min: v[0],
                q1: quantile(&v, 0.25),
                median: quantile(&v, 0.5),
                q3: quantile(&v, 0.75),
                max: v[v.len() - 1],
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], w: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    for row in rows {
        writer.serialize(row)?;
    }
    if rows.is_empty() {
        writer.write_record(SUMMARY_HEADER)?;
    }
    writer.flush()?;
    Ok(())
}

/// Standalone SVG with one fidelity box per summary row.
pub fn render_boxplot(rows: &[SummaryRow]) -> String {
    let (left, top, plot_h, slot) = (60.0, 20.0, 300.0, 40.0);
    let width = left + slot * rows.len().max(1) as f64 + 20.0;
    let height = top + plot_h + 140.0;
    let y = |f: f64| top + (1.0 - f.clamp(0.0, 1.0)) * plot_h;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" font-family="sans-serif" font-size="10">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{left:.1}" y1="{yy:.1}" x2="{x2:.1}" y2="{yy:.1}" stroke="#ddd"/><text x="{tx:.1}" y="{ty:.1}" text-anchor="end">{f:.2}</text>"##,
            yy = y(f),
            x2 = width - 20.0,
            tx = left - 5.0,
            ty = y(f) + 3.0,
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{:.1}" transform="rotate(-90 15 {:.1})" text-anchor="middle">fidelity</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0
    );
    for (i, r) in rows.iter().enumerate() {
        let cx = left + slot * (i as f64 + 0.5);
        let (x0, w) = (cx - slot * 0.3, slot * 0.6);
        let _ = writeln!(
            svg,
            r#"<line x1="{cx:.1}" y1="{:.1}" x2="{cx:.1}" y2="{:.1}" stroke="black"/>"#,
            y(r.max),
            y(r.min)
        );
        let _ = writeln!(
            svg,
            r##"<rect x="{x0:.1}" y="{:.1}" width="{w:.1}" height="{:.1}" fill="#9ecae1" stroke="black"/>"##,
            y(r.q3),
            (y(r.q1) - y(r.q3)).max(0.5)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{x0:.1}" y1="{m:.1}" x2="{:.1}" y2="{m:.1}" stroke="black" stroke-width="2"/>"#,
            x0 + w,
            m = y(r.median)
        );
        let ly = top + plot_h + 10.0;
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.1}" y="{ly:.1}" transform="rotate(60 {cx:.1} {ly:.1})">{} {}</text>"#,
            r.kind, r.algorithm
        );
    }
    svg.push_str("</svg>\n");
    svg
}
