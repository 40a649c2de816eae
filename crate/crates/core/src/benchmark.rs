//! Random-circuit experiments and the QASM corpus harness.

use std::f64::consts::TAU;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::distributor::DistributeError;
use crate::hypergraph::PartitionConfig;
use crate::pipeline::{compile, keep_cheaper, Compiled, Method};
use crate::qasm::{load, FrontendConfig};

pub const CSV_HEADER: [&str; 7] = ["circuit", "n", "k", "method", "cost", "seed", "wall_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomCircuitConfig {
    pub n: usize,
    /// Chance that a draw yields two one-qubit gates instead of one
    /// two-qubit gate.
    pub p_single: f64,
    /// Number of two-qubit gates after which generation stops.
    pub stop_at: usize,
    pub seed: u64,
}

impl RandomCircuitConfig {
    /// `p_single = 0.2`, `stop_at = n²`.
    pub fn new(n: usize, seed: u64) -> Self {
        RandomCircuitConfig {
            n,
            p_single: 0.2,
            stop_at: n * n,
            seed,
        }
    }
}

/// Draws an angle and an ordered pair of distinct qubits; then either one
/// gate from {H, X, RZ} on each of the two qubits, or one gate from
/// {CX, CRZ} controlled by the first. Stops after `stop_at` two-qubit gates.
pub fn random_circuit(cfg: &RandomCircuitConfig) -> Circuit {
    assert!(cfg.n >= 2, "random circuits need two qubits");
    assert!((0.0..=1.0).contains(&cfg.p_single));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut gates = Vec::new();
    let mut two = 0;
    while two < cfg.stop_at {
        let theta = rng.random_range(0.0..TAU);
        let a = rng.random_range(0..cfg.n);
        let mut b = rng.random_range(0..cfg.n - 1);
        if b >= a {
            b += 1;
        }
        if rng.random_bool(cfg.p_single) {
            for (i, q) in [a, b].into_iter().enumerate() {
                let angle = if i == 0 { theta } else { rng.random_range(0.0..TAU) };
                gates.push(match rng.random_range(0..3) {
                    0 => Gate::h(q),
                    1 => Gate::x(q),
                    _ => Gate::rz(angle, q),
                });
            }
        } else {
            gates.push(if rng.random_bool(0.5) {
                Gate::cx(a, b)
            } else {
                Gate::crz(theta, a, b)
            });
            two += 1;
        }
    }
    Circuit::from_gates(cfg.n, gates).expect("qubits drawn in range")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_list: Vec<usize>,
    pub k_list: Vec<usize>,
    pub repetitions: usize,
    pub seed: u64,
    pub p_single: f64,
    pub restarts: usize,
    pub refinement_passes: usize,
    /// Method whose reduction is measured.
    pub candidate: Method,
    /// Method it is measured against.
    pub reference: Method,
    /// Record wall-clock times. Off by default so output files are
    /// reproducible byte for byte.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = PartitionConfig::new(2, 0);
        ExperimentConfig {
            n_list: vec![8, 16, 24, 32],
            k_list: vec![2, 4, 8],
            repetitions: 10,
            seed: 0,
            p_single: 0.2,
            restarts: p.restarts,
            refinement_passes: p.refinement_passes,
            candidate: Method::Greedy,
            reference: Method::Baseline,
            timing: false,
        }
    }
}

impl ExperimentConfig {
    fn partition_config(&self, k: usize, seed: u64) -> PartitionConfig {
        PartitionConfig {
            restarts: self.restarts,
            refinement_passes: self.refinement_passes,
            ..PartitionConfig::new(k, seed)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub circuit: String,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub greedy_cost: usize,
    pub baseline_cost: usize,
    /// 100·(baseline − greedy)/baseline; absent when the baseline is 0.
    pub reduction_percent: Option<f64>,
    pub greedy_ms: u64,
    pub baseline_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: Option<usize>,
    pub k: usize,
    pub instances: usize,
    pub mean_greedy: f64,
    pub mean_baseline: f64,
    pub mean_reduction: f64,
    pub std_reduction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub records: Vec<InstanceRecord>,
    /// One row per (n, k), then one row per k over all n (with `n` empty).
    pub aggregates: Vec<Aggregate>,
}

/// Seed of instance `index` under a run seed.
pub fn instance_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.next_u64()
}

/// For each (n, k) compiles `repetitions` random circuits with both
/// methods. Circuit `r` for a given n is shared across all k.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, DistributeError> {
    let mut jobs = Vec::new();
    for (ni, &n) in cfg.n_list.iter().enumerate() {
        for &k in &cfg.k_list {
            for r in 0..cfg.repetitions {
                let seed = instance_seed(cfg.seed, (ni * cfg.repetitions + r) as u64);
                jobs.push((n, k, r, seed));
            }
        }
    }
    let records: Vec<InstanceRecord> = jobs
        .par_iter()
        .map(|&(n, k, r, seed)| {
            let circuit = random_circuit(&RandomCircuitConfig {
                p_single: cfg.p_single,
                ..RandomCircuitConfig::new(n, seed)
            });
            let pcfg = cfg.partition_config(k, seed);
            let (g, greedy_ms) = timed(cfg.timing, || compile(&circuit, cfg.candidate, &pcfg))?;
            let (b, baseline_ms) = timed(cfg.timing, || compile(&circuit, cfg.reference, &pcfg))?;
            let g = match (cfg.candidate, cfg.reference) {
                (Method::Greedy, Method::Baseline) => keep_cheaper(g, &b),
                _ => g,
            };
            let (greedy_cost, baseline_cost) = (g.cost, b.cost);
            Ok(InstanceRecord {
                circuit: format!("random_n{n}_r{r}"),
                n,
                k,
                seed,
                greedy_cost,
                baseline_cost,
                reduction_percent: reduction(greedy_cost, baseline_cost),
                greedy_ms,
                baseline_ms,
            })
        })
        .collect::<Result<_, DistributeError>>()?;
    let aggregates = aggregate(&records, &cfg.n_list, &cfg.k_list);
    Ok(ExperimentResult { records, aggregates })
}

fn timed(
    on: bool,
    f: impl FnOnce() -> Result<Compiled, DistributeError>,
) -> Result<(Compiled, u64), DistributeError> {
    let start = Instant::now();
    let out = f()?;
    let ms = if on { start.elapsed().as_millis() as u64 } else { 0 };
    Ok((out, ms))
}

pub fn reduction(greedy: usize, baseline: usize) -> Option<f64> {
    (baseline > 0).then(|| 100.0 * (baseline as f64 - greedy as f64) / baseline as f64)
}

fn aggregate(records: &[InstanceRecord], n_list: &[usize], k_list: &[usize]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    let summarise = |n: Option<usize>, k: usize, rows: Vec<&InstanceRecord>| {
        let count = rows.len().max(1) as f64;
        let reds: Vec<f64> = rows.iter().filter_map(|r| r.reduction_percent).collect();
        let (mean, std) = mean_std(&reds);
        Aggregate {
            n,
            k,
            instances: rows.len(),
            mean_greedy: rows.iter().map(|r| r.greedy_cost as f64).sum::<f64>() / count,
            mean_baseline: rows.iter().map(|r| r.baseline_cost as f64).sum::<f64>() / count,
            mean_reduction: mean,
            std_reduction: std,
        }
    };
    for &n in n_list {
        for &k in k_list {
            let rows = records.iter().filter(|r| r.n == n && r.k == k).collect();
            out.push(summarise(Some(n), k, rows));
        }
    }
    for &k in k_list {
        let rows = records.iter().filter(|r| r.k == k).collect();
        out.push(summarise(None, k, rows));
    }
    out
}

/// Mean and sample standard deviation; zeros for empty input.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    if xs.len() == 1 {
        return (m, 0.0);
    }
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64;
    (m, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QasmRow {
    pub circuit: String,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub greedy_cost: Option<usize>,
    pub baseline_cost: Option<usize>,
    pub greedy_ms: u64,
    pub baseline_ms: u64,
    /// Frontend or partitioner failure for this file.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QasmBenchConfig {
    pub k: usize,
    /// Defaults to ⌊n/k⌋ + 1 per file.
    pub capacity: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub refinement_passes: usize,
    pub frontend: FrontendConfig,
    pub timing: bool,
}

impl Default for QasmBenchConfig {
    fn default() -> Self {
        let p = PartitionConfig::new(2, 0);
        QasmBenchConfig {
            k: 2,
            capacity: None,
            seed: 0,
            restarts: p.restarts,
            refinement_passes: p.refinement_passes,
            frontend: FrontendConfig::default(),
            timing: false,
        }
    }
}

/// Greedy and baseline costs for every file. A file that fails to load or
/// partition yields a row with `error` set; the batch continues.
pub fn run_qasmbench(files: &[PathBuf], cfg: &QasmBenchConfig) -> Vec<QasmRow> {
    files
        .par_iter()
        .map(|path| {
            let circuit = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            let mut row = QasmRow {
                circuit,
                n: 0,
                k: cfg.k,
                seed: cfg.seed,
                greedy_cost: None,
                baseline_cost: None,
                greedy_ms: 0,
                baseline_ms: 0,
                error: None,
            };
            let loaded = fs::read_to_string(path)
                .map_err(|e| e.to_string())
                .and_then(|src| load(&src, &cfg.frontend).map_err(|e| e.to_string()));
            let c = match loaded {
                Ok(c) => c,
                Err(e) => {
                    row.error = Some(e);
                    return row;
                }
            };
            row.n = c.num_qubits();
            let pcfg = PartitionConfig {
                capacity: cfg.capacity,
                restarts: cfg.restarts,
                refinement_passes: cfg.refinement_passes,
                ..PartitionConfig::new(cfg.k, cfg.seed)
            };
            let run = (|| {
                let (g, gms) = timed(cfg.timing, || compile(&c, Method::Greedy, &pcfg))?;
                let (b, bms) = timed(cfg.timing, || compile(&c, Method::Baseline, &pcfg))?;
                let g = keep_cheaper(g, &b);
                let (g, b) = ((g.cost, gms), (b.cost, bms));
                Ok::<_, DistributeError>((g, b))
            })();
            match run {
                Ok(((g, gms), (b, bms))) => {
                    row.greedy_cost = Some(g);
                    row.baseline_cost = Some(b);
                    row.greedy_ms = gms;
                    row.baseline_ms = bms;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

/// `.qasm` files directly inside `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "qasm"))
        .collect();
    files.sort();
    Ok(files)
}

/// CSV with the fixed header, two rows per instance.
pub fn experiment_csv(result: &ExperimentResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in &result.records {
        for (method, cost, ms) in [("greedy", r.greedy_cost, r.greedy_ms), ("baseline", r.baseline_cost, r.baseline_ms)] {
            w.serialize((&r.circuit, r.n, r.k, method, cost, r.seed, ms))
                .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// CSV with the fixed header; failed files contribute no rows.
pub fn qasm_csv(rows: &[QasmRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        for (method, cost, ms) in [("greedy", r.greedy_cost, r.greedy_ms), ("baseline", r.baseline_cost, r.baseline_ms)] {
            if let Some(cost) = cost {
                w.serialize((&r.circuit, r.n, r.k, method, cost, r.seed, ms))
                    .expect("in-memory write");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// One row per file in the layout `circuit,n,greedy,baseline`; failed files
/// keep empty cost cells.
pub fn table_csv(rows: &[QasmRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["circuit", "n", "greedy", "baseline"]).expect("in-memory write");
    for r in rows {
        w.serialize((&r.circuit, r.n, r.greedy_cost, r.baseline_cost))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Aggregates as CSV: `n,k,instances,mean_greedy,mean_baseline,mean_reduction,std_reduction`.
pub fn aggregate_csv(result: &ExperimentResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "k", "instances", "mean_greedy", "mean_baseline", "mean_reduction", "std_reduction"])
        .expect("in-memory write");
    for a in &result.aggregates {
        w.serialize((
            a.n,
            a.k,
            a.instances,
            a.mean_greedy,
            a.mean_baseline,
            a.mean_reduction,
            a.std_reduction,
        ))
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
