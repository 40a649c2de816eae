//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p dqc-core --test acceptance -- --nocapture`.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::{brute_force_bipartition, oracle_apply, oracle_columns, phase_distance, random_hypergraph, random_test_circuit};
use dqc_core::benchmark::{
    aggregate_csv, corpus_files, experiment_csv, qasm_csv, random_circuit, run_experiment, run_qasmbench,
    ExperimentConfig, ExperimentResult, QasmBenchConfig, QasmRow, RandomCircuitConfig,
};
use dqc_core::distributor::{emit, AllocationMap};
use dqc_core::hypergraph::{connectivity_cost, partition, PartitionConfig};
use dqc_core::matrix::{c, ComplexMatrix, C64};
use dqc_core::packer::{baseline_pack, greedy_pack, merge_adjacent, GatePacket, PackingSequence, PacketForm};
use dqc_core::qasm::{load, FrontendConfig};
use dqc_core::verifier::{all_branches, distributed_branches, StateVector};
use dqc_core::{Circuit, Gate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that do not pass on this workspace, with the reason. The gate
/// fails if one of them starts passing, so the list cannot go stale.
const KNOWN_GAPS: &[(usize, &str)] = &[(
    1,
    "the original knn_n41 file is unavailable; the bundled reconstruction is a controlled-swap distance test and costs 11/30, not 1/1",
)];

struct Verdict {
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/qasmbench")
}

fn corpus_rows() -> Vec<QasmRow> {
    let files = corpus_files(&corpus_dir()).expect("bundled corpus");
    run_qasmbench(&files, &QasmBenchConfig::default())
}

fn row<'a>(rows: &'a [QasmRow], name: &str) -> &'a QasmRow {
    rows.iter().find(|r| r.circuit == name).unwrap_or_else(|| panic!("{name} missing from the corpus"))
}

fn costs(r: &QasmRow) -> (usize, usize) {
    match (&r.error, r.greedy_cost, r.baseline_cost) {
        (None, Some(g), Some(b)) => (g, b),
        (e, ..) => panic!("{}: {e:?}", r.circuit),
    }
}

fn table_parity(rows: &[QasmRow], elapsed: Duration) -> Verdict {
    let expected = [
        ("ghz_n40", 1, 1),
        ("cat_n35", 1, 1),
        ("bv_n70", 1, 1),
        ("ising_n34", 1, 1),
        ("knn_n41", 1, 1),
        ("wstate_n76", 2, 2),
        ("swap_test_n25", 12, 18),
        ("swap_test_n41", 20, 30),
    ];
    let mut bad = Vec::new();
    let mut seen = Vec::new();
    for (name, g_max, b_exact) in expected {
        let (g, b) = costs(row(rows, name));
        seen.push(format!("{name} {g}/{b}"));
        if g > g_max || b != b_exact {
            bad.push(format!("{name} got {g}/{b}, want ≤{g_max}/{b_exact}"));
        }
    }
    let fast = elapsed < Duration::from_secs(30);
    if !fast {
        bad.push(format!("corpus took {elapsed:?}"));
    }
    Verdict {
        pass: bad.is_empty(),
        detail: if bad.is_empty() { seen.join(", ") } else { bad.join("; ") },
        elapsed,
    }
}

fn qft(rows: &[QasmRow], elapsed: Duration) -> Verdict {
    let (g29, b29) = costs(row(rows, "qft_n29"));
    let (g63, b63) = costs(row(rows, "qft_n63"));
    let pass = b29 == 210 && g29 <= 17 && g63 <= 43 && elapsed < Duration::from_secs(120);
    Verdict {
        pass,
        detail: format!("qft_n29 {g29}/{b29} (want ≤17/210), qft_n63 greedy {g63} (want ≤43, baseline {b63})"),
        elapsed,
    }
}

fn quantum_volume(rows: &[QasmRow]) -> Verdict {
    let (g, b) = costs(row(rows, "qv_n32"));
    Verdict {
        pass: g == b,
        detail: format!("qv_n32 {g}/{b}"),
        elapsed: Duration::ZERO,
    }
}

fn random_reduction(result: &ExperimentResult, elapsed: Duration) -> Verdict {
    let bands = [(2, 20.0, 40.0), (4, 10.0, 29.0), (8, 3.0, 20.0)];
    let mut pass = elapsed < Duration::from_secs(600);
    let mut parts = Vec::new();
    for (k, lo, hi) in bands {
        let a = result
            .aggregates
            .iter()
            .find(|a| a.n.is_none() && a.k == k)
            .expect("overall aggregate per k");
        let ok = (lo..=hi).contains(&a.mean_reduction);
        pass &= ok;
        parts.push(format!(
            "k={k} {:.1}% ± {:.1} in [{lo}, {hi}] {}",
            a.mean_reduction,
            a.std_reduction,
            if ok { "ok" } else { "out" }
        ));
    }
    Verdict {
        pass,
        detail: parts.join(", "),
        elapsed,
    }
}

fn equivalence_suite() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for case in 0..500u64 {
        let n = rng.random_range(2..=8);
        let circuit = if case % 2 == 0 {
            let len = rng.random_range(1..=60);
            random_test_circuit(&mut rng, n, len)
        } else {
            random_circuit(&RandomCircuitConfig {
                stop_at: rng.random_range(1..=4 * n),
                ..RandomCircuitConfig::new(n, case)
            })
        };
        let seq = greedy_pack(&circuit);
        let d = phase_distance(&oracle_columns(&circuit), &oracle_columns(&seq.replay()));
        worst = worst.max(d);
        if seq.validate(&circuit).is_err() || d > 1e-8 {
            failures += 1;
        }
    }
    Verdict {
        pass: failures == 0,
        detail: format!("{failures} failures in 500, worst phase-aligned distance {worst:.1e}"),
        elapsed: start.elapsed(),
    }
}

/// Dense root-first unitary of the members of `p` that act inside `keep`.
fn packet_oracle(p: &GatePacket, gates: &[Gate], keep: &BTreeSet<usize>) -> ComplexMatrix {
    let mut local = vec![p.root()];
    local.extend(keep.iter().copied().filter(|&q| q != p.root()));
    let pos = |q: usize| local.iter().position(|&x| x == q).expect("inside");
    let members: Vec<Gate> = p
        .members()
        .iter()
        .map(|&m| &gates[m])
        .filter(|g| g.qubits().all(|q| keep.contains(&q)))
        .map(|g| g.remapped(pos))
        .collect();
    let k = local.len();
    let cols = oracle_columns(&Circuit::from_gates(k, members).expect("remapped in range"));
    let mut m = ComplexMatrix::zeros(1 << k);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            m.set(i, j, *v);
        }
    }
    m
}

fn packet_forms(circuits: &[(String, Circuit)]) -> Verdict {
    const DIRECT: usize = 10;
    const SAMPLE: usize = 8;
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut checked, mut sampled, mut worst) = (0usize, 0usize, 0.0f64);
    let mut bad = Vec::new();
    for (name, c) in circuits {
        for seq in [greedy_pack(c), baseline_pack(c)] {
            for (i, p) in seq.packets().enumerate() {
                let register: Vec<usize> = p.sub_register().iter().copied().collect();
                let subsets: Vec<BTreeSet<usize>> = if register.len() <= DIRECT {
                    vec![register.iter().copied().collect()]
                } else {
                    sampled += 1;
                    let others: Vec<usize> = register.iter().copied().filter(|&q| q != p.root()).collect();
                    (0..3)
                        .map(|_| {
                            let mut pick = others.clone();
                            for a in 0..SAMPLE - 1 {
                                let b = rng.random_range(a..pick.len());
                                pick.swap(a, b);
                            }
                            pick.truncate(SAMPLE - 1);
                            pick.push(p.root());
                            pick.into_iter().collect()
                        })
                        .collect()
                };
                for keep in subsets {
                    let u = packet_oracle(p, seq.gates(), &keep);
                    checked += 1;
                    match PacketForm::fit(&u) {
                        Some(f) => worst = worst.max(f.reconstruct().max_abs_diff(&u)),
                        None => bad.push(format!("{name} packet {i}")),
                    }
                }
            }
        }
    }
    let pass = bad.is_empty() && worst < 1e-9;
    Verdict {
        pass,
        detail: format!(
            "{checked} packet unitaries ({sampled} large packets sampled), worst reconstruction {worst:.1e}{}",
            if bad.is_empty() { String::new() } else { format!(", no form: {}", bad.join(", ")) }
        ),
        elapsed: start.elapsed(),
    }
}

/// Σ over packets of (QPUs touched − 1), counted directly.
fn oracle_cost(seq: &PackingSequence, assignment: &[usize]) -> usize {
    seq.packets()
        .map(|p| {
            let qpus: BTreeSet<usize> = p.sub_register().iter().map(|&q| assignment[q]).collect();
            qpus.len() - 1
        })
        .sum()
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..1 << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    v
}

fn emission_consistency() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut bad, mut branches, mut worst, mut exhaustive) = (Vec::new(), 0usize, 0.0f64, 0usize);
    for case in 0..100 {
        let n = rng.random_range(2..=6);
        let k = rng.random_range(2..=3);
        let len = rng.random_range(1..=30);
        let circuit = random_test_circuit(&mut rng, n, len);
        let assignment: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let alloc = AllocationMap::new(assignment.clone(), k).unwrap();
        let seq = if case % 2 == 0 { greedy_pack(&circuit) } else { baseline_pack(&circuit) };
        let d = emit(&seq, &alloc).unwrap();
        if d.epr_consumed != oracle_cost(&seq, &assignment) {
            bad.push(format!("case {case}: epr {} vs {}", d.epr_consumed, oracle_cost(&seq, &assignment)));
        }
        let input = random_state(&mut rng, n);
        let expected = oracle_apply(n, circuit.gates(), &input);
        let sv = StateVector::new(n, input).unwrap();
        let mut runs = vec![distributed_branches(&d, &sv).unwrap()];
        // Every pair adds two measurements; keep the unmerged tree small.
        if d.epr_consumed <= 4 {
            runs.push(all_branches(&d, &sv).unwrap());
            exhaustive += 1;
        }
        for run in runs {
            let total: f64 = run.iter().map(|b| b.weight).sum();
            if (total - 1.0).abs() > 1e-9 {
                bad.push(format!("case {case}: branch weights sum to {total}"));
            }
            for b in &run {
                branches += 1;
                let diff = b
                    .state
                    .amplitudes()
                    .iter()
                    .zip(&expected)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                worst = worst.max(diff);
                if diff > 1e-8 {
                    bad.push(format!("case {case}: branch {:?} off by {diff:.1e}", b.outcomes));
                }
            }
        }
    }
    Verdict {
        pass: bad.is_empty(),
        detail: format!(
            "100 programs, {exhaustive} also unmerged, {branches} branches, worst {worst:.1e}{}",
            if bad.is_empty() { String::new() } else { format!("; {}", bad[..bad.len().min(3)].join("; ")) }
        ),
        elapsed: start.elapsed(),
    }
}

fn merge_monotonicity() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut violations, mut merged_instances, mut comparisons) = (0usize, 0usize, 0usize);
    for case in 0..1000u64 {
        let n = rng.random_range(3..=10);
        let circuit = if case % 2 == 0 {
            let len = rng.random_range(1..=40);
            random_test_circuit(&mut rng, n, len)
        } else {
            random_circuit(&RandomCircuitConfig {
                stop_at: rng.random_range(1..=3 * n),
                p_single: 0.4,
                ..RandomCircuitConfig::new(n, case)
            })
        };
        let unmerged = baseline_pack(&circuit);
        let mut variants = vec![merge_adjacent(&unmerged)];
        let mut partial = unmerged.clone();
        for _ in 0..3 {
            if partial.num_packets() > 1 {
                let at = rng.random_range(0..partial.num_packets() - 1);
                let _ = partial.merge_packets_at(at);
            }
        }
        variants.push(partial);
        if variants.iter().any(|v| v.num_packets() < unmerged.num_packets()) {
            merged_instances += 1;
        }
        for _ in 0..100 {
            let k = rng.random_range(2..=4);
            let assignment: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            let base = oracle_cost(&unmerged, &assignment);
            for v in &variants {
                comparisons += 1;
                if oracle_cost(v, &assignment) > base {
                    violations += 1;
                }
            }
        }
    }
    Verdict {
        pass: violations == 0,
        detail: format!("{violations} violations in {comparisons} comparisons; {merged_instances}/1000 circuits had merges"),
        elapsed: start.elapsed(),
    }
}

fn partitioner_parity() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worse_than_optimum, mut exact) = (0, 0);
    for i in 0..100 {
        let m = rng.random_range(3..=16);
        let h = random_hypergraph(&mut rng, 8, m);
        let p = partition(&h, &PartitionConfig::new(2, i)).unwrap();
        let got = connectivity_cost(&h, &p).unwrap();
        let opt = brute_force_bipartition(&h, 5);
        if got < opt || !p.is_feasible() {
            worse_than_optimum += 1;
        }
        if got == opt {
            exact += 1;
        }
    }
    let elapsed = start.elapsed();
    Verdict {
        pass: worse_than_optimum == 0 && exact >= 90 && elapsed < Duration::from_secs(60),
        detail: format!("{exact}/100 optimal, {worse_than_optimum} below the brute-force bound"),
        elapsed,
    }
}

fn artifacts(rows: &[QasmRow], result: &ExperimentResult) -> BTreeMap<&'static str, String> {
    BTreeMap::from([
        ("qasm.csv", qasm_csv(rows)),
        ("qasm.json", serde_json::to_string_pretty(rows).unwrap()),
        ("random.csv", experiment_csv(result)),
        ("random_aggregate.csv", aggregate_csv(result)),
        ("random.json", serde_json::to_string_pretty(result).unwrap()),
    ])
}

fn determinism(first: &BTreeMap<&'static str, String>) -> Verdict {
    let start = Instant::now();
    let rows = corpus_rows();
    let result = run_experiment(&ExperimentConfig::default()).unwrap();
    let second = artifacts(&rows, &result);
    let differing: Vec<&str> = first.keys().filter(|k| first[*k] != second[*k]).copied().collect();
    let bytes: usize = first.values().map(String::len).sum();
    Verdict {
        pass: differing.is_empty(),
        detail: if differing.is_empty() {
            format!("{} artifacts, {bytes} bytes, identical", first.len())
        } else {
            format!("differing: {}", differing.join(", "))
        },
        elapsed: start.elapsed(),
    }
}

#[test]
fn acceptance() {
    let t = Instant::now();
    let rows = corpus_rows();
    let corpus_time = t.elapsed();
    let t = Instant::now();
    let experiment = run_experiment(&ExperimentConfig::default()).unwrap();
    let experiment_time = t.elapsed();
    let circuits: Vec<(String, Circuit)> = corpus_files(&corpus_dir())
        .unwrap()
        .into_iter()
        .map(|p| {
            let src = std::fs::read_to_string(&p).unwrap();
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, load(&src, &FrontendConfig::default()).unwrap())
        })
        .collect();

    let verdicts = [
        table_parity(&rows, corpus_time),
        qft(&rows, corpus_time),
        quantum_volume(&rows),
        random_reduction(&experiment, experiment_time),
        equivalence_suite(),
        packet_forms(&circuits),
        emission_consistency(),
        merge_monotonicity(),
        partitioner_parity(),
        determinism(&artifacts(&rows, &experiment)),
    ];

    let mut unexpected = Vec::new();
    for (i, v) in verdicts.iter().enumerate() {
        let id = i + 1;
        println!(
            "criterion {id:>2}: {} ({:.2?}) {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.elapsed,
            v.detail
        );
        let gap = KNOWN_GAPS.iter().find(|(g, _)| *g == id);
        match (v.pass, gap) {
            (false, Some((_, why))) => println!("              known gap: {why}"),
            (false, None) => unexpected.push(format!("criterion {id} failed")),
            (true, Some(_)) => unexpected.push(format!("criterion {id} passes but is listed as a known gap")),
            (true, None) => {}
        }
    }
    let passed = verdicts.iter().filter(|v| v.pass).count();
    println!("acceptance: {passed}/{} criteria pass", verdicts.len());
    assert!(unexpected.is_empty(), "{}", unexpected.join("; "));
}
