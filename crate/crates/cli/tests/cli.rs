use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dqc_core::distributor::{allocation_from_partition, distribution_cost};
use dqc_core::qasm::to_qasm;
use dqc_core::{Circuit, Gate, PackingSequence, Partition};
use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/qasmbench").join(name)
}

fn dqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dqc"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compile_ghz_reports_one_pair_and_a_consistent_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let bundle_path = dir.path().join("ghz.json");
    let hgr = dir.path().join("ghz.hgr");
    let qasm_dir = dir.path().join("qpus");
    let input = corpus("ghz_n40.qasm");
    let out = dqc(&[
        "compile",
        path_str(&input),
        "--qpus",
        "2",
        "--emit",
        path_str(&bundle_path),
        "--dump-hgr",
        path_str(&hgr),
        "--emit-qasm",
        path_str(&qasm_dir),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["n"], 40);
    assert_eq!(report["capacity"], 21);
    assert_eq!(report["cost"]["greedy"], 1);
    assert_eq!(report["cost"]["baseline"], 1);
    assert_eq!(report["epr_consumed"], 1);
    assert_eq!(report["seed"], 0);

    // Recompute the cost from the shipped packing and partition.
    let bundle: Value = serde_json::from_str(&std::fs::read_to_string(&bundle_path).unwrap()).unwrap();
    assert_eq!(bundle["report"], report);
    let seq: PackingSequence = serde_json::from_value(bundle["packing"].clone()).unwrap();
    let part: Partition = serde_json::from_value(bundle["partition"].clone()).unwrap();
    let alloc = allocation_from_partition(&part, 40).unwrap();
    assert_eq!(distribution_cost(&seq, &alloc), 1);
    assert_eq!(bundle["program"]["epr_consumed"], 1);
    let per_qpu = bundle["program"]["per_qpu"].as_array().unwrap();
    assert_eq!(per_qpu.len(), 2);

    let text = std::fs::read_to_string(&hgr).unwrap();
    assert_eq!(text.lines().next(), Some("39 40 1"));
    assert_eq!(text.lines().count(), 40);
    for qpu in 0..2 {
        let q = std::fs::read_to_string(qasm_dir.join(format!("qpu{qpu}.qasm"))).unwrap();
        assert!(q.starts_with("OPENQASM 2.0;"));
        assert!(q.contains("qreg comm[2];"));
    }
}

#[test]
fn one_qpu_needs_no_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = dir.path().join("b.json");
    let out = dqc(&["compile", path_str(&corpus("ghz_n40.qasm")), "--qpus", "1", "--emit", path_str(&bundle)]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["cost"]["greedy"], 0);
    assert_eq!(report["epr_consumed"], 0);
    let b: Value = serde_json::from_str(&std::fs::read_to_string(&bundle).unwrap()).unwrap();
    let events = b["program"]["events"].as_array().unwrap();
    assert!(events.iter().all(|e| e["op"] == "gate"));
}

#[test]
fn no_reorder_on_qft_29_costs_210() {
    let out = dqc(&["compile", path_str(&corpus("qft_n29.qasm")), "--qpus", "2", "--no-reorder"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["method"], "baseline");
    assert_eq!(report["cost"]["baseline"], 210);
    assert_eq!(report["epr_consumed"], 210);
}

#[test]
fn parse_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.qasm");
    std::fs::write(&bad, "OPENQASM 2.0;\nqreg q[2];\ncx q[0] q[1];\n").unwrap();
    let out = dqc(&["compile", path_str(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = dqc(&["compile", path_str(&dir.path().join("missing.qasm"))]);
    assert_eq!(code(&out), 1);
}

#[test]
fn infeasible_capacity_exits_2() {
    let out = dqc(&["compile", path_str(&corpus("cat_n35.qasm")), "--qpus", "2", "--capacity", "10"]);
    assert_eq!(code(&out), 2);
    let out = dqc(&["compile", path_str(&corpus("cat_n35.qasm")), "--qpus", "0"]);
    assert_eq!(code(&out), 2);
}

fn six_qubit_circuit() -> Circuit {
    Circuit::from_gates(
        6,
        vec![
            Gate::h(0),
            Gate::cx(0, 3),
            Gate::rz(0.4, 3),
            Gate::cx(0, 4),
            Gate::h(2),
            Gate::cp(0.7, 5, 0),
            Gate::cx(1, 5),
            Gate::x(0),
            Gate::cx(0, 5),
            Gate::crz(1.1, 2, 4),
            Gate::cx(3, 1),
            Gate::h(4),
            Gate::cz(4, 0),
        ],
    )
    .unwrap()
}

#[test]
fn verify_passes_on_a_small_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("six.qasm");
    std::fs::write(&file, to_qasm(&six_qubit_circuit())).unwrap();
    for k in ["2", "3"] {
        for extra in [None, Some("--no-reorder")] {
            let mut args = vec!["verify", path_str(&file), "--qpus", k, "--seed", "3"];
            args.extend(extra);
            let out = dqc(&args);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
            let v = stdout_json(&out);
            assert_eq!(v["result"], "pass");
            assert_eq!(v["qubits"], 6);
        }
    }
}

#[test]
fn verify_refuses_large_circuits() {
    let out = dqc(&["verify", path_str(&corpus("ising_n34.qasm"))]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("too large to verify"));
}

#[test]
fn random_bench_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str, threads: &str| {
        let out_dir = dir.path().join(sub);
        let out = Command::new(env!("CARGO_BIN_EXE_dqc"))
            .args(["bench", "--mode", "random", "--qpus", "2,4", "--sizes", "8,12", "--reps", "1", "--seed", "7"])
            .args(["--out", path_str(&out_dir)])
            .env("DQC_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let a = run("a", "1");
    let b = run("b", "4");
    for f in ["random.csv", "random_aggregate.csv", "random.json"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let csv = std::fs::read_to_string(a.join("random.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("circuit,n,k,method,cost,seed,wall_ms"));
    // Two sizes, two k values, one repetition, two methods.
    assert_eq!(lines.count(), 8);
}

#[test]
fn qasm_bench_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dqc(&[
        "bench",
        "--mode",
        "qasm",
        "--qpus",
        "2",
        "--corpus",
        path_str(&corpus("")),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("qasm_table.csv")).unwrap();
    assert_eq!(table.lines().next(), Some("circuit,n,greedy,baseline"));
    assert!(table.lines().any(|l| l == "ghz_n40,40,1,1"));
    assert!(table.lines().any(|l| l == "qft_n29,29,14,210"));
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("qasm.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), table.lines().count() - 1);
}

#[test]
fn missing_corpus_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = dqc(&[
        "bench",
        "--mode",
        "qasm",
        "--corpus",
        path_str(&dir.path().join("nowhere")),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(code(&out), 2);
}
