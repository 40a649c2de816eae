mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dqc_core::benchmark::{
    aggregate_csv, corpus_files, experiment_csv, qasm_csv, run_experiment, run_qasmbench, table_csv,
    ExperimentConfig, QasmBenchConfig,
};
use dqc_core::distributor::{DistributeError, EmitConfig, DEFAULT_COMM_QUBITS};
use dqc_core::hypergraph::HypergraphError;
use dqc_core::verifier::{check_distributed, equivalent, VerifyError, MAX_EQUIVALENCE_QUBITS};
use dqc_core::pipeline::compile_both;
use dqc_core::{emit_with, Circuit, FrontendConfig, Method, PartitionConfig, StateVector};
use serde_json::json;

use report::{check_bundle, CompileReport};

/// Stable exit codes.
const EXIT_PARSE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_INVARIANT: u8 = 3;
const EXIT_TOO_LARGE: u8 = 4;

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<DistributeError> for Failure {
    fn from(e: DistributeError) -> Self {
        match e {
            DistributeError::Partition(HypergraphError::Infeasible { .. } | HypergraphError::NoParts)
            | DistributeError::CommBudgetExhausted { .. } => fail(EXIT_CONFIG, e.to_string()),
            other => fail(EXIT_INVARIANT, other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "dqc", version, about = "Distributed quantum circuit compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pack, partition and emit a distributed program for one QASM file.
    Compile(CompileArgs),
    /// Check packing and emission against dense simulation.
    Verify(VerifyArgs),
    /// Random-circuit or corpus experiments.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Frontend {
    /// Skip unknown gates with a warning instead of failing.
    #[arg(long)]
    lenient: bool,
    /// Drop phase rotations smaller than this.
    #[arg(long, default_value_t = 1e-10)]
    truncate_angle: f64,
}

impl Frontend {
    fn config(&self) -> FrontendConfig {
        FrontendConfig {
            truncate_angle: self.truncate_angle,
            strict: !self.lenient,
        }
    }
}

#[derive(Args)]
struct Partitioning {
    /// Number of QPUs.
    #[arg(long = "qpus", short = 'k', default_value_t = 2)]
    k: usize,
    /// Qubits per QPU; defaults to ⌊n/k⌋+1.
    #[arg(long)]
    capacity: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
}

impl Partitioning {
    fn config(&self) -> PartitionConfig {
        PartitionConfig {
            capacity: self.capacity,
            restarts: self.restarts,
            ..PartitionConfig::new(self.k, self.seed)
        }
    }
}

#[derive(Args)]
struct CompileArgs {
    input: PathBuf,
    #[command(flatten)]
    partitioning: Partitioning,
    #[command(flatten)]
    frontend: Frontend,
    /// Use the baseline packer.
    #[arg(long)]
    no_reorder: bool,
    /// Communication qubits per QPU.
    #[arg(long, default_value_t = DEFAULT_COMM_QUBITS)]
    comm: usize,
    /// Write report, packing, partition and program as one JSON file.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Write one QASM file per QPU into this directory.
    #[arg(long)]
    emit_qasm: Option<PathBuf>,
    /// Write the packet hypergraph in hMETIS format.
    #[arg(long)]
    dump_hgr: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    input: PathBuf,
    #[command(flatten)]
    partitioning: Partitioning,
    #[command(flatten)]
    frontend: Frontend,
    #[arg(long)]
    no_reorder: bool,
    /// Random input states to try besides |0…0⟩.
    #[arg(long, default_value_t = 2)]
    inputs: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Random,
    Qasm,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// QPU counts; the corpus mode uses the first.
    #[arg(long = "qpus", short = 'k', value_delimiter = ',', default_values_t = [2usize, 4, 8])]
    k: Vec<usize>,
    /// Circuit sizes for random mode.
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 16, 24, 32])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    #[arg(long, default_value_t = 0.2)]
    p_single: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// Corpus directory for qasm mode.
    #[arg(long, default_value = "corpus/qasmbench")]
    corpus: PathBuf,
    #[arg(long)]
    capacity: Option<usize>,
    /// Record wall-clock times (outputs are then no longer reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn read_circuit(path: &Path, frontend: &Frontend) -> Result<Circuit, Failure> {
    let src = fs::read_to_string(path).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    dqc_core::load(&src, &frontend.config()).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: impl AsRef<[u8]>) -> Outcome {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| fail(EXIT_CONFIG, format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| fail(EXIT_CONFIG, format!("{}: {e}", path.display())))
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serialisable") + "\n"
}

fn cmd_compile(args: &CompileArgs) -> Outcome {
    let circuit = read_circuit(&args.input, &args.frontend)?;
    let cfg = args.partitioning.config();
    let method = if args.no_reorder { Method::Baseline } else { Method::Greedy };
    let (greedy, baseline) = compile_both(&circuit, &cfg)?;
    let chosen = if args.no_reorder { &baseline } else { &greedy };
    chosen
        .sequence
        .validate(&circuit)
        .map_err(|e| fail(EXIT_INVARIANT, e.to_string()))?;
    let program = emit_with(&chosen.sequence, &chosen.allocation, &EmitConfig { comm_per_qpu: args.comm })?;
    program.check_locality().map_err(|e| fail(EXIT_INVARIANT, e))?;
    let report = CompileReport::new(&args.input, &circuit, &cfg, method, &greedy, &baseline, &program);

    if let Some(path) = &args.dump_hgr {
        write(path, chosen.hypergraph.to_hmetis())?;
    }
    if let Some(dir) = &args.emit_qasm {
        for qpu in 0..program.num_qpus {
            write(&dir.join(format!("qpu{qpu}.qasm")), program.qpu_qasm(qpu))?;
        }
    }
    if let Some(path) = &args.emit {
        let bundle = json!({
            "report": report,
            "packing": chosen.sequence,
            "partition": chosen.partition,
            "program": program.to_json(),
        });
        check_bundle(&bundle).map_err(|e| fail(EXIT_INVARIANT, e))?;
        write(path, pretty(&bundle))?;
    }
    print!("{}", pretty(&report));
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Outcome {
    let circuit = read_circuit(&args.input, &args.frontend)?;
    let n = circuit.num_qubits();
    if n > MAX_EQUIVALENCE_QUBITS {
        return Err(fail(
            EXIT_TOO_LARGE,
            format!("too large to verify: {n} qubits, limit {MAX_EQUIVALENCE_QUBITS}"),
        ));
    }
    let method = if args.no_reorder { Method::Baseline } else { Method::Greedy };
    let (greedy, baseline) = compile_both(&circuit, &args.partitioning.config())?;
    let compiled = if args.no_reorder { baseline } else { greedy };
    compiled
        .sequence
        .validate(&circuit)
        .map_err(|e| fail(EXIT_INVARIANT, e.to_string()))?;
    let replay = compiled.sequence.replay();
    let same = equivalent(&circuit, &replay).map_err(verify_failure)?;
    if !same {
        let detail = json!({ "failure": "reordered circuit is not equivalent", "order": compiled.sequence.order() });
        return Err(fail(EXIT_INVARIANT, pretty(&detail)));
    }
    let program = emit_with(&compiled.sequence, &compiled.allocation, &EmitConfig::default())?;
    let mut branches = 0;
    for i in 0..=args.inputs {
        let input = if i == 0 {
            StateVector::zero(n)
        } else {
            StateVector::random(n, args.partitioning.seed.wrapping_add(i))
        }
        .map_err(verify_failure)?;
        branches += check_distributed(&program, &circuit, &input).map_err(verify_failure)?;
    }
    println!(
        "{}",
        json!({
            "result": "pass",
            "qubits": n,
            "qpus": args.partitioning.k,
            "method": method,
            "cost": compiled.cost,
            "inputs": args.inputs + 1,
            "branches": branches,
        })
    );
    Ok(())
}

fn verify_failure(e: VerifyError) -> Failure {
    let code = match e {
        VerifyError::TooLarge { .. } | VerifyError::TooManyBranches(_) => EXIT_TOO_LARGE,
        _ => EXIT_INVARIANT,
    };
    let detail = json!({ "failure": e.to_string(), "counterexample": e });
    fail(code, pretty(&detail))
}

fn cmd_bench(args: &BenchArgs) -> Outcome {
    match args.mode {
        Mode::Random => {
            let cfg = ExperimentConfig {
                n_list: args.sizes.clone(),
                k_list: args.k.clone(),
                repetitions: args.reps,
                seed: args.seed,
                p_single: args.p_single,
                restarts: args.restarts,
                timing: args.timing,
                ..ExperimentConfig::default()
            };
            let result = run_experiment(&cfg)?;
            write(&args.out.join("random.csv"), experiment_csv(&result))?;
            write(&args.out.join("random_aggregate.csv"), aggregate_csv(&result))?;
            write(&args.out.join("random.json"), pretty(&json!({ "config": cfg, "result": result })))?;
            for a in result.aggregates.iter().filter(|a| a.n.is_none()) {
                println!(
                    "k={} instances={} greedy={:.1} baseline={:.1} reduction={:.1}% ± {:.1}",
                    a.k, a.instances, a.mean_greedy, a.mean_baseline, a.mean_reduction, a.std_reduction
                );
            }
        }
        Mode::Qasm => {
            let files = corpus_files(&args.corpus)
                .map_err(|e| fail(EXIT_CONFIG, format!("{}: {e}", args.corpus.display())))?;
            let cfg = QasmBenchConfig {
                k: args.k.first().copied().unwrap_or(2),
                capacity: args.capacity,
                seed: args.seed,
                restarts: args.restarts,
                timing: args.timing,
                ..QasmBenchConfig::default()
            };
            let rows = run_qasmbench(&files, &cfg);
            write(&args.out.join("qasm.csv"), qasm_csv(&rows))?;
            write(&args.out.join("qasm_table.csv"), table_csv(&rows))?;
            write(&args.out.join("qasm.json"), pretty(&json!({ "config": cfg, "rows": rows })))?;
            for r in &rows {
                match (&r.error, r.greedy_cost, r.baseline_cost) {
                    (None, Some(g), Some(b)) => println!("{} ({}) {g} {b}", r.circuit, r.n),
                    (e, ..) => println!("{} error: {}", r.circuit, e.as_deref().unwrap_or("unknown")),
                }
            }
        }
    }
    Ok(())
}

fn configure_threads() {
    let threads = std::env::var("DQC_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    if let Some(t) = threads.filter(|&t| t > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    configure_threads();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compile(a) => cmd_compile(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message.trim_end());
            ExitCode::from(f.code)
        }
    }
}
