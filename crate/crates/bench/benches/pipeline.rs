use std::hint::black_box;
use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dqc_core::benchmark::{random_circuit, RandomCircuitConfig};
use dqc_core::distributor::{allocation_from_partition, emit};
use dqc_core::{baseline_pack, build_hypergraph, greedy_pack, load, partition, Circuit, FrontendConfig, PartitionConfig};

fn corpus(name: &str) -> Circuit {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/qasmbench").join(name);
    let src = std::fs::read_to_string(&path).expect("run gen_corpus first");
    load(&src, &FrontendConfig::default()).expect("corpus parses")
}

fn packing(c: &mut Criterion) {
    let mut group = c.benchmark_group("pack");
    for n in [8, 16, 32] {
        let circuit = random_circuit(&RandomCircuitConfig::new(n, 1));
        group.bench_with_input(BenchmarkId::new("greedy", n), &circuit, |b, c| b.iter(|| greedy_pack(black_box(c))));
        group.bench_with_input(BenchmarkId::new("baseline", n), &circuit, |b, c| {
            b.iter(|| baseline_pack(black_box(c)))
        });
    }
    let qft = corpus("qft_n63.qasm");
    group.bench_function("greedy/qft_n63", |b| b.iter(|| greedy_pack(black_box(&qft))));
    group.finish();
}

fn partitioning(c: &mut Criterion) {
    let mut group = c.benchmark_group("partition");
    group.sample_size(20);
    for n in [16, 32] {
        let circuit = random_circuit(&RandomCircuitConfig::new(n, 2));
        let h = build_hypergraph(&greedy_pack(&circuit), n);
        for k in [2, 8] {
            let cfg = PartitionConfig::new(k, 0);
            group.bench_function(BenchmarkId::new(format!("k{k}"), n), |b| b.iter(|| partition(black_box(&h), &cfg)));
        }
    }
    group.finish();
}

fn emission(c: &mut Criterion) {
    let circuit = random_circuit(&RandomCircuitConfig::new(32, 3));
    let seq = greedy_pack(&circuit);
    let h = build_hypergraph(&seq, 32);
    let p = partition(&h, &PartitionConfig::new(4, 0)).unwrap();
    let alloc = allocation_from_partition(&p, 32).unwrap();
    c.bench_function("emit/random_n32_k4", |b| b.iter(|| emit(black_box(&seq), &alloc)));
}

criterion_group!(benches, packing, partitioning, emission);
criterion_main!(benches);
