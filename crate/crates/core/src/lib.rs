pub mod circuit;
pub mod matrix;
pub mod qasm;
pub mod packer;
pub mod hypergraph;
pub mod distributor;
pub mod verifier;
pub mod pipeline;
pub mod benchmark;

pub use circuit::{Circuit, Gate};
pub use distributor::{emit, emit_with, AllocationMap, DistributeError, DistributedProgram, EmitConfig, Event};
pub use hypergraph::{build_hypergraph, partition, Partition, PartitionConfig, WeightedHypergraph};
pub use packer::{baseline_pack, greedy_pack, GatePacket, PackingSequence};
pub use pipeline::{compile, Compiled, Method};
pub use qasm::{load, FrontendConfig, QasmError};
pub use verifier::{StateVector, VerifyError};
