//! Packing, hypergraph construction, partitioning and cost in one call.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::distributor::{allocation_from_partition, distribution_cost, AllocationMap, DistributeError};
use crate::hypergraph::{build_hypergraph, partition, Partition, PartitionConfig, WeightedHypergraph};
use crate::packer::{baseline_pack, greedy_pack, PackingSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Reordering, flipping and merging.
    Greedy,
    /// Consecutive gates only.
    Baseline,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Greedy => "greedy",
            Method::Baseline => "baseline",
        }
    }

    pub fn pack(self, c: &Circuit) -> PackingSequence {
        match self {
            Method::Greedy => greedy_pack(c),
            Method::Baseline => baseline_pack(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compiled {
    pub method: Method,
    pub sequence: PackingSequence,
    pub hypergraph: WeightedHypergraph,
    pub partition: Partition,
    pub allocation: AllocationMap,
    pub cost: usize,
    /// Set when a greedy result was replaced by the cheaper baseline packing.
    pub fallback: bool,
}

/// Packs `c` with `method`, partitions the packet hypergraph and prices the
/// resulting allocation.
pub fn compile(c: &Circuit, method: Method, cfg: &PartitionConfig) -> Result<Compiled, DistributeError> {
    let sequence = method.pack(c);
    compile_sequence(sequence, method, cfg)
}

pub fn compile_sequence(
    sequence: PackingSequence,
    method: Method,
    cfg: &PartitionConfig,
) -> Result<Compiled, DistributeError> {
    let n = sequence.num_qubits();
    let hypergraph = build_hypergraph(&sequence, n);
    let partition = partition(&hypergraph, cfg)?;
    let allocation = allocation_from_partition(&partition, n)?;
    let cost = distribution_cost(&sequence, &allocation);
    Ok(Compiled {
        method,
        sequence,
        hypergraph,
        partition,
        allocation,
        cost,
        fallback: false,
    })
}

/// Keeps the greedy result unless the baseline packing is cheaper, in which
/// case the baseline packing and partition are reported for the greedy
/// method.
pub fn keep_cheaper(greedy: Compiled, baseline: &Compiled) -> Compiled {
    if greedy.cost > baseline.cost {
        Compiled {
            method: Method::Greedy,
            fallback: true,
            ..baseline.clone()
        }
    } else {
        greedy
    }
}

/// Greedy and baseline compilations under one partitioner configuration.
pub fn compile_both(c: &Circuit, cfg: &PartitionConfig) -> Result<(Compiled, Compiled), DistributeError> {
    let baseline = compile(c, Method::Baseline, cfg)?;
    let greedy = keep_cheaper(compile(c, Method::Greedy, cfg)?, &baseline);
    Ok((greedy, baseline))
}
