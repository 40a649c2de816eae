use std::path::Path;

use dqc_core::distributor::{allocation_from_partition, distribution_cost};
use dqc_core::hypergraph::connectivity_cost;
use dqc_core::{build_hypergraph, Circuit, Compiled, DistributedProgram, Method, Partition, PackingSequence, PartitionConfig};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerMethod {
    pub greedy: usize,
    pub baseline: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub total_weight: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub input: String,
    pub n: usize,
    pub k: usize,
    pub capacity: usize,
    pub method: Method,
    /// The greedy packing was replaced by the cheaper baseline packing.
    pub greedy_fallback: bool,
    pub packets: PerMethod,
    pub hypergraph: HypergraphStats,
    pub parts: Vec<Vec<usize>>,
    pub cost: PerMethod,
    pub epr_consumed: usize,
    pub seed: u64,
}

impl CompileReport {
    pub fn new(
        input: &Path,
        circuit: &Circuit,
        cfg: &PartitionConfig,
        method: Method,
        greedy: &Compiled,
        baseline: &Compiled,
        program: &DistributedProgram,
    ) -> Self {
        let chosen = match method {
            Method::Greedy => greedy,
            Method::Baseline => baseline,
        };
        CompileReport {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input: input.display().to_string(),
            n: circuit.num_qubits(),
            k: cfg.k,
            capacity: cfg.capacity_for(circuit.num_qubits()),
            method,
            greedy_fallback: greedy.fallback,
            packets: PerMethod {
                greedy: greedy.sequence.num_packets(),
                baseline: baseline.sequence.num_packets(),
            },
            hypergraph: HypergraphStats {
                nodes: chosen.hypergraph.num_nodes,
                edges: chosen.hypergraph.edges.len(),
                total_weight: chosen.hypergraph.total_weight(),
            },
            parts: chosen.partition.parts.clone(),
            cost: PerMethod {
                greedy: greedy.cost,
                baseline: baseline.cost,
            },
            epr_consumed: program.epr_consumed,
            seed: cfg.seed,
        }
    }

    pub fn chosen_cost(&self) -> usize {
        match self.method {
            Method::Greedy => self.cost.greedy,
            Method::Baseline => self.cost.baseline,
        }
    }
}

/// Recomputes the chosen method's numbers from the serialised packing and
/// partition of an emit bundle.
pub fn check_bundle(bundle: &Value) -> Result<(), String> {
    let field = |k: &str| bundle.get(k).cloned().ok_or_else(|| format!("bundle lacks `{k}`"));
    let report: CompileReport = serde_json::from_value(field("report")?).map_err(|e| e.to_string())?;
    let seq: PackingSequence = serde_json::from_value(field("packing")?).map_err(|e| e.to_string())?;
    let part: Partition = serde_json::from_value(field("partition")?).map_err(|e| e.to_string())?;
    let program = field("program")?;

    let h = build_hypergraph(&seq, report.n);
    let cut = connectivity_cost(&h, &part).map_err(|e| e.to_string())? as usize;
    let alloc = allocation_from_partition(&part, report.n).map_err(|e| e.to_string())?;
    let cost = distribution_cost(&seq, &alloc);
    let epr = program.get("epr_consumed").and_then(Value::as_u64).map(|v| v as usize);
    let stats = HypergraphStats {
        nodes: h.num_nodes,
        edges: h.edges.len(),
        total_weight: h.total_weight(),
    };
    let expected = report.chosen_cost();
    let checks = [
        (cost == expected, format!("distribution cost {cost} != reported {expected}")),
        (cut == expected, format!("partition cut {cut} != reported {expected}")),
        (epr == Some(expected), format!("program consumes {epr:?} EPR pairs, reported {expected}")),
        (report.epr_consumed == expected, format!("report epr_consumed {} != cost {expected}", report.epr_consumed)),
        (stats == report.hypergraph, format!("hypergraph {stats:?} != reported {:?}", report.hypergraph)),
        (part.parts == report.parts, "partition differs from the reported parts".to_string()),
    ];
    match checks.into_iter().find(|(ok, _)| !ok) {
        Some((_, msg)) => Err(msg),
        None => Ok(()),
    }
}
