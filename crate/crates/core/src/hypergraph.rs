//! Weighted hypergraph view of a packing sequence and a balanced k-way
//! partitioner for the connectivity-minus-one objective.

use std::collections::BTreeMap;
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::packer::PackingSequence;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("node {0} is not assigned to any part")]
    NodeMissing(usize),
    #[error("{k} parts of capacity {capacity} cannot hold {nodes} nodes")]
    Infeasible { k: usize, capacity: usize, nodes: usize },
    #[error("the number of parts must be at least 1")]
    NoParts,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub nodes: Vec<usize>,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedHypergraph {
    pub num_nodes: usize,
    /// Sorted by node list; node lists are unique.
    pub edges: Vec<Hyperedge>,
}

impl WeightedHypergraph {
    /// Folds repeated node sets into weights and drops edges with fewer
    /// than two nodes.
    pub fn from_edges(num_nodes: usize, edges: impl IntoIterator<Item = (Vec<usize>, u64)>) -> Self {
        let mut folded: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
        for (mut nodes, w) in edges {
            nodes.sort_unstable();
            nodes.dedup();
            if nodes.len() >= 2 && w > 0 {
                assert!(nodes.iter().all(|&v| v < num_nodes), "edge node out of range");
                *folded.entry(nodes).or_default() += w;
            }
        }
        WeightedHypergraph {
            num_nodes,
            edges: folded.into_iter().map(|(nodes, weight)| Hyperedge { nodes, weight }).collect(),
        }
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// hMETIS text: `|E| |V| 1`, then one line per edge with the weight
    /// followed by 1-based node ids.
    pub fn to_hmetis(&self) -> String {
        let mut out = format!("{} {} 1\n", self.edges.len(), self.num_nodes);
        for e in &self.edges {
            write!(out, "{}", e.weight).unwrap();
            for v in &e.nodes {
                write!(out, " {}", v + 1).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// One edge per distinct packet register, weighted by how often it occurs.
pub fn build_hypergraph(seq: &PackingSequence, num_nodes: usize) -> WeightedHypergraph {
    WeightedHypergraph::from_edges(
        num_nodes,
        seq.packets().map(|p| (p.sub_register().iter().copied().collect(), 1)),
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub parts: Vec<Vec<usize>>,
    pub capacity: usize,
}

impl Partition {
    /// Builds parts from a node-to-part map.
    pub fn from_assignment(assignment: &[usize], k: usize, capacity: usize) -> Self {
        let mut parts = vec![Vec::new(); k];
        for (v, &p) in assignment.iter().enumerate() {
            parts[p].push(v);
        }
        Partition { parts, capacity }
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// Part index of every node in `0..num_nodes`.
    pub fn assignment(&self, num_nodes: usize) -> Result<Vec<usize>, HypergraphError> {
        let mut out = vec![usize::MAX; num_nodes];
        for (i, part) in self.parts.iter().enumerate() {
            for &v in part {
                if v < num_nodes {
                    out[v] = i;
                }
            }
        }
        match out.iter().position(|&p| p == usize::MAX) {
            Some(v) => Err(HypergraphError::NodeMissing(v)),
            None => Ok(out),
        }
    }

    pub fn is_feasible(&self) -> bool {
        self.parts.iter().all(|p| p.len() <= self.capacity)
    }
}

/// Σ_e (|F(e)| − 1)·w_e, where F(e) is the set of parts meeting e.
pub fn connectivity_cost(h: &WeightedHypergraph, p: &Partition) -> Result<u64, HypergraphError> {
    let assign = p.assignment(h.num_nodes)?;
    Ok(cost_of(h, &assign, p.k()))
}

fn cost_of(h: &WeightedHypergraph, assign: &[usize], k: usize) -> u64 {
    let mut seen = vec![false; k];
    let mut total = 0;
    for e in &h.edges {
        seen.iter_mut().for_each(|s| *s = false);
        let mut parts = 0u64;
        for &v in &e.nodes {
            if !std::mem::replace(&mut seen[assign[v]], true) {
                parts += 1;
            }
        }
        total += (parts - 1) * e.weight;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionConfig {
    pub k: usize,
    /// Defaults to ⌊n/k⌋ + 1.
    pub capacity: Option<usize>,
    pub seed: u64,
    pub restarts: usize,
    pub refinement_passes: usize,
}

impl PartitionConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        PartitionConfig {
            k,
            capacity: None,
            seed,
            restarts: 16,
            refinement_passes: 8,
        }
    }

    pub fn capacity_for(&self, num_nodes: usize) -> usize {
        self.capacity.unwrap_or(num_nodes / self.k.max(1) + 1)
    }
}

/// Best of `cfg.restarts` runs of greedy seeding followed by FM refinement.
///
/// Restart `r` draws from a ChaCha8 stream selected by `r` under `cfg.seed`;
/// runs may execute in parallel and the lowest cost wins, ties going to
/// the lowest restart index.
pub fn partition(h: &WeightedHypergraph, cfg: &PartitionConfig) -> Result<Partition, HypergraphError> {
    if cfg.k == 0 {
        return Err(HypergraphError::NoParts);
    }
    let n = h.num_nodes;
    let capacity = cfg.capacity_for(n);
    if cfg.k.saturating_mul(capacity) < n {
        return Err(HypergraphError::Infeasible {
            k: cfg.k,
            capacity,
            nodes: n,
        });
    }
    let incidence = incidence(h);
    let runs: Vec<(u64, Vec<usize>)> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let mut state = State::seed(h, &incidence, cfg.k, capacity, &mut rng);
            for _ in 0..cfg.refinement_passes {
                if !state.fm_pass() {
                    break;
                }
            }
            (state.cost, state.assign)
        })
        .collect();
    let (_, best) = runs
        .into_iter()
        .enumerate()
        .min_by_key(|(r, (cost, _))| (*cost, *r))
        .map(|(_, run)| run)
        .expect("at least one restart");
    Ok(Partition::from_assignment(&best, cfg.k, capacity))
}

fn incidence(h: &WeightedHypergraph) -> Vec<Vec<usize>> {
    let mut inc = vec![Vec::new(); h.num_nodes];
    for (i, e) in h.edges.iter().enumerate() {
        for &v in &e.nodes {
            inc[v].push(i);
        }
    }
    inc
}

struct State<'a> {
    h: &'a WeightedHypergraph,
    incidence: &'a [Vec<usize>],
    k: usize,
    capacity: usize,
    assign: Vec<usize>,
    sizes: Vec<usize>,
    /// counts[e * k + p]: nodes of edge e in part p.
    counts: Vec<u32>,
    cost: u64,
}

impl<'a> State<'a> {
    fn seed(
        h: &'a WeightedHypergraph,
        incidence: &'a [Vec<usize>],
        k: usize,
        capacity: usize,
        rng: &mut ChaCha8Rng,
    ) -> Self {
        const UNSET: usize = usize::MAX;
        let n = h.num_nodes;
        let mut st = State {
            h,
            incidence,
            k,
            capacity,
            assign: vec![UNSET; n],
            sizes: vec![0; k],
            counts: vec![0; h.edges.len() * k],
            cost: 0,
        };
        let mut order: Vec<usize> = (0..n).filter(|&v| !incidence[v].is_empty()).collect();
        order.shuffle(rng);
        for v in order {
            let mut best: Option<(u64, usize, usize)> = None;
            for p in 0..k {
                if st.sizes[p] >= capacity {
                    continue;
                }
                let mut increase = 0;
                for &e in &incidence[v] {
                    let row = &st.counts[e * k..(e + 1) * k];
                    if row[p] == 0 && row.iter().any(|&c| c > 0) {
                        increase += h.edges[e].weight;
                    }
                }
                let key = (increase, st.sizes[p], p);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
            let (_, _, p) = best.expect("capacity admits every node");
            st.place(v, p);
        }
        for v in 0..n {
            if st.assign[v] == UNSET {
                let p = (0..k).min_by_key(|&p| (st.sizes[p], p)).expect("k ≥ 1");
                st.place(v, p);
            }
        }
        st.cost = cost_of(h, &st.assign, k);
        st
    }

    fn place(&mut self, v: usize, p: usize) {
        self.assign[v] = p;
        self.sizes[p] += 1;
        for &e in &self.incidence[v] {
            self.counts[e * self.k + p] += 1;
        }
    }

    fn gain(&self, v: usize, to: usize) -> i64 {
        let from = self.assign[v];
        let mut g = 0i64;
        for &e in &self.incidence[v] {
            let w = self.h.edges[e].weight as i64;
            if self.counts[e * self.k + from] == 1 {
                g += w;
            }
            if self.counts[e * self.k + to] == 0 {
                g -= w;
            }
        }
        g
    }

    fn apply(&mut self, v: usize, to: usize) {
        let g = self.gain(v, to);
        let from = self.assign[v];
        for &e in &self.incidence[v] {
            self.counts[e * self.k + from] -= 1;
            self.counts[e * self.k + to] += 1;
        }
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
        self.assign[v] = to;
        self.cost = (self.cost as i64 - g) as u64;
    }

    /// One FM pass: move every node at most once, best gain first, then
    /// roll back to the best prefix. Returns whether the cost dropped.
    fn fm_pass(&mut self) -> bool {
        let n = self.h.num_nodes;
        let mut locked = vec![false; n];
        let mut moves: Vec<(usize, usize)> = Vec::new();
        let (mut running, mut best_gain, mut best_len) = (0i64, 0i64, 0usize);
        loop {
            let mut best: Option<(i64, usize, usize)> = None;
            for v in 0..n {
                if locked[v] || self.incidence[v].is_empty() {
                    continue;
                }
                for to in 0..self.k {
                    if to == self.assign[v] || self.sizes[to] >= self.capacity {
                        continue;
                    }
                    let g = self.gain(v, to);
                    if best.is_none_or(|(bg, _, _)| g > bg) {
                        best = Some((g, v, to));
                    }
                }
            }
            let Some((g, v, to)) = best else { break };
            moves.push((v, self.assign[v]));
            self.apply(v, to);
            locked[v] = true;
            running += g;
            if running > best_gain {
                best_gain = running;
                best_len = moves.len();
            }
        }
        for &(v, from) in moves[best_len..].iter().rev() {
            self.apply(v, from);
        }
        best_gain > 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_counts_spanned_parts() {
        let h = WeightedHypergraph::from_edges(4, [(vec![0, 1, 2, 3], 3), (vec![0, 1], 1)]);
        let p = Partition::from_assignment(&[0, 1, 2, 3], 4, 1);
        assert_eq!(connectivity_cost(&h, &p).unwrap(), 9 + 1);
    }
}
