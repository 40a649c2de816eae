//! Dense state-vector simulation and equivalence checks.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{apply_gate, circuit_unitary, Circuit, Gate, MAX_DENSE_QUBITS};
use crate::distributor::{DistributedProgram, Event};
use crate::matrix::{c, C64};

/// Largest register for [`equivalent`].
pub const MAX_EQUIVALENCE_QUBITS: usize = 10;
/// Live branches allowed before distributed simulation gives up.
pub const MAX_BRANCHES: usize = 4096;

const NORM_TOLERANCE: f64 = 1e-9;
const ZERO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Serialize)]
pub enum VerifyError {
    #[error("expected {expected} qubits, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{num_qubits} qubits exceed the simulation limit of {max}")]
    TooLarge { num_qubits: usize, max: usize },
    #[error("amplitudes have norm² {0}, expected 1")]
    NotNormalised(f64),
    #[error("wire {wire} not in |0⟩ at event {event} (outcomes {outcomes:?})")]
    NotDisentangled {
        wire: usize,
        event: usize,
        outcomes: Vec<(usize, u8)>,
    },
    #[error("event {event} reads classical bit {bit} before it is set")]
    UnsetBit { event: usize, bit: usize },
    #[error("more than {0} measurement branches stay distinct")]
    TooManyBranches(usize),
    #[error("branch {outcomes:?} differs from the reference by {diff:e}")]
    Mismatch { outcomes: Vec<(usize, u8)>, diff: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self, VerifyError> {
        if num_qubits > MAX_DENSE_QUBITS {
            return Err(VerifyError::TooLarge {
                num_qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        if amplitudes.len() != 1 << num_qubits {
            return Err(VerifyError::DimensionMismatch {
                expected: 1 << num_qubits,
                found: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(VerifyError::NotNormalised(norm));
        }
        Ok(StateVector { num_qubits, amplitudes })
    }

    /// Computational basis state |index⟩.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self, VerifyError> {
        let mut amps = vec![c(0.0, 0.0); 1 << num_qubits];
        amps[index] = c(1.0, 0.0);
        Self::new(num_qubits, amps)
    }

    pub fn zero(num_qubits: usize) -> Result<Self, VerifyError> {
        Self::basis(num_qubits, 0)
    }

    /// Normalised state with Gaussian amplitudes drawn from `seed`.
    pub fn random(num_qubits: usize, seed: u64) -> Result<Self, VerifyError> {
        if num_qubits > MAX_DENSE_QUBITS {
            return Err(VerifyError::TooLarge {
                num_qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<C64> = (0..1usize << num_qubits)
            .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(num_qubits, amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest entrywise distance.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Applies the circuit's gates in order.
pub fn simulate(c: &Circuit, input: &StateVector) -> Result<StateVector, VerifyError> {
    if c.num_qubits() != input.num_qubits {
        return Err(VerifyError::DimensionMismatch {
            expected: c.num_qubits(),
            found: input.num_qubits,
        });
    }
    let mut amps = input.amplitudes.clone();
    for g in c.gates() {
        apply_gate(&mut amps, c.num_qubits(), g);
    }
    Ok(StateVector {
        num_qubits: input.num_qubits,
        amplitudes: amps,
    })
}

/// Same unitary up to global phase, within 1e-8.
pub fn equivalent(c1: &Circuit, c2: &Circuit) -> Result<bool, VerifyError> {
    if c1.num_qubits() != c2.num_qubits() {
        return Err(VerifyError::DimensionMismatch {
            expected: c1.num_qubits(),
            found: c2.num_qubits(),
        });
    }
    if c1.num_qubits() > MAX_EQUIVALENCE_QUBITS {
        return Err(VerifyError::TooLarge {
            num_qubits: c1.num_qubits(),
            max: MAX_EQUIVALENCE_QUBITS,
        });
    }
    let u1 = circuit_unitary(c1).expect("size checked");
    let u2 = circuit_unitary(c2).expect("size checked");
    Ok(u1.approx_eq_up_to_phase(&u2, 1e-8))
}

/// One measurement history of a distributed run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Branch {
    /// (bit, value) for every measurement on this path.
    pub outcomes: Vec<(usize, u8)>,
    /// Probability of the path.
    pub weight: f64,
    pub state: StateVector,
}

struct Live {
    amps: Vec<C64>,
    bits: Vec<Option<u8>>,
    outcomes: Vec<(usize, u8)>,
    weight: f64,
}

/// Runs every measurement branch of `d` on `input` over the data qubits.
///
/// Communication wires must be |0⟩ at allocation and release. Branches are
/// merged whenever their states and pending classical bits agree, so a
/// correct program stays at one live branch between protocols.
pub fn distributed_branches(d: &DistributedProgram, input: &StateVector) -> Result<Vec<Branch>, VerifyError> {
    run_branches(d, input, true)
}

/// Like [`distributed_branches`] without merging: one branch per
/// measurement history. Exponential in the number of EPR pairs.
pub fn all_branches(d: &DistributedProgram, input: &StateVector) -> Result<Vec<Branch>, VerifyError> {
    run_branches(d, input, false)
}

fn run_branches(d: &DistributedProgram, input: &StateVector, merge: bool) -> Result<Vec<Branch>, VerifyError> {
    if input.num_qubits != d.num_data_qubits {
        return Err(VerifyError::DimensionMismatch {
            expected: d.num_data_qubits,
            found: input.num_qubits,
        });
    }
    // Compact the communication wires that actually occur.
    let mut used: Vec<usize> = Vec::new();
    for ev in &d.events {
        let wires: Vec<usize> = match ev {
            Event::Gate { gate, .. } | Event::Conditional { gate, .. } => gate.qubits().collect(),
            Event::EprAlloc { wires, .. } => wires.to_vec(),
            Event::Measure { wire, .. } | Event::Release { wire, .. } => vec![*wire],
            _ => vec![],
        };
        for w in wires {
            if d.is_comm(w) && !used.contains(&w) {
                used.push(w);
            }
        }
    }
    used.sort_unstable();
    let nd = d.num_data_qubits;
    let total = nd + used.len();
    if total > MAX_DENSE_QUBITS {
        return Err(VerifyError::TooLarge {
            num_qubits: total,
            max: MAX_DENSE_QUBITS,
        });
    }
    let wire = |w: usize| -> usize {
        if w < nd {
            w
        } else {
            nd + used.binary_search(&w).expect("collected above")
        }
    };
    let local = |g: &Gate| g.remapped(wire);

    let mut last_read = vec![0usize; d.num_bits];
    for (i, ev) in d.events.iter().enumerate() {
        if let Event::Conditional { bit, .. } = ev {
            last_read[*bit] = i;
        }
    }

    let comm_bits = total - nd;
    let mut amps = vec![c(0.0, 0.0); 1 << total];
    for (i, a) in input.amplitudes.iter().enumerate() {
        amps[i << comm_bits] = *a;
    }
    let mut live = vec![Live {
        amps,
        bits: vec![None; d.num_bits],
        outcomes: Vec::new(),
        weight: 1.0,
    }];

    for (i, ev) in d.events.iter().enumerate() {
        match ev {
            Event::Gate { gate, .. } => {
                let g = local(gate);
                for b in &mut live {
                    apply_gate(&mut b.amps, total, &g);
                }
            }
            Event::Conditional { bit, gate, .. } => {
                let g = local(gate);
                for b in &mut live {
                    match b.bits[*bit] {
                        None => return Err(VerifyError::UnsetBit { event: i, bit: *bit }),
                        Some(1) => apply_gate(&mut b.amps, total, &g),
                        Some(_) => {}
                    }
                }
            }
            Event::EprAlloc { wires, .. } => {
                let (wa, wb) = (wire(wires[0]), wire(wires[1]));
                for b in &mut live {
                    for &w in &[wa, wb] {
                        if prob_one(&b.amps, total, w) > ZERO_TOLERANCE {
                            return Err(VerifyError::NotDisentangled {
                                wire: if w == wa { wires[0] } else { wires[1] },
                                event: i,
                                outcomes: b.outcomes.clone(),
                            });
                        }
                    }
                    apply_gate(&mut b.amps, total, &Gate::h(wa));
                    apply_gate(&mut b.amps, total, &Gate::cx(wa, wb));
                }
            }
            Event::Measure { wire: w, bit, .. } => {
                let w = wire(*w);
                let mut next = Vec::with_capacity(live.len() * 2);
                for b in live {
                    let p1 = prob_one(&b.amps, total, w);
                    let p0 = b.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() - p1;
                    for (v, p) in [(0u8, p0), (1u8, p1)] {
                        if p < 1e-12 {
                            continue;
                        }
                        let mut amps = b.amps.clone();
                        project(&mut amps, total, w, v, p);
                        let mut bits = b.bits.clone();
                        bits[*bit] = Some(v);
                        let mut outcomes = b.outcomes.clone();
                        outcomes.push((*bit, v));
                        next.push(Live {
                            amps,
                            bits,
                            outcomes,
                            weight: b.weight * p,
                        });
                    }
                }
                live = next;
            }
            Event::Release { wire: w, .. } => {
                let lw = wire(*w);
                for b in &live {
                    if prob_one(&b.amps, total, lw) > ZERO_TOLERANCE {
                        return Err(VerifyError::NotDisentangled {
                            wire: *w,
                            event: i,
                            outcomes: b.outcomes.clone(),
                        });
                    }
                }
                if merge {
                    live = dedupe(live, |bit| last_read[bit] > i);
                }
            }
            Event::Send { .. } | Event::Boundary { .. } => {}
        }
        if live.len() > MAX_BRANCHES {
            return Err(VerifyError::TooManyBranches(MAX_BRANCHES));
        }
    }

    let mut out = Vec::with_capacity(live.len());
    for b in live {
        for w in nd..total {
            if prob_one(&b.amps, total, w) > ZERO_TOLERANCE {
                return Err(VerifyError::NotDisentangled {
                    wire: used[w - nd],
                    event: d.events.len(),
                    outcomes: b.outcomes,
                });
            }
        }
        let data: Vec<C64> = (0..1usize << nd).map(|i| b.amps[i << comm_bits]).collect();
        out.push(Branch {
            outcomes: b.outcomes,
            weight: b.weight,
            state: StateVector {
                num_qubits: nd,
                amplitudes: data,
            },
        });
    }
    Ok(out)
}

/// Data-qubit output of `d`, provided every branch agrees within 1e-8.
pub fn simulate_distributed(d: &DistributedProgram, input: &StateVector) -> Result<StateVector, VerifyError> {
    let branches = distributed_branches(d, input)?;
    let first = branches[0].state.clone();
    for b in &branches[1..] {
        let diff = b.state.max_abs_diff(&first);
        if diff > 1e-8 {
            return Err(VerifyError::Mismatch {
                outcomes: b.outcomes.clone(),
                diff,
            });
        }
    }
    Ok(first)
}

/// Compares every branch of `d` with the monolithic run of `c` on `input`.
pub fn check_distributed(d: &DistributedProgram, c: &Circuit, input: &StateVector) -> Result<usize, VerifyError> {
    let reference = simulate(c, input)?;
    let branches = distributed_branches(d, input)?;
    for b in &branches {
        let diff = b.state.max_abs_diff(&reference);
        if diff > 1e-8 {
            return Err(VerifyError::Mismatch {
                outcomes: b.outcomes.clone(),
                diff,
            });
        }
    }
    Ok(branches.len())
}

fn prob_one(amps: &[C64], n: usize, w: usize) -> f64 {
    let mask = 1usize << (n - 1 - w);
    amps.iter()
        .enumerate()
        .filter(|(i, _)| i & mask != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

fn project(amps: &mut [C64], n: usize, w: usize, value: u8, p: f64) {
    let mask = 1usize << (n - 1 - w);
    let scale = 1.0 / p.sqrt();
    for (i, a) in amps.iter_mut().enumerate() {
        if ((i & mask != 0) as u8) == value {
            *a *= scale;
        } else {
            *a = c(0.0, 0.0);
        }
    }
}

/// Folds branches whose states and still-needed bits coincide.
fn dedupe(live: Vec<Live>, needed: impl Fn(usize) -> bool) -> Vec<Live> {
    let mut out: Vec<Live> = Vec::with_capacity(live.len());
    let mut by_bits: HashMap<Vec<Option<u8>>, Vec<usize>> = HashMap::new();
    for b in live {
        let key: Vec<Option<u8>> = b
            .bits
            .iter()
            .enumerate()
            .map(|(i, v)| if needed(i) { *v } else { None })
            .collect();
        let slot = by_bits.entry(key).or_default();
        let same = slot.iter().copied().find(|&j| {
            out[j]
                .amps
                .iter()
                .zip(&b.amps)
                .all(|(x, y)| (x - y).norm() < 1e-10)
        });
        match same {
            Some(j) => out[j].weight += b.weight,
            None => {
                slot.push(out.len());
                out.push(b);
            }
        }
    }
    out
}
