//! Allocation maps, distribution cost, and TeleGate emission.
//!
//! Wires of a [`DistributedProgram`] number the data qubits `0..n` first,
//! then communication slot `s` of QPU `l` at `n + l * comm_per_qpu + s`.

use std::collections::BTreeSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::circuit::{Gate, GateLabel};
use crate::hypergraph::Partition;
use crate::matrix::ComplexMatrix;
use crate::packer::{GatePacket, Item, PackingSequence};
use crate::qasm::{format_op, qasm_op};

pub const DEFAULT_COMM_QUBITS: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistributeError {
    #[error("allocation covers {found} qubits but the circuit has {expected}")]
    WrongSize { expected: usize, found: usize },
    #[error("qubit {qubit} is mapped to QPU {qpu}, outside 0..{k}")]
    LabelOutOfRange { qubit: usize, qpu: usize, k: usize },
    #[error("packet {packet}: no free communication qubit on QPU {qpu}")]
    CommBudgetExhausted { packet: usize, qpu: usize },
    #[error(transparent)]
    Partition(#[from] crate::hypergraph::HypergraphError),
}

/// Qubit index to QPU label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationMap {
    assignment: Vec<usize>,
    num_qpus: usize,
}

impl AllocationMap {
    pub fn new(assignment: Vec<usize>, num_qpus: usize) -> Result<Self, DistributeError> {
        if let Some((qubit, &qpu)) = assignment.iter().enumerate().find(|(_, &l)| l >= num_qpus) {
            return Err(DistributeError::LabelOutOfRange {
                qubit,
                qpu,
                k: num_qpus,
            });
        }
        Ok(AllocationMap { assignment, num_qpus })
    }

    /// Every qubit on QPU 0.
    pub fn single(num_qubits: usize) -> Self {
        AllocationMap {
            assignment: vec![0; num_qubits],
            num_qpus: 1,
        }
    }

    pub fn qpu(&self, qubit: usize) -> usize {
        self.assignment[qubit]
    }

    pub fn num_qubits(&self) -> usize {
        self.assignment.len()
    }

    pub fn num_qpus(&self) -> usize {
        self.num_qpus
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Distinct QPUs holding `qubits`.
    pub fn qpus_of<'a>(&self, qubits: impl IntoIterator<Item = &'a usize>) -> BTreeSet<usize> {
        qubits.into_iter().map(|&q| self.assignment[q]).collect()
    }

    fn check(&self, num_qubits: usize) -> Result<(), DistributeError> {
        if self.assignment.len() != num_qubits {
            return Err(DistributeError::WrongSize {
                expected: num_qubits,
                found: self.assignment.len(),
            });
        }
        Ok(())
    }
}

/// Qubit `q` goes to the index of the part containing it.
pub fn allocation_from_partition(p: &Partition, num_qubits: usize) -> Result<AllocationMap, DistributeError> {
    let assignment = p.assignment(num_qubits)?;
    AllocationMap::new(assignment, p.k())
}

/// Σ over packets of (number of QPUs the register touches − 1).
pub fn distribution_cost(s: &PackingSequence, a: &AllocationMap) -> usize {
    s.packets().map(|p| a.qpus_of(p.sub_register()).len() - 1).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    CatEntangle,
    CatDisentangle,
}

impl Protocol {
    fn short(self) -> &'static str {
        match self {
            Protocol::CatEntangle => "CE",
            Protocol::CatDisentangle => "CD",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Event {
    Gate { qpu: usize, gate: Gate },
    /// Prepares (|00⟩+|11⟩)/√2 on two communication wires.
    EprAlloc { pair: usize, qpus: [usize; 2], wires: [usize; 2] },
    /// Computational-basis measurement into classical bit `bit`.
    Measure { qpu: usize, wire: usize, bit: usize },
    Send { from: usize, to: usize, bit: usize },
    /// Applies `gate` when `bit` is 1.
    Conditional { qpu: usize, bit: usize, gate: Gate },
    /// The wire must be back in |0⟩.
    Release { qpu: usize, wire: usize },
    Boundary {
        protocol: Protocol,
        pair: usize,
        begin: bool,
        qpus: [usize; 2],
    },
}

impl Event {
    /// QPUs taking part in the event.
    pub fn qpus(&self) -> Vec<usize> {
        match self {
            Event::Gate { qpu, .. }
            | Event::Measure { qpu, .. }
            | Event::Conditional { qpu, .. }
            | Event::Release { qpu, .. } => vec![*qpu],
            Event::EprAlloc { qpus, .. } | Event::Boundary { qpus, .. } => qpus.to_vec(),
            Event::Send { from, to, .. } => vec![*from, *to],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributedProgram {
    pub num_data_qubits: usize,
    pub num_qpus: usize,
    pub comm_per_qpu: usize,
    pub data_owner: Vec<usize>,
    /// One canonical total order of the program.
    pub events: Vec<Event>,
    pub num_bits: usize,
    pub epr_consumed: usize,
}

impl DistributedProgram {
    pub fn num_wires(&self) -> usize {
        self.num_data_qubits + self.num_qpus * self.comm_per_qpu
    }

    pub fn comm_wire(&self, qpu: usize, slot: usize) -> usize {
        self.num_data_qubits + qpu * self.comm_per_qpu + slot
    }

    /// QPU owning a wire.
    pub fn owner(&self, wire: usize) -> usize {
        if wire < self.num_data_qubits {
            self.data_owner[wire]
        } else {
            (wire - self.num_data_qubits) / self.comm_per_qpu
        }
    }

    pub fn is_comm(&self, wire: usize) -> bool {
        wire >= self.num_data_qubits
    }

    /// Indices into [`events`](Self::events) involving `qpu`.
    pub fn qpu_stream(&self, qpu: usize) -> Vec<usize> {
        (0..self.events.len()).filter(|&i| self.events[i].qpus().contains(&qpu)).collect()
    }

    /// Checks that every local operation stays on wires its QPU owns.
    pub fn check_locality(&self) -> Result<(), String> {
        for (i, ev) in self.events.iter().enumerate() {
            let (qpu, wires): (usize, Vec<usize>) = match ev {
                Event::Gate { qpu, gate } | Event::Conditional { qpu, gate, .. } => (*qpu, gate.qubits().collect()),
                Event::Measure { qpu, wire, .. } | Event::Release { qpu, wire } => (*qpu, vec![*wire]),
                Event::EprAlloc { qpus, wires, .. } => {
                    if self.owner(wires[0]) != qpus[0] || self.owner(wires[1]) != qpus[1] {
                        return Err(format!("event {i}: EPR halves not on the named QPUs"));
                    }
                    continue;
                }
                _ => continue,
            };
            if let Some(w) = wires.iter().find(|&&w| self.owner(w) != qpu) {
                return Err(format!("event {i}: QPU {qpu} touches wire {w} owned by QPU {}", self.owner(*w)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let per_qpu: Vec<Value> = (0..self.num_qpus)
            .map(|l| {
                json!({
                    "qpu": l,
                    "data_qubits": (0..self.num_data_qubits).filter(|&q| self.data_owner[q] == l).collect::<Vec<_>>(),
                    "events": self.qpu_stream(l),
                })
            })
            .collect();
        let epr: Vec<Value> = self
            .events
            .iter()
            .filter_map(|e| match e {
                Event::EprAlloc { pair, qpus, wires } => Some(json!({"pair": pair, "qpus": qpus, "wires": wires})),
                _ => None,
            })
            .collect();
        let edges: Vec<Value> = self
            .events
            .iter()
            .filter_map(|e| match e {
                Event::Send { from, to, bit } => Some(json!({"from": from, "to": to, "bit": bit})),
                _ => None,
            })
            .collect();
        json!({
            "num_data_qubits": self.num_data_qubits,
            "num_qpus": self.num_qpus,
            "comm_per_qpu": self.comm_per_qpu,
            "data_owner": self.data_owner,
            "epr_consumed": self.epr_consumed,
            "per_qpu": per_qpu,
            "epr_pairs": epr,
            "classical_edges": edges,
            "events": serde_json::to_value(&self.events).expect("events serialise"),
        })
    }

    /// OpenQASM 2.0 for one QPU's stream. Data qubits are renumbered in
    /// ascending global order into register `d`; communication slots live in
    /// `comm`; every classical bit seen by the QPU gets its own register.
    pub fn qpu_qasm(&self, qpu: usize) -> String {
        let data: Vec<usize> = (0..self.num_data_qubits).filter(|&q| self.data_owner[q] == qpu).collect();
        let name = |w: usize| -> String {
            if self.is_comm(w) {
                format!("comm[{}]", (w - self.num_data_qubits) % self.comm_per_qpu)
            } else {
                format!("d[{}]", data.binary_search(&w).expect("wire owned by this QPU"))
            }
        };
        let stream = self.qpu_stream(qpu);
        let mut bits = BTreeSet::new();
        for &i in &stream {
            match &self.events[i] {
                Event::Measure { bit, .. } | Event::Send { bit, .. } | Event::Conditional { bit, .. } => {
                    bits.insert(*bit);
                }
                _ => {}
            }
        }
        let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
        let globals: Vec<String> = data.iter().map(|q| q.to_string()).collect();
        writeln!(out, "// QPU {qpu}: data qubits [{}]", globals.join(",")).unwrap();
        if !data.is_empty() {
            writeln!(out, "qreg d[{}];", data.len()).unwrap();
        }
        if self.comm_per_qpu > 0 {
            writeln!(out, "qreg comm[{}];", self.comm_per_qpu).unwrap();
        }
        for b in &bits {
            writeln!(out, "creg m{b}[1];").unwrap();
        }
        let gate_line = |g: &Gate| -> String {
            let (op, ps) = qasm_op(g);
            match g.control() {
                Some(ctl) => format!("{} {},{};", format_op(&op, &ps), name(ctl), name(g.target())),
                None => format!("{} {};", format_op(&op, &ps), name(g.target())),
            }
        };
        for &i in &stream {
            match &self.events[i] {
                Event::Gate { gate, .. } => out.push_str(&gate_line(gate)),
                Event::Conditional { bit, gate, .. } => write!(out, "if(m{bit}==1) {}", gate_line(gate)).unwrap(),
                Event::Measure { wire, bit, .. } => write!(out, "measure {} -> m{bit}[0];", name(*wire)).unwrap(),
                Event::Send { from, to, bit } => {
                    if *from == qpu {
                        write!(out, "// send m{bit} to QPU {to}").unwrap();
                    } else {
                        write!(out, "// receive m{bit} from QPU {from}").unwrap();
                    }
                }
                Event::EprAlloc { pair, qpus, wires } => {
                    let side = usize::from(qpus[1] == qpu);
                    write!(out, "// epr pair {pair}: {} shared with QPU {}", name(wires[side]), qpus[1 - side]).unwrap();
                }
                Event::Release { wire, .. } => write!(out, "// release {}", name(*wire)).unwrap(),
                Event::Boundary {
                    protocol, pair, begin, ..
                } => write!(
                    out,
                    "// {} {} pair {pair}",
                    if *begin { "begin" } else { "end" },
                    protocol.short()
                )
                .unwrap(),
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmitConfig {
    pub comm_per_qpu: usize,
}

impl Default for EmitConfig {
    fn default() -> Self {
        EmitConfig {
            comm_per_qpu: DEFAULT_COMM_QUBITS,
        }
    }
}

/// Emission with the default communication budget.
pub fn emit(s: &PackingSequence, a: &AllocationMap) -> Result<DistributedProgram, DistributeError> {
    emit_with(s, a, &EmitConfig::default())
}

pub fn emit_with(s: &PackingSequence, a: &AllocationMap, cfg: &EmitConfig) -> Result<DistributedProgram, DistributeError> {
    a.check(s.num_qubits())?;
    let mut em = Emitter {
        prog: DistributedProgram {
            num_data_qubits: s.num_qubits(),
            num_qpus: a.num_qpus(),
            comm_per_qpu: cfg.comm_per_qpu,
            data_owner: a.assignment().to_vec(),
            events: Vec::new(),
            num_bits: 0,
            epr_consumed: 0,
        },
        busy: vec![vec![false; cfg.comm_per_qpu]; a.num_qpus()],
    };
    let mut packet_index = 0;
    for item in s.items() {
        match item {
            Item::Loose { gate } => em.local(&s.gates()[*gate]),
            Item::Packet(p) => {
                em.packet(s, a, p, packet_index)?;
                packet_index += 1;
            }
        }
    }
    Ok(em.prog)
}

/// A packet member after moving every root X factor to the end.
enum Step {
    RootDiag(ComplexMatrix),
    Controlled { gate: Gate, anti: bool },
    Free(Gate),
}

/// Rewrites members so all root operations are diagonal. Returns the steps
/// and whether a final X on the root is owed.
fn rewrite(members: impl Iterator<Item = Gate>, root: usize) -> (Vec<Step>, bool) {
    let mut parity = false;
    let mut steps = Vec::new();
    for g in members {
        if g.is_controlled() {
            steps.push(Step::Controlled { gate: g, anti: parity });
        } else if g.target() != root {
            steps.push(Step::Free(g));
        } else {
            let u = g.unitary();
            let (d0, d1) = if g.class().diagonal {
                (u.get(0, 0), u.get(1, 1))
            } else {
                // U = diag(u01, u10) · X
                parity = !parity;
                (u.get(0, 1), u.get(1, 0))
            };
            let (d0, d1) = if parity { (d1, d0) } else { (d0, d1) };
            steps.push(Step::RootDiag(ComplexMatrix::diagonal(&[d0, d1])));
        }
    }
    (steps, parity)
}

struct Emitter {
    prog: DistributedProgram,
    busy: Vec<Vec<bool>>,
}

impl Emitter {
    fn push(&mut self, e: Event) {
        self.prog.events.push(e);
    }

    fn gate(&mut self, qpu: usize, gate: Gate) {
        self.push(Event::Gate { qpu, gate });
    }

    /// A gate whose qubits all sit on one QPU.
    fn local(&mut self, g: &Gate) {
        let qpu = self.prog.data_owner[g.target()];
        self.gate(qpu, g.clone());
    }

    fn bit(&mut self) -> usize {
        self.prog.num_bits += 1;
        self.prog.num_bits - 1
    }

    fn acquire(&mut self, qpu: usize, packet: usize) -> Result<usize, DistributeError> {
        let slot = self.busy[qpu]
            .iter()
            .position(|b| !b)
            .ok_or(DistributeError::CommBudgetExhausted { packet, qpu })?;
        self.busy[qpu][slot] = true;
        Ok(self.prog.comm_wire(qpu, slot))
    }

    fn release(&mut self, qpu: usize, wire: usize) {
        let slot = (wire - self.prog.num_data_qubits) % self.prog.comm_per_qpu;
        self.busy[qpu][slot] = false;
        self.push(Event::Release { qpu, wire });
    }

    /// `gate` controlled on `control` instead of its own control, on the
    /// |0⟩ branch when `anti`.
    fn controlled_on(&mut self, qpu: usize, gate: &Gate, control: usize, anti: bool) {
        let moved = Gate::controlled(gate.label().clone(), control, gate.target(), gate.unitary().clone())
            .expect("control and target differ");
        if anti {
            self.gate(qpu, Gate::x(control));
        }
        self.gate(qpu, moved);
        if anti {
            self.gate(qpu, Gate::x(control));
        }
    }

    fn packet(
        &mut self,
        s: &PackingSequence,
        a: &AllocationMap,
        p: &GatePacket,
        index: usize,
    ) -> Result<(), DistributeError> {
        let members = p.members().iter().map(|&i| s.gates()[i].clone());
        let qpus = a.qpus_of(p.sub_register());
        if qpus.len() == 1 {
            for g in members {
                self.local(&g);
            }
            return Ok(());
        }
        let root = p.root();
        let home = a.qpu(root);
        let (steps, owe_x) = rewrite(members, root);
        let on = |g: &Gate| a.qpu(g.target());

        for st in &steps {
            match st {
                Step::RootDiag(d) => {
                    let g = Gate::single(GateLabel::new("diag", vec![]), root, d.clone()).expect("diagonal unitary");
                    self.gate(home, g);
                }
                Step::Controlled { gate, anti } if on(gate) == home => self.controlled_on(home, gate, root, *anti),
                Step::Free(g) if on(g) == home => self.gate(home, g.clone()),
                _ => {}
            }
        }

        for remote in qpus.into_iter().filter(|&l| l != home) {
            let ea = self.acquire(home, index)?;
            let eb = self.acquire(remote, index)?;
            let pair = self.prog.epr_consumed;
            self.prog.epr_consumed += 1;
            let both = [home, remote];
            self.push(Event::EprAlloc {
                pair,
                qpus: both,
                wires: [ea, eb],
            });

            self.push(Event::Boundary {
                protocol: Protocol::CatEntangle,
                pair,
                begin: true,
                qpus: both,
            });
            self.gate(home, Gate::cx(root, ea));
            let m1 = self.bit();
            self.push(Event::Measure {
                qpu: home,
                wire: ea,
                bit: m1,
            });
            self.push(Event::Send {
                from: home,
                to: remote,
                bit: m1,
            });
            self.push(Event::Conditional {
                qpu: remote,
                bit: m1,
                gate: Gate::x(eb),
            });
            self.push(Event::Conditional {
                qpu: home,
                bit: m1,
                gate: Gate::x(ea),
            });
            self.push(Event::Boundary {
                protocol: Protocol::CatEntangle,
                pair,
                begin: false,
                qpus: both,
            });

            for st in &steps {
                match st {
                    Step::Controlled { gate, anti } if on(gate) == remote => self.controlled_on(remote, gate, eb, *anti),
                    Step::Free(g) if on(g) == remote => self.gate(remote, g.clone()),
                    _ => {}
                }
            }

            self.push(Event::Boundary {
                protocol: Protocol::CatDisentangle,
                pair,
                begin: true,
                qpus: both,
            });
            self.gate(remote, Gate::h(eb));
            let m2 = self.bit();
            self.push(Event::Measure {
                qpu: remote,
                wire: eb,
                bit: m2,
            });
            self.push(Event::Send {
                from: remote,
                to: home,
                bit: m2,
            });
            self.push(Event::Conditional {
                qpu: home,
                bit: m2,
                gate: Gate::z(root),
            });
            self.push(Event::Conditional {
                qpu: remote,
                bit: m2,
                gate: Gate::x(eb),
            });
            self.push(Event::Boundary {
                protocol: Protocol::CatDisentangle,
                pair,
                begin: false,
                qpus: both,
            });
            self.release(home, ea);
            self.release(remote, eb);
        }

        if owe_x {
            self.gate(home, Gate::x(root));
        }
        Ok(())
    }
}
