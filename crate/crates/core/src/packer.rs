//! Gate packets and packing sequences.
//!
//! A packet is a run of gates rooted on one control qubit: every controlled
//! member is controlled by the root, single-qubit members on the root are
//! diagonal or anti-diagonal, and every other register qubit is the target
//! of some controlled member. Such a run is distributed with one EPR pair
//! per extra QPU its register touches.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{circuit_unitary, commutes, Circuit, Gate};
use crate::matrix::{c, ComplexMatrix, C64};

/// Backward hoisting stops after commuting past this many overlapping gates.
pub const HOIST_WINDOW: usize = 32;
/// Upper bound on greedy re-packing passes.
pub const MAX_PASSES: usize = 10;
/// Largest sub-register for which [`packet_unitary`] builds a dense matrix.
pub const MAX_PACKET_UNITARY_QUBITS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackError {
    #[error("cannot merge packets rooted on qubits {0} and {1}")]
    RootsDiffer(usize, usize),
    #[error("packets {0} and {1} are not adjacent")]
    NotAdjacent(usize, usize),
    #[error("packet register of {size} qubits exceeds the dense limit of {max}")]
    RegisterTooLarge { size: usize, max: usize },
    #[error("invalid packing: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GatePacket {
    root: usize,
    sub_register: BTreeSet<usize>,
    members: Vec<usize>,
}

impl GatePacket {
    /// Packet holding one controlled gate.
    fn open(index: usize, gate: &Gate) -> Self {
        let root = gate.control().expect("packets open on controlled gates");
        GatePacket {
            root,
            sub_register: [root, gate.target()].into_iter().collect(),
            members: vec![index],
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Qubits the packet acts on, root included.
    pub fn sub_register(&self) -> &BTreeSet<usize> {
        &self.sub_register
    }

    /// Indices into the packing sequence's gate list, in execution order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    fn push(&mut self, index: usize, gate: &Gate) {
        if gate.is_controlled() {
            self.sub_register.insert(gate.target());
        }
        self.members.push(index);
    }

    fn touches(&self, gate: &Gate) -> bool {
        gate.qubits().any(|q| self.sub_register.contains(&q))
    }

    /// Whether `gate` may be appended under the packet rules.
    fn admits(&self, gate: &Gate) -> bool {
        match gate.control() {
            Some(ctl) => ctl == self.root,
            None if gate.target() == self.root => gate.class().is_root_compatible(),
            None => self.sub_register.contains(&gate.target()),
        }
    }
}

/// Concatenates two packets with the same root.
pub fn merge(p1: &GatePacket, p2: &GatePacket) -> Result<GatePacket, PackError> {
    if p1.root != p2.root {
        return Err(PackError::RootsDiffer(p1.root, p2.root));
    }
    let mut out = p1.clone();
    out.sub_register.extend(p2.sub_register.iter().copied());
    out.members.extend_from_slice(&p2.members);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Item {
    Packet(GatePacket),
    Loose { gate: usize },
}

/// Packets and loose single-qubit gates in execution order.
///
/// Gate indices refer to the input circuit. `gates` holds the gates as
/// executed, which differ from the input only where a control-symmetric
/// gate had its control and target exchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PackingSequence {
    num_qubits: usize,
    gates: Vec<Gate>,
    flipped: Vec<bool>,
    items: Vec<Item>,
}

impl PackingSequence {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_flipped(&self, gate: usize) -> bool {
        self.flipped[gate]
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn packets(&self) -> impl Iterator<Item = &GatePacket> {
        self.items.iter().filter_map(|it| match it {
            Item::Packet(p) => Some(p),
            Item::Loose { .. } => None,
        })
    }

    pub fn num_packets(&self) -> usize {
        self.packets().count()
    }

    /// Loose gates with their position in [`items`](Self::items).
    pub fn loose_gates(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.items.iter().enumerate().filter_map(|(pos, it)| match it {
            Item::Loose { gate } => Some((pos, *gate)),
            Item::Packet(_) => None,
        })
    }

    /// Gate indices in execution order.
    pub fn order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.gates.len());
        for it in &self.items {
            match it {
                Item::Packet(p) => out.extend_from_slice(&p.members),
                Item::Loose { gate } => out.push(*gate),
            }
        }
        out
    }

    /// The reordered circuit this sequence executes.
    pub fn replay(&self) -> Circuit {
        let gates = self.order().into_iter().map(|i| self.gates[i].clone()).collect();
        Circuit::from_gates(self.num_qubits, gates).expect("packed gates stay in range")
    }

    /// Merges packet `index` with packet `index + 1` when they share a root
    /// and only absorbable loose gates lie between them.
    pub fn merge_packets_at(&mut self, index: usize) -> Result<(), PackError> {
        let positions: Vec<usize> = self
            .items
            .iter()
            .enumerate()
            .filter(|(_, it)| matches!(it, Item::Packet(_)))
            .map(|(pos, _)| pos)
            .collect();
        let (Some(&a), Some(&b)) = (positions.get(index), positions.get(index + 1)) else {
            return Err(PackError::NotAdjacent(index, index + 1));
        };
        let (Item::Packet(p1), Item::Packet(p2)) = (&self.items[a], &self.items[b]) else {
            unreachable!()
        };
        let union = merge(p1, p2)?;
        let mut members = p1.members.clone();
        let mut before = Vec::new();
        for it in &self.items[a + 1..b] {
            let Item::Loose { gate } = it else { unreachable!() };
            let g = &self.gates[*gate];
            if !union.touches(g) {
                before.push(it.clone());
            } else if union.admits(g) {
                members.push(*gate);
            } else {
                return Err(PackError::NotAdjacent(index, index + 1));
            }
        }
        members.extend_from_slice(&p2.members);
        let merged = GatePacket {
            members,
            ..union
        };
        let mut items: Vec<Item> = self.items[..a].to_vec();
        items.extend(before);
        items.push(Item::Packet(merged));
        items.extend_from_slice(&self.items[b + 1..]);
        self.items = items;
        Ok(())
    }

    /// Checks the packet rules, that every gate is used once, and that
    /// only control-symmetric gates were flipped.
    pub fn validate(&self, original: &Circuit) -> Result<(), PackError> {
        let bad = |m: String| Err(PackError::Invalid(m));
        if original.len() != self.gates.len() || original.num_qubits() != self.num_qubits {
            return bad("sequence does not match the circuit".into());
        }
        for (i, (g, o)) in self.gates.iter().zip(original.gates()).enumerate() {
            let expected = if self.flipped[i] { o.flipped() } else { Some(o.clone()) };
            if expected.as_ref() != Some(g) {
                return bad(format!("gate {i} differs from the input"));
            }
        }
        let mut seen = vec![false; self.gates.len()];
        for i in self.order() {
            if std::mem::replace(&mut seen[i], true) {
                return bad(format!("gate {i} used twice"));
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return bad(format!("gate {i} missing"));
        }
        for (pos, it) in self.items.iter().enumerate() {
            match it {
                Item::Loose { gate } if self.gates[*gate].is_controlled() => {
                    return bad(format!("controlled gate {gate} is loose"));
                }
                Item::Loose { .. } => {}
                Item::Packet(p) => {
                    let mut targets = BTreeSet::new();
                    for &m in &p.members {
                        let g = &self.gates[m];
                        if !p.admits(g) {
                            return bad(format!("gate {m} violates the packet rules of item {pos}"));
                        }
                        if let Some(q) = g.qubits().find(|q| !p.sub_register.contains(q)) {
                            return bad(format!("gate {m} acts on qubit {q} outside packet {pos}"));
                        }
                        if g.is_controlled() {
                            targets.insert(g.target());
                        }
                    }
                    if !p.sub_register.contains(&p.root)
                        || p.sub_register.iter().any(|q| *q != p.root && !targets.contains(q))
                    {
                        return bad(format!("packet {pos} register is not covered by its targets"));
                    }
                }
            }
        }
        Ok(())
    }

    fn from_slots(circuit: &Circuit, gates: Vec<Gate>, flipped: Vec<bool>, items: Vec<Item>) -> Self {
        PackingSequence {
            num_qubits: circuit.num_qubits(),
            gates,
            flipped,
            items,
        }
    }
}

/// Groups consecutive compatible gates without any reordering or flipping.
///
/// One packet is open at a time. A gate joins it when the packet rules
/// allow; any other gate closes it.
pub fn baseline_pack(circuit: &Circuit) -> PackingSequence {
    let gates = circuit.gates();
    let mut items = Vec::new();
    let mut open: Option<GatePacket> = None;
    for (i, g) in gates.iter().enumerate() {
        if let Some(p) = open.as_mut() {
            if p.admits(g) {
                p.push(i, g);
                continue;
            }
            items.extend(open.take().map(Item::Packet));
        }
        if g.is_controlled() {
            open = Some(GatePacket::open(i, g));
        } else {
            items.push(Item::Loose { gate: i });
        }
    }
    items.extend(open.map(Item::Packet));
    PackingSequence::from_slots(circuit, gates.to_vec(), vec![false; gates.len()], items)
}

/// Merges every pair of neighbouring same-root packets separated only by
/// absorbable loose gates. No gate is reordered relative to a gate it
/// shares a qubit with.
pub fn merge_adjacent(seq: &PackingSequence) -> PackingSequence {
    let mut out = seq.clone();
    let mut index = 0;
    while index + 1 < out.num_packets() {
        if out.merge_packets_at(index).is_err() {
            index += 1;
        }
    }
    out
}

#[derive(Debug, Clone)]
enum Slot {
    Packet(GatePacket),
    Loose(usize),
}

impl Slot {
    fn touches(&self, gate: &Gate, gates: &[Gate]) -> bool {
        match self {
            Slot::Packet(p) => p.touches(gate),
            Slot::Loose(i) => gates[*i].shares_qubit(gate),
        }
    }

    fn member_indices(&self) -> &[usize] {
        match self {
            Slot::Packet(p) => &p.members,
            Slot::Loose(i) => std::slice::from_ref(i),
        }
    }
}

struct Greedy {
    gates: Vec<Gate>,
    flipped: Vec<bool>,
    slots: Vec<Slot>,
}

impl Greedy {
    /// Whether `gate` can move backward past every gate of `slot`, charging
    /// each overlapping gate against `budget`.
    fn commutes_past(&self, gate: &Gate, slot: &Slot, budget: &mut usize) -> bool {
        for &m in slot.member_indices() {
            let other = &self.gates[m];
            if !other.shares_qubit(gate) {
                continue;
            }
            if *budget == 0 || !commutes(other, gate) {
                return false;
            }
            *budget -= 1;
        }
        true
    }

    /// Packet `p` re-rooted at `x`, if every controlled member touches `x`
    /// and the members targeting `x` are control-symmetric.
    fn rerooted(&self, p: &GatePacket, x: usize) -> Option<(GatePacket, Vec<usize>)> {
        if x == p.root || !p.sub_register.contains(&x) {
            return None;
        }
        let mut flips = Vec::new();
        for &m in &p.members {
            let g = &self.gates[m];
            match g.control() {
                Some(_) if g.target() == x && g.class().control_symmetric => flips.push(m),
                Some(_) => return None,
                None if g.target() == x && !g.class().is_root_compatible() => return None,
                None => {}
            }
        }
        let mut q = p.clone();
        q.root = x;
        Some((q, flips))
    }

    fn place_controlled(&mut self, index: usize) {
        let gate = self.gates[index].clone();
        let mut options = vec![gate.clone()];
        options.extend(gate.flipped());
        // (slot, orientation, re-rooted packet and flips)
        let mut found: Vec<Option<(usize, Option<(GatePacket, Vec<usize>)>)>> = vec![None; options.len()];
        let mut budget = HOIST_WINDOW;
        for s in (0..self.slots.len()).rev() {
            let slot = &self.slots[s];
            if !slot.touches(&gate, &self.gates) {
                continue;
            }
            if let Slot::Packet(p) = slot {
                for (o, g) in options.iter().enumerate() {
                    if found[o].is_some() {
                        continue;
                    }
                    let root = g.control().expect("controlled");
                    if p.root == root {
                        found[o] = Some((s, None));
                    } else if let Some(rr) = self.rerooted(p, root) {
                        found[o] = Some((s, Some(rr)));
                    }
                }
            }
            if found.iter().all(Option::is_some) || !self.commutes_past(&gate, slot, &mut budget) {
                break;
            }
        }
        let both = |s: usize| match &self.slots[s] {
            Slot::Packet(p) => gate.qubits().all(|q| p.sub_register.contains(&q)),
            Slot::Loose(_) => false,
        };
        let choice = found
            .iter()
            .enumerate()
            .filter_map(|(o, f)| f.as_ref().map(|(s, rr)| (o, *s, rr.is_some())))
            .min_by_key(|&(o, s, reroot)| (!both(s), s, reroot, o))
            .map(|(o, s, _)| (o, s));
        match choice {
            Some((o, s)) => {
                let reroot = found[o].take().and_then(|(_, rr)| rr);
                if let Some((packet, flips)) = reroot {
                    for m in flips {
                        self.flip(m);
                    }
                    self.slots[s] = Slot::Packet(packet);
                }
                if o == 1 {
                    self.flip(index);
                }
                let g = self.gates[index].clone();
                let Slot::Packet(p) = &mut self.slots[s] else { unreachable!() };
                p.push(index, &g);
            }
            None => self.slots.push(Slot::Packet(GatePacket::open(index, &gate))),
        }
    }

    fn flip(&mut self, index: usize) {
        self.gates[index] = self.gates[index].flipped().expect("only symmetric gates are flipped");
        self.flipped[index] = !self.flipped[index];
    }

    fn place_single(&mut self, index: usize) {
        let gate = &self.gates[index];
        let host = self.slots.iter().rposition(|s| s.touches(gate, &self.gates));
        if let Some(h) = host {
            if let Slot::Packet(p) = &mut self.slots[h] {
                if p.admits(gate) {
                    let g = gate.clone();
                    p.push(index, &g);
                    return;
                }
            }
        }
        self.slots.push(Slot::Loose(index));
    }

    fn slots_commute(&self, a: &[usize], b: &[usize]) -> bool {
        a.iter().all(|&x| {
            b.iter().all(|&y| {
                let (gx, gy) = (&self.gates[x], &self.gates[y]);
                !gx.shares_qubit(gy) || commutes(gx, gy)
            })
        })
    }

    /// Sorts the slots strictly between `s` and `i` into those that can move
    /// ahead of slot `s` and those that can move behind slot `i`.
    fn split_between(&self, s: usize, i: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let first = self.slots[s].member_indices();
        let last = self.slots[i].member_indices();
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for x in s + 1..i {
            let mx = self.slots[x].member_indices();
            if self.slots_commute(mx, first)
                && right.iter().all(|&r: &usize| self.slots_commute(mx, self.slots[r].member_indices()))
            {
                left.push(x);
            } else if self.slots_commute(mx, last) {
                right.push(x);
            } else {
                return None;
            }
        }
        Some((left, right))
    }

    /// Merges each packet into the nearest earlier packet with the same root
    /// when every slot in between commutes with one of the two.
    fn merge_pass(&mut self) {
        let mut i = 0;
        while i < self.slots.len() {
            let Slot::Packet(q) = &self.slots[i] else {
                i += 1;
                continue;
            };
            let mut target = None;
            let mut overlapping = 0;
            for s in (0..i).rev() {
                match &self.slots[s] {
                    Slot::Packet(p) if p.root == q.root => {
                        target = Some(s);
                        break;
                    }
                    slot => {
                        let touches = slot
                            .member_indices()
                            .iter()
                            .any(|&m| self.gates[m].qubits().any(|x| q.sub_register.contains(&x)));
                        if touches {
                            overlapping += 1;
                            if overlapping > HOIST_WINDOW {
                                break;
                            }
                        }
                    }
                }
            }
            let Some(s) = target else {
                i += 1;
                continue;
            };
            let Some((left, right)) = self.split_between(s, i) else {
                i += 1;
                continue;
            };
            let (Slot::Packet(p), Slot::Packet(q)) = (&self.slots[s], &self.slots[i]) else { unreachable!() };
            let merged = Slot::Packet(merge(p, q).expect("same root"));
            let mut window: Vec<Slot> = left.iter().map(|&x| self.slots[x].clone()).collect();
            let next = s + window.len() + 1;
            window.push(merged);
            window.extend(right.iter().map(|&x| self.slots[x].clone()));
            self.slots.splice(s..=i, window);
            i = next;
        }
    }

    fn into_items(self) -> (Vec<Gate>, Vec<bool>, Vec<Item>) {
        let items = self
            .slots
            .into_iter()
            .map(|s| match s {
                Slot::Packet(p) => Item::Packet(p),
                Slot::Loose(i) => Item::Loose { gate: i },
            })
            .collect();
        (self.gates, self.flipped, items)
    }
}

fn greedy_pass(gates: Vec<Gate>, flipped: Vec<bool>, order: &[usize]) -> (Vec<Gate>, Vec<bool>, Vec<Item>) {
    let mut g = Greedy {
        gates,
        flipped,
        slots: Vec::new(),
    };
    for &i in order {
        if g.gates[i].is_controlled() {
            g.place_controlled(i);
        } else {
            g.place_single(i);
        }
    }
    g.merge_pass();
    g.into_items()
}

/// Greedy reordering and packing.
///
/// Each pass walks the gates in order. A controlled gate is hoisted
/// backward past commuting gates to join the nearest packet rooted on its
/// control, or on its target after a control-symmetry flip (possibly
/// re-rooting a two-qubit packet). Single-qubit gates join the packet that
/// last touched their qubit when the packet rules allow it. Each packet is
/// then merged into the previous packet with the same root when every slot
/// in between commutes with one of the two. Passes repeat on the reordered
/// circuit until the packet count stops falling. If the result has more
/// packets than the baseline, the merged baseline is returned instead.
pub fn greedy_pack(circuit: &Circuit) -> PackingSequence {
    let n = circuit.len();
    let mut gates = circuit.gates().to_vec();
    let mut flipped = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    let mut best: Option<PackingSequence> = None;
    for _ in 0..MAX_PASSES {
        let (g, f, items) = greedy_pass(gates, flipped, &order);
        let seq = PackingSequence::from_slots(circuit, g, f, items);
        let improved = best.as_ref().is_none_or(|b| seq.num_packets() < b.num_packets());
        if !improved {
            break;
        }
        order = seq.order();
        gates = seq.gates.clone();
        flipped = seq.flipped.clone();
        best = Some(seq);
    }
    let best = best.expect("at least one pass runs");
    let fallback = merge_adjacent(&baseline_pack(circuit));
    if best.num_packets() > fallback.num_packets() {
        fallback
    } else {
        best
    }
}

/// Dense unitary of a packet's members on its sub-register, root first and
/// the remaining qubits in ascending order.
pub fn packet_unitary(packet: &GatePacket, circuit: &Circuit) -> Result<ComplexMatrix, PackError> {
    let size = packet.sub_register.len();
    if size > MAX_PACKET_UNITARY_QUBITS {
        return Err(PackError::RegisterTooLarge {
            size,
            max: MAX_PACKET_UNITARY_QUBITS,
        });
    }
    let mut local: Vec<usize> = vec![packet.root];
    local.extend(packet.sub_register.iter().copied().filter(|&q| q != packet.root));
    let pos = |q: usize| local.iter().position(|&x| x == q).expect("member inside register");
    let mut c = Circuit::new(size);
    for &m in &packet.members {
        let g = circuit.gates()[m].remapped(pos);
        c.push(g).map_err(|e| PackError::Invalid(e.to_string()))?;
    }
    Ok(circuit_unitary(&c).expect("size checked above"))
}

/// `(|0⟩⟨0|·D) ⊗ A + (|1⟩⟨1|·D) ⊗ B` with `D ∈ {I, X}` on the root and `A`,
/// `B` products of one 2x2 factor per remaining qubit.
#[derive(Debug, Clone)]
pub struct PacketForm {
    pub root_flip: bool,
    pub a: Vec<ComplexMatrix>,
    pub b: Vec<ComplexMatrix>,
}

impl PacketForm {
    /// Fits the form to a root-first packet unitary by block extraction.
    /// Returns `None` if the off-diagonal or diagonal root blocks are not
    /// both zero, or if a block is not a tensor product.
    pub fn fit(u: &ComplexMatrix) -> Option<PacketForm> {
        let half = u.dim() / 2;
        let block = |r0: usize, c0: usize| {
            let mut m = ComplexMatrix::zeros(half);
            for r in 0..half {
                for col in 0..half {
                    m.set(r, col, u.get(r0 + r, c0 + col));
                }
            }
            m
        };
        let zero = ComplexMatrix::zeros(half);
        let (b00, b01, b10, b11) = (block(0, 0), block(0, half), block(half, 0), block(half, half));
        let (root_flip, a, b) = if b01.approx_eq(&zero, 1e-9) && b10.approx_eq(&zero, 1e-9) {
            (false, b00, b11)
        } else if b00.approx_eq(&zero, 1e-9) && b11.approx_eq(&zero, 1e-9) {
            (true, b01, b10)
        } else {
            return None;
        };
        let form = PacketForm {
            root_flip,
            a: factorize(&a)?,
            b: factorize(&b)?,
        };
        (form.reconstruct().max_abs_diff(u) < 1e-9).then_some(form)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let kron_all = |fs: &[ComplexMatrix]| fs.iter().fold(ComplexMatrix::identity(1), |acc, f| acc.kron(f));
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let (p0d, p1d) = if self.root_flip {
            (ComplexMatrix::mat2(zero, one, zero, zero), ComplexMatrix::mat2(zero, zero, one, zero))
        } else {
            (ComplexMatrix::mat2(one, zero, zero, zero), ComplexMatrix::mat2(zero, zero, zero, one))
        };
        let lhs = p0d.kron(&kron_all(&self.a));
        let rhs = p1d.kron(&kron_all(&self.b));
        let mut out = lhs.clone();
        for (o, r) in out.entries_mut().iter_mut().zip(rhs.entries()) {
            *o += *r;
        }
        out
    }
}

/// Splits `m` into one 2x2 factor per qubit, most significant first,
/// anchored on its largest entry. The caller checks the reconstruction.
fn factorize(m: &ComplexMatrix) -> Option<Vec<ComplexMatrix>> {
    let dim = m.dim();
    let k = dim.trailing_zeros() as usize;
    if k == 0 {
        return Some(Vec::new());
    }
    let (mut r0, mut c0, mut best) = (0, 0, 0.0);
    for r in 0..dim {
        for col in 0..dim {
            let v = m.get(r, col).norm();
            if v > best {
                (r0, c0, best) = (r, col, v);
            }
        }
    }
    if best < 1e-12 {
        return None;
    }
    let anchor = m.get(r0, c0);
    let mut factors = Vec::with_capacity(k);
    for l in 0..k {
        let bit = 1 << (k - 1 - l);
        let mut f = ComplexMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                let r = if i == 1 { r0 | bit } else { r0 & !bit };
                let col = if j == 1 { c0 | bit } else { c0 & !bit };
                f.set(i, j, m.get(r, col) / anchor);
            }
        }
        factors.push(f);
    }
    let scale: C64 = anchor;
    factors[0] = factors[0].scale(scale);
    Some(factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn merge_requires_equal_roots() {
        let a = GatePacket::open(0, &Gate::cx(0, 1));
        let b = GatePacket::open(1, &Gate::cx(0, 2));
        let m = merge(&a, &b).unwrap();
        assert_eq!(m.sub_register().iter().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(m.members(), &[0, 1]);
        let c = GatePacket::open(2, &Gate::cx(1, 2));
        assert_eq!(merge(&a, &c), Err(PackError::RootsDiffer(0, 1)));
    }

    #[test]
    fn factorize_recovers_products() {
        let a = crate::matrix::gates::h();
        let b = crate::matrix::gates::u3(0.3, 1.0, -0.2);
        let m = a.kron(&b).scale(c(0.0, 1.0));
        let f = factorize(&m).unwrap();
        assert!(f[0].kron(&f[1]).approx_eq(&m, 1e-12));
    }
}
