//! Circuit intermediate representation over the gateset of single-qubit
//! unitaries and singly-controlled single-qubit unitaries.
//!
//! Qubit index 0 is the most significant tensor factor everywhere: in
//! [`embed`], in [`circuit_unitary`], and in the state vectors of the
//! verifier.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{c, gates, ComplexMatrix, C64, TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate `{0}` is not unitary within tolerance")]
    NonUnitary(String),
    #[error("gate `{0}` must carry a 2x2 matrix")]
    NotSingleQubitMatrix(String),
    #[error("controlled gate `{name}` uses qubit {qubit} as both control and target")]
    ControlEqualsTarget { name: String, qubit: usize },
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },
    #[error("support does not contain qubit {0} acted on by the gate")]
    SupportMissingQubit(usize),
    #[error("support of {0} qubits exceeds the embedding limit of 3")]
    SupportTooLarge(usize),
    #[error("{num_qubits}-qubit circuit is too large for dense construction (max {max})")]
    TooLarge { num_qubits: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Single,
    Controlled,
}

/// Shape flags used by the packing rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateClass {
    pub diagonal: bool,
    pub anti_diagonal: bool,
    /// Only meaningful for controlled gates.
    pub control_symmetric: bool,
}

impl GateClass {
    /// Diagonal or anti-diagonal: the single-qubit gates allowed on a packet root.
    pub fn is_root_compatible(&self) -> bool {
        self.diagonal || self.anti_diagonal
    }
}

/// Symbolic name and real parameters (radians), for reporting and QASM output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateLabel {
    pub name: String,
    pub params: Vec<f64>,
}

impl GateLabel {
    pub fn new(name: impl Into<String>, params: Vec<f64>) -> Self {
        GateLabel {
            name: name.into(),
            params,
        }
    }
}

impl fmt::Display for GateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.params.is_empty() {
            write!(f, "{}", self.name)
        } else {
            let ps: Vec<String> = self.params.iter().map(|p| format!("{p}")).collect();
            write!(f, "{}({})", self.name, ps.join(","))
        }
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    control: Option<usize>,
    target: usize,
    unitary: ComplexMatrix,
    label: GateLabel,
    class: GateClass,
}

impl Gate {
    /// A single-qubit gate. Fails if `unitary` is not a 2x2 unitary.
    pub fn single(label: GateLabel, target: usize, unitary: ComplexMatrix) -> Result<Self, CircuitError> {
        Self::build(GateKind::Single, None, target, unitary, label)
    }

    /// A controlled gate applying `unitary` to `target` when `control` is |1⟩.
    pub fn controlled(
        label: GateLabel,
        control: usize,
        target: usize,
        unitary: ComplexMatrix,
    ) -> Result<Self, CircuitError> {
        if control == target {
            return Err(CircuitError::ControlEqualsTarget {
                name: label.name,
                qubit: control,
            });
        }
        Self::build(GateKind::Controlled, Some(control), target, unitary, label)
    }

    fn build(
        kind: GateKind,
        control: Option<usize>,
        target: usize,
        unitary: ComplexMatrix,
        label: GateLabel,
    ) -> Result<Self, CircuitError> {
        if unitary.dim() != 2 {
            return Err(CircuitError::NotSingleQubitMatrix(label.name));
        }
        if !unitary.is_unitary(TOLERANCE) {
            return Err(CircuitError::NonUnitary(label.name));
        }
        let mut gate = Gate {
            kind,
            control,
            target,
            unitary,
            label,
            class: GateClass::default(),
        };
        gate.class = compute_class(&gate);
        Ok(gate)
    }

    #[inline]
    pub fn kind(&self) -> GateKind {
        self.kind
    }

    #[inline]
    pub fn is_controlled(&self) -> bool {
        self.kind == GateKind::Controlled
    }

    #[inline]
    pub fn control(&self) -> Option<usize> {
        self.control
    }

    #[inline]
    pub fn target(&self) -> usize {
        self.target
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn label(&self) -> &GateLabel {
        &self.label
    }

    /// Cached classification, computed once at construction.
    #[inline]
    pub fn class(&self) -> GateClass {
        self.class
    }

    /// Qubits acted on, control first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.control.into_iter().chain(std::iter::once(self.target))
    }

    #[inline]
    pub fn acts_on(&self, q: usize) -> bool {
        self.target == q || self.control == Some(q)
    }

    pub fn shares_qubit(&self, other: &Gate) -> bool {
        self.qubits().any(|q| other.acts_on(q))
    }

    /// True when the full gate matrix is diagonal in the computational basis.
    pub fn is_fully_diagonal(&self) -> bool {
        self.class.diagonal
    }

    /// Exchanges control and target of a control-symmetric gate. Returns
    /// `None` for single-qubit gates and for gates whose 4x4 matrix is not
    /// invariant under the exchange.
    pub fn flipped(&self) -> Option<Gate> {
        if !self.is_controlled() || !self.class.control_symmetric {
            return None;
        }
        let mut g = self.clone();
        g.control = Some(self.target);
        g.target = self.control.expect("controlled gate has a control");
        Some(g)
    }

    /// The same operation on relabelled qubits.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        let mut g = self.clone();
        g.control = self.control.map(&map);
        g.target = map(self.target);
        g
    }

    /// 4x4 matrix of a controlled gate with the control as leading factor.
    pub fn controlled_matrix(&self) -> ComplexMatrix {
        controlled_4x4(&self.unitary)
    }

    // Convenience constructors for the standard gates.

    pub fn h(q: usize) -> Gate {
        Self::named_single("h", vec![], q, gates::h())
    }
    pub fn x(q: usize) -> Gate {
        Self::named_single("x", vec![], q, gates::x())
    }
    pub fn y(q: usize) -> Gate {
        Self::named_single("y", vec![], q, gates::y())
    }
    pub fn z(q: usize) -> Gate {
        Self::named_single("z", vec![], q, gates::z())
    }
    pub fn t(q: usize) -> Gate {
        Self::named_single("t", vec![], q, gates::phase(std::f64::consts::FRAC_PI_4))
    }
    pub fn rz(theta: f64, q: usize) -> Gate {
        Self::named_single("rz", vec![theta], q, gates::rz(theta))
    }
    pub fn rx(theta: f64, q: usize) -> Gate {
        Self::named_single("rx", vec![theta], q, gates::rx(theta))
    }
    pub fn ry(theta: f64, q: usize) -> Gate {
        Self::named_single("ry", vec![theta], q, gates::ry(theta))
    }
    pub fn p(lambda: f64, q: usize) -> Gate {
        Self::named_single("p", vec![lambda], q, gates::phase(lambda))
    }
    pub fn u3(theta: f64, phi: f64, lambda: f64, q: usize) -> Gate {
        Self::named_single("u3", vec![theta, phi, lambda], q, gates::u3(theta, phi, lambda))
    }
    pub fn cx(control: usize, target: usize) -> Gate {
        Self::named_controlled("cx", vec![], control, target, gates::x())
    }
    pub fn cy(control: usize, target: usize) -> Gate {
        Self::named_controlled("cy", vec![], control, target, gates::y())
    }
    pub fn cz(control: usize, target: usize) -> Gate {
        Self::named_controlled("cz", vec![], control, target, gates::z())
    }
    pub fn crz(theta: f64, control: usize, target: usize) -> Gate {
        Self::named_controlled("crz", vec![theta], control, target, gates::rz(theta))
    }
    pub fn cry(theta: f64, control: usize, target: usize) -> Gate {
        Self::named_controlled("cry", vec![theta], control, target, gates::ry(theta))
    }
    pub fn cp(lambda: f64, control: usize, target: usize) -> Gate {
        Self::named_controlled("cp", vec![lambda], control, target, gates::phase(lambda))
    }

    fn named_single(name: &str, params: Vec<f64>, q: usize, m: ComplexMatrix) -> Gate {
        Gate::single(GateLabel::new(name, params), q, m).expect("standard gate is unitary")
    }

    fn named_controlled(name: &str, params: Vec<f64>, ctl: usize, tgt: usize, m: ComplexMatrix) -> Gate {
        Gate::controlled(GateLabel::new(name, params), ctl, tgt, m).expect("standard controlled gate is valid")
    }
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.control {
            Some(ctl) => write!(f, "{}({}→{})", self.label, ctl, self.target),
            None => write!(f, "{}({})", self.label, self.target),
        }
    }
}

fn controlled_4x4(u: &ComplexMatrix) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(4);
    for i in 0..2 {
        for j in 0..2 {
            m.set(2 + i, 2 + j, u.get(i, j));
        }
    }
    m
}

fn compute_class(gate: &Gate) -> GateClass {
    let u = &gate.unitary;
    let diagonal = u.get(0, 1).norm() < TOLERANCE && u.get(1, 0).norm() < TOLERANCE;
    let anti_diagonal = u.get(0, 0).norm() < TOLERANCE && u.get(1, 1).norm() < TOLERANCE;
    let control_symmetric = gate.is_controlled() && {
        let cu = controlled_4x4(u);
        let swap = gates::swap();
        swap.matmul(&cu).matmul(&swap).approx_eq(&cu, TOLERANCE)
    };
    GateClass {
        diagonal,
        anti_diagonal,
        control_symmetric,
    }
}

/// Classifies a gate's 2x2 unitary and, for controlled gates, tests
/// invariance of the 4x4 matrix under conjugation by SWAP.
pub fn classify(gate: &Gate) -> Result<GateClass, CircuitError> {
    if !gate.unitary.is_unitary(TOLERANCE) {
        return Err(CircuitError::NonUnitary(gate.label.name.clone()));
    }
    Ok(compute_class(gate))
}

/// Matrix of `gate` on the ordered `support` (first qubit most significant),
/// with identities on support qubits the gate does not touch.
pub fn embed(gate: &Gate, support: &[usize]) -> Result<ComplexMatrix, CircuitError> {
    if support.len() > 3 {
        return Err(CircuitError::SupportTooLarge(support.len()));
    }
    let pos = |q: usize| {
        support
            .iter()
            .position(|&s| s == q)
            .ok_or(CircuitError::SupportMissingQubit(q))
    };
    let m = support.len();
    let target_bit = m - 1 - pos(gate.target)?;
    let control_bit = match gate.control {
        Some(ctl) => Some(m - 1 - pos(ctl)?),
        None => None,
    };
    let dim = 1usize << m;
    let mut out = ComplexMatrix::zeros(dim);
    let u = &gate.unitary;
    for col in 0..dim {
        let active = control_bit.is_none_or(|cb| (col >> cb) & 1 == 1);
        if !active {
            out.set(col, col, c(1.0, 0.0));
            continue;
        }
        let tb = (col >> target_bit) & 1;
        for out_bit in 0..2 {
            let row = (col & !(1 << target_bit)) | (out_bit << target_bit);
            out.set(row, col, u.get(out_bit, tb));
        }
    }
    Ok(out)
}

/// Whether two gates commute: trivially when their supports are disjoint,
/// otherwise by comparing `AB` and `BA` on the union support.
pub fn commutes(a: &Gate, b: &Gate) -> bool {
    if !a.shares_qubit(b) {
        return true;
    }
    if a.is_fully_diagonal() && b.is_fully_diagonal() {
        return true;
    }
    let mut support: Vec<usize> = a.qubits().chain(b.qubits()).collect();
    support.sort_unstable();
    support.dedup();
    let ea = embed(a, &support).expect("union support contains both gates");
    let eb = embed(b, &support).expect("union support contains both gates");
    ea.matmul(&eb).approx_eq(&eb.matmul(&ea), TOLERANCE)
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(num_qubits: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        let mut c = Circuit::new(num_qubits);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), CircuitError> {
        if let Some(q) = gate.qubits().find(|&q| q >= self.num_qubits) {
            return Err(CircuitError::QubitOutOfRange {
                qubit: q,
                num_qubits: self.num_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn num_controlled(&self) -> usize {
        self.gates.iter().filter(|g| g.is_controlled()).count()
    }
}

impl fmt::Debug for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Circuit[{}q] {:?}", self.num_qubits, self.gates)
    }
}

/// Largest register for which [`circuit_unitary`] builds a dense matrix.
pub const MAX_DENSE_QUBITS: usize = 12;

/// Applies one gate to a state vector over `num_qubits` qubits in place.
pub fn apply_gate(amps: &mut [C64], num_qubits: usize, gate: &Gate) {
    debug_assert_eq!(amps.len(), 1 << num_qubits);
    let tmask = 1usize << (num_qubits - 1 - gate.target());
    let cmask = gate.control().map_or(0, |q| 1usize << (num_qubits - 1 - q));
    let u = gate.unitary();
    let (u00, u01, u10, u11) = (u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1));
    for i in 0..amps.len() {
        if i & tmask != 0 || i & cmask != cmask {
            continue;
        }
        let j = i | tmask;
        let (a0, a1) = (amps[i], amps[j]);
        amps[i] = u00 * a0 + u01 * a1;
        amps[j] = u10 * a0 + u11 * a1;
    }
}

/// `U_C = g_m ⋯ g_1` as a dense matrix.
pub fn circuit_unitary(circuit: &Circuit) -> Result<ComplexMatrix, CircuitError> {
    let n = circuit.num_qubits;
    if n > MAX_DENSE_QUBITS {
        return Err(CircuitError::TooLarge {
            num_qubits: n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut out = ComplexMatrix::zeros(dim);
    let mut column = vec![c(0.0, 0.0); dim];
    for col in 0..dim {
        column.iter_mut().for_each(|a| *a = c(0.0, 0.0));
        column[col] = c(1.0, 0.0);
        for g in &circuit.gates {
            apply_gate(&mut column, n, g);
        }
        for (row, &v) in column.iter().enumerate() {
            out.set(row, col, v);
        }
    }
    Ok(out)
}
