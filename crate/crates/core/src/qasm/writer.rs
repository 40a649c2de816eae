use std::fmt::Write;

use super::lower::{native, Native};
use crate::circuit::{Circuit, Gate};
use crate::matrix::gates::u3_params;

fn params(ps: &[f64]) -> String {
    if ps.is_empty() {
        return String::new();
    }
    let items: Vec<String> = ps.iter().map(|p| format!("{p}")).collect();
    format!("({})", items.join(","))
}

/// QASM gate name and parameters for `gate`.
///
/// Gates whose label names a library gate with a matching matrix keep that
/// name; anything else is written as `u3` (global phase dropped) or as the
/// four-parameter `cu`.
pub fn qasm_op(gate: &Gate) -> (String, Vec<f64>) {
    let label = gate.label();
    let matches_label = match native(&label.name, &label.params) {
        Some(Native::Single(m)) => !gate.is_controlled() && m.approx_eq(gate.unitary(), 1e-12),
        Some(Native::Controlled(m)) => gate.is_controlled() && m.approx_eq(gate.unitary(), 1e-12),
        _ => false,
    };
    if matches_label {
        return (label.name.clone(), label.params.clone());
    }
    let (theta, phi, lambda, gamma) = u3_params(gate.unitary());
    if gate.is_controlled() {
        ("cu".to_string(), vec![theta, phi, lambda, gamma])
    } else {
        ("u3".to_string(), vec![theta, phi, lambda])
    }
}

/// `name(params)` with an empty parameter list omitted.
pub fn format_op(name: &str, ps: &[f64]) -> String {
    format!("{name}{}", params(ps))
}

/// Statement for one gate on register `reg`, without the trailing newline.
pub fn gate_statement(gate: &Gate, reg: &str) -> String {
    let (name, ps) = qasm_op(gate);
    match gate.control() {
        Some(ctl) => format!("{name}{} {reg}[{ctl}],{reg}[{}];", params(&ps), gate.target()),
        None => format!("{name}{} {reg}[{}];", params(&ps), gate.target()),
    }
}

/// Writes a circuit as an OpenQASM 2.0 program over a single register `q`.
pub fn to_qasm(circuit: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{}];", circuit.num_qubits()).unwrap();
    for g in circuit.gates() {
        out.push_str(&gate_statement(g, "q"));
        out.push('\n');
    }
    out
}
