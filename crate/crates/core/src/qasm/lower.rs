use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use super::parser::expand_stdlib;
use super::{Instruction, Location, QasmError, QasmProgram};
use crate::circuit::{Circuit, Gate, GateLabel};
use crate::matrix::{c, gates, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontendConfig {
    /// Phase and controlled rotations with smaller magnitude are dropped.
    pub truncate_angle: f64,
    /// Unknown gate names are errors when set; otherwise they are skipped with a warning.
    pub strict: bool,
}

impl Default for FrontendConfig {
    fn default() -> Self {
        FrontendConfig {
            truncate_angle: 1e-10,
            strict: true,
        }
    }
}

pub(super) enum Native {
    Single(ComplexMatrix),
    Controlled(ComplexMatrix),
    Identity,
}

pub(super) fn native(name: &str, p: &[f64]) -> Option<Native> {
    use Native::*;
    let arg = |i: usize| p.get(i).copied().unwrap_or(0.0);
    Some(match (name, p.len()) {
        ("U" | "u3" | "u", 3) => Single(gates::u3(arg(0), arg(1), arg(2))),
        ("u2", 2) => Single(gates::u3(PI / 2.0, arg(0), arg(1))),
        ("u1" | "p", 1) => Single(gates::phase(arg(0))),
        ("id", 0) | ("u0", 1) => Identity,
        ("x", 0) => Single(gates::x()),
        ("y", 0) => Single(gates::y()),
        ("z", 0) => Single(gates::z()),
        ("h", 0) => Single(gates::h()),
        ("s", 0) => Single(gates::phase(PI / 2.0)),
        ("sdg", 0) => Single(gates::phase(-PI / 2.0)),
        ("t", 0) => Single(gates::phase(PI / 4.0)),
        ("tdg", 0) => Single(gates::phase(-PI / 4.0)),
        ("rx", 1) => Single(gates::rx(arg(0))),
        ("ry", 1) => Single(gates::ry(arg(0))),
        ("rz", 1) => Single(gates::rz(arg(0))),
        ("sx", 0) => Single(gates::sx()),
        ("sxdg", 0) => Single(gates::sx().adjoint()),
        ("CX" | "cx", 0) => Controlled(gates::x()),
        ("cy", 0) => Controlled(gates::y()),
        ("cz", 0) => Controlled(gates::z()),
        ("ch", 0) => Controlled(gates::h()),
        ("crx", 1) => Controlled(gates::rx(arg(0))),
        ("cry", 1) => Controlled(gates::ry(arg(0))),
        ("crz", 1) => Controlled(gates::rz(arg(0))),
        ("cu1" | "cp", 1) => Controlled(gates::phase(arg(0))),
        ("cu3", 3) => Controlled(gates::u3(arg(0), arg(1), arg(2))),
        ("csx", 0) => Controlled(gates::sx()),
        ("cu", 4) => {
            let (re, im) = (arg(3).cos(), arg(3).sin());
            Controlled(gates::u3(arg(0), arg(1), arg(2)).scale(c(re, im)))
        }
        _ => return None,
    })
}

fn truncated(name: &str, params: &[f64], cfg: &FrontendConfig) -> bool {
    matches!(name, "rz" | "p" | "u1" | "crz" | "cp" | "cu1" | "crx" | "cry")
        && params.first().is_some_and(|a| a.abs() < cfg.truncate_angle)
}

fn lower_one(
    name: &str,
    params: &[f64],
    qubits: &[usize],
    loc: Location,
    cfg: &FrontendConfig,
    out: &mut Vec<Gate>,
) -> Result<(), QasmError> {
    if truncated(name, params, cfg) {
        return Ok(());
    }
    let label_name = match name {
        "U" => "u3",
        "CX" => "cx",
        other => other,
    };
    let label = GateLabel::new(label_name, params.to_vec());
    let wrap = |source| QasmError::Circuit { source, loc };
    let arity = |expected: usize| QasmError::Arity {
        name: name.into(),
        expected: (params.len(), expected),
        found: (params.len(), qubits.len()),
        loc,
    };
    match native(name, params) {
        Some(Native::Identity) => Ok(()),
        Some(Native::Single(m)) => {
            let [q] = qubits else { return Err(arity(1)) };
            out.push(Gate::single(label, *q, m).map_err(wrap)?);
            Ok(())
        }
        Some(Native::Controlled(m)) => {
            let [ctl, tgt] = qubits else { return Err(arity(2)) };
            out.push(Gate::controlled(label, *ctl, *tgt, m).map_err(wrap)?);
            Ok(())
        }
        None => match expand_stdlib(name, params, qubits) {
            Some(body) => {
                for (n, ps, qs) in body {
                    lower_one(&n, &ps, &qs, loc, cfg, out)?;
                }
                Ok(())
            }
            None if cfg.strict => Err(QasmError::UnknownGate { name: name.into(), loc }),
            None => {
                warn!("skipping unknown gate `{name}` at {loc}");
                Ok(())
            }
        },
    }
}

/// Rewrites every instruction into single-qubit and controlled gates.
///
/// Multi-qubit library gates without a controlled form (swap, ccx, cswap,
/// rzz, ...) expand through their standard-library bodies; truncation is
/// applied to every gate produced, including those from expansions.
pub fn lower(program: &QasmProgram, cfg: &FrontendConfig) -> Result<Circuit, QasmError> {
    let mut gates = Vec::new();
    for Instruction { name, params, qubits, loc } in &program.instructions {
        lower_one(name, params, qubits, *loc, cfg, &mut gates)?;
    }
    Circuit::from_gates(program.num_qubits, gates).map_err(|source| QasmError::Circuit {
        source,
        loc: Location::default(),
    })
}
