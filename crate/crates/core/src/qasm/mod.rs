//! OpenQASM 2.0 frontend: parsing, lowering to the controlled-gate gateset,
//! and writing circuits back out.

mod expr;
mod lower;
mod parser;
pub mod qelib1;
mod writer;

use std::fmt;

use thiserror::Error;

use crate::circuit::CircuitError;

pub use lower::{lower, FrontendConfig};
pub use parser::{expand_to_primitives, parse};
pub use writer::{format_op, gate_statement, qasm_op, to_qasm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Location {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub size: usize,
    /// Index of the register's first bit in the flattened numbering.
    pub offset: usize,
}

/// A gate application on flattened qubit indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub name: String,
    pub params: Vec<f64>,
    pub qubits: Vec<usize>,
    pub loc: Location,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QasmProgram {
    pub version: String,
    pub qregs: Vec<Register>,
    pub cregs: Vec<Register>,
    pub num_qubits: usize,
    pub instructions: Vec<Instruction>,
    pub discarded_measurements: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QasmError {
    #[error("syntax error at {loc}: {message}")]
    Syntax { loc: Location, message: String },
    #[error("undeclared register `{name}` at {loc}")]
    UndeclaredRegister { name: String, loc: Location },
    #[error("index {index} out of range for register `{name}` of size {size} at {loc}")]
    IndexOutOfRange {
        name: String,
        index: usize,
        size: usize,
        loc: Location,
    },
    #[error("unsupported feature at {loc}: {feature}")]
    Unsupported { feature: String, loc: Location },
    #[error("gate `{name}` at {loc} expects {} parameter(s) and {} qubit(s), got {} and {}", expected.0, expected.1, found.0, found.1)]
    Arity {
        name: String,
        expected: (usize, usize),
        found: (usize, usize),
        loc: Location,
    },
    #[error("unknown gate `{name}` at {loc}")]
    UnknownGate { name: String, loc: Location },
    #[error("invalid gate at {loc}: {source}")]
    Circuit { source: CircuitError, loc: Location },
}

impl QasmError {
    pub fn location(&self) -> Location {
        match self {
            QasmError::Syntax { loc, .. }
            | QasmError::UndeclaredRegister { loc, .. }
            | QasmError::IndexOutOfRange { loc, .. }
            | QasmError::Unsupported { loc, .. }
            | QasmError::Arity { loc, .. }
            | QasmError::UnknownGate { loc, .. }
            | QasmError::Circuit { loc, .. } => *loc,
        }
    }
}

/// Parses and lowers in one step.
pub fn load(source: &str, cfg: &FrontendConfig) -> Result<crate::circuit::Circuit, QasmError> {
    lower(&parse(source)?, cfg)
}
