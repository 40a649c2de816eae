//! Lexer and recursive-descent parser for OpenQASM 2.0.
//!
//! User-defined `gate` macros are inlined while parsing, so the resulting
//! [`QasmProgram`] only names `U`, `CX` and standard-library gates.

use std::collections::{HashMap, HashSet};

use log::info;

use super::expr::{BinOp, Expr, Func};
use super::{Instruction, Location, QasmError, QasmProgram, Register};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Real(f64),
    Int(u64),
    Str(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    loc: Location,
}

const SYMBOLS: [&str; 14] = ["->", "==", ";", ",", "(", ")", "[", "]", "{", "}", "+", "-", "*", "/"];

fn lex(src: &str) -> Result<Vec<Token>, QasmError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, ch: char| {
        *i += 1;
        if ch == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let ch = chars[i];
        let loc = Location { line, col };
        if ch.is_whitespace() {
            advance(&mut i, &mut line, &mut col, ch);
            continue;
        }
        if ch == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            continue;
        }
        if ch == '/' && chars.get(i + 1) == Some(&'*') {
            advance(&mut i, &mut line, &mut col, '/');
            advance(&mut i, &mut line, &mut col, '*');
            loop {
                if i + 1 >= chars.len() {
                    return Err(QasmError::Syntax {
                        loc,
                        message: "unterminated block comment".into(),
                    });
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    advance(&mut i, &mut line, &mut col, '*');
                    advance(&mut i, &mut line, &mut col, '/');
                    break;
                }
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            toks.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                loc,
            });
            continue;
        }
        if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
            let start = i;
            let mut is_real = false;
            while i < chars.len() {
                let c = chars[i];
                if c.is_ascii_digit() {
                } else if c == '.' {
                    is_real = true;
                } else if (c == 'e' || c == 'E')
                    && chars
                        .get(i + 1)
                        .is_some_and(|n| n.is_ascii_digit() || *n == '-' || *n == '+')
                {
                    is_real = true;
                    advance(&mut i, &mut line, &mut col, c);
                } else {
                    break;
                }
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if is_real {
                Tok::Real(text.parse().map_err(|_| QasmError::Syntax {
                    loc,
                    message: format!("malformed number `{text}`"),
                })?)
            } else {
                Tok::Int(text.parse().map_err(|_| QasmError::Syntax {
                    loc,
                    message: format!("malformed integer `{text}`"),
                })?)
            };
            toks.push(Token { tok, loc });
            continue;
        }
        if ch == '"' {
            advance(&mut i, &mut line, &mut col, ch);
            let start = i;
            while i < chars.len() && chars[i] != '"' {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            if i >= chars.len() {
                return Err(QasmError::Syntax {
                    loc,
                    message: "unterminated string".into(),
                });
            }
            let s: String = chars[start..i].iter().collect();
            advance(&mut i, &mut line, &mut col, '"');
            toks.push(Token { tok: Tok::Str(s), loc });
            continue;
        }
        if ch == '^' {
            advance(&mut i, &mut line, &mut col, ch);
            toks.push(Token { tok: Tok::Sym("^"), loc });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                for c in sym.chars() {
                    advance(&mut i, &mut line, &mut col, c);
                }
                toks.push(Token { tok: Tok::Sym(sym), loc });
            }
            None => {
                return Err(QasmError::Syntax {
                    loc,
                    message: format!("unexpected character `{ch}`"),
                })
            }
        }
    }
    toks.push(Token {
        tok: Tok::Eof,
        loc: Location { line, col },
    });
    Ok(toks)
}

#[derive(Debug, Clone)]
struct BodyOp {
    name: String,
    params: Vec<Expr>,
    args: Vec<String>,
    loc: Location,
}

#[derive(Debug, Clone)]
pub(crate) struct GateDef {
    params: Vec<String>,
    qargs: Vec<String>,
    body: Vec<BodyOp>,
}

/// Gate-call operand: a whole register or one indexed qubit.
#[derive(Debug, Clone)]
enum Operand {
    Register(String, Location),
    Indexed(String, u64, Location),
}

/// Names treated as primitives by the parser: OpenQASM built-ins plus the
/// standard library. Their decomposition, if any, happens at lowering.
fn is_builtin(name: &str, stdlib: &HashMap<String, GateDef>) -> bool {
    name == "U" || name == "CX" || stdlib.contains_key(name)
}

pub(crate) fn stdlib_defs() -> &'static HashMap<String, GateDef> {
    use std::sync::OnceLock;
    static DEFS: OnceLock<HashMap<String, GateDef>> = OnceLock::new();
    DEFS.get_or_init(|| {
        let toks = lex(super::qelib1::QELIB1_INC).expect("qelib1 lexes");
        let mut p = Parser::new(toks);
        let mut defs = HashMap::new();
        while !p.at_eof() {
            let (name, def) = p.gate_definition().expect("qelib1 parses");
            defs.insert(name, def);
        }
        defs
    })
}

/// Expands a standard-library gate one level into its qelib1 body.
pub(crate) fn expand_stdlib(name: &str, params: &[f64], qubits: &[usize]) -> Option<Vec<(String, Vec<f64>, Vec<usize>)>> {
    let def = stdlib_defs().get(name)?;
    if def.params.len() != params.len() || def.qargs.len() != qubits.len() {
        return None;
    }
    let env: HashMap<String, f64> = def.params.iter().cloned().zip(params.iter().copied()).collect();
    let qmap: HashMap<&str, usize> = def.qargs.iter().map(String::as_str).zip(qubits.iter().copied()).collect();
    let mut out = Vec::new();
    for op in &def.body {
        if op.name == "barrier" {
            continue;
        }
        let ps = op.params.iter().map(|e| e.eval(&env).expect("qelib1 params bound")).collect();
        let qs = op.args.iter().map(|a| qmap[a.as_str()]).collect();
        out.push((op.name.clone(), ps, qs));
    }
    Some(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn loc(&self) -> Location {
        self.toks[self.pos].loc
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, QasmError> {
        Err(QasmError::Syntax {
            loc: self.loc(),
            message: message.into(),
        })
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Real(v) => format!("`{v}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_sym(&mut self, sym: &'static str) -> Result<(), QasmError> {
        if self.peek() == &Tok::Sym(sym) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected `{sym}`, found {}", Self::describe(self.peek())))
        }
    }

    fn eat_sym(&mut self, sym: &'static str) -> bool {
        if self.peek() == &Tok::Sym(sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, Location), QasmError> {
        let loc = self.loc();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, loc))
            }
            other => self.err(format!("expected identifier, found {}", Self::describe(&other))),
        }
    }

    fn int(&mut self) -> Result<u64, QasmError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(v)
            }
            other => self.err(format!("expected integer, found {}", Self::describe(&other))),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<Expr, QasmError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("+") => BinOp::Add,
                Tok::Sym("-") => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, QasmError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Sym("*") => BinOp::Mul,
                Tok::Sym("/") => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, QasmError> {
        if self.eat_sym("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat_sym("+") {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat_sym("^") {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, QasmError> {
        match self.peek().clone() {
            Tok::Real(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Num(v as f64))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if name == "pi" {
                    return Ok(Expr::Pi);
                }
                if let Some(f) = Func::from_name(&name) {
                    self.expect_sym("(")?;
                    let e = self.expr()?;
                    self.expect_sym(")")?;
                    return Ok(Expr::Call(f, Box::new(e)));
                }
                Ok(Expr::Param(name))
            }
            other => self.err(format!("expected expression, found {}", Self::describe(&other))),
        }
    }

    fn expr_list(&mut self) -> Result<Vec<Expr>, QasmError> {
        let mut out = Vec::new();
        if self.eat_sym("(") {
            if !self.eat_sym(")") {
                loop {
                    out.push(self.expr()?);
                    if self.eat_sym(")") {
                        break;
                    }
                    self.expect_sym(",")?;
                }
            }
        }
        Ok(out)
    }

    fn ident_list(&mut self) -> Result<Vec<String>, QasmError> {
        let mut out = vec![self.ident()?.0];
        while self.eat_sym(",") {
            out.push(self.ident()?.0);
        }
        Ok(out)
    }

    /// `gate name(params) qargs { body }`, with the `gate` keyword already peeked.
    fn gate_definition(&mut self) -> Result<(String, GateDef), QasmError> {
        let (kw, _) = self.ident()?;
        if kw != "gate" {
            return self.err(format!("expected `gate`, found `{kw}`"));
        }
        let (name, _) = self.ident()?;
        let mut params = Vec::new();
        if self.eat_sym("(") && !self.eat_sym(")") {
            params = self.ident_list()?;
            self.expect_sym(")")?;
        }
        let qargs = self.ident_list()?;
        self.expect_sym("{")?;
        let mut body = Vec::new();
        while !self.eat_sym("}") {
            if self.at_eof() {
                return self.err("unterminated gate body");
            }
            let (op, loc) = self.ident()?;
            let ps = if op == "barrier" { Vec::new() } else { self.expr_list()? };
            let args = self.ident_list()?;
            self.expect_sym(";")?;
            for a in &args {
                if !qargs.contains(a) {
                    return Err(QasmError::Syntax {
                        loc,
                        message: format!("`{a}` is not an argument of gate `{name}`"),
                    });
                }
            }
            body.push(BodyOp {
                name: op,
                params: ps,
                args,
                loc,
            });
        }
        Ok((name, GateDef { params, qargs, body }))
    }

    fn operand(&mut self) -> Result<Operand, QasmError> {
        let (name, loc) = self.ident()?;
        if self.eat_sym("[") {
            let idx = self.int()?;
            self.expect_sym("]")?;
            Ok(Operand::Indexed(name, idx, loc))
        } else {
            Ok(Operand::Register(name, loc))
        }
    }

    fn operand_list(&mut self) -> Result<Vec<Operand>, QasmError> {
        let mut out = vec![self.operand()?];
        while self.eat_sym(",") {
            out.push(self.operand()?);
        }
        Ok(out)
    }
}

struct Elaborator {
    program: QasmProgram,
    user_gates: HashMap<String, GateDef>,
    opaque: HashSet<String>,
    measured: HashSet<usize>,
}

impl Elaborator {
    fn qreg(&self, name: &str, loc: Location) -> Result<&Register, QasmError> {
        self.program
            .qregs
            .iter()
            .find(|r| r.name == name)
            .ok_or_else(|| QasmError::UndeclaredRegister { name: name.into(), loc })
    }

    fn resolve(&self, op: &Operand) -> Result<Vec<usize>, QasmError> {
        match op {
            Operand::Register(name, loc) => {
                let r = self.qreg(name, *loc)?;
                Ok((r.offset..r.offset + r.size).collect())
            }
            Operand::Indexed(name, idx, loc) => {
                let r = self.qreg(name, *loc)?;
                if *idx as usize >= r.size {
                    return Err(QasmError::IndexOutOfRange {
                        name: name.clone(),
                        index: *idx as usize,
                        size: r.size,
                        loc: *loc,
                    });
                }
                Ok(vec![r.offset + *idx as usize])
            }
        }
    }

    fn check_creg(&self, op: &Operand) -> Result<(), QasmError> {
        let (name, idx, loc) = match op {
            Operand::Register(n, l) => (n, None, *l),
            Operand::Indexed(n, i, l) => (n, Some(*i as usize), *l),
        };
        let r = self
            .program
            .cregs
            .iter()
            .find(|r| &r.name == name)
            .ok_or_else(|| QasmError::UndeclaredRegister { name: name.clone(), loc })?;
        if let Some(i) = idx {
            if i >= r.size {
                return Err(QasmError::IndexOutOfRange {
                    name: name.clone(),
                    index: i,
                    size: r.size,
                    loc,
                });
            }
        }
        Ok(())
    }

    /// Register broadcasting: every whole-register operand must have the same size.
    fn broadcast(&self, operands: &[Operand], loc: Location) -> Result<Vec<Vec<usize>>, QasmError> {
        let resolved: Vec<Vec<usize>> = operands.iter().map(|o| self.resolve(o)).collect::<Result<_, _>>()?;
        let width = resolved.iter().filter(|r| r.len() > 1).map(Vec::len).max().unwrap_or(1);
        if resolved.iter().any(|r| r.len() != 1 && r.len() != width) {
            return Err(QasmError::Syntax {
                loc,
                message: "register operands of different sizes".into(),
            });
        }
        Ok((0..width)
            .map(|i| resolved.iter().map(|r| if r.len() == 1 { r[0] } else { r[i] }).collect())
            .collect())
    }

    fn apply(&mut self, name: &str, params: Vec<f64>, qubits: Vec<usize>, loc: Location, depth: usize) -> Result<(), QasmError> {
        if depth > 64 {
            return Err(QasmError::Syntax {
                loc,
                message: format!("gate `{name}` expands recursively"),
            });
        }
        let mut seen = HashSet::new();
        if !qubits.iter().all(|q| seen.insert(*q)) {
            return Err(QasmError::Syntax {
                loc,
                message: format!("gate `{name}` applied to repeated qubits"),
            });
        }
        if let Some(q) = qubits.iter().find(|q| self.measured.contains(q)) {
            return Err(QasmError::Unsupported {
                feature: format!("gate `{name}` on qubit {q} after measurement"),
                loc,
            });
        }
        if let Some(def) = self.user_gates.get(name).cloned() {
            if def.params.len() != params.len() || def.qargs.len() != qubits.len() {
                return Err(QasmError::Arity {
                    name: name.into(),
                    expected: (def.params.len(), def.qargs.len()),
                    found: (params.len(), qubits.len()),
                    loc,
                });
            }
            let env: HashMap<String, f64> = def.params.iter().cloned().zip(params).collect();
            let qmap: HashMap<String, usize> = def.qargs.iter().cloned().zip(qubits).collect();
            for op in &def.body {
                if op.name == "barrier" {
                    continue;
                }
                let ps = op
                    .params
                    .iter()
                    .map(|e| {
                        e.eval(&env).map_err(|p| QasmError::Syntax {
                            loc: op.loc,
                            message: format!("unbound parameter `{p}`"),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let qs = op.args.iter().map(|a| qmap[a]).collect();
                self.apply(&op.name, ps, qs, op.loc, depth + 1)?;
            }
            return Ok(());
        }
        if self.opaque.contains(name) {
            return Err(QasmError::Unsupported {
                feature: format!("opaque gate `{name}`"),
                loc,
            });
        }
        let stdlib = stdlib_defs();
        if is_builtin(name, stdlib) {
            let (np, nq) = match name {
                "U" => (3, 1),
                "CX" => (0, 2),
                _ => {
                    let d = &stdlib[name];
                    (d.params.len(), d.qargs.len())
                }
            };
            if np != params.len() || nq != qubits.len() {
                return Err(QasmError::Arity {
                    name: name.into(),
                    expected: (np, nq),
                    found: (params.len(), qubits.len()),
                    loc,
                });
            }
        } else {
            // Left for lowering, which decides between strict failure and skipping.
            self.program
                .warnings
                .push(format!("{}:{}: unknown gate `{name}`", loc.line, loc.col));
        }
        self.program.instructions.push(Instruction {
            name: name.into(),
            params,
            qubits,
            loc,
        });
        Ok(())
    }
}

pub fn parse(source: &str) -> Result<QasmProgram, QasmError> {
    let toks = lex(source)?;
    let stdlib = stdlib_defs();
    let mut p = Parser::new(toks);
    let mut el = Elaborator {
        program: QasmProgram::default(),
        user_gates: HashMap::new(),
        opaque: HashSet::new(),
        measured: HashSet::new(),
    };

    // Header.
    match p.peek().clone() {
        Tok::Ident(s) if s == "OPENQASM" => {
            p.bump();
            let loc = p.loc();
            let version = match p.bump().tok {
                Tok::Real(v) => format!("{v:.1}"),
                Tok::Int(v) => format!("{v}.0"),
                other => {
                    return Err(QasmError::Syntax {
                        loc,
                        message: format!("expected version, found {}", Parser::describe(&other)),
                    })
                }
            };
            if !version.starts_with("2.") {
                return Err(QasmError::Unsupported {
                    feature: format!("OpenQASM version {version}"),
                    loc,
                });
            }
            el.program.version = version;
            p.expect_sym(";")?;
        }
        _ => return p.err("expected `OPENQASM 2.0;` header"),
    }

    while !p.at_eof() {
        let loc = p.loc();
        let (kw, _) = match p.peek().clone() {
            Tok::Ident(s) => (s, loc),
            other => return p.err(format!("expected statement, found {}", Parser::describe(&other))),
        };
        match kw.as_str() {
            "include" => {
                p.bump();
                let file = match p.bump().tok {
                    Tok::Str(s) => s,
                    _ => {
                        return Err(QasmError::Syntax {
                            loc,
                            message: "expected file name after `include`".into(),
                        })
                    }
                };
                p.expect_sym(";")?;
                if file != "qelib1.inc" {
                    return Err(QasmError::Unsupported {
                        feature: format!("include of `{file}`"),
                        loc,
                    });
                }
            }
            "qreg" | "creg" => {
                p.bump();
                let (name, _) = p.ident()?;
                p.expect_sym("[")?;
                let size = p.int()? as usize;
                p.expect_sym("]")?;
                p.expect_sym(";")?;
                let taken = el.program.qregs.iter().chain(&el.program.cregs).any(|r| r.name == name);
                if taken {
                    return Err(QasmError::Syntax {
                        loc,
                        message: format!("register `{name}` declared twice"),
                    });
                }
                if kw == "qreg" {
                    let offset = el.program.num_qubits;
                    el.program.num_qubits += size;
                    el.program.qregs.push(Register { name, size, offset });
                } else {
                    let offset = el.program.cregs.iter().map(|r| r.size).sum();
                    el.program.cregs.push(Register { name, size, offset });
                }
            }
            "gate" => {
                let (name, def) = p.gate_definition()?;
                for op in &def.body {
                    let known = op.name == "barrier"
                        || op.name == "U"
                        || op.name == "CX"
                        || el.user_gates.contains_key(&op.name)
                        || stdlib.contains_key(&op.name);
                    if !known {
                        return Err(QasmError::UnknownGate {
                            name: op.name.clone(),
                            loc: op.loc,
                        });
                    }
                }
                el.user_gates.insert(name, def);
            }
            "opaque" => {
                p.bump();
                let (name, _) = p.ident()?;
                if p.eat_sym("(") && !p.eat_sym(")") {
                    p.ident_list()?;
                    p.expect_sym(")")?;
                }
                p.ident_list()?;
                p.expect_sym(";")?;
                el.opaque.insert(name);
            }
            "barrier" => {
                p.bump();
                let ops = p.operand_list()?;
                p.expect_sym(";")?;
                for o in &ops {
                    el.resolve(o)?;
                }
            }
            "measure" => {
                p.bump();
                let q = p.operand()?;
                p.expect_sym("->")?;
                let cbit = p.operand()?;
                p.expect_sym(";")?;
                el.check_creg(&cbit)?;
                let qs = el.resolve(&q)?;
                el.measured.extend(qs);
                el.program.discarded_measurements += 1;
            }
            "reset" => {
                return Err(QasmError::Unsupported {
                    feature: "reset".into(),
                    loc,
                });
            }
            "if" => {
                return Err(QasmError::Unsupported {
                    feature: "classically conditioned operation".into(),
                    loc,
                });
            }
            _ => {
                p.bump();
                let exprs = p.expr_list()?;
                let empty = HashMap::new();
                let params = exprs
                    .iter()
                    .map(|e| {
                        e.eval(&empty).map_err(|name| QasmError::Syntax {
                            loc,
                            message: format!("unbound parameter `{name}`"),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let ops = p.operand_list()?;
                p.expect_sym(";")?;
                for qubits in el.broadcast(&ops, loc)? {
                    el.apply(&kw, params.clone(), qubits, loc, 0)?;
                }
            }
        }
    }
    if el.program.discarded_measurements > 0 {
        info!(
            "discarded {} measurement statement(s); only unitary gates are compiled",
            el.program.discarded_measurements
        );
    }
    Ok(el.program)
}

/// Expands a gate through the standard-library bodies down to `U` and `CX`.
/// Returns `None` for names that are neither primitives nor library gates.
pub fn expand_to_primitives(name: &str, params: &[f64], qubits: &[usize]) -> Option<Vec<(String, Vec<f64>, Vec<usize>)>> {
    if name == "U" || name == "CX" {
        return Some(vec![(name.to_string(), params.to_vec(), qubits.to_vec())]);
    }
    let mut out = Vec::new();
    for (n, ps, qs) in expand_stdlib(name, params, qubits)? {
        out.extend(expand_to_primitives(&n, &ps, &qs)?);
    }
    Some(out)
}
