//! OpenQASM 2.0 subset: the gate vocabulary of [`qvf_core::circuit`] plus
//! register broadcasting.
//!
//! Parsing runs in two passes. The first builds a [`QasmDocument`] (register
//! table plus positioned statements), checking that registers are declared
//! before use; the second flattens registers in declaration order and builds
//! the [`Circuit`].

use std::fmt::{self, Write as _};

use qvf_core::circuit::{Circuit, GateKind, GateOp};

use crate::records::format_significant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QasmErrorKind {
    Lexical,
    Syntax,
    UndeclaredRegister,
    Redeclaration,
    ArityMismatch,
    UnsupportedGate,
    UnsupportedConstruct,
    IndexOutOfRange,
    DuplicateOperand,
    InvalidExpression,
    /// Well-formed text describing a circuit the toolkit rejects, e.g. a gate
    /// after a measurement of the same qubit.
    InvalidCircuit,
}

impl fmt::Display for QasmErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QasmErrorKind::Lexical => "lexical error",
            QasmErrorKind::Syntax => "syntax error",
            QasmErrorKind::UndeclaredRegister => "undeclared register",
            QasmErrorKind::Redeclaration => "register redeclared",
            QasmErrorKind::ArityMismatch => "arity mismatch",
            QasmErrorKind::UnsupportedGate => "unsupported gate",
            QasmErrorKind::UnsupportedConstruct => "unsupported construct",
            QasmErrorKind::IndexOutOfRange => "index out of range",
            QasmErrorKind::DuplicateOperand => "duplicate operand",
            QasmErrorKind::InvalidExpression => "invalid expression",
            QasmErrorKind::InvalidCircuit => "invalid circuit",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct QasmError {
    pub kind: QasmErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    fn error(self, kind: QasmErrorKind, message: impl Into<String>) -> QasmError {
        QasmError { kind, line: self.line, column: self.column, message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Real(f64),
    Str(String),
    Arrow,
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Real(x) => write!(f, "`{x}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Position)>, QasmError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Position { line, column: col };
        let start = i;
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            return Err(pos.error(QasmErrorKind::UnsupportedConstruct, "block comments are not supported"));
        }
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let mut real = false;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                real = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                real = true;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                let digits = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if digits == i {
                    return Err(pos.error(QasmErrorKind::Lexical, "exponent without digits"));
                }
            }
            let s: String = chars[start..i].iter().collect();
            if real {
                Tok::Real(s.parse().map_err(|_| pos.error(QasmErrorKind::Lexical, format!("bad number `{s}`")))?)
            } else {
                Tok::Int(s.parse().map_err(|_| pos.error(QasmErrorKind::Lexical, format!("integer `{s}` too large")))?)
            }
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if chars.get(i) != Some(&'"') {
                return Err(pos.error(QasmErrorKind::Lexical, "unterminated string"));
            }
            i += 1;
            Tok::Str(chars[start + 1..i - 1].iter().collect())
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            Tok::Arrow
        } else if ";,()[]{}+-*/^=<>".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(pos.error(QasmErrorKind::Lexical, format!("unexpected character {c:?}")));
        };
        col += i - start;
        out.push((tok, pos));
    }
    Ok(out)
}

/// A reference to one qubit/bit or a whole register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Argument {
    pub register: String,
    pub index: Option<usize>,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StatementKind {
    Gate { name: String, params: Vec<f64>, args: Vec<Argument> },
    Measure { qubit: Argument, clbit: Argument },
    Barrier { args: Vec<Argument> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub size: usize,
}

/// Parsed program before register flattening.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QasmDocument {
    pub version: String,
    pub qregs: Vec<Register>,
    pub cregs: Vec<Register>,
    pub statements: Vec<Statement>,
}

/// (parameter count, qubit count) of supported gates.
fn gate_signature(name: &str) -> Option<(usize, usize)> {
    Some(match name {
        "h" | "x" | "y" | "z" | "s" | "t" | "sx" => (0, 1),
        "rz" => (1, 1),
        "u" | "u3" | "U" => (3, 1),
        "cx" | "CX" | "swap" => (0, 2),
        _ => return None,
    })
}

struct Parser {
    toks: Vec<(Tok, Position)>,
    at: usize,
    end: Position,
    doc: QasmDocument,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Position {
        self.toks.get(self.at).map_or(self.end, |(_, p)| *p)
    }

    fn next(&mut self) -> Result<(Tok, Position), QasmError> {
        let item = self.toks.get(self.at).cloned().ok_or_else(|| self.end.error(QasmErrorKind::Syntax, "unexpected end of input"))?;
        self.at += 1;
        Ok(item)
    }

    fn expect_sym(&mut self, c: char) -> Result<Position, QasmError> {
        match self.next()? {
            (Tok::Sym(s), p) if s == c => Ok(p),
            (t, p) => Err(p.error(QasmErrorKind::Syntax, format!("expected `{c}`, found {t}"))),
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, Position), QasmError> {
        match self.next()? {
            (Tok::Ident(s), p) => Ok((s, p)),
            (t, p) => Err(p.error(QasmErrorKind::Syntax, format!("expected identifier, found {t}"))),
        }
    }

    fn int(&mut self) -> Result<(u64, Position), QasmError> {
        match self.next()? {
            (Tok::Int(n), p) => Ok((n, p)),
            (t, p) => Err(p.error(QasmErrorKind::Syntax, format!("expected integer, found {t}"))),
        }
    }

    fn header(&mut self) -> Result<(), QasmError> {
        let pos = self.pos();
        match self.next()? {
            (Tok::Ident(s), _) if s == "OPENQASM" => {}
            _ => return Err(pos.error(QasmErrorKind::Syntax, "program must start with `OPENQASM 2.0;`")),
        }
        let (tok, vpos) = self.next()?;
        let version = match tok {
            Tok::Real(v) => v,
            Tok::Int(v) => v as f64,
            t => return Err(vpos.error(QasmErrorKind::Syntax, format!("expected version number, found {t}"))),
        };
        if version != 2.0 {
            return Err(vpos.error(QasmErrorKind::UnsupportedConstruct, format!("OpenQASM version {version} is not supported")));
        }
        self.doc.version = "2.0".into();
        self.expect_sym(';')?;
        Ok(())
    }

    fn program(mut self) -> Result<QasmDocument, QasmError> {
        self.header()?;
        while self.peek().is_some() {
            self.statement()?;
        }
        Ok(self.doc)
    }

    fn declared(&self, name: &str) -> bool {
        self.doc.qregs.iter().chain(&self.doc.cregs).any(|r| r.name == name)
    }

    fn statement(&mut self) -> Result<(), QasmError> {
        let (word, pos) = self.ident()?;
        match word.as_str() {
            "include" => {
                let file = match self.next()? {
                    (Tok::Str(s), _) => s,
                    (t, p) => return Err(p.error(QasmErrorKind::Syntax, format!("expected file name, found {t}"))),
                };
                if file != "qelib1.inc" {
                    return Err(pos.error(QasmErrorKind::UnsupportedConstruct, format!("include of {file:?}")));
                }
                self.expect_sym(';')?;
            }
            "qreg" | "creg" => {
                let (name, npos) = self.ident()?;
                self.expect_sym('[')?;
                let (size, spos) = self.int()?;
                self.expect_sym(']')?;
                self.expect_sym(';')?;
                if self.declared(&name) {
                    return Err(npos.error(QasmErrorKind::Redeclaration, format!("register `{name}` already declared")));
                }
                if size == 0 {
                    return Err(spos.error(QasmErrorKind::IndexOutOfRange, "register size must be positive"));
                }
                let reg = Register { name, size: size as usize };
                if word == "qreg" {
                    self.doc.qregs.push(reg);
                } else {
                    self.doc.cregs.push(reg);
                }
            }
            "gate" | "opaque" | "if" | "reset" | "OPENQASM" => {
                return Err(pos.error(QasmErrorKind::UnsupportedConstruct, format!("`{word}` is not supported")));
            }
            "measure" => {
                let qubit = self.argument(true)?;
                match self.next()? {
                    (Tok::Arrow, _) => {}
                    (t, p) => return Err(p.error(QasmErrorKind::Syntax, format!("expected `->`, found {t}"))),
                }
                let clbit = self.argument(false)?;
                self.expect_sym(';')?;
                self.doc.statements.push(Statement { kind: StatementKind::Measure { qubit, clbit }, position: pos });
            }
            "barrier" => {
                let args = self.arguments()?;
                self.doc.statements.push(Statement { kind: StatementKind::Barrier { args }, position: pos });
            }
            _ => {
                let Some((n_params, n_qubits)) = gate_signature(&word) else {
                    return Err(pos.error(QasmErrorKind::UnsupportedGate, format!("gate `{word}` is not supported")));
                };
                let mut params = Vec::new();
                if self.eat_sym('(') && !self.eat_sym(')') {
                    loop {
                        params.push(self.expression()?);
                        if self.eat_sym(')') {
                            break;
                        }
                        self.expect_sym(',')?;
                    }
                }
                if params.len() != n_params {
                    return Err(pos.error(
                        QasmErrorKind::ArityMismatch,
                        format!("`{word}` takes {n_params} parameter(s), got {}", params.len()),
                    ));
                }
                let args = self.arguments()?;
                if args.len() != n_qubits {
                    return Err(pos.error(
                        QasmErrorKind::ArityMismatch,
                        format!("`{word}` acts on {n_qubits} qubit(s), got {}", args.len()),
                    ));
                }
                self.doc.statements.push(Statement { kind: StatementKind::Gate { name: word, params, args }, position: pos });
            }
        }
        Ok(())
    }

    fn arguments(&mut self) -> Result<Vec<Argument>, QasmError> {
        let mut args = vec![self.argument(true)?];
        while self.eat_sym(',') {
            args.push(self.argument(true)?);
        }
        self.expect_sym(';')?;
        Ok(args)
    }

    fn argument(&mut self, quantum: bool) -> Result<Argument, QasmError> {
        let (register, position) = self.ident()?;
        let regs = if quantum { &self.doc.qregs } else { &self.doc.cregs };
        let Some(size) = regs.iter().find(|r| r.name == register).map(|r| r.size) else {
            let what = if quantum { "quantum" } else { "classical" };
            return Err(position.error(QasmErrorKind::UndeclaredRegister, format!("no {what} register `{register}`")));
        };
        let index = if self.eat_sym('[') {
            let (i, ipos) = self.int()?;
            self.expect_sym(']')?;
            if i as usize >= size {
                return Err(ipos.error(QasmErrorKind::IndexOutOfRange, format!("`{register}[{i}]` but size is {size}")));
            }
            Some(i as usize)
        } else {
            None
        };
        Ok(Argument { register, index, position })
    }

    fn expression(&mut self) -> Result<f64, QasmError> {
        let pos = self.pos();
        let v = self.sum()?;
        if !v.is_finite() {
            return Err(pos.error(QasmErrorKind::InvalidExpression, "expression does not evaluate to a finite number"));
        }
        Ok(v)
    }

    fn sum(&mut self) -> Result<f64, QasmError> {
        let mut v = self.product()?;
        loop {
            if self.eat_sym('+') {
                v += self.product()?;
            } else if self.eat_sym('-') {
                v -= self.product()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn product(&mut self) -> Result<f64, QasmError> {
        let mut v = self.unary()?;
        loop {
            if self.eat_sym('*') {
                v *= self.unary()?;
            } else if self.eat_sym('/') {
                let pos = self.pos();
                let d = self.unary()?;
                if d == 0.0 {
                    return Err(pos.error(QasmErrorKind::InvalidExpression, "division by zero"));
                }
                v /= d;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, QasmError> {
        if self.eat_sym('-') {
            return Ok(-self.unary()?);
        }
        if self.eat_sym('+') {
            return self.unary();
        }
        match self.next()? {
            (Tok::Int(n), _) => Ok(n as f64),
            (Tok::Real(x), _) => Ok(x),
            (Tok::Ident(s), _) if s == "pi" => Ok(std::f64::consts::PI),
            (Tok::Ident(s), p) if ["sin", "cos", "tan", "exp", "ln", "sqrt"].contains(&s.as_str()) => {
                Err(p.error(QasmErrorKind::UnsupportedConstruct, format!("function `{s}` is not supported")))
            }
            (Tok::Ident(s), p) => Err(p.error(QasmErrorKind::InvalidExpression, format!("unknown identifier `{s}`"))),
            (Tok::Sym('('), _) => {
                let v = self.sum()?;
                self.expect_sym(')')?;
                Ok(v)
            }
            (t, p) => Err(p.error(QasmErrorKind::Syntax, format!("expected expression, found {t}"))),
        }
    }
}

/// First pass: tokens to document.
pub fn parse_document(text: &str) -> Result<QasmDocument, QasmError> {
    let toks = lex(text)?;
    let end = Position { line: text.lines().count().max(1), column: text.lines().last().map_or(1, |l| l.chars().count() + 1) };
    Parser { toks, at: 0, end, doc: QasmDocument::default() }.program()
}

fn offsets(regs: &[Register]) -> Vec<(String, usize, usize)> {
    let mut acc = 0;
    regs.iter()
        .map(|r| {
            let start = acc;
            acc += r.size;
            (r.name.clone(), start, r.size)
        })
        .collect()
}

/// Expands broadcast arguments into per-index flat operand tuples.
fn expand(args: &[Argument], table: &[(String, usize, usize)], at: Position) -> Result<Vec<Vec<usize>>, QasmError> {
    let lookup = |a: &Argument| table.iter().find(|(n, _, _)| *n == a.register).map(|&(_, s, z)| (s, z)).expect("declared");
    let width = args.iter().filter(|a| a.index.is_none()).map(|a| lookup(a).1).try_fold(None, |w: Option<usize>, z| match w {
        Some(w) if w != z => Err(at.error(QasmErrorKind::ArityMismatch, "broadcast registers differ in size")),
        _ => Ok(Some(z)),
    })?;
    let reps = width.unwrap_or(1);
    Ok((0..reps)
        .map(|k| {
            args.iter()
                .map(|a| {
                    let (start, _) = lookup(a);
                    start + a.index.unwrap_or(k)
                })
                .collect()
        })
        .collect())
}

/// Second pass: document to circuit with registers flattened in
/// declaration order.
pub fn build_circuit(doc: &QasmDocument, name: &str) -> Result<Circuit, QasmError> {
    let qtable = offsets(&doc.qregs);
    let ctable = offsets(&doc.cregs);
    let n_qubits = doc.qregs.iter().map(|r| r.size).sum();
    let n_clbits = doc.cregs.iter().map(|r| r.size).sum();
    let mut circuit = Circuit::new(name, n_qubits, n_clbits);
    let invalid = |p: Position, e: qvf_core::Error| p.error(QasmErrorKind::InvalidCircuit, e.to_string());
    for st in &doc.statements {
        let pos = st.position;
        match &st.kind {
            StatementKind::Gate { name, params, args } => {
                let kind = match name.as_str() {
                    "h" => GateKind::H,
                    "x" => GateKind::X,
                    "y" => GateKind::Y,
                    "z" => GateKind::Z,
                    "s" => GateKind::S,
                    "t" => GateKind::T,
                    "sx" => GateKind::SX,
                    "rz" => GateKind::rz(params[0]).map_err(|e| invalid(pos, e))?,
                    "u" | "u3" | "U" => GateKind::u(params[0], params[1], params[2]).map_err(|e| invalid(pos, e))?,
                    "cx" | "CX" => GateKind::CX,
                    "swap" => GateKind::Swap,
                    other => return Err(pos.error(QasmErrorKind::UnsupportedGate, format!("gate `{other}`"))),
                };
                for qubits in expand(args, &qtable, pos)? {
                    if qubits.len() == 2 && qubits[0] == qubits[1] {
                        return Err(args[1].position.error(QasmErrorKind::DuplicateOperand, format!("`{name}` uses the same qubit twice")));
                    }
                    circuit.push(GateOp { kind, qubits, clbit: None, injected: false }).map_err(|e| invalid(pos, e))?;
                }
            }
            StatementKind::Measure { qubit, clbit } => {
                let qs = expand(std::slice::from_ref(qubit), &qtable, pos)?;
                let cs = expand(std::slice::from_ref(clbit), &ctable, pos)?;
                if qs.len() != cs.len() {
                    return Err(pos.error(QasmErrorKind::ArityMismatch, "measure registers differ in size"));
                }
                for (q, c) in qs.into_iter().zip(cs) {
                    circuit.push(GateOp::measure(q[0], c[0])).map_err(|e| invalid(pos, e))?;
                }
            }
            StatementKind::Barrier { args } => {
                let mut seen = Vec::new();
                for a in args {
                    for q in expand(std::slice::from_ref(a), &qtable, pos)? {
                        if !seen.contains(&q[0]) {
                            seen.push(q[0]);
                            circuit.push(GateOp::barrier(q[0])).map_err(|e| invalid(pos, e))?;
                        }
                    }
                }
            }
        }
    }
    Ok(circuit)
}

/// Parses OpenQASM 2.0 text into a circuit named `"qasm"`.
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    build_circuit(&parse_document(text)?, "qasm")
}

fn angle(x: f64) -> String {
    format_significant(x, 12)
}

/// Emits OpenQASM 2.0 with one `q` and (when needed) one `c` register.
/// Angles carry 12 significant digits.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{}];", circuit.n_qubits()).unwrap();
    if circuit.n_clbits() > 0 {
        writeln!(out, "creg c[{}];", circuit.n_clbits()).unwrap();
    }
    for op in circuit.ops() {
        let operands = op.qubits.iter().map(|q| format!("q[{q}]")).collect::<Vec<_>>().join(",");
        match op.kind {
            GateKind::Measure => writeln!(out, "measure {operands} -> c[{}];", op.clbit.expect("measure has clbit")),
            GateKind::Rz(a) => writeln!(out, "rz({}) {operands};", angle(a)),
            GateKind::U { theta, phi, lambda } => {
                writeln!(out, "u({},{},{}) {operands};", angle(theta), angle(phi), angle(lambda))
            }
            k => writeln!(out, "{} {operands};", k.name()),
        }
        .unwrap();
    }
    out
}

/// Gate-by-gate equality with angles compared within `tol` radians.
pub fn circuits_match(a: &Circuit, b: &Circuit, tol: f64) -> bool {
    a.n_qubits() == b.n_qubits()
        && a.n_clbits() == b.n_clbits()
        && a.ops().len() == b.ops().len()
        && a.ops().iter().zip(b.ops()).all(|(x, y)| x.approx_eq(y, tol))
}
