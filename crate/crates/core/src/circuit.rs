//! Circuit representation and the three benchmark families.
//!
//! Qubit 0 is the least-significant bit of a basis index. Output strings are
//! written with the highest classical bit leftmost, so a Bernstein-Vazirani
//! circuit for hidden string `"101"` reads back as `"101"`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::angle::{canonical_polar, wrap_two_pi};
use crate::error::{Error, Result};

/// Gate vocabulary understood by the simulator, transpiler and QASM front end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    SX,
    Rz(f64),
    /// General single-qubit unitary. Build through [`GateKind::u`] to get
    /// canonical angles.
    U {
        theta: f64,
        phi: f64,
        lambda: f64,
    },
    CX,
    Swap,
    Barrier,
    Measure,
}

impl GateKind {
    /// U gate with `theta` folded into `[0, π]` and `phi`, `lambda` wrapped
    /// into `[0, 2π)`. The folded gate equals the requested one up to a
    /// global phase.
    pub fn u(theta: f64, phi: f64, lambda: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite() && lambda.is_finite()) {
            return Err(Error::invalid("U gate angles must be finite"));
        }
        let (theta, flip) = canonical_polar(theta);
        let (phi, lambda) = if flip {
            (wrap_two_pi(phi + PI), wrap_two_pi(lambda + PI))
        } else {
            (wrap_two_pi(phi), wrap_two_pi(lambda))
        };
        Ok(GateKind::U { theta, phi, lambda })
    }

    pub fn rz(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::invalid("RZ angle must be finite"));
        }
        Ok(GateKind::Rz(angle))
    }

    /// Number of qubit operands.
    pub fn arity(&self) -> usize {
        match self {
            GateKind::CX | GateKind::Swap => 2,
            _ => 1,
        }
    }

    /// True for gates that act unitarily on the state.
    pub fn is_unitary(&self) -> bool {
        !matches!(self, GateKind::Barrier | GateKind::Measure)
    }

    /// Equality with angles compared on the circle within `tol` radians.
    pub fn approx_eq(&self, other: &GateKind, tol: f64) -> bool {
        use crate::angle::circular_distance as d;
        match (*self, *other) {
            (GateKind::Rz(a), GateKind::Rz(b)) => d(a, b) <= tol,
            (GateKind::U { theta: t1, phi: p1, lambda: l1 }, GateKind::U { theta: t2, phi: p2, lambda: l2 }) => {
                (t1 - t2).abs() <= tol && d(p1, p2) <= tol && d(l1, l2) <= tol
            }
            (a, b) => a == b,
        }
    }

    /// Lower-case OpenQASM 2.0 mnemonic.
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::SX => "sx",
            GateKind::Rz(_) => "rz",
            GateKind::U { .. } => "u",
            GateKind::CX => "cx",
            GateKind::Swap => "swap",
            GateKind::Barrier => "barrier",
            GateKind::Measure => "measure",
        }
    }
}

/// One gate application.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// Target classical bit, only for measurements.
    pub clbit: Option<usize>,
    /// Marks U gates inserted by the fault injector.
    pub injected: bool,
}

impl GateOp {
    pub fn single(kind: GateKind, qubit: usize) -> Self {
        GateOp { kind, qubits: alloc::vec![qubit], clbit: None, injected: false }
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        GateOp { kind, qubits: alloc::vec![a, b], clbit: None, injected: false }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::two(GateKind::CX, control, target)
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        GateOp { kind: GateKind::Measure, qubits: alloc::vec![qubit], clbit: Some(clbit), injected: false }
    }

    pub fn barrier(qubit: usize) -> Self {
        Self::single(GateKind::Barrier, qubit)
    }

    /// Injector gate `U(theta, phi, 0)` flagged as a fault.
    pub fn injector(qubit: usize, theta: f64, phi: f64) -> Result<Self> {
        let mut op = Self::single(GateKind::u(theta, phi, 0.0)?, qubit);
        op.injected = true;
        Ok(op)
    }

    /// Same gate on the same operands, angles within `tol`. The injected
    /// flag is not compared.
    pub fn approx_eq(&self, other: &GateOp, tol: f64) -> bool {
        self.kind.approx_eq(&other.kind, tol) && self.qubits == other.qubits && self.clbit == other.clbit
    }

    /// Injection sites exist after every gate that changes the state.
    pub fn is_injectable(&self) -> bool {
        self.kind.is_unitary() && !self.injected
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GateKind::Rz(a) => write!(f, "rz({a})")?,
            GateKind::U { theta, phi, lambda } => write!(f, "u({theta},{phi},{lambda})")?,
            k => f.write_str(k.name())?,
        }
        for (i, q) in self.qubits.iter().enumerate() {
            write!(f, "{}q{q}", if i == 0 { " " } else { "," })?;
        }
        if let Some(c) = self.clbit {
            write!(f, " -> c{c}")?;
        }
        Ok(())
    }
}

/// Ordered gate list over `n_qubits` qubits and `n_clbits` classical bits.
///
/// All mutation goes through [`Circuit::push`], which rejects out-of-range
/// operands, duplicate operands, and gates placed after a measurement of the
/// same qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    name: String,
    n_qubits: usize,
    n_clbits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(name: impl Into<String>, n_qubits: usize, n_clbits: usize) -> Self {
        Circuit { name: name.into(), n_qubits, n_clbits, ops: Vec::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        self.check(&op, self.ops.len())?;
        self.ops.push(op);
        Ok(())
    }

    /// Inserts `op` before position `index`.
    pub fn insert(&mut self, index: usize, op: GateOp) -> Result<()> {
        if index > self.ops.len() {
            return Err(Error::invalid(format!("insert position {index} past end of circuit")));
        }
        self.check(&op, index)?;
        self.ops.insert(index, op);
        Ok(())
    }

    fn check(&self, op: &GateOp, position: usize) -> Result<()> {
        if op.qubits.len() != op.kind.arity() {
            return Err(Error::invalid(format!(
                "{} expects {} qubit(s), got {}",
                op.kind.name(),
                op.kind.arity(),
                op.qubits.len()
            )));
        }
        if let Some(&q) = op.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::invalid(format!("qubit {q} out of range for width {}", self.n_qubits)));
        }
        if op.qubits.len() == 2 && op.qubits[0] == op.qubits[1] {
            return Err(Error::invalid(format!("{} with duplicate operand q{}", op.kind.name(), op.qubits[0])));
        }
        match (op.kind, op.clbit) {
            (GateKind::Measure, Some(c)) if c >= self.n_clbits => {
                return Err(Error::invalid(format!("classical bit {c} out of range for width {}", self.n_clbits)));
            }
            (GateKind::Measure, None) => return Err(Error::invalid("measure without classical bit")),
            (GateKind::Measure, Some(_)) => {}
            (_, Some(_)) => return Err(Error::invalid("only measurements carry a classical bit")),
            (_, None) => {}
        }
        if op.injected && !matches!(op.kind, GateKind::U { .. }) {
            return Err(Error::invalid("only U gates may be flagged as injected"));
        }
        if op.kind.is_unitary() {
            let measured_before = self.ops[..position]
                .iter()
                .any(|m| m.kind == GateKind::Measure && op.qubits.contains(&m.qubits[0]));
            if measured_before {
                return Err(Error::invalid("gate after measurement of the same qubit"));
            }
        } else if op.kind == GateKind::Measure {
            let gate_after = self.ops[position..]
                .iter()
                .any(|g| g.kind.is_unitary() && g.qubits.contains(&op.qubits[0]));
            if gate_after {
                return Err(Error::invalid("measurement before a later gate on the same qubit"));
            }
        }
        Ok(())
    }

    /// Number of unitary two-qubit gates.
    pub fn two_qubit_count(&self) -> usize {
        self.ops.iter().filter(|op| op.kind.arity() == 2).count()
    }
}

/// Oracle choices for Deutsch-Jozsa.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DjOracle {
    ConstantZero,
    ConstantOne,
    /// `f(x) = mask · x (mod 2)`, mask written most-significant bit first.
    Balanced(String),
}

fn parse_bits(bits: &str, len: usize) -> Result<Vec<bool>> {
    if bits.len() != len {
        return Err(Error::invalid(format!("bitstring {bits:?} has length {}, expected {len}", bits.len())));
    }
    // Index i of the result is qubit i, i.e. the rightmost character.
    bits.chars()
        .rev()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::invalid(format!("invalid bit {other:?} in {bits:?}"))),
        })
        .collect()
}

/// Phase-kickback circuit shared by Bernstein-Vazirani and balanced
/// Deutsch-Jozsa. `oracle` receives the ancilla index.
fn phase_kickback(
    name: String,
    n_data: usize,
    oracle: impl FnOnce(&mut Circuit, usize) -> Result<()>,
) -> Result<Circuit> {
    if n_data == 0 {
        return Err(Error::invalid("at least one data qubit is required"));
    }
    let anc = n_data;
    let mut c = Circuit::new(name, n_data + 1, n_data);
    for q in 0..=anc {
        c.push(GateOp::single(GateKind::H, q))?;
    }
    c.push(GateOp::single(GateKind::Z, anc))?;
    for q in 0..=anc {
        c.push(GateOp::barrier(q))?;
    }
    oracle(&mut c, anc)?;
    for q in 0..=anc {
        c.push(GateOp::barrier(q))?;
    }
    for q in 0..n_data {
        c.push(GateOp::single(GateKind::H, q))?;
    }
    for q in 0..n_data {
        c.push(GateOp::measure(q, q))?;
    }
    Ok(c)
}

fn cx_mask_oracle(c: &mut Circuit, anc: usize, bits: &[bool]) -> Result<()> {
    for (q, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
        c.push(GateOp::cx(q, anc))?;
    }
    Ok(())
}

/// Bernstein-Vazirani over `n_data` data qubits plus one ancilla (the last
/// qubit). Noiseless output is `hidden` with certainty.
pub fn make_bernstein_vazirani(n_data: usize, hidden: &str) -> Result<Circuit> {
    let bits = parse_bits(hidden, n_data)?;
    phase_kickback(format!("bv_{n_data}_{hidden}"), n_data, |c, anc| cx_mask_oracle(c, anc, &bits))
}

/// Deutsch-Jozsa over `n_data` data qubits plus one ancilla. Constant
/// oracles read back all zeros; a balanced mask oracle reads back the mask.
pub fn make_deutsch_jozsa(n_data: usize, oracle: &DjOracle) -> Result<Circuit> {
    match oracle {
        DjOracle::ConstantZero => phase_kickback(format!("dj_{n_data}_const0"), n_data, |_, _| Ok(())),
        DjOracle::ConstantOne => phase_kickback(format!("dj_{n_data}_const1"), n_data, |c, anc| {
            c.push(GateOp::single(GateKind::X, anc))
        }),
        DjOracle::Balanced(mask) => {
            let bits = parse_bits(mask, n_data)?;
            if !bits.iter().any(|&b| b) {
                return Err(Error::invalid("balanced oracle mask must be nonzero"));
            }
            phase_kickback(format!("dj_{n_data}_bal{mask}"), n_data, |c, anc| cx_mask_oracle(c, anc, &bits))
        }
    }
}

/// Controlled phase `diag(1, 1, 1, e^{iλ})` as RZ/CX, exact up to global phase.
fn push_controlled_phase(c: &mut Circuit, lambda: f64, control: usize, target: usize) -> Result<()> {
    c.push(GateOp::single(GateKind::rz(lambda / 2.0)?, control))?;
    c.push(GateOp::cx(control, target))?;
    c.push(GateOp::single(GateKind::rz(-lambda / 2.0)?, target))?;
    c.push(GateOp::cx(control, target))?;
    c.push(GateOp::single(GateKind::rz(lambda / 2.0)?, target))
}

/// Prepares the Fourier-basis state of `value` and applies the inverse QFT,
/// so the noiseless output is the `n`-bit binary encoding of `value`.
pub fn make_qft(n: usize, value: u64) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::invalid("QFT needs at least one qubit"));
    }
    if n >= 64 || value >= 1u64 << n {
        return Err(Error::invalid(format!("encoded value {value} out of range for {n} qubits")));
    }
    let mut c = Circuit::new(format!("qft_{n}_{value}"), n, n);
    let dim = (1u64 << n) as f64;
    for q in 0..n {
        c.push(GateOp::single(GateKind::H, q))?;
    }
    for q in 0..n {
        // Qubit q carries phase 2π·value·2^q / 2^n.
        let turns = (value as f64) * ((1u64 << q) as f64) / dim;
        let angle = 2.0 * PI * (turns - libm::floor(turns));
        c.push(GateOp::single(GateKind::rz(angle)?, q))?;
    }
    for q in 0..n {
        c.push(GateOp::barrier(q))?;
    }
    for q in 0..n / 2 {
        c.push(GateOp::two(GateKind::Swap, q, n - 1 - q))?;
    }
    for target in 0..n {
        for control in 0..target {
            let lambda = -PI / ((1u64 << (target - control)) as f64);
            push_controlled_phase(&mut c, lambda, control, target)?;
        }
        c.push(GateOp::single(GateKind::H, target))?;
    }
    for q in 0..n {
        c.push(GateOp::measure(q, q))?;
    }
    Ok(c)
}
