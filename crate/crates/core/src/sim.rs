//! Statevector simulation, shot sampling and a stochastic Pauli noise model.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::circuit::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};

/// Largest circuit width accepted by the simulator.
pub const MAX_QUBITS: usize = 20;

/// Shots per circuit execution unless configured otherwise.
pub const DEFAULT_SHOTS: u64 = 1024;

/// Outcomes with exact probability below this are dropped from exact
/// distributions; they are floating-point residue of cancelled amplitudes.
const PRUNE_BELOW: f64 = 1e-14;

pub type Matrix2 = [[Complex64; 2]; 2];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The 2×2 unitary of a single-qubit gate, `None` for multi-qubit and
/// non-unitary kinds.
pub fn single_qubit_matrix(kind: &GateKind) -> Option<Matrix2> {
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let m = match *kind {
        GateKind::H => [[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)], [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)]],
        GateKind::X => [[zero, one], [one, zero]],
        GateKind::Y => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
        GateKind::Z => [[one, zero], [zero, -one]],
        GateKind::S => [[one, zero], [zero, c(0.0, 1.0)]],
        GateKind::T => [[one, zero], [zero, c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)]],
        GateKind::SX => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::Rz(a) => [[Complex64::from_polar(1.0, -a / 2.0), zero], [zero, Complex64::from_polar(1.0, a / 2.0)]],
        GateKind::U { theta, phi, lambda } => {
            let (s, co) = (libm::sin(theta / 2.0), libm::cos(theta / 2.0));
            [
                [c(co, 0.0), -Complex64::from_polar(s, lambda)],
                [Complex64::from_polar(s, phi), Complex64::from_polar(co, phi + lambda)],
            ]
        }
        GateKind::CX | GateKind::Swap | GateKind::Barrier | GateKind::Measure => return None,
    };
    Some(m)
}

/// Normalized array of `2^n` amplitudes; qubit `q` is bit `q` of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::resource(format!("{n_qubits} qubits exceeds simulator cap of {MAX_QUBITS}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::invalid("amplitude count must be a power of two"));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::resource(format!("{n_qubits} qubits exceeds simulator cap of {MAX_QUBITS}")));
        }
        Ok(Statevector { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_matrix(&mut self, qubit: usize, m: &Matrix2) {
        let bit = 1usize << qubit;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cx(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (ab, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ab != 0 && i & bb == 0 {
                self.amps.swap(i, i ^ ab ^ bb);
            }
        }
    }

    /// Applies a unitary gate in place. Measurement and barrier are rejected.
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        if let Some(&q) = op.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::invalid(format!("qubit {q} out of range for {}-qubit state", self.n_qubits)));
        }
        match op.kind {
            GateKind::CX => self.apply_cx(op.qubits[0], op.qubits[1]),
            GateKind::Swap => self.apply_swap(op.qubits[0], op.qubits[1]),
            GateKind::Barrier | GateKind::Measure => {
                return Err(Error::invalid(format!("{} is not a unitary gate", op.kind.name())))
            }
            ref kind => {
                let m = single_qubit_matrix(kind).expect("single-qubit kind");
                self.apply_matrix(op.qubits[0], &m);
            }
        }
        Ok(())
    }

    fn apply_pauli(&mut self, qubit: usize, pauli: Pauli) {
        let kind = match pauli {
            Pauli::X => GateKind::X,
            Pauli::Y => GateKind::Y,
            Pauli::Z => GateKind::Z,
        };
        self.apply_matrix(qubit, &single_qubit_matrix(&kind).expect("pauli"));
    }
}

/// Functional form of [`Statevector::apply`].
pub fn apply_gate(mut state: Statevector, op: &GateOp) -> Result<Statevector> {
    state.apply(op)?;
    Ok(state)
}

/// Runs every unitary op of `circuit` on `|0…0⟩`.
pub fn final_state(circuit: &Circuit) -> Result<Statevector> {
    let mut state = Statevector::zero(circuit.n_qubits())?;
    for op in circuit.ops().iter().filter(|op| op.kind.is_unitary()) {
        state.apply(op)?;
    }
    Ok(state)
}

/// Parametric depolarizing + readout-flip noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Pauli-error probability after each single-qubit gate.
    pub p1: f64,
    /// Pauli-error probability per operand after each two-qubit gate.
    pub p2: f64,
    /// Probability of flipping each measured classical bit.
    pub readout_flip: f64,
    pub enabled: bool,
}

impl NoiseModel {
    pub const NOISELESS: NoiseModel = NoiseModel { p1: 0.0, p2: 0.0, readout_flip: 0.0, enabled: false };

    /// Stand-in magnitudes for a NISQ-era device.
    pub const DEFAULT_NISQ: NoiseModel = NoiseModel { p1: 0.001, p2: 0.01, readout_flip: 0.02, enabled: true };

    pub fn new(p1: f64, p2: f64, readout_flip: f64) -> Result<Self> {
        let model = NoiseModel { p1, p2, readout_flip, enabled: true };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p1", self.p1), ("p2", self.p2), ("readout_flip", self.readout_flip)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} = {p} is not a probability")));
            }
        }
        Ok(())
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::NOISELESS
    }
}

/// Output distribution over classical bit strings.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    /// Born-rule probabilities.
    Exact(BTreeMap<String, f64>),
    /// Observed counts over `shots` executions.
    Sampled { counts: BTreeMap<String, u64>, shots: u64 },
}

impl Distribution {
    pub fn is_empty(&self) -> bool {
        match self {
            Distribution::Exact(p) => p.is_empty(),
            Distribution::Sampled { counts, .. } => counts.is_empty(),
        }
    }

    /// Probability (exact) or relative frequency (sampled) of `outcome`.
    pub fn frequency(&self, outcome: &str) -> f64 {
        match self {
            Distribution::Exact(p) => p.get(outcome).copied().unwrap_or(0.0),
            Distribution::Sampled { counts, shots } => {
                counts.get(outcome).map_or(0.0, |&n| n as f64 / *shots as f64)
            }
        }
    }

    /// All observed outcomes with their frequencies, in lexicographic order.
    pub fn frequencies(&self) -> Vec<(&str, f64)> {
        match self {
            Distribution::Exact(p) => p.iter().map(|(k, &v)| (k.as_str(), v)).collect(),
            Distribution::Sampled { counts, shots } => {
                counts.iter().map(|(k, &n)| (k.as_str(), n as f64 / *shots as f64)).collect()
            }
        }
    }

    /// The most frequent outcome; ties resolve to the lexicographically
    /// smallest string.
    pub fn mode(&self) -> Option<&str> {
        let mut best: Option<(&str, f64)> = None;
        for (k, v) in self.frequencies() {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
        best.map(|(k, _)| k)
    }

    /// Half the L1 distance between the two frequency vectors.
    pub fn total_variation(&self, other: &Distribution) -> f64 {
        let mut keys: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
        for (k, v) in self.frequencies() {
            keys.entry(k).or_default().0 = v;
        }
        for (k, v) in other.frequencies() {
            keys.entry(k).or_default().1 = v;
        }
        keys.values().map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0
    }
}

/// Which qubit feeds each classical bit at the end of the circuit.
fn measured_qubits(circuit: &Circuit) -> Vec<Option<usize>> {
    let mut map = vec![None; circuit.n_clbits()];
    for op in circuit.ops().iter().filter(|op| op.kind == GateKind::Measure) {
        map[op.clbit.expect("measure has clbit")] = Some(op.qubits[0]);
    }
    map
}

fn outcome_string(word: u64, n_clbits: usize) -> String {
    (0..n_clbits).rev().map(|c| if word >> c & 1 == 1 { '1' } else { '0' }).collect()
}

/// Probability of each classical word, marginalizing unmeasured qubits.
fn classical_marginal(state: &Statevector, measured: &[Option<usize>]) -> BTreeMap<u64, f64> {
    let mut out = BTreeMap::new();
    for (i, a) in state.amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let word = measured
            .iter()
            .enumerate()
            .filter_map(|(c, q)| q.filter(|&q| i >> q & 1 == 1).map(|_| 1u64 << c))
            .fold(0, |w, b| w | b);
        *out.entry(word).or_insert(0.0) += p;
    }
    out
}

fn check_width(circuit: &Circuit) -> Result<()> {
    if circuit.n_qubits() > MAX_QUBITS {
        return Err(Error::resource(format!(
            "{} qubits exceeds simulator cap of {MAX_QUBITS}",
            circuit.n_qubits()
        )));
    }
    if circuit.n_clbits() > 63 {
        return Err(Error::resource("more than 63 classical bits"));
    }
    Ok(())
}

/// Exact Born-rule distribution over the measured classical bits.
pub fn run_exact(circuit: &Circuit) -> Result<Distribution> {
    check_width(circuit)?;
    let state = final_state(circuit)?;
    let measured = measured_qubits(circuit);
    let probs = classical_marginal(&state, &measured)
        .into_iter()
        .filter(|&(_, p)| p >= PRUNE_BELOW)
        .map(|(w, p)| (outcome_string(w, circuit.n_clbits()), p))
        .collect();
    Ok(Distribution::Exact(probs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pauli {
    X,
    Y,
    Z,
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Cumulative distribution over classical words for inverse-CDF sampling.
struct Sampler {
    words: Vec<u64>,
    cumulative: Vec<f64>,
}

impl Sampler {
    fn new(marginal: &BTreeMap<u64, f64>) -> Self {
        let mut acc = 0.0;
        let (mut words, mut cumulative) = (Vec::new(), Vec::new());
        for (&w, &p) in marginal {
            acc += p;
            words.push(w);
            cumulative.push(acc);
        }
        Sampler { words, cumulative }
    }

    fn sample(&self, u: f64) -> u64 {
        let total = *self.cumulative.last().unwrap_or(&1.0);
        let target = u * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        self.words[idx.min(self.words.len() - 1)]
    }
}

/// Monte-Carlo trajectory sampling.
///
/// Each shot draws from its own ChaCha stream (`stream = shot index`), so
/// counts do not depend on how shots are scheduled. Per shot the draws are,
/// in order: one error draw per operand of every non-injected unitary op
/// (plus a Pauli choice when it fires), one Born-sampling draw, then one
/// readout draw per measured classical bit. Shots without Pauli errors reuse
/// the cached noiseless state.
pub fn run_shots(circuit: &Circuit, shots: u64, noise: &NoiseModel, seed: u64) -> Result<Distribution> {
    if shots == 0 {
        return Err(Error::invalid("shots must be at least 1"));
    }
    check_width(circuit)?;
    noise.validate()?;
    let measured = measured_qubits(circuit);
    let n_clbits = circuit.n_clbits();
    let unitary: Vec<(usize, &GateOp)> =
        circuit.ops().iter().enumerate().filter(|(_, op)| op.kind.is_unitary()).collect();

    // State before each unitary op; trajectories restart from the snapshot
    // preceding their first error.
    let mut snapshots = Vec::with_capacity(unitary.len() + 1);
    let mut state = Statevector::zero(circuit.n_qubits())?;
    for (_, op) in &unitary {
        snapshots.push(state.clone());
        state.apply(op)?;
    }
    let clean = Sampler::new(&classical_marginal(&state, &measured));

    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let base = ChaCha8Rng::from_seed(key);

    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let mut errors: Vec<(usize, usize, Pauli)> = Vec::new();
    for shot in 0..shots {
        let mut rng = base.clone();
        rng.set_stream(shot);
        errors.clear();
        if noise.enabled {
            for (k, (_, op)) in unitary.iter().enumerate() {
                if op.injected {
                    continue;
                }
                let p = if op.qubits.len() == 2 { noise.p2 } else { noise.p1 };
                for &q in &op.qubits {
                    if uniform(&mut rng) < p {
                        let pauli = match (uniform(&mut rng) * 3.0) as u32 {
                            0 => Pauli::X,
                            1 => Pauli::Y,
                            _ => Pauli::Z,
                        };
                        errors.push((k, q, pauli));
                    }
                }
            }
        }
        let u = uniform(&mut rng);
        let mut word = if errors.is_empty() {
            clean.sample(u)
        } else {
            let first = errors[0].0;
            let mut traj = snapshots[first].clone();
            let mut pending = errors.iter().peekable();
            for (k, (_, op)) in unitary.iter().enumerate().skip(first) {
                traj.apply(op)?;
                while let Some(&&(ek, q, pauli)) = pending.peek() {
                    if ek != k {
                        break;
                    }
                    traj.apply_pauli(q, pauli);
                    pending.next();
                }
            }
            Sampler::new(&classical_marginal(&traj, &measured)).sample(u)
        };
        if noise.enabled {
            for (c, q) in measured.iter().enumerate() {
                if q.is_some() && uniform(&mut rng) < noise.readout_flip {
                    word ^= 1 << c;
                }
            }
        }
        *counts.entry(word).or_insert(0) += 1;
    }
    let counts = counts.into_iter().map(|(w, n)| (outcome_string(w, n_clbits), n)).collect();
    Ok(Distribution::Sampled { counts, shots })
}
