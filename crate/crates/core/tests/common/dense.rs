//! Dense reference simulator: every gate becomes an explicit 2^n × 2^n
//! matrix (Kronecker products for single-qubit gates, basis permutations for
//! CX/SWAP) that multiplies the full state vector. Shares no code with the
//! statevector kernels under test.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C;
use qvf_core::circuit::{Circuit, GateKind};

pub type Dense = Vec<Vec<C>>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn gate_2x2(kind: &GateKind) -> [[C; 2]; 2] {
    let s = FRAC_1_SQRT_2;
    match *kind {
        GateKind::H => [[c(s, 0.), c(s, 0.)], [c(s, 0.), c(-s, 0.)]],
        GateKind::X => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
        GateKind::Y => [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
        GateKind::Z => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
        GateKind::S => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(0., 1.)]],
        GateKind::T => [[c(1., 0.), c(0., 0.)], [c(0., 0.), C::from_polar(1.0, PI / 4.0)]],
        GateKind::SX => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::Rz(a) => [[C::from_polar(1.0, -a / 2.0), c(0., 0.)], [c(0., 0.), C::from_polar(1.0, a / 2.0)]],
        GateKind::U { theta, phi, lambda } => {
            let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
            [
                [c(ct, 0.), -C::from_polar(1.0, lambda) * st],
                [C::from_polar(1.0, phi) * st, C::from_polar(1.0, phi + lambda) * ct],
            ]
        }
        _ => panic!("not a single-qubit gate"),
    }
}

pub fn identity(dim: usize) -> Dense {
    (0..dim).map(|i| (0..dim).map(|j| if i == j { c(1., 0.) } else { c(0., 0.) }).collect()).collect()
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0., 0.); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![c(0., 0.); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == c(0., 0.) {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// `I ⊗ … ⊗ G ⊗ … ⊗ I` with qubit `n-1` as the leftmost factor.
pub fn lift_single(n: usize, qubit: usize, g: [[C; 2]; 2]) -> Dense {
    let g: Dense = vec![vec![g[0][0], g[0][1]], vec![g[1][0], g[1][1]]];
    let mut m = vec![vec![c(1., 0.)]];
    for q in (0..n).rev() {
        let factor = if q == qubit { g.clone() } else { identity(2) };
        m = kron(&m, &factor);
    }
    m
}

/// Permutation matrix sending basis state |i⟩ to |f(i)⟩.
pub fn permutation(n: usize, f: impl Fn(usize) -> usize) -> Dense {
    let dim = 1 << n;
    let mut m = vec![vec![c(0., 0.); dim]; dim];
    for i in 0..dim {
        m[f(i)][i] = c(1., 0.);
    }
    m
}

pub fn gate_matrix(n: usize, kind: &GateKind, qubits: &[usize]) -> Dense {
    match kind {
        GateKind::CX => {
            let (ctl, tgt) = (qubits[0], qubits[1]);
            permutation(n, |i| if (i >> ctl) & 1 == 1 { i ^ (1 << tgt) } else { i })
        }
        GateKind::Swap => {
            let (a, b) = (qubits[0], qubits[1]);
            permutation(n, |i| {
                let (ba, bb) = ((i >> a) & 1, (i >> b) & 1);
                (i & !(1 << a) & !(1 << b)) | (bb << a) | (ba << b)
            })
        }
        k => lift_single(n, qubits[0], gate_2x2(k)),
    }
}

/// Product of all unitary ops in `circuit[range]`, later gates on the left.
pub fn unitary(circuit: &Circuit, range: std::ops::Range<usize>) -> Dense {
    let n = circuit.n_qubits();
    let mut u = identity(1 << n);
    for op in &circuit.ops()[range] {
        if op.kind.is_unitary() {
            u = matmul(&gate_matrix(n, &op.kind, &op.qubits), &u);
        }
    }
    u
}

pub fn apply(u: &Dense, v: &[C]) -> Vec<C> {
    u.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn final_state(circuit: &Circuit) -> Vec<C> {
    let mut v = vec![c(0., 0.); 1 << circuit.n_qubits()];
    v[0] = c(1., 0.);
    apply(&unitary(circuit, 0..circuit.ops().len()), &v)
}

/// Exact output distribution keyed by classical string, highest clbit first.
pub fn distribution(circuit: &Circuit) -> BTreeMap<String, f64> {
    let v = final_state(circuit);
    let mut clbit_source = vec![None; circuit.n_clbits()];
    for op in circuit.ops() {
        if op.kind == GateKind::Measure {
            clbit_source[op.clbit.unwrap()] = Some(op.qubits[0]);
        }
    }
    let mut out = BTreeMap::new();
    for (i, a) in v.iter().enumerate() {
        let key: String = (0..circuit.n_clbits())
            .rev()
            .map(|cb| match clbit_source[cb] {
                Some(q) if (i >> q) & 1 == 1 => '1',
                _ => '0',
            })
            .collect();
        *out.entry(key).or_insert(0.0) += a.norm_sqr();
    }
    out
}

/// Max absolute difference between two distributions over the union of keys.
pub fn max_diff<'a>(a: impl IntoIterator<Item = (&'a str, f64)>, b: &BTreeMap<String, f64>) -> f64 {
    let a: BTreeMap<&str, f64> = a.into_iter().collect();
    let keys: std::collections::BTreeSet<&str> = a.keys().copied().chain(b.keys().map(|k| k.as_str())).collect();
    keys.iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(*k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Whether two vectors agree up to a global phase.
pub fn equal_up_to_phase(a: &[C], b: &[C], tol: f64) -> bool {
    let (k, _) = a.iter().enumerate().max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap()).unwrap();
    if b[k].norm() < 1e-12 {
        return false;
    }
    let phase = a[k] / b[k];
    a.iter().zip(b).all(|(x, y)| (x - phase * y).norm() <= tol)
}

/// Unitary DFT matrix `F[j][k] = ω^{jk} / √N`, ω = e^{2πi/N}.
pub fn dft(n: usize) -> Dense {
    let dim = 1 << n;
    let norm = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|j| (0..dim).map(|k| C::from_polar(norm, 2.0 * PI * ((j * k) % dim) as f64 / dim as f64)).collect())
        .collect()
}
