//! Quantum Vulnerability Factor and campaign aggregation.
//!
//! The contrast between the correct output probability `P(A)` and the
//! strongest wrong output `P(B)` is `(P(A) − P(B)) / (P(A) + P(B))`, and
//! `QVF = 1 − (contrast + 1) / 2`. A QVF of 0 means the fault was harmless,
//! 0.5 means the output is ambiguous, 1 means a wrong answer dominates.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::inject::{
    build_faulty_circuit, CampaignPlan, Execution, FaultSpec, PhaseShift, PHI_POINTS, THETA_POINTS,
};
use crate::sim::{run_exact, run_shots, Distribution};
use crate::transpile::TranspiledCircuit;

/// Tolerance used to collect every outcome tied for the maximum probability.
const GOLD_TIE: f64 = 1e-9;

/// Upper bound of the green class.
pub const GREEN_BELOW: f64 = 0.45;
/// Lower bound of the red class.
pub const RED_ABOVE: f64 = 0.55;

/// Correct outputs of a fault-free execution.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldResult {
    pub correct_states: BTreeSet<String>,
    pub distribution: Distribution,
}

impl GoldResult {
    /// Every outcome within 1e-9 of the most probable one is correct.
    pub fn from_distribution(distribution: Distribution) -> Result<Self> {
        let freqs = distribution.frequencies();
        let max = freqs
            .iter()
            .map(|&(_, p)| p)
            .fold(None, |m: Option<f64>, p| Some(m.map_or(p, |m| m.max(p))))
            .ok_or_else(|| Error::invalid("gold distribution is empty"))?;
        let correct_states = freqs.iter().filter(|&&(_, p)| max - p <= GOLD_TIE).map(|&(k, _)| String::from(k)).collect();
        Ok(GoldResult { correct_states, distribution })
    }
}

/// Gold result from the exact noiseless run of the fault-free transpiled
/// circuit.
pub fn gold_result(t: &TranspiledCircuit) -> Result<GoldResult> {
    GoldResult::from_distribution(run_exact(&t.circuit)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QvfScore {
    pub qvf: f64,
    pub p_correct: f64,
    pub p_wrong_max: f64,
}

/// Contrast of `P(A)` against `P(B)`; 0 when both are 0.
pub fn contrast(p_correct: f64, p_wrong_max: f64) -> f64 {
    let total = p_correct + p_wrong_max;
    if total == 0.0 {
        0.0
    } else {
        (p_correct - p_wrong_max) / total
    }
}

/// QVF from the two probabilities; the degenerate `P(A) = P(B) = 0` case
/// yields 0.5.
pub fn qvf_from(p_correct: f64, p_wrong_max: f64) -> f64 {
    1.0 - (contrast(p_correct, p_wrong_max) + 1.0) / 2.0
}

pub fn compute_qvf(gold: &GoldResult, observed: &Distribution) -> Result<QvfScore> {
    if observed.is_empty() {
        return Err(Error::invalid("observed distribution is empty"));
    }
    let mut p_correct = 0.0;
    let mut p_wrong_max: f64 = 0.0;
    for (outcome, p) in observed.frequencies() {
        if gold.correct_states.contains(outcome) {
            p_correct += p;
        } else {
            p_wrong_max = p_wrong_max.max(p);
        }
    }
    Ok(QvfScore { qvf: qvf_from(p_correct, p_wrong_max), p_correct, p_wrong_max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Class {
    Green,
    White,
    Red,
}

impl Class {
    pub fn as_str(&self) -> &'static str {
        match self {
            Class::Green => "green",
            Class::White => "white",
            Class::Red => "red",
        }
    }
}

/// Green below 0.45, red above 0.55, white in between (both bounds white).
pub fn classify(qvf: f64) -> Result<Class> {
    if !(0.0..=1.0).contains(&qvf) {
        return Err(Error::invalid(format!("QVF {qvf} outside [0, 1]")));
    }
    Ok(if qvf < GREEN_BELOW {
        Class::Green
    } else if qvf > RED_ABOVE {
        Class::Red
    } else {
        Class::White
    })
}

/// One executed fault.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QvfRecord {
    pub plan_index: usize,
    pub spec: FaultSpec,
    /// Logical op the site came from; `None` for routing SWAPs.
    pub logical_gate_index: Option<usize>,
    pub qvf: f64,
    pub p_correct: f64,
    pub p_wrong_max: f64,
    /// 0 for exact execution.
    pub shots: u64,
    pub seed: u64,
}

/// Runs spec `index` of `plan` and scores it against `gold`.
pub fn evaluate(t: &TranspiledCircuit, gold: &GoldResult, plan: &CampaignPlan, index: usize) -> Result<QvfRecord> {
    let spec = plan.specs.get(index).ok_or_else(|| Error::invalid(format!("plan index {index} out of range")))?;
    let seed = plan.seed_for(index);
    let faulty = build_faulty_circuit(t, spec)?;
    let observed = match plan.execution {
        Execution::Exact => run_exact(&faulty)?,
        Execution::Sampled { shots, noise } => run_shots(&faulty, shots, &noise, seed)?,
    };
    let score = compute_qvf(gold, &observed)?;
    Ok(QvfRecord {
        plan_index: index,
        spec: *spec,
        logical_gate_index: t.site_provenance[spec.site.op_index],
        qvf: score.qvf,
        p_correct: score.p_correct,
        p_wrong_max: score.p_wrong_max,
        shots: plan.execution.shots(),
        seed,
    })
}

/// Which records feed a heatmap and which shift indexes the cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatmapFilter {
    /// All records, by first shift.
    All,
    /// Records whose first fault hits `qubit`, by first shift.
    Qubit(usize),
    /// Double-fault records with first shift `first`, by second shift.
    DoubleDetail(PhaseShift),
}

/// 13 × 24 grid over (θ, φ) of mean QVF.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    sums: Vec<f64>,
    counts: Vec<usize>,
}

impl Default for Heatmap {
    fn default() -> Self {
        Heatmap { sums: vec![0.0; THETA_POINTS * PHI_POINTS], counts: vec![0; THETA_POINTS * PHI_POINTS] }
    }
}

impl Heatmap {
    fn slot(theta_index: usize, phi_index: usize) -> usize {
        assert!(theta_index < THETA_POINTS && phi_index < PHI_POINTS, "cell out of grid");
        theta_index * PHI_POINTS + phi_index
    }

    pub fn add(&mut self, theta_index: usize, phi_index: usize, qvf: f64) {
        let i = Self::slot(theta_index, phi_index);
        self.sums[i] += qvf;
        self.counts[i] += 1;
    }

    /// Mean QVF of a cell, `None` if no record fell into it.
    pub fn mean(&self, theta_index: usize, phi_index: usize) -> Option<f64> {
        let i = Self::slot(theta_index, phi_index);
        (self.counts[i] > 0).then(|| self.sums[i] / self.counts[i] as f64)
    }

    pub fn count(&self, theta_index: usize, phi_index: usize) -> usize {
        self.counts[Self::slot(theta_index, phi_index)]
    }

    pub fn populated(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Merges a partial heatmap built from a disjoint set of records.
    pub fn merge(&mut self, other: &Heatmap) {
        for i in 0..self.sums.len() {
            self.sums[i] += other.sums[i];
            self.counts[i] += other.counts[i];
        }
    }

    /// Row-major (θ, then φ) cell means.
    pub fn means(&self) -> Vec<Option<f64>> {
        (0..self.sums.len()).map(|i| (self.counts[i] > 0).then(|| self.sums[i] / self.counts[i] as f64)).collect()
    }
}

fn indices(shift: &PhaseShift) -> Result<(usize, usize)> {
    shift
        .grid_index()
        .ok_or_else(|| Error::invalid(format!("shift (θ={}, φ={}) is not on the 15° grid", shift.theta, shift.phi)))
}

pub fn aggregate_heatmap(records: &[QvfRecord], filter: HeatmapFilter) -> Result<Heatmap> {
    let mut map = Heatmap::default();
    for r in records {
        let shift = match filter {
            HeatmapFilter::All => Some(r.spec.shift),
            HeatmapFilter::Qubit(q) => (r.spec.site.qubit == q).then_some(r.spec.shift),
            HeatmapFilter::DoubleDetail(first) => {
                let same = indices(&r.spec.shift)? == indices(&first)?;
                r.spec.second.filter(|_| same).map(|s| s.shift)
            }
        };
        if let Some(shift) = shift {
            let (t, p) = indices(&shift)?;
            map.add(t, p, r.qvf);
        }
    }
    Ok(map)
}

/// Cellwise `double − single`; a cell is absent unless both inputs have it.
pub fn delta_qvf(single: &Heatmap, double: &Heatmap) -> Result<Vec<Option<f64>>> {
    if single.sums.len() != double.sums.len() {
        return Err(Error::invalid("heatmap grids differ"));
    }
    Ok(single.means().into_iter().zip(double.means()).map(|(s, d)| Some(d? - s?)).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub mean: f64,
    /// Population standard deviation.
    pub stddev: f64,
}

/// Uniform bins over `[0, 1]`; 1.0 lands in the last bin.
pub fn histogram(values: &[f64], bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::invalid("histogram needs at least two bins"));
    }
    if values.is_empty() {
        return Err(Error::invalid("histogram of no records"));
    }
    let edges = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    let mut counts = vec![0; bins];
    for &v in values {
        let b = ((v * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let (mean, stddev) = mean_stddev(values);
    Ok(Histogram { edges, counts, mean, stddev })
}

fn mean_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, libm::sqrt(var))
}

/// Campaign-level statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub records: usize,
    pub mean: f64,
    pub stddev: f64,
    pub classes: BTreeMap<Class, usize>,
    /// Mean QVF of the records whose faults are all zero shifts, i.e. the
    /// fault-free run under the configured execution.
    pub baseline: Option<f64>,
    /// Records scoring strictly below the baseline.
    pub improving: usize,
    pub per_qubit_mean: BTreeMap<usize, f64>,
}

fn is_zero_fault(spec: &FaultSpec) -> bool {
    let zero = |s: &PhaseShift| s.theta == 0.0 && s.phi == 0.0;
    zero(&spec.shift) && spec.second.as_ref().is_none_or(|s| zero(&s.shift))
}

pub fn summarize(records: &[QvfRecord]) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::invalid("no records to summarize"));
    }
    let values: Vec<f64> = records.iter().map(|r| r.qvf).collect();
    let (mean, stddev) = mean_stddev(&values);
    let mut classes = BTreeMap::new();
    for &v in &values {
        *classes.entry(classify(v)?).or_insert(0) += 1;
    }
    let base: Vec<f64> = records.iter().filter(|r| is_zero_fault(&r.spec)).map(|r| r.qvf).collect();
    let baseline = (!base.is_empty()).then(|| mean_stddev(&base).0);
    let improving = baseline.map_or(0, |b| values.iter().filter(|&&v| v < b).count());
    let mut per_qubit: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in records {
        let e = per_qubit.entry(r.spec.site.qubit).or_insert((0.0, 0));
        e.0 += r.qvf;
        e.1 += 1;
    }
    let per_qubit_mean = per_qubit.into_iter().map(|(q, (s, n))| (q, s / n as f64)).collect();
    Ok(Summary { records: records.len(), mean, stddev, classes, baseline, improving, per_qubit_mean })
}
