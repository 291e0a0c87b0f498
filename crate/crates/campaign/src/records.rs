//! CSV record files: one row per executed fault, in plan order.

use std::io::{Read, Write};

use qvf_core::analysis::QvfRecord;
use qvf_core::inject::{FaultSite, FaultSpec, Mode, PhaseShift, SecondFault};
use serde::Deserialize;

use crate::error::CampaignError;

pub const COLUMNS: [&str; 16] = [
    "circuit",
    "n_qubits",
    "mode",
    "site_index",
    "logical_gate_index",
    "qubit",
    "theta0_rad",
    "phi0_rad",
    "qubit2",
    "theta1_rad",
    "phi1_rad",
    "qvf",
    "p_correct",
    "p_wrong_max",
    "shots",
    "seed",
];

/// Formats `x` with at most `digits` significant digits, trailing zeros
/// trimmed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.truncate(s.trim_end_matches('0').trim_end_matches('.').len());
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// Campaign-wide columns repeated on every row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordContext {
    pub circuit: String,
    pub n_qubits: usize,
    pub mode: Mode,
}

pub fn write_records<W: Write>(out: W, ctx: &RecordContext, records: &[QvfRecord]) -> Result<(), CampaignError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS)?;
    let angle = |x: f64| format_significant(x, 12);
    for r in records {
        let (qubit2, theta1, phi1) = match &r.spec.second {
            Some(s) => (s.qubit.to_string(), angle(s.shift.theta), angle(s.shift.phi)),
            None => (String::new(), String::new(), String::new()),
        };
        w.write_record([
            ctx.circuit.clone(),
            ctx.n_qubits.to_string(),
            ctx.mode.as_str().to_string(),
            r.spec.site.op_index.to_string(),
            r.logical_gate_index.map(|i| i.to_string()).unwrap_or_default(),
            r.spec.site.qubit.to_string(),
            angle(r.spec.shift.theta),
            angle(r.spec.shift.phi),
            qubit2,
            theta1,
            phi1,
            r.qvf.to_string(),
            r.p_correct.to_string(),
            r.p_wrong_max.to_string(),
            r.shots.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Deserialize)]
struct Row {
    circuit: String,
    n_qubits: usize,
    mode: String,
    site_index: usize,
    logical_gate_index: Option<usize>,
    qubit: usize,
    theta0_rad: f64,
    phi0_rad: f64,
    qubit2: Option<usize>,
    theta1_rad: Option<f64>,
    phi1_rad: Option<f64>,
    qvf: f64,
    p_correct: f64,
    p_wrong_max: f64,
    shots: u64,
    seed: u64,
}

/// Snaps a parsed shift back onto the 15° grid when it lies within
/// tolerance, undoing the 12-digit rounding.
fn shift(theta: f64, phi: f64) -> PhaseShift {
    let raw = PhaseShift { theta, phi };
    raw.grid_index().map_or(raw, |(t, p)| PhaseShift::on_grid(t, p))
}

/// Parses a record file. `plan_index` is the row number.
pub fn read_records<R: Read>(input: R) -> Result<(RecordContext, Vec<QvfRecord>), CampaignError> {
    let mut rd = csv::ReaderBuilder::new().from_reader(input);
    let headers = rd.headers()?.clone();
    if headers.iter().ne(COLUMNS) {
        return Err(CampaignError::Parse(format!("unexpected CSV header: {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut ctx: Option<RecordContext> = None;
    let mut records = Vec::new();
    for (plan_index, row) in rd.deserialize::<Row>().enumerate() {
        let row = row?;
        let mode = match row.mode.as_str() {
            "single" => Mode::Single,
            "double" => Mode::Double,
            m => return Err(CampaignError::Parse(format!("row {}: unknown mode {m:?}", plan_index + 1))),
        };
        let here = RecordContext { circuit: row.circuit, n_qubits: row.n_qubits, mode };
        match &ctx {
            Some(c) if *c != here => {
                return Err(CampaignError::Parse(format!("row {}: mixes campaigns", plan_index + 1)));
            }
            Some(_) => {}
            None => ctx = Some(here),
        }
        let second = match (row.qubit2, row.theta1_rad, row.phi1_rad) {
            (Some(q), Some(t), Some(p)) => Some(SecondFault { qubit: q, shift: shift(t, p) }),
            (None, None, None) => None,
            _ => return Err(CampaignError::Parse(format!("row {}: incomplete second fault", plan_index + 1))),
        };
        records.push(QvfRecord {
            plan_index,
            spec: FaultSpec {
                site: FaultSite { op_index: row.site_index, qubit: row.qubit },
                shift: shift(row.theta0_rad, row.phi0_rad),
                second,
            },
            logical_gate_index: row.logical_gate_index,
            qvf: row.qvf,
            p_correct: row.p_correct,
            p_wrong_max: row.p_wrong_max,
            shots: row.shots,
            seed: row.seed,
        });
    }
    let ctx = ctx.ok_or_else(|| CampaignError::Parse("record file has no rows".into()))?;
    Ok((ctx, records))
}
