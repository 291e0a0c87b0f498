//! Human- and machine-readable campaign summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qvf_core::analysis::{histogram, summarize, Class, QvfRecord};
use serde::Serialize;

use crate::error::CampaignError;
use crate::records::RecordContext;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub circuit: String,
    pub n_qubits: usize,
    pub mode: String,
    pub records: usize,
    pub mean_qvf: f64,
    pub stddev_qvf: f64,
    pub green: usize,
    pub white: usize,
    pub red: usize,
    /// Mean QVF of the zero-shift faults.
    pub baseline: Option<f64>,
    pub improving: usize,
    pub per_qubit_mean: BTreeMap<usize, f64>,
    /// Counts over ten equal QVF bins on [0, 1].
    pub histogram: Vec<usize>,
}

pub fn build_report(ctx: &RecordContext, records: &[QvfRecord]) -> Result<Report, CampaignError> {
    let s = summarize(records).map_err(|e| CampaignError::Parse(e.to_string()))?;
    let values: Vec<f64> = records.iter().map(|r| r.qvf).collect();
    let h = histogram(&values, 10).map_err(CampaignError::internal)?;
    let class = |c| s.classes.get(&c).copied().unwrap_or(0);
    Ok(Report {
        circuit: ctx.circuit.clone(),
        n_qubits: ctx.n_qubits,
        mode: ctx.mode.as_str().into(),
        records: s.records,
        mean_qvf: s.mean,
        stddev_qvf: s.stddev,
        green: class(Class::Green),
        white: class(Class::White),
        red: class(Class::Red),
        baseline: s.baseline,
        improving: s.improving,
        per_qubit_mean: s.per_qubit_mean,
        histogram: h.counts,
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    pub fn to_text(&self) -> String {
        let pct = |n: usize| 100.0 * n as f64 / self.records as f64;
        let mut s = String::new();
        let _ = writeln!(s, "circuit     {} ({} qubits, {} faults)", self.circuit, self.n_qubits, self.mode);
        let _ = writeln!(s, "records     {}", self.records);
        let _ = writeln!(s, "mean QVF    {:.4}", self.mean_qvf);
        let _ = writeln!(s, "stddev QVF  {:.4}", self.stddev_qvf);
        let _ = writeln!(s, "green       {:>8} ({:5.1}%)", self.green, pct(self.green));
        let _ = writeln!(s, "white       {:>8} ({:5.1}%)", self.white, pct(self.white));
        let _ = writeln!(s, "red         {:>8} ({:5.1}%)", self.red, pct(self.red));
        match self.baseline {
            Some(b) => {
                let _ = writeln!(s, "baseline    {b:.4}");
                let _ = writeln!(s, "improving   {:>8} ({:5.1}%)", self.improving, pct(self.improving));
            }
            None => s.push_str("baseline    n/a (no zero-shift faults)\n"),
        }
        s.push_str("per-qubit mean QVF\n");
        for (q, m) in &self.per_qubit_mean {
            let _ = writeln!(s, "  q{q:<3} {m:.4}");
        }
        s.push_str("histogram\n");
        for (k, n) in self.histogram.iter().enumerate() {
            let _ = writeln!(s, "  [{:.1}, {:.1}{} {n}", k as f64 / 10.0, (k + 1) as f64 / 10.0, if k == 9 { "]" } else { ")" });
        }
        s
    }
}
