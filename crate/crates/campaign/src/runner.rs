//! Campaign execution: transpile, gold run, plan, parallel evaluation and
//! output files.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use qvf_core::analysis::{evaluate, gold_result, GoldResult, QvfRecord};
use qvf_core::inject::{enumerate_sites, plan_campaign, plan_size, CampaignPlan};
use qvf_core::transpile::{transpile, TranspiledCircuit};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::CampaignConfig;
use crate::error::CampaignError;
use crate::records::{write_records, RecordContext};

pub const RECORDS_FILE: &str = "records.csv";
pub const GOLD_FILE: &str = "gold.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses all cores.
    pub workers: Option<usize>,
    /// Run even when the plan exceeds `max_plan_size`.
    pub force: bool,
}

/// Everything needed to evaluate a campaign, before any fault is run.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub transpiled: TranspiledCircuit,
    pub gold: GoldResult,
    pub plan: CampaignPlan,
}

impl Prepared {
    pub fn context(&self) -> RecordContext {
        RecordContext {
            circuit: self.plan.circuit_id.clone(),
            n_qubits: self.transpiled.n_logical,
            mode: self.plan.mode,
        }
    }
}

pub fn prepare(cfg: &CampaignConfig, force: bool) -> Result<Prepared, CampaignError> {
    let circuit = cfg.build_circuit()?;
    let coupling = cfg.coupling_map()?;
    let transpiled = transpile(&circuit, &coupling).map_err(CampaignError::config)?;
    let grid = cfg.grid()?;
    let size = plan_size(&transpiled, cfg.mode(), &grid).map_err(CampaignError::config)?;
    if size > cfg.max_plan_size && !force {
        return Err(CampaignError::Guardrail { size, limit: cfg.max_plan_size });
    }
    let plan = plan_campaign(&transpiled, cfg.mode(), grid, cfg.execution(), cfg.seed).map_err(CampaignError::config)?;
    let gold = gold_result(&transpiled).map_err(CampaignError::internal)?;
    Ok(Prepared { transpiled, gold, plan })
}

/// Evaluates every fault of the plan; records come back in plan order
/// whatever the worker count.
pub fn execute(p: &Prepared, workers: Option<usize>) -> Result<Vec<QvfRecord>, CampaignError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(CampaignError::internal)?;
    pool.install(|| {
        (0..p.plan.len())
            .into_par_iter()
            .map(|i| evaluate(&p.transpiled, &p.gold, &p.plan, i))
            .collect::<Result<Vec<_>, _>>()
    })
    .map_err(CampaignError::internal)
}

#[derive(Serialize)]
struct GoldFile<'a> {
    circuit: &'a str,
    n_qubits: usize,
    correct_states: Vec<&'a str>,
    distribution: BTreeMap<&'a str, f64>,
}

pub fn gold_json(p: &Prepared) -> String {
    let file = GoldFile {
        circuit: &p.plan.circuit_id,
        n_qubits: p.transpiled.n_logical,
        correct_states: p.gold.correct_states.iter().map(String::as_str).collect(),
        distribution: p.gold.distribution.frequencies().into_iter().collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable") + "\n"
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a CampaignConfig,
    circuit: &'a str,
    n_qubits: usize,
    topology: &'a str,
    initial_layout: &'a [usize],
    final_layout: &'a [usize],
    routing_cx: usize,
    sites: usize,
    plan_size: usize,
    started_unix: u64,
    wall_clock_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub plan_size: usize,
    pub records: Vec<QvfRecord>,
}

/// Full run: writes `records.csv`, `gold.json` and `manifest.json` into
/// `out_dir` (or the configured directory).
pub fn run_campaign(cfg: &CampaignConfig, out_dir: Option<&Path>, opts: RunOptions) -> Result<RunReport, CampaignError> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let prepared = prepare(cfg, opts.force)?;
    let records = execute(&prepared, opts.workers)?;
    let out_dir = out_dir.map_or_else(|| cfg.resolve(&cfg.out_dir), Path::to_path_buf);
    fs::create_dir_all(&out_dir)?;
    write_records(BufWriter::new(File::create(out_dir.join(RECORDS_FILE))?), &prepared.context(), &records)?;
    fs::write(out_dir.join(GOLD_FILE), gold_json(&prepared))?;
    let t = &prepared.transpiled;
    let manifest = Manifest {
        config: cfg,
        circuit: &prepared.plan.circuit_id,
        n_qubits: t.n_logical,
        topology: t.coupling.name(),
        initial_layout: t.initial_layout.logical_to_physical(),
        final_layout: t.final_layout.logical_to_physical(),
        routing_cx: t.routing_cx_count(),
        sites: enumerate_sites(t).len(),
        plan_size: prepared.plan.len(),
        started_unix: started,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
    };
    fs::write(out_dir.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest).expect("serializable") + "\n")?;
    Ok(RunReport { out_dir, plan_size: prepared.plan.len(), records })
}
