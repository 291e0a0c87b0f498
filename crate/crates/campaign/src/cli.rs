//! The `qvf` command line.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qvf_core::analysis::{aggregate_heatmap, HeatmapFilter};
use qvf_core::inject::{enumerate_sites, PhaseShift};
use qvf_core::transpile::transpile;

use crate::config::CampaignConfig;
use crate::error::CampaignError;
use crate::qasm::{build_circuit, circuits_match, emit_qasm, parse_document, parse_qasm};
use crate::records::read_records;
use crate::report::build_report;
use crate::runner::{gold_json, prepare, run_campaign, RunOptions};
use crate::svg::{render_heatmap, SvgOptions};

#[derive(Debug, Parser)]
#[command(name = "qvf", version, about = "Transient-fault injection campaigns on quantum circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// Campaign file (.toml or .json).
    #[arg(long)]
    pub config: PathBuf,
    /// Override the base seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the grid step in degrees.
    #[arg(long = "grid-step")]
    pub grid_step: Option<u32>,
}

impl ConfigArgs {
    fn load(&self) -> Result<CampaignConfig, CampaignError> {
        let mut cfg = CampaignConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(g) = self.grid_step {
            cfg.grid_step_deg = g;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a campaign and write records.csv, gold.json and manifest.json.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output directory (defaults to the configured out_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
        /// Run even when the plan exceeds max_plan_size.
        #[arg(long)]
        force: bool,
    },
    /// Render a heatmap SVG from a record file.
    Heatmap {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Only faults whose first injection hits this logical qubit.
        #[arg(long, conflicts_with = "detail")]
        qubit: Option<usize>,
        /// Double-fault detail for a first shift given as `THETA,PHI` in degrees.
        #[arg(long)]
        detail: Option<String>,
        /// Outline the T, S, Z and X cells.
        #[arg(long)]
        markers: bool,
        #[arg(long)]
        title: Option<String>,
    },
    /// Summarize a record file.
    Report {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Print the fault-free output distribution as JSON.
    Gold {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Print the transpiled circuit, layouts and fault-site count.
    TranspileDump {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Parse, re-emit and re-parse an OpenQASM 2.0 file.
    QasmRoundtrip {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_detail(text: &str) -> Result<PhaseShift, CampaignError> {
    let bad = || CampaignError::Config(format!("--detail expects THETA,PHI in multiples of 15 degrees, got {text:?}"));
    let (t, p) = text.split_once(',').ok_or_else(bad)?;
    let t: usize = t.trim().parse().map_err(|_| bad())?;
    let p: usize = p.trim().parse().map_err(|_| bad())?;
    if !t.is_multiple_of(15) || !p.is_multiple_of(15) || t > 180 || p >= 360 {
        return Err(bad());
    }
    Ok(PhaseShift::on_grid(t / 15, p / 15))
}

fn read_text(path: &PathBuf) -> Result<String, CampaignError> {
    fs::read_to_string(path).map_err(|e| CampaignError::Parse(format!("cannot read {}: {e}", path.display())))
}

/// Executes one command, returning what to print on stdout.
pub fn execute(cli: Cli) -> Result<String, CampaignError> {
    match cli.command {
        Command::Run { config, out, workers, force } => {
            let cfg = config.load()?;
            let report = run_campaign(&cfg, out.as_deref(), RunOptions { workers, force })?;
            Ok(format!("{} faults evaluated; results in {}\n", report.plan_size, report.out_dir.display()))
        }
        Command::Heatmap { records, out, qubit, detail, markers, title } => {
            let (ctx, recs) = read_records(read_text(&records)?.as_bytes())?;
            let (filter, label) = match (qubit, &detail) {
                (Some(q), _) => (HeatmapFilter::Qubit(q), format!("qubit {q}")),
                (None, Some(d)) => (HeatmapFilter::DoubleDetail(parse_detail(d)?), format!("second fault after first ({d})°")),
                (None, None) => (HeatmapFilter::All, "all faults".to_string()),
            };
            let map = aggregate_heatmap(&recs, filter).map_err(|e| CampaignError::Parse(e.to_string()))?;
            if map.populated() == 0 {
                return Err(CampaignError::Config(format!("selection {label} matches no records")));
            }
            let title = title.unwrap_or_else(|| format!("{}: {label}", ctx.circuit));
            fs::write(&out, render_heatmap(&map, &SvgOptions { title, markers }))?;
            Ok(format!("wrote {}\n", out.display()))
        }
        Command::Report { records, json } => {
            let (ctx, recs) = read_records(read_text(&records)?.as_bytes())?;
            let report = build_report(&ctx, &recs)?;
            Ok(if json { report.to_json() } else { report.to_text() })
        }
        Command::Gold { config } => {
            let cfg = config.load()?;
            Ok(gold_json(&prepare(&cfg, true)?))
        }
        Command::TranspileDump { config } => {
            let cfg = config.load()?;
            let circuit = cfg.build_circuit()?;
            let t = transpile(&circuit, &cfg.coupling_map()?).map_err(CampaignError::config)?;
            let mut s = format!(
                "// {} on {}: {} logical qubits, initial layout {:?}, final layout {:?}, {} routing CX, {} fault sites\n",
                circuit.name(),
                t.coupling.name(),
                t.n_logical,
                t.initial_layout.logical_to_physical(),
                t.final_layout.logical_to_physical(),
                t.routing_cx_count(),
                enumerate_sites(&t).len()
            );
            s.push_str(&emit_qasm(&t.circuit));
            Ok(s)
        }
        Command::QasmRoundtrip { input, out } => {
            let text = read_text(&input)?;
            let original = build_circuit(&parse_document(&text)?, "qasm")?;
            let emitted = emit_qasm(&original);
            let again = parse_qasm(&emitted)?;
            if !circuits_match(&original, &again, 1e-9) {
                return Err(CampaignError::Internal("re-parsed circuit differs from the original".into()));
            }
            match out {
                Some(path) => {
                    fs::write(&path, &emitted)?;
                    Ok(format!("round trip ok; wrote {}\n", path.display()))
                }
                None => Ok(emitted),
            }
        }
    }
}
