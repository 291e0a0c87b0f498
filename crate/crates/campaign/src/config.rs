//! Campaign configuration, read from TOML or JSON by file extension.

use std::path::{Path, PathBuf};

use qvf_core::circuit::{make_bernstein_vazirani, make_deutsch_jozsa, make_qft, Circuit, DjOracle};
use qvf_core::inject::{AngleGrid, Execution, Mode};
use qvf_core::sim::NoiseModel;
use qvf_core::transpile::{builtin_topology, CouplingMap};
use serde::{Deserialize, Serialize};

use crate::error::CampaignError;
use crate::qasm;

/// Exactly one of `benchmark` or `qasm` must be set.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSource {
    /// `bv`, `dj` or `qft`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<String>,
    /// Data-qubit count (bv, dj) or register width (qft).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<String>,
    /// `constant-zero`, `constant-one` or `balanced`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qasm: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    #[default]
    Single,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    #[default]
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub enabled: bool,
    pub p1: f64,
    pub p2: f64,
    pub readout_flip: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        let d = NoiseModel::DEFAULT_NISQ;
        NoiseConfig { enabled: true, p1: d.p1, p2: d.p2, readout_flip: d.readout_flip }
    }
}

fn default_topology() -> String {
    "jakarta".into()
}
fn default_shots() -> u64 {
    qvf_core::sim::DEFAULT_SHOTS
}
fn default_grid() -> u32 {
    15
}
fn default_limit() -> usize {
    1_000_000
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub circuit: CircuitSource,
    /// Built-in topology name, or path to a JSON coupling map.
    #[serde(default = "default_topology")]
    pub topology: String,
    #[serde(default)]
    pub mode: ModeName,
    #[serde(default)]
    pub backend: Backend,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_grid")]
    pub grid_step_deg: u32,
    #[serde(default = "default_limit")]
    pub max_plan_size: usize,
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
    /// Directory relative paths are resolved against; the config file's.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// On-disk coupling map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyFile {
    pub name: String,
    pub n_physical: usize,
    pub edges: Vec<(usize, usize)>,
}

impl CampaignConfig {
    /// Minimal config for a circuit source; every other field at its default.
    pub fn for_source(circuit: CircuitSource) -> Self {
        CampaignConfig {
            circuit,
            topology: default_topology(),
            mode: ModeName::default(),
            backend: Backend::default(),
            shots: default_shots(),
            noise: NoiseConfig::default(),
            seed: 0,
            grid_step_deg: default_grid(),
            max_plan_size: default_limit(),
            out_dir: default_out(),
            base_dir: PathBuf::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CampaignError> {
        toml::from_str(text).map_err(CampaignError::config)
    }

    pub fn from_json(text: &str) -> Result<Self, CampaignError> {
        serde_json::from_str(text).map_err(CampaignError::config)
    }

    /// Loads `.toml` or `.json`; relative paths inside resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, CampaignError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CampaignError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml(&text)?,
            Some("json") => Self::from_json(&text)?,
            _ => return Err(CampaignError::Config(format!("{}: expected a .toml or .json file", path.display()))),
        };
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        let c = &self.circuit;
        match (&c.benchmark, &c.qasm) {
            (Some(_), Some(_)) => return Err(CampaignError::Config("set either circuit.benchmark or circuit.qasm, not both".into())),
            (None, None) => return Err(CampaignError::Config("circuit.benchmark or circuit.qasm is required".into())),
            _ => {}
        }
        if self.backend == Backend::Sampled && self.shots == 0 {
            return Err(CampaignError::Config("shots must be at least 1".into()));
        }
        if self.backend == Backend::Exact && self.noise.enabled {
            return Err(CampaignError::Config("exact backend is noiseless; set noise.enabled = false".into()));
        }
        self.noise_model().validate().map_err(CampaignError::config)?;
        self.grid()?;
        Ok(())
    }

    pub fn mode(&self) -> Mode {
        match self.mode {
            ModeName::Single => Mode::Single,
            ModeName::Double => Mode::Double,
        }
    }

    pub fn grid(&self) -> Result<AngleGrid, CampaignError> {
        AngleGrid::from_degrees(self.grid_step_deg).map_err(CampaignError::config)
    }

    pub fn noise_model(&self) -> NoiseModel {
        NoiseModel { p1: self.noise.p1, p2: self.noise.p2, readout_flip: self.noise.readout_flip, enabled: self.noise.enabled }
    }

    pub fn execution(&self) -> Execution {
        match self.backend {
            Backend::Exact => Execution::Exact,
            Backend::Sampled => Execution::Sampled { shots: self.shots, noise: self.noise_model() },
        }
    }

    /// Builds the logical circuit. QASM read failures exit as parse errors.
    pub fn build_circuit(&self) -> Result<Circuit, CampaignError> {
        let c = &self.circuit;
        if let Some(path) = &c.qasm {
            let full = self.resolve(path);
            let text = std::fs::read_to_string(&full)
                .map_err(|e| CampaignError::Parse(format!("cannot read {}: {e}", full.display())))?;
            let doc = qasm::parse_document(&text)?;
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("qasm");
            return Ok(qasm::build_circuit(&doc, name)?);
        }
        let bench = c.benchmark.as_deref().unwrap_or_default();
        let need = |field: &str| CampaignError::Config(format!("benchmark {bench:?} needs circuit.{field}"));
        let n = c.n.ok_or_else(|| need("n"))?;
        match bench {
            "bv" => make_bernstein_vazirani(n, c.hidden.as_deref().ok_or_else(|| need("hidden"))?),
            "dj" => {
                let oracle = match c.oracle.as_deref().ok_or_else(|| need("oracle"))? {
                    "constant-zero" => DjOracle::ConstantZero,
                    "constant-one" => DjOracle::ConstantOne,
                    "balanced" => DjOracle::Balanced(c.mask.clone().ok_or_else(|| need("mask"))?),
                    o => return Err(CampaignError::Config(format!("unknown DJ oracle {o:?}"))),
                };
                make_deutsch_jozsa(n, &oracle)
            }
            "qft" => make_qft(n, c.value.unwrap_or(0)),
            other => return Err(CampaignError::Config(format!("unknown benchmark {other:?}"))),
        }
        .map_err(CampaignError::config)
    }

    pub fn coupling_map(&self) -> Result<CouplingMap, CampaignError> {
        if let Ok(map) = builtin_topology(&self.topology) {
            return Ok(map);
        }
        let path = self.resolve(Path::new(&self.topology));
        if !path.extension().is_some_and(|e| e == "json") {
            return Err(CampaignError::Config(format!("unknown topology {:?}", self.topology)));
        }
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CampaignError::Config(format!("cannot read {}: {e}", path.display())))?;
        let file: TopologyFile = serde_json::from_str(&text).map_err(CampaignError::config)?;
        CouplingMap::new(file.name, file.n_physical, &file.edges).map_err(CampaignError::config)
    }
}
