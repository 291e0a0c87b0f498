use crate::qasm::QasmError;

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("QASM error: {0}")]
    Qasm(#[from] QasmError),
    #[error("plan has {size} faults, above the limit of {limit}; raise max_plan_size or pass --force")]
    Guardrail { size: usize, limit: usize },
    #[error("internal error: {0}")]
    Internal(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl CampaignError {
    /// Process exit status for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            CampaignError::Config(_) => 2,
            CampaignError::Parse(_) | CampaignError::Qasm(_) => 3,
            CampaignError::Guardrail { .. } => 4,
            CampaignError::Internal(_) | CampaignError::Io(_) => 5,
        }
    }

    pub(crate) fn config(e: impl std::fmt::Display) -> Self {
        CampaignError::Config(e.to_string())
    }

    pub(crate) fn internal(e: impl std::fmt::Display) -> Self {
        CampaignError::Internal(e.to_string())
    }
}

impl From<csv::Error> for CampaignError {
    fn from(e: csv::Error) -> Self {
        if let csv::ErrorKind::Io(_) = e.kind() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => CampaignError::Io(io),
                _ => unreachable!(),
            }
        } else {
            CampaignError::Parse(e.to_string())
        }
    }
}
