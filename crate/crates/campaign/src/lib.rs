//! File formats, configuration, parallel campaign runner and CLI on top of
//! `qvf-core`.

pub mod cli;
pub mod config;
mod error;
pub mod qasm;
pub mod records;
pub mod report;
pub mod runner;
pub mod svg;

pub use error::CampaignError;
