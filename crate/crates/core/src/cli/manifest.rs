//! `manifest.json`: what a run read, with which settings, and what it wrote.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::DataArgs;
use crate::error::{Error, Result};
use crate::mobility::EventKind;
use crate::model::{AssessmentConfig, Dataset};
use crate::pipeline::Analysis;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunCounts {
    pub universities: usize,
    pub eligible_universities: usize,
    pub researchers: usize,
    pub evaluated_researchers: usize,
    pub publications: usize,
    pub events: BTreeMap<EventKind, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// RFC 3339; taken from `SOURCE_DATE_EPOCH` when set.
    pub timestamp: String,
    /// SHA-256 of the effective config as canonical JSON.
    pub config_sha256: String,
    pub config: AssessmentConfig,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub counts: RunCounts,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

fn timestamp() -> String {
    let at = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    at.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

impl RunManifest {
    pub(super) fn build(
        data: &DataArgs,
        config: &AssessmentConfig,
        dataset: &Dataset,
        analysis: &Analysis,
        out: &Path,
        outputs: &[&str],
    ) -> Result<Self> {
        let mut inputs = BTreeMap::new();
        inputs.insert("roster".to_string(), file_digest(&data.roster)?);
        inputs.insert("publications".to_string(), file_digest(&data.pubs)?);
        inputs.insert("authorships".to_string(), file_digest(&data.authors)?);
        if let Some(s) = &data.salaries {
            inputs.insert("salaries".to_string(), file_digest(s)?);
        }
        let mut written = BTreeMap::new();
        for name in outputs {
            written.insert(name.to_string(), file_digest(&out.join(name))?);
        }
        let mut events: BTreeMap<EventKind, usize> = BTreeMap::new();
        for e in &analysis.events {
            *events.entry(e.kind).or_default() += 1;
        }
        let config_json = serde_json::to_vec(config)?;
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(),
            config_sha256: sha256_hex(&config_json),
            config: config.clone(),
            inputs,
            outputs: written,
            counts: RunCounts {
                universities: dataset.universities().len(),
                eligible_universities: analysis.effectiveness.rows.len(),
                researchers: dataset.n_researchers(),
                evaluated_researchers: analysis.productivity.records.len(),
                publications: dataset.publications().len(),
                events,
            },
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
