//! The pipeline verdict: per-check records plus a provenance block. The
//! record block serializes deterministically (sorted, no timestamps), so
//! identical config + seed reproduce it byte for byte; wall-clock data lives
//! only in provenance.

use serde::{Deserialize, Serialize};

use lte_core::report::{CheckLevel, CheckRecord};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineRecord {
    /// Check-point time (NaN-free: header records use -1).
    pub t: f64,
    /// Check-point position (header records use -1).
    pub x: f64,
    pub level: CheckLevel,
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PipelineRecord {
    pub fn from_check(t: f64, x: f64, rec: CheckRecord) -> Self {
        PipelineRecord {
            t,
            x,
            level: rec.level,
            name: rec.name,
            value: rec.value,
            expected: rec.expected,
            tolerance: rec.tolerance,
            pass: rec.pass,
            note: None,
        }
    }

    pub fn error(t: f64, x: f64, level: CheckLevel, name: impl Into<String>, msg: String) -> Self {
        PipelineRecord {
            t,
            x,
            level,
            name: name.into(),
            value: 0.0,
            expected: 1.0,
            tolerance: 0.0,
            pass: false,
            note: Some(msg),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    /// FNV-1a hash of the raw config text.
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    /// Resolved configuration echoed back (defaults filled).
    pub config_echo: crate::config::ScenarioConfig,
    /// Wall-clock stamp; excluded from determinism comparisons.
    pub timestamp_unix_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub provenance: Provenance,
    pub records: Vec<PipelineRecord>,
    pub pass: bool,
}

impl PipelineReport {
    pub fn assemble(provenance: Provenance, mut records: Vec<PipelineRecord>) -> Self {
        records.sort_by(|a, b| {
            a.t.total_cmp(&b.t)
                .then(a.x.total_cmp(&b.x))
                .then_with(|| a.name.cmp(&b.name))
        });
        let pass = records.iter().all(|r| r.pass);
        PipelineReport { provenance, records, pass }
    }

    /// The deterministic part of the report (what criterion-style
    /// reproducibility compares).
    pub fn verdict_json(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("records serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn fnv1a_hex(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}
