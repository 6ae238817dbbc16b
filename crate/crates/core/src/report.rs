//! Machine-readable check records shared by the verification surfaces.

use serde::{Deserialize, Serialize};

/// Which description level a check belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckLevel {
    Macro,
    Meso,
    Micro,
    Zeroth,
}

impl std::fmt::Display for CheckLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CheckLevel::Macro => "macro",
            CheckLevel::Meso => "meso",
            CheckLevel::Micro => "micro",
            CheckLevel::Zeroth => "zeroth",
        };
        f.write_str(s)
    }
}

/// One verdict: a measured value against an expectation at a tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub level: CheckLevel,
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// Pass iff |value - expected| <= tolerance.
    pub fn absolute(level: CheckLevel, name: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (value - expected).abs() <= tolerance && value.is_finite();
        CheckRecord { level, name: name.into(), value, expected, tolerance, pass }
    }

    /// Pass iff value <= bound (expected carries the bound).
    pub fn upper_bound(level: CheckLevel, name: impl Into<String>, value: f64, bound: f64) -> Self {
        CheckRecord {
            level,
            name: name.into(),
            value,
            expected: bound,
            tolerance: bound,
            pass: value <= bound && value.is_finite(),
        }
    }

    /// Record a boolean outcome directly.
    pub fn flag(level: CheckLevel, name: impl Into<String>, pass: bool) -> Self {
        CheckRecord {
            level,
            name: name.into(),
            value: if pass { 1.0 } else { 0.0 },
            expected: 1.0,
            tolerance: 0.0,
            pass,
        }
    }
}
