//! Structured results of named identity checks.

use serde::{Deserialize, Serialize};

/// Record of one named identity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub params_digest: String,
    pub max_defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: f64,
}

impl VerificationReport {
    pub fn new(check_name: &str, params_digest: String, max_defect: f64, tolerance: f64, runtime_ms: f64) -> Self {
        Self {
            check_name: check_name.to_string(),
            params_digest,
            max_defect,
            tolerance,
            pass: max_defect < tolerance,
            runtime_ms,
        }
    }
}
