use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use qindel::feasibility::FeasibilityOptions;
use qindel::Tolerance;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ToleranceSettings {
    pub eq_tol: f64,
    pub psd_tol: f64,
    pub eig_tol: f64,
    pub feas_tol: f64,
    pub gap_tol: f64,
}

impl ToleranceSettings {
    pub fn new(tol: &Tolerance, feas: &FeasibilityOptions) -> Self {
        ToleranceSettings {
            eq_tol: tol.eq_tol,
            psd_tol: tol.psd_tol,
            eig_tol: tol.eig_tol,
            feas_tol: feas.feas_tol,
            gap_tol: feas.gap_tol,
        }
    }
}

/// Envelope printed by every command.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    /// SHA-256 over the resolved inputs (file bytes or builtin names).
    pub inputs_digest: String,
    pub results: Value,
    pub elapsed_ms: u64,
    pub tolerances: ToleranceSettings,
}

pub fn digest(parts: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
