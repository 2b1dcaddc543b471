//! Machine-readable run reports emitted by the command-line tools.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Ok,
    Error,
}

/// Report of one subcommand invocation. Metrics are deterministic for fixed
/// inputs and seed, except `runtime_seconds`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// file name -> FNV-1a digest of its bytes
    pub inputs: BTreeMap<String, String>,
    pub metrics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            metrics: BTreeMap::new(),
            warnings: Vec::new(),
            status: RunStatus::Ok,
            error: None,
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        // JSON has no Infinity/NaN; clamp and note it
        let stored = if value.is_finite() {
            value
        } else {
            self.warnings
                .push(format!("metric {name} was non-finite ({value}); clamped"));
            if value.is_nan() {
                0.0
            } else {
                f64::MAX.copysign(value)
            }
        };
        self.metrics.insert(name.to_string(), stored);
        self
    }

    pub fn warn(&mut self, message: impl Into<String>) -> &mut Self {
        self.warnings.push(message.into());
        self
    }

    pub fn input_digest(&mut self, name: &str, bytes: &[u8]) -> &mut Self {
        self.inputs
            .insert(name.to_string(), format!("{:016x}", fnv1a(bytes)));
        self
    }

    pub fn fail(&mut self, message: impl Into<String>) -> &mut Self {
        self.status = RunStatus::Error;
        self.error = Some(message.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command: {}\n", self.command));
        for (name, digest) in &self.inputs {
            out.push_str(&format!("input:   {name} ({digest})\n"));
        }
        for (name, value) in &self.metrics {
            out.push_str(&format!("{name}: {value:.12e}\n"));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        match self.status {
            RunStatus::Ok => out.push_str("status: ok\n"),
            RunStatus::Error => {
                out.push_str(&format!(
                    "status: error ({})\n",
                    self.error.as_deref().unwrap_or("unspecified")
                ));
            }
        }
        out
    }
}

/// FNV-1a, 64-bit; stable across platforms and builds.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325_u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100_0000_01b3);
    }
    hash
}
