use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

/// Provenance block embedded in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub config: serde_json::Value,
    pub artifact_version: &'static str,
    pub seed: Option<u64>,
    pub timestamps: Option<Timestamps>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Timestamps {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

impl RunManifest {
    pub fn new(command: &'static str, config: serde_json::Value, seed: Option<u64>) -> Self {
        Self { command, config, artifact_version: env!("CARGO_PKG_VERSION"), seed, timestamps: None, outputs: Vec::new() }
    }

    pub fn stamp(&mut self, started: Option<SystemTime>) {
        if let Some(started) = started {
            self.timestamps = Some(Timestamps { started_unix_ms: unix_ms(started), finished_unix_ms: unix_ms(SystemTime::now()) });
        }
    }
}

fn unix_ms(t: SystemTime) -> u128 {
    t.duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// Top-level JSON layout shared by all reports.
#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub schema_version: u32,
    pub manifest: &'a RunManifest,
    #[serde(rename = "report")]
    pub body: &'a T,
}
