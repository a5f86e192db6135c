//! Run manifests written next to every artifact.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::linalg::FieldChoice;

/// How replication seeds are derived from the root seed.
pub const SEED_DERIVATION: &str =
    "ChaCha8(root ^ purpose) with stream = replication index; purposes: faces, noise, shadow, order";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub seed: u64,
    pub version: String,
    pub field: String,
    pub started_unix: u64,
    pub wall_clock_secs: f64,
    pub seed_derivation: &'static str,
    /// Replication indices combined with `seed`.
    pub replications: Vec<u64>,
}

pub fn code_version() -> String {
    let git = env!("MSALAB_GIT_DESCRIBE");
    if git.is_empty() {
        env!("CARGO_PKG_VERSION").to_string()
    } else {
        format!("{} ({git})", env!("CARGO_PKG_VERSION"))
    }
}

/// Clock started when a command begins; `finish` fills in the manifest.
#[derive(Debug)]
pub struct ManifestBuilder {
    command: Vec<String>,
    seed: u64,
    field: FieldChoice,
    started: Instant,
    started_unix: u64,
}

impl ManifestBuilder {
    pub fn start(command: Vec<String>, seed: u64, field: FieldChoice) -> Self {
        Self {
            command,
            seed,
            field,
            started: Instant::now(),
            started_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    pub fn finish(&self, replications: u64) -> RunManifest {
        RunManifest {
            command: self.command.clone(),
            seed: self.seed,
            version: code_version(),
            field: self.field.to_string(),
            started_unix: self.started_unix,
            wall_clock_secs: self.started.elapsed().as_secs_f64(),
            seed_derivation: SEED_DERIVATION,
            replications: (0..replications).collect(),
        }
    }
}
