//! Run manifests and content-hash naming of output files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::commands::Artifact;
use crate::Command;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// The command and every parameter, defaults included.
    pub run: Command,
    pub tolerances: BTreeMap<String, f64>,
    pub seeds: Vec<u64>,
    pub threads: usize,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub csv: String,
    pub summary: Value,
}

pub struct Written {
    pub csv: PathBuf,
    pub manifest: PathBuf,
}

/// Hash of everything that determines the output: command, parameters and
/// tool version. Timestamp and thread count are left out.
fn run_id(command: &Command) -> Result<String> {
    let canonical = serde_json::to_vec(&(VERSION, command))?;
    let digest = Sha256::digest(&canonical);
    Ok(hex::encode(&digest[..8]))
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Threshold(_) => "threshold",
        Command::Exit(_) => "exit",
        Command::ForwardDe(_) => "forward-de",
        Command::Constellation(_) => "constellation",
        Command::Simulate(_) => "simulate",
        Command::Bounds(_) => "bounds",
        Command::Replay { .. } => "replay",
    }
}

pub fn write(dir: &Path, command: &Command, artifact: &Artifact, threads: usize) -> Result<Written> {
    let stem = format!("{}-{}", command_name(command), run_id(command)?);
    let csv = dir.join(format!("{stem}.csv"));
    std::fs::write(&csv, &artifact.csv).with_context(|| format!("writing {}", csv.display()))?;
    for (ext, bytes) in &artifact.extra {
        let path = dir.join(format!("{stem}.{ext}"));
        std::fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
    }
    let manifest = RunManifest {
        tool: "scdec".into(),
        version: VERSION.into(),
        run: command.clone(),
        tolerances: artifact.tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        seeds: artifact.seeds.clone(),
        threads,
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        csv: format!("{stem}.csv"),
        summary: artifact.summary.clone(),
    };
    let path = dir.join(format!("{stem}.json"));
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(Written { csv, manifest: path })
}

pub fn load_command(path: &Path) -> Result<Command> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).with_context(|| format!("parsing manifest {}", path.display()))?;
    Ok(manifest.run)
}
