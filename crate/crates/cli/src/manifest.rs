use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Written next to every output artifact. `args` is the fully resolved
/// argument list (seed included), so `amplisat replay` reproduces the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    /// sha256 of each input file, keyed by path as given.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub complete: bool,
}

impl RunManifest {
    pub fn new(
        command: &str,
        args: Vec<String>,
        params: serde_json::Value,
        seed: Option<u64>,
    ) -> Self {
        RunManifest {
            command: command.to_string(),
            args,
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            complete: false,
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        self.inputs.insert(
            path.display().to_string(),
            hex::encode(Sha256::digest(&bytes)),
        );
        Ok(())
    }

    pub fn add_output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// `<prefix>.manifest.json`
pub fn manifest_path(prefix: &Path) -> PathBuf {
    with_suffix(prefix, ".manifest.json")
}

/// Appends `suffix` to the final path component.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_os_string();
    name.push(suffix);
    PathBuf::from(name)
}

/// Original arguments with `--seed <seed>` appended when it was missing.
pub fn resolved_args(raw: &[String], seed: Option<u64>) -> Vec<String> {
    let mut args = raw.to_vec();
    let has_seed = raw
        .iter()
        .any(|a| a == "--seed" || a.starts_with("--seed="));
    if let (false, Some(seed)) = (has_seed, seed) {
        args.push("--seed".into());
        args.push(seed.to_string());
    }
    args
}
