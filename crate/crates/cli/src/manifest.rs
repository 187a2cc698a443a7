//! Run manifests: the resolved config, the inputs and outputs with their
//! digests, and one hash over all output bytes.

use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::commands::Failure;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESOLVED_CONFIG_FILE: &str = "config.resolved.toml";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Collects output files as they are written.
pub struct RunOutputs<'a> {
    dir: &'a Path,
    files: Vec<(String, String)>,
    inputs: Vec<(String, String)>,
}

impl<'a> RunOutputs<'a> {
    pub fn new(dir: &'a Path) -> Self {
        RunOutputs { dir, files: Vec::new(), inputs: Vec::new() }
    }

    pub fn write(&mut self, name: &str, bytes: impl AsRef<[u8]>) -> Result<(), Failure> {
        let bytes = bytes.as_ref();
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
        self.files.push((name.to_string(), sha256_hex(bytes)));
        Ok(())
    }

    pub fn input(&mut self, path: &Path) -> Result<(), Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
        self.inputs.push((path.display().to_string(), sha256_hex(&bytes)));
        Ok(())
    }

    /// Write the resolved config and the manifest; call last.
    pub fn finish(mut self, command: &str, config_toml: &str) -> Result<(), Failure> {
        self.write(RESOLVED_CONFIG_FILE, config_toml)?;
        let mut all = Sha256::new();
        for (name, digest) in &self.files {
            all.update(name.as_bytes());
            all.update(digest.as_bytes());
        }
        let content_hash: String = all.finalize().iter().map(|b| format!("{b:02x}")).collect();
        let entry = |(p, h): &(String, String)| json!({ "path": p, "sha256": h });
        let manifest = json!({
            "tool": "memassoc",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config_toml,
            "inputs": self.inputs.iter().map(entry).collect::<Vec<_>>(),
            "outputs": self.files.iter().map(entry).collect::<Vec<_>>(),
            "content_hash": content_hash,
        });
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        let path = self.dir.join(MANIFEST_FILE);
        std::fs::write(&path, text).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
    }
}

/// The config snapshot stored in a manifest.
pub fn config_from_manifest(text: &str) -> Option<String> {
    let v: Value = serde_json::from_str(text).ok()?;
    v.get("config")?.as_str().map(str::to_string)
}
