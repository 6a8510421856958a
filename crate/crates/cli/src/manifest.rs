//! Run manifest written next to every set of outputs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub parameters: Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<InputHash>,
    /// File names relative to the manifest's directory, sorted.
    pub outputs: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl RunManifest {
    pub fn new(subcommand: &str, parameters: &impl Serialize) -> CliResult<Self> {
        Ok(RunManifest {
            tool: "muxov".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            parameters: serde_json::to_value(parameters)?,
            seeds: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn add_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(InputHash {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    /// Writes `contents` into `dir/name` and records it.
    pub fn write_output(&mut self, dir: &Path, name: &str, contents: &[u8]) -> CliResult<PathBuf> {
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(name.to_string());
        Ok(path)
    }

    pub fn finish(mut self, dir: &Path) -> CliResult<PathBuf> {
        self.outputs.sort();
        self.outputs.dedup();
        let path = dir.join(MANIFEST_FILE);
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// Structural schema check for a parsed manifest.
pub fn validate_manifest(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("manifest must be an object")?;
    for key in ["tool", "version", "subcommand"] {
        if !obj.get(key).is_some_and(Value::is_string) {
            return Err(format!("`{key}` must be a string"));
        }
    }
    if !obj.get("parameters").is_some_and(Value::is_object) {
        return Err("`parameters` must be an object".into());
    }
    let seeds = obj
        .get("seeds")
        .and_then(Value::as_array)
        .ok_or("`seeds` must be an array")?;
    if !seeds.iter().all(Value::is_u64) {
        return Err("`seeds` must hold unsigned integers".into());
    }
    let inputs = obj
        .get("inputs")
        .and_then(Value::as_array)
        .ok_or("`inputs` must be an array")?;
    for i in inputs {
        let ok = i.get("path").is_some_and(Value::is_string)
            && i.get("sha256")
                .and_then(Value::as_str)
                .is_some_and(|h| h.len() == 64 && h.bytes().all(|b| b.is_ascii_hexdigit()));
        if !ok {
            return Err(format!("bad input entry {i}"));
        }
    }
    let outputs = obj
        .get("outputs")
        .and_then(Value::as_array)
        .ok_or("`outputs` must be an array")?;
    if outputs.is_empty() || !outputs.iter().all(Value::is_string) {
        return Err("`outputs` must be a non-empty array of file names".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_abc() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn schema_rejects_missing_outputs() {
        let mut m = RunManifest::new("toy", &serde_json::json!({"k": 2})).unwrap();
        let v = serde_json::to_value(&m).unwrap();
        assert!(validate_manifest(&v).is_err());
        m.outputs.push("toy.csv".into());
        assert!(validate_manifest(&serde_json::to_value(&m).unwrap()).is_ok());
    }
}
