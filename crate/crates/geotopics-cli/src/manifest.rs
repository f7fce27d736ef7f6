//! Run manifests: a JSON record of what a command consumed and produced.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::io::Read;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use geotopics::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

/// What a single CLI invocation did: resolved config, SHA-256 digests of
/// every input file, every artifact written, stage timings, and the tool
/// version. One manifest is written per output directory.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub artifacts: Vec<String>,
    pub notes: BTreeMap<String, String>,
    pub timings_ms: BTreeMap<String, u128>,
}

impl RunManifest {
    pub fn new(command: &str, config: BTreeMap<String, String>) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            inputs: BTreeMap::new(),
            artifacts: Vec::new(),
            notes: BTreeMap::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    /// Records an input file by path and content digest.
    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        let digest = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn add_artifact(&mut self, name: &str) {
        self.artifacts.push(name.to_string());
    }

    pub fn note(&mut self, key: &str, value: impl Display) {
        self.notes.insert(key.to_string(), value.to_string());
    }

    pub fn timing(&mut self, stage: &str, since: Instant) {
        self.timings_ms
            .insert(stage.to_string(), since.elapsed().as_millis());
    }

    /// Writes `manifest.json` into `dir`. The manifest lists itself as an
    /// artifact so the directory contents and the artifact list agree.
    pub fn write(mut self, dir: &Path) -> Result<()> {
        self.add_artifact(MANIFEST_FILE);
        self.artifacts.sort();
        self.artifacts.dedup();
        let path = dir.join(MANIFEST_FILE);
        let body = serde_json::to_string_pretty(&self).map_err(|e| {
            Error::Malformed(format!("manifest serialization failed: {e}"))
        })?;
        fs::write(&path, body + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Streaming SHA-256 of a file, hex-encoded.
pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_matches_known_vector() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("abc.txt");
        fs::write(&path, "abc").unwrap();
        assert_eq!(
            sha256_file(&path).unwrap(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_lists_itself_and_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("train", BTreeMap::new());
        m.add_artifact("model.bin");
        m.note("restaurants", 200);
        m.write(dir.path()).unwrap();

        let text = fs::read_to_string(dir.path().join(MANIFEST_FILE)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["command"], "train");
        let artifacts: Vec<&str> = v["artifacts"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| a.as_str().unwrap())
            .collect();
        assert!(artifacts.contains(&"model.bin"));
        assert!(artifacts.contains(&MANIFEST_FILE));
        assert_eq!(v["notes"]["restaurants"], "200");
    }
}
