//! Run manifest: a `key = value` sidecar written next to every result set.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(experiment: &str, cfg: &ExperimentConfig, filter_digest: &str) -> Self {
        let mut m = Self::default();
        m.push("experiment", experiment);
        m.push("version", crate::VERSION);
        m.push("seed", cfg.seed);
        m.push("filter_digest", filter_digest);
        for (k, v) in cfg.entries() {
            m.push(format!("config.{k}"), v);
        }
        m
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            writeln!(s, "{k} = {v}").expect("writing to a String");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut m = Self::default();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| Error::Config(format!("malformed manifest line `{line}`")))?;
            m.push(k, v);
        }
        Ok(m)
    }
}

/// Write `contents` to `dir/name` and return its digest.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<String> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(sha256_hex(contents.as_bytes()))
}
