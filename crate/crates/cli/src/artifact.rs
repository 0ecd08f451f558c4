use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{CliError, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance stamped into every artifact.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Meta {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Self { command: command.into(), config_hash: config_hash(cfg), seed: cfg.seed, version: VERSION.into() }
    }

    fn lines(&self) -> [String; 4] {
        [
            format!("command: {}", self.command),
            format!("config_hash: {}", self.config_hash),
            format!("seed: {}", self.seed),
            format!("version: {}", self.version),
        ]
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// SHA-256 of the configuration as JSON in field order, without the output directory.
pub fn config_hash(cfg: &RunConfig) -> String {
    let mut v = serde_json::to_value(cfg).expect("config serialises");
    if let Value::Object(m) = &mut v {
        m.remove("out");
    }
    hex(&Sha256::digest(v.to_string().as_bytes()))
}

/// Writes artifacts under one directory and keeps a manifest of them.
pub struct ArtifactWriter {
    dir: PathBuf,
    meta: Meta,
    files: Vec<(String, String)>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, meta: Meta) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), meta, files: Vec::new() })
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)?;
        self.files.retain(|(n, _)| n != name);
        self.files.push((name.to_string(), hex(&Sha256::digest(bytes))));
        Ok(path)
    }

    /// CSV body from `body`, behind `#` comment lines carrying the metadata.
    pub fn csv<E>(&mut self, name: &str, body: impl FnOnce(&mut Vec<u8>) -> Result<(), E>) -> Result<PathBuf, CliError>
    where
        E: std::fmt::Display,
    {
        let mut buf = Vec::new();
        for l in self.meta.lines() {
            buf.extend_from_slice(format!("# {l}\n").as_bytes());
        }
        body(&mut buf).map_err(|e| CliError::Numerical(e.to_string()))?;
        self.put(name, &buf)
    }

    /// `{"meta": ..., "data": ...}`.
    pub fn json<T: Serialize>(&mut self, name: &str, data: &T) -> Result<PathBuf, CliError> {
        let doc = json!({ "meta": self.meta, "data": data });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    /// An SVG document with the metadata as a comment after the declaration.
    pub fn svg(&mut self, name: &str, document: &str) -> Result<PathBuf, CliError> {
        let comment = format!("<!-- {} -->\n", self.meta.lines().join("; "));
        let text = match document.split_once('\n') {
            Some((decl, rest)) if decl.starts_with("<?xml") => format!("{decl}\n{comment}{rest}"),
            _ => format!("{comment}{document}"),
        };
        self.put(name, text.as_bytes())
    }

    /// Writes `manifest.json` listing every artifact with its SHA-256.
    pub fn finish(mut self) -> Result<Vec<String>, CliError> {
        let files: Vec<Value> = self.files.iter().map(|(n, h)| json!({ "file": n, "sha256": h })).collect();
        let names = self.files.iter().map(|(n, _)| n.clone()).collect();
        self.json("manifest.json", &files)?;
        Ok(names)
    }
}

/// Parse a CSV artifact, skipping the metadata preamble.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path).map_err(|e| CliError::Numerical(e.to_string()))?;
    let header = rd.headers().map_err(|e| CliError::Numerical(e.to_string()))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for r in rd.records() {
        rows.push(r.map_err(|e| CliError::Numerical(e.to_string()))?.iter().map(String::from).collect());
    }
    Ok((header, rows))
}
