//! Output tree with content digests and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{io_err, Result};
use crate::heatmap::{labels_sidecar, render_ppm, LabelledMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileRecord {
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: toml::Table,
    pub seeds: BTreeMap<String, u64>,
    pub conventions: Vec<String>,
    pub warnings: Vec<String>,
    pub files: BTreeMap<String, FileRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_s: Option<BTreeMap<String, f64>>,
}

pub struct Output {
    root: PathBuf,
    files: BTreeMap<String, FileRecord>,
    warnings: Vec<String>,
    conventions: Vec<String>,
    timings: Option<BTreeMap<String, f64>>,
}

impl Output {
    pub fn new(root: &Path, timings: bool) -> Result<Output> {
        fs::create_dir_all(root).map_err(io_err(root))?;
        Ok(Output {
            root: root.to_path_buf(),
            files: BTreeMap::new(),
            warnings: vec![],
            conventions: vec![],
            timings: timings.then(BTreeMap::new),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write_bytes(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        fs::write(&path, bytes).map_err(io_err(&path))?;
        let digest = hex::encode(Sha256::digest(bytes));
        self.files.insert(rel.replace('\\', "/"), FileRecord { sha256: digest, bytes: bytes.len() as u64 });
        Ok(())
    }

    pub fn write_text(&mut self, rel: &str, text: &str) -> Result<()> {
        self.write_bytes(rel, text.as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).expect("result serializes");
        text.push('\n');
        self.write_text(rel, &text)
    }

    /// Writes `<stem>.ppm` and `<stem>.labels.txt`.
    pub fn write_heatmap(
        &mut self,
        stem: &str,
        m: &LabelledMatrix,
        significant: Option<&[Vec<bool>]>,
        cell: (usize, usize),
        axes: (&str, &str),
    ) -> Result<()> {
        let img = render_ppm(&m.values, significant, cell.0, cell.1)?;
        self.write_bytes(&format!("{stem}.ppm"), &img)?;
        self.write_text(&format!("{stem}.labels.txt"), &labels_sidecar(&m.row_labels, &m.col_labels, axes.0, axes.1))
    }

    pub fn warn(&mut self, msg: impl Into<String>) {
        let msg = msg.into();
        eprintln!("warning: {msg}");
        self.warnings.push(msg);
    }

    pub fn convention(&mut self, msg: impl Into<String>) {
        self.conventions.push(msg.into());
    }

    /// Runs `f`, recording its wall time when timings are enabled.
    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Output) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let r = f(self)?;
        if let Some(t) = self.timings.as_mut() {
            *t.entry(stage.to_string()).or_insert(0.0) += start.elapsed().as_secs_f64();
        }
        Ok(r)
    }

    pub fn finish(self, command: &str, config: toml::Table, seeds: BTreeMap<String, u64>) -> Result<RunManifest> {
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            seeds,
            conventions: self.conventions,
            warnings: self.warnings,
            files: self.files,
            timings_s: self.timings,
        };
        let path = self.root.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(io_err(&path))?;
        Ok(manifest)
    }
}
