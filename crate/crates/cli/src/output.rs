//! Output directory, atomic file writes and the run manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";
pub const METADATA: &str = "run.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputFile {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub config_digest: String,
    pub seed: Option<u64>,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<OutputFile>,
}

/// Write `bytes` to `path` through a temporary sibling and a rename, so a
/// reader never sees a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn timestamp(t: SystemTime) -> String {
    humantime::format_rfc3339_millis(t).to_string()
}

/// One run: files go into `root` only, and the manifest is written last.
pub struct Run {
    root: PathBuf,
    started: SystemTime,
    command_line: Vec<String>,
    config_digest: String,
    seed: Option<u64>,
    outputs: Vec<OutputFile>,
}

impl Run {
    pub fn start(root: &Path, config_json: &[u8], seed: Option<u64>) -> CliResult<Self> {
        fs::create_dir_all(root).map_err(|e| CliError::io("OUTPUT_NOT_WRITABLE", root, e))?;
        Ok(Run {
            root: root.to_path_buf(),
            started: SystemTime::now(),
            command_line: std::env::args().collect(),
            config_digest: sha256_hex(config_json),
            seed,
            outputs: Vec::new(),
        })
    }

    pub fn elapsed_secs(&self) -> f64 {
        self.started.elapsed().map(|d| d.as_secs_f64()).unwrap_or(0.0)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        write_atomic(&path, bytes).map_err(|e| CliError::io("OUTPUT_NOT_WRITABLE", &path, e))?;
        self.outputs.retain(|o| o.path != name);
        self.outputs.push(OutputFile { path: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(path)
    }

    /// Run metadata: config echo, seed, wall time, version, threads.
    pub fn write_metadata(&mut self, command: &str, config: &serde_json::Value) -> CliResult<()> {
        let meta = serde_json::json!({
            "command": command,
            "config": config,
            "seed": self.seed,
            "wall_time_s": self.elapsed_secs(),
            "version": env!("CARGO_PKG_VERSION"),
            "threads": rayon::current_num_threads(),
        });
        self.write(METADATA, &serde_json::to_vec_pretty(&meta).expect("metadata serializes"))?;
        Ok(())
    }

    pub fn finish(self) -> CliResult<RunManifest> {
        let manifest = RunManifest {
            command_line: self.command_line,
            config_digest: self.config_digest,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: timestamp(self.started),
            finished_at: timestamp(SystemTime::now()),
            outputs: self.outputs,
        };
        let path = self.root.join(MANIFEST);
        let bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        write_atomic(&path, &bytes).map_err(|e| CliError::io("OUTPUT_NOT_WRITABLE", &path, e))?;
        Ok(manifest)
    }
}
