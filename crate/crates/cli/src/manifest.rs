//! Run manifests: what was run, with which inputs, and when.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::{Deserialize, Serialize};

use crate::error::{CmdResult, Classify};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Full argument vector, program name excluded. Re-running it reproduces the outputs.
    pub command: Vec<String>,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub version: String,
    pub out_dir: PathBuf,
    pub started: String,
    pub finished: Option<String>,
    pub exit_code: Option<u8>,
}

fn now() -> String {
    humantime::format_rfc3339_millis(SystemTime::now()).to_string()
}

impl RunManifest {
    /// Creates the output directory and writes the unfinished manifest.
    pub fn start(command: Vec<String>, config: Option<PathBuf>, seed: Option<u64>, out_dir: &Path) -> CmdResult<Self> {
        fs::create_dir_all(out_dir).usage(format!("cannot create output directory {}", out_dir.display()))?;
        let m = Self {
            command,
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            out_dir: out_dir.to_path_buf(),
            started: now(),
            finished: None,
            exit_code: None,
        };
        m.write()?;
        Ok(m)
    }

    pub fn finish(mut self, exit_code: u8) -> CmdResult {
        self.finished = Some(now());
        self.exit_code = Some(exit_code);
        self.write()
    }

    fn write(&self) -> CmdResult {
        let path = self.out_dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(&path, text + "\n").usage(format!("cannot write {}", path.display()))
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}
