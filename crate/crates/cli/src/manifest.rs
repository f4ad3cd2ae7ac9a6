// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use segwave_core::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

/// One line of an output directory's append-only run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Option<PathBuf>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub version: String,
    pub duration_s: f64,
    pub timestamp_unix: u64,
    pub exit_code: i32,
}

impl RunManifest {
    pub fn new(command: &str, config: Option<&Path>, seed: u64, out_dir: &Path, elapsed: Duration, exit_code: i32) -> Self {
        RunManifest {
            command: command.to_string(),
            config: config.map(Path::to_path_buf),
            seed,
            out_dir: out_dir.to_path_buf(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_s: elapsed.as_secs_f64(),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            exit_code,
        }
    }

    /// Append to `out_dir/manifest.jsonl`, creating it if needed.
    pub fn append(&self) -> Result<()> {
        let path = self.out_dir.join(MANIFEST_FILE);
        let io = |e| Error::Io { path: path.clone(), source: e };
        std::fs::create_dir_all(&self.out_dir).map_err(|e| Error::Io { path: self.out_dir.clone(), source: e })?;
        let mut f = OpenOptions::new().create(true).append(true).open(&path).map_err(io)?;
        let line = serde_json::to_string(self)?;
        writeln!(f, "{line}").map_err(io)
    }

    pub fn read_all(out_dir: &Path) -> Result<Vec<RunManifest>> {
        let path = out_dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(Error::from))
            .collect()
    }
}
