// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use segwave_core::optimizer::{OptimizeConfig, OptimizedDesign};
use segwave_core::{Design, Error, Result};

/// Parse a JSON file; syntax and schema problems become config errors
/// naming the file, line and column.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

/// Rows serialized after an explicit header line.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })
}

/// A design file: either an optimizer output or a bare design.
#[derive(Debug, Clone)]
pub enum DesignInput {
    Optimized(Box<OptimizedDesign>),
    Plain(Design),
}

impl DesignInput {
    pub fn load(path: &Path) -> Result<Self> {
        let value: serde_json::Value = read_json(path)?;
        if value.get("design").is_some() {
            let d = serde_json::from_value(value).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            Ok(DesignInput::Optimized(Box::new(d)))
        } else {
            let d = serde_json::from_value(value).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            Ok(DesignInput::Plain(d))
        }
    }

    pub fn design(&self) -> &Design {
        match self {
            DesignInput::Optimized(o) => &o.design,
            DesignInput::Plain(d) => d,
        }
    }

    pub fn config(&self) -> Option<&OptimizeConfig> {
        match self {
            DesignInput::Optimized(o) => Some(&o.config),
            DesignInput::Plain(_) => None,
        }
    }
}
