// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the segwave core library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unknown gate `{0}` (expected X, H, sqrtX, I, or an axis/angle pair)")]
    UnknownGate(String),

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    UnnormalizedState { norm_sqr: f64 },

    #[error("width pair ({w0_nm} nm, {w1_nm} nm) outside coupling-map domain [{min_nm}, {max_nm}] nm")]
    OutOfRange {
        w0_nm: f64,
        w1_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },

    #[error("coupling table: {0}")]
    Table(String),

    #[error("coupling table is missing node ({w0_nm} nm, {w1_nm} nm)")]
    IncompleteGrid { w0_nm: f64, w1_nm: f64 },

    #[error("coupling table has conflicting duplicate node ({w0_nm} nm, {w1_nm} nm)")]
    ConflictingNode { w0_nm: f64, w1_nm: f64 },

    #[error("invalid surrogate parameters: {0}")]
    Surrogate(String),

    #[error("correlation matrix could not be repaired to positive semi-definite: {0}")]
    NotPositiveDefinite(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("all {restarts} restarts produced infeasible designs: {reasons}")]
    AllInfeasible {
        restarts: usize,
        reasons: String,
        best: Box<crate::optimizer::OptimizedDesign>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
