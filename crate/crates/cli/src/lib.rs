// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Command implementations behind the `segwave` binary.

pub mod commands;
pub mod eval_config;
pub mod io;
pub mod manifest;
pub mod sweep;
pub mod table;

pub use manifest::RunManifest;
pub use table::DesignTableRow;

use segwave_core::Error;

/// Process exit code for a failed command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::NotUnitary { .. }
            | Error::NotPositiveDefinite(..)
            | Error::Degenerate(..)
            | Error::AllInfeasible { .. }
            | Error::OutOfRange { .. },
        ) => 3,
        _ => 2,
    }
}
