// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixtures shared by the benchmarks.

use segwave_core::Segment;
use segwave_core::Design;

/// Deterministic N-segment design with widths inside the default domain.
pub fn fixture_design(n: usize) -> Design {
    let segments = (0..n)
        .map(|i| {
            let t = i as f64 / n.max(1) as f64;
            let w0 = 560.0 + 200.0 * t;
            let w1 = 780.0 - 150.0 * (3.0 * t).sin().abs();
            Segment::new(w0, w1, 3.0 + (i % 4) as f64).expect("fixture segment is valid")
        })
        .collect();
    Design::from_segments(segments).expect("fixture design is valid")
}
