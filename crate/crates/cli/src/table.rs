// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use segwave_core::optimizer::OptimizedDesign;
use segwave_core::{Error, Result};

pub const TABLE_HEADER: [&str; 8] =
    ["gate", "material", "method", "mean_F", "std_F", "length_um", "n_segments", "power_loss_percent"];

/// One row of the design summary table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignTableRow {
    pub gate: String,
    pub material: String,
    pub method: String,
    #[serde(rename = "mean_F")]
    pub mean_f: f64,
    #[serde(rename = "std_F")]
    pub std_f: f64,
    pub length_um: f64,
    pub n_segments: usize,
    pub power_loss_percent: f64,
}

impl DesignTableRow {
    pub fn from_design(d: &OptimizedDesign) -> Self {
        DesignTableRow {
            gate: d.gate.clone(),
            material: d.material.clone(),
            method: d.method.clone(),
            mean_f: d.report.mean_f,
            std_f: d.report.std_f,
            length_um: d.design.total_length(),
            n_segments: d.design.len(),
            power_loss_percent: 100.0 * d.report.power_loss,
        }
    }

    fn fields(&self) -> [String; 8] {
        [
            self.gate.clone(),
            self.material.clone(),
            self.method.clone(),
            format!("{:.4}", self.mean_f),
            format!("{:.4}", self.std_f),
            format!("{:.0}", self.length_um),
            self.n_segments.to_string(),
            format!("{:.4}", self.power_loss_percent),
        ]
    }

    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        (&self.gate, &self.material, &self.method, self.n_segments).cmp(&(
            &other.gate,
            &other.material,
            &other.method,
            other.n_segments,
        ))
    }
}

pub fn sort_rows(rows: &mut [DesignTableRow]) {
    rows.sort_by(|a, b| a.sort_key_cmp(b).then(a.mean_f.total_cmp(&b.mean_f)));
}

pub fn write_table_csv<W: Write>(rows: &[DesignTableRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(TABLE_HEADER)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush().map_err(|e| Error::io("<table csv>", e))
}

pub fn read_table_csv<R: Read>(reader: R) -> Result<Vec<DesignTableRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    if header.iter().ne(TABLE_HEADER.iter().copied()) {
        return Err(Error::Config(format!("table header must be `{}`", TABLE_HEADER.join(","))));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Whitespace-aligned rendering for terminals.
pub fn render_text(rows: &[DesignTableRow]) -> String {
    let head = ["Gate", "Mat", "Method", "E[F]", "STD[F]", "Length (um)", "N", "PL (%)"].map(String::from);
    let body: Vec<[String; 8]> = rows.iter().map(DesignTableRow::fields).collect();
    let mut widths = head.clone().map(|h| h.len());
    for r in &body {
        for (w, f) in widths.iter_mut().zip(r) {
            *w = (*w).max(f.len());
        }
    }
    let line = |cells: &[String; 8]| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        parts.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&head);
    for r in &body {
        out.push_str(&line(r));
    }
    out
}

/// Rows for every readable optimizer output in `dir`; others are skipped
/// with a warning.
pub fn collect_rows(dir: &Path) -> Result<Vec<DesignTableRow>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut rows = Vec::new();
    for p in paths {
        match OptimizedDesign::load(&p) {
            Ok(d) => rows.push(DesignTableRow::from_design(&d)),
            Err(e) => log::warn!("skipping {}: {e}", p.display()),
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW: &str = "Had,Li,baseline,0.9854,0.0370,81,10,11.1633";

    #[test]
    fn csv_round_trip_preserves_text() {
        let text = format!("{}\n{ROW}\n", TABLE_HEADER.join(","));
        let rows = read_table_csv(text.as_bytes()).unwrap();
        assert_eq!(rows[0].mean_f, 0.9854);
        assert_eq!(rows[0].power_loss_percent, 11.1633);
        let mut out = Vec::new();
        write_table_csv(&rows, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }

    #[test]
    fn empty_table_has_header() {
        let mut out = Vec::new();
        write_table_csv(&[], &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().trim(), TABLE_HEADER.join(","));
        assert_eq!(render_text(&[]).lines().count(), 1);
    }

    #[test]
    fn sorts_by_segment_count_last() {
        let mk = |n| DesignTableRow {
            gate: "X".into(),
            material: "Li".into(),
            method: "baseline".into(),
            mean_f: 0.9,
            std_f: 0.1,
            length_um: 10.0,
            n_segments: n,
            power_loss_percent: 0.0,
        };
        let mut rows = vec![mk(10), mk(3), mk(1)];
        sort_rows(&mut rows);
        assert_eq!(rows.iter().map(|r| r.n_segments).collect::<Vec<_>>(), [1, 3, 10]);
    }

    #[test]
    fn wrong_header_rejected() {
        assert!(read_table_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
