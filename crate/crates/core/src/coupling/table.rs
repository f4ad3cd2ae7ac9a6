// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CouplingMap, WidthDomain};
use crate::cmt::SegmentCoefficients;
use crate::error::{Error, Result};

/// One CSV row of a coupling table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TableRecord {
    pub w0_nm: f64,
    pub w1_nm: f64,
    pub kappa_per_um: f64,
    pub delta_per_um: f64,
    pub neff0: f64,
    pub neff1: f64,
}

impl TableRecord {
    fn coefficients(&self) -> SegmentCoefficients {
        SegmentCoefficients {
            kappa: self.kappa_per_um,
            delta: self.delta_per_um,
            n_eff_0: self.neff0,
            n_eff_1: self.neff1,
        }
    }
}

/// Coefficients tabulated on a uniform rectilinear width grid, interpolated
/// bilinearly. No extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTable {
    w0_grid: Vec<f64>,
    w1_grid: Vec<f64>,
    /// Row-major: `nodes[i0 * w1_grid.len() + i1]`.
    nodes: Vec<SegmentCoefficients>,
}

const SPACING_RTOL: f64 = 1e-6;

fn check_axis(name: &str, grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::Table(format!("{name} axis needs at least 2 nodes, found {}", grid.len())));
    }
    let step = grid[1] - grid[0];
    for pair in grid.windows(2) {
        let d = pair[1] - pair[0];
        if d <= 0.0 {
            return Err(Error::Table(format!("{name} axis is not strictly increasing")));
        }
        if (d - step).abs() > SPACING_RTOL * step {
            return Err(Error::Table(format!(
                "{name} axis is not uniformly spaced ({d} nm vs {step} nm)"
            )));
        }
    }
    Ok(())
}

fn check_node(c: &SegmentCoefficients, w0: f64, w1: f64) -> Result<()> {
    let vals = [c.kappa, c.delta, c.n_eff_0, c.n_eff_1];
    if !vals.iter().all(|v| v.is_finite()) || !w0.is_finite() || !w1.is_finite() {
        return Err(Error::Table(format!("non-finite value at ({w0} nm, {w1} nm)")));
    }
    if c.kappa < 0.0 {
        return Err(Error::Table(format!("negative kappa at ({w0} nm, {w1} nm)")));
    }
    for n in [c.n_eff_0, c.n_eff_1] {
        if !(1.0 < n && n < 5.0) {
            return Err(Error::Table(format!("effective index {n} outside (1, 5) at ({w0} nm, {w1} nm)")));
        }
    }
    Ok(())
}

fn axis_values(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

/// Locate the cell containing `w`: returns `(i, u)` with `u ∈ [0, 1]`.
fn locate(grid: &[f64], w: f64) -> (usize, f64) {
    let i = grid.partition_point(|&g| g <= w).saturating_sub(1).min(grid.len() - 2);
    let (a, b) = (grid[i], grid[i + 1]);
    (i, (w - a) / (b - a))
}

impl CouplingTable {
    /// Build from records, validating the grid.
    pub fn from_records(records: &[TableRecord]) -> Result<Self> {
        for r in records {
            check_node(&r.coefficients(), r.w0_nm, r.w1_nm)?;
        }
        let w0_grid = axis_values(records.iter().map(|r| r.w0_nm).collect());
        let w1_grid = axis_values(records.iter().map(|r| r.w1_nm).collect());
        check_axis("w0", &w0_grid)?;
        check_axis("w1", &w1_grid)?;

        let n1 = w1_grid.len();
        let mut slots: Vec<Option<SegmentCoefficients>> = vec![None; w0_grid.len() * n1];
        for r in records {
            let i0 = w0_grid.partition_point(|&g| g < r.w0_nm);
            let i1 = w1_grid.partition_point(|&g| g < r.w1_nm);
            let slot = &mut slots[i0 * n1 + i1];
            let c = r.coefficients();
            match slot {
                Some(prev) if *prev != c => {
                    return Err(Error::ConflictingNode {
                        w0_nm: r.w0_nm,
                        w1_nm: r.w1_nm,
                    })
                }
                _ => *slot = Some(c),
            }
        }
        let mut nodes = Vec::with_capacity(slots.len());
        for (idx, s) in slots.into_iter().enumerate() {
            match s {
                Some(c) => nodes.push(c),
                None => {
                    return Err(Error::IncompleteGrid {
                        w0_nm: w0_grid[idx / n1],
                        w1_nm: w1_grid[idx % n1],
                    })
                }
            }
        }
        Ok(CouplingTable {
            w0_grid,
            w1_grid,
            nodes,
        })
    }

    /// Tabulate `f` on the given axes.
    pub fn from_fn(
        w0_grid: Vec<f64>,
        w1_grid: Vec<f64>,
        f: impl Fn(f64, f64) -> SegmentCoefficients,
    ) -> Result<Self> {
        let records: Vec<TableRecord> = w0_grid
            .iter()
            .flat_map(|&w0| w1_grid.iter().map(move |&w1| (w0, w1)))
            .map(|(w0, w1)| {
                let c = f(w0, w1);
                TableRecord {
                    w0_nm: w0,
                    w1_nm: w1,
                    kappa_per_um: c.kappa,
                    delta_per_um: c.delta,
                    neff0: c.n_eff_0,
                    neff1: c.n_eff_1,
                }
            })
            .collect();
        Self::from_records(&records)
    }

    /// Read a table CSV with header
    /// `w0_nm,w1_nm,kappa_per_um,delta_per_um,neff0,neff1`.
    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let records = rdr.deserialize().collect::<std::result::Result<Vec<TableRecord>, _>>()?;
        Self::from_records(&records)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(f))
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in self.records() {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn records(&self) -> impl Iterator<Item = TableRecord> + '_ {
        let n1 = self.w1_grid.len();
        self.nodes.iter().enumerate().map(move |(idx, c)| TableRecord {
            w0_nm: self.w0_grid[idx / n1],
            w1_nm: self.w1_grid[idx % n1],
            kappa_per_um: c.kappa,
            delta_per_um: c.delta,
            neff0: c.n_eff_0,
            neff1: c.n_eff_1,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.w0_grid.len(), self.w1_grid.len())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn w0_grid(&self) -> &[f64] {
        &self.w0_grid
    }

    pub fn w1_grid(&self) -> &[f64] {
        &self.w1_grid
    }

    pub fn node(&self, i0: usize, i1: usize) -> &SegmentCoefficients {
        &self.nodes[i0 * self.w1_grid.len() + i1]
    }
}

impl CouplingMap for CouplingTable {
    fn domain(&self) -> WidthDomain {
        WidthDomain {
            w0: (self.w0_grid[0], *self.w0_grid.last().unwrap()),
            w1: (self.w1_grid[0], *self.w1_grid.last().unwrap()),
        }
    }

    fn lookup(&self, w0: f64, w1: f64) -> Result<SegmentCoefficients> {
        let d = self.domain();
        if !d.contains(w0, w1) {
            return Err(d.range_error(w0, w1));
        }
        let (i, u) = locate(&self.w0_grid, w0);
        let (j, v) = locate(&self.w1_grid, w1);
        let (c00, c01, c10, c11) = (self.node(i, j), self.node(i, j + 1), self.node(i + 1, j), self.node(i + 1, j + 1));
        let mix = |f: fn(&SegmentCoefficients) -> f64| {
            (1.0 - u) * (1.0 - v) * f(c00) + (1.0 - u) * v * f(c01) + u * (1.0 - v) * f(c10) + u * v * f(c11)
        };
        Ok(SegmentCoefficients {
            kappa: mix(|c| c.kappa),
            delta: mix(|c| c.delta),
            n_eff_0: mix(|c| c.n_eff_0),
            n_eff_1: mix(|c| c.n_eff_1),
        })
    }
}
