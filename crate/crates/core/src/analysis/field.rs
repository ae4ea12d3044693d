//! Sampling potential and velocity on rectangular grids.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::Complex;
use crate::error::{FlowError, Result};
use crate::flow::{potential_of, velocity_components, velocity_of, FlowRep, FlowSpec, WaveFunction};

use super::zeros::{find_zeros_of, Region};

/// Grid bounds and resolution. Node `i` sits at
/// `xmin + (xmax - xmin) * (i / (nx - 1))`, so refining `n -> 2n - 1`
/// reproduces every old node bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn square(xmin: f64, xmax: f64, ymin: f64, ymax: f64, n: usize) -> Self {
        Self { xmin, xmax, ymin, ymax, nx: n, ny: n }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.xmin, self.xmax, self.ymin, self.ymax].iter().all(|v| v.is_finite());
        if !finite || self.xmax < self.xmin || self.ymax < self.ymin || self.nx == 0 || self.ny == 0 {
            return Err(FlowError::InvalidParameter("grid needs finite ordered bounds and n >= 1".into()));
        }
        Ok(())
    }

    fn node(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * (i as f64 / (n - 1) as f64)
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| Self::node(self.xmin, self.xmax, i, self.nx)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| Self::node(self.ymin, self.ymax, j, self.ny)).collect()
    }

    fn cell(&self) -> f64 {
        let dx = if self.nx > 1 { (self.xmax - self.xmin) / (self.nx - 1) as f64 } else { f64::INFINITY };
        let dy = if self.ny > 1 { (self.ymax - self.ymin) / (self.ny - 1) as f64 } else { f64::INFINITY };
        let c = dx.min(dy);
        if c.is_finite() {
            c
        } else {
            1.0
        }
    }
}

/// Sampled field; row `j` holds the nodes at height `y[j]`. Masked nodes
/// carry `None` in every field array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub bounds: GridSpec,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub phi: Vec<Vec<Option<f64>>>,
    pub psi: Vec<Vec<Option<f64>>>,
    pub u: Vec<Vec<Option<f64>>>,
    pub v: Vec<Vec<Option<f64>>>,
    pub mask: Vec<Vec<bool>>,
}

/// CSV header, in column order.
pub const CSV_COLUMNS: [&str; 7] = ["x", "y", "phi", "psi", "u", "v", "masked"];

impl FieldGrid {
    /// One row per node, `y` outer and `x` inner; masked values are empty.
    pub fn to_csv(&self) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for (j, y) in self.y.iter().enumerate() {
            for (i, x) in self.x.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{x},{y},{},{},{},{},{}",
                    cell(self.phi[j][i]),
                    cell(self.psi[j][i]),
                    cell(self.u[j][i]),
                    cell(self.v[j][i]),
                    u8::from(self.mask[j][i])
                );
            }
        }
        out
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().flatten().filter(|m| **m).count()
    }
}

/// Samples `phi`, `psi`, `u`, `v` of a flow. Nodes within `1e-6` of a cell of
/// a zero, or where evaluation fails, are masked.
pub fn sample_field(fs: &FlowSpec, grid: &GridSpec) -> Result<FieldGrid> {
    fs.validate()?;
    sample_field_of(fs.rep, fs, grid)
}

pub fn sample_field_of<W: WaveFunction + ?Sized>(rep: FlowRep, wf: &W, grid: &GridSpec) -> Result<FieldGrid> {
    grid.validate()?;
    rep.validate()?;
    let cell = grid.cell();
    let zeros: Vec<Complex> = if grid.nx > 1 && grid.ny > 1 {
        let pad = 0.5 * cell;
        let region = Region::rect(
            Complex::new(grid.xmin - pad, grid.ymin - pad),
            Complex::new(grid.xmax + pad, grid.ymax + pad),
        );
        // failures here only lose the proximity mask; evaluation errors still mask
        find_zeros_of(wf, &region).map(|z| z.into_iter().map(|z| z.position).collect()).unwrap_or_default()
    } else {
        Vec::new()
    };
    let guard = 1e-6 * cell;
    let xs = grid.xs();
    let ys = grid.ys();
    type Row = (Vec<Option<f64>>, Vec<Option<f64>>, Vec<Option<f64>>, Vec<Option<f64>>, Vec<bool>);
    let rows: Vec<Row> = ys
        .par_iter()
        .map(|&y| {
            let mut row: Row = (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
            for &x in &xs {
                let z = Complex::new(x, y);
                let near = zeros.iter().any(|a| (z - a).norm() <= guard);
                let sample = if near {
                    None
                } else {
                    match (potential_of(rep, wf, z), velocity_of(rep, wf, z)) {
                        (Ok(f), Ok(vb)) if f.re.is_finite() && f.im.is_finite() => Some((f, velocity_components(vb))),
                        _ => None,
                    }
                };
                match sample {
                    Some((f, (u, v))) => {
                        row.0.push(Some(f.re));
                        row.1.push(Some(f.im));
                        row.2.push(Some(u));
                        row.3.push(Some(v));
                        row.4.push(false);
                    }
                    None => {
                        row.0.push(None);
                        row.1.push(None);
                        row.2.push(None);
                        row.3.push(None);
                        row.4.push(true);
                    }
                }
            }
            row
        })
        .collect();
    let mut out = FieldGrid {
        bounds: *grid,
        x: xs,
        y: ys,
        phi: Vec::with_capacity(grid.ny),
        psi: Vec::with_capacity(grid.ny),
        u: Vec::with_capacity(grid.ny),
        v: Vec::with_capacity(grid.ny),
        mask: Vec::with_capacity(grid.ny),
    };
    for (phi, psi, u, v, m) in rows {
        out.phi.push(phi);
        out.psi.push(psi);
        out.u.push(u);
        out.v.push(v);
        out.mask.push(m);
    }
    Ok(out)
}
