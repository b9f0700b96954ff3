use std::io::{self, Write};

use super::PhaseField;
use crate::error::{Error, Result};
use crate::format::sig12;

/// Writes the field as legacy VTK `STRUCTURED_POINTS` (ASCII). Point data
/// runs with `x1` fastest, then `x2`, then `x3`, which is the grid storage
/// order. Masked nodes carry `nan` in the real fields and phase `-1`.
pub fn write_vtk<W: Write>(field: &PhaseField, mut out: W) -> io::Result<()> {
    let d = &field.domain;
    let h = d.spacing();
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "adiabatic filtration phase field, sigma0 = {}", sig12(field.sigma0))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET STRUCTURED_POINTS")?;
    writeln!(out, "DIMENSIONS {} {} {}", d.resolution[0], d.resolution[1], d.resolution[2])?;
    writeln!(out, "ORIGIN {} {} {}", sig12(d.lower[0]), sig12(d.lower[1]), sig12(d.lower[2]))?;
    writeln!(out, "SPACING {} {} {}", sig12(h[0]), sig12(h[1]), sig12(h[2]))?;
    writeln!(out, "POINT_DATA {}", d.len())?;
    for (name, values) in [("v", &field.v), ("T", &field.t), ("p", &field.p), ("u", &field.u)] {
        writeln!(out, "SCALARS {name} double 1")?;
        writeln!(out, "LOOKUP_TABLE default")?;
        for x in values.iter() {
            writeln!(out, "{}", sig12(*x))?;
        }
    }
    writeln!(out, "SCALARS phase int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for l in &field.labels {
        writeln!(out, "{}", l.map_or(-1, |l| l.code()))?;
    }
    writeln!(out, "SCALARS mask int 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for m in &field.mask {
        writeln!(out, "{}", m.code())?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceAxis {
    X1,
    X2,
    X3,
}

impl SliceAxis {
    fn dim(self) -> usize {
        match self {
            SliceAxis::X1 => 0,
            SliceAxis::X2 => 1,
            SliceAxis::X3 => 2,
        }
    }
}

/// Writes the grid plane `axis = index` as CSV with columns
/// `x1,x2,x3,u,v,T,p,phase,mask` (phase code `-1` on masked nodes).
pub fn write_csv_slice<W: Write>(field: &PhaseField, axis: SliceAxis, index: usize, mut out: W) -> Result<()> {
    let d = &field.domain;
    let dim = axis.dim();
    if index >= d.resolution[dim] {
        return Err(Error::Config(format!("slice index {index} exceeds {} nodes on that axis", d.resolution[dim])));
    }
    writeln!(out, "x1,x2,x3,u,v,T,p,phase,mask")?;
    for idx in 0..d.len() {
        let i = d.indices(idx);
        if i[dim] != index {
            continue;
        }
        let x = d.node(i);
        let cells = [x[0], x[1], x[2], field.u[idx], field.v[idx], field.t[idx], field.p[idx]].map(sig12);
        writeln!(out, "{},{},{}", cells.join(","), field.labels[idx].map_or(-1, |l| l.code()), field.mask[idx].code())?;
    }
    Ok(())
}
