//! Steady adiabatic filtration from point sources.
//!
//! On one entropy level the filtration equations reduce to `Laplace(Q(v)) = 0`.
//! With sources `J_i` at `a_i` the potential is
//! `u = sum J_i / (4 pi |x - a_i|) + u0`, and the volume field is
//! `v(x) = Q^{-1}(u(x))`. In free space `u0` is the constant `Q(v0)`; in a
//! box `u0` is harmonic with boundary values that make `v = v0` on the box
//! surface.
//!
//! Grids store nodes with `x1` varying fastest, then `x2`, then `x3`:
//! `index = i1 + n1 * (i2 + n2 * i3)`.

mod field;
mod harmonic;
mod io;

pub use field::{
    solve_field, u_free_space, validate_sources, BranchPolicy, FieldOptions, FieldSummary, NodeMask, PhaseField,
    SourceCheck, SourceReport,
};
pub use harmonic::{solve_harmonic, HarmonicOptions, HarmonicSolution};
pub use io::{write_csv_slice, write_vtk, SliceAxis};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::isentrope::MediumParams;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    pub position: [f64; 3],
    /// Coefficient of `1 / (4 pi |x - a|)` in the potential.
    pub intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSystem {
    pub sources: Vec<Source>,
    /// `v0`, the volume far from the sources (or on the box surface).
    pub far_field_v: f64,
    pub sigma0: f64,
    pub medium: MediumParams,
}

impl SourceSystem {
    pub fn validate(&self) -> Result<()> {
        if !(self.far_field_v > 1.0) || !self.far_field_v.is_finite() {
            return Err(Error::Config(format!("far_field_v must exceed 1, got {}", self.far_field_v)));
        }
        self.medium.validate()?;
        for (i, s) in self.sources.iter().enumerate() {
            if s.position.iter().any(|c| !c.is_finite()) || !s.intensity.is_finite() {
                return Err(Error::Config(format!("source {i} has a non-finite position or intensity")));
            }
            for (j, t) in self.sources.iter().enumerate().skip(i + 1) {
                if s.position == t.position {
                    return Err(Error::Config(format!("sources {i} and {j} coincide at {:?}", s.position)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDomain {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    /// Node counts per axis, boundary nodes included.
    pub resolution: [usize; 3],
}

impl BoxDomain {
    pub fn validate(&self) -> Result<()> {
        for d in 0..3 {
            if !(self.upper[d] > self.lower[d]) || !self.lower[d].is_finite() || !self.upper[d].is_finite() {
                return Err(Error::Config(format!("domain axis {} has non-positive extent", d + 1)));
            }
            if self.resolution[d] < 2 {
                return Err(Error::Config(format!("domain axis {} needs at least 2 nodes", d + 1)));
            }
        }
        Ok(())
    }

    /// Checks that every source lies strictly inside the box.
    pub fn contains_strictly(&self, p: [f64; 3]) -> bool {
        (0..3).all(|d| p[d] > self.lower[d] && p[d] < self.upper[d])
    }

    pub fn spacing(&self) -> [f64; 3] {
        std::array::from_fn(|d| (self.upper[d] - self.lower[d]) / (self.resolution[d] - 1) as f64)
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: [usize; 3]) -> usize {
        let [n1, n2, _] = self.resolution;
        i[0] + n1 * (i[1] + n2 * i[2])
    }

    pub fn indices(&self, idx: usize) -> [usize; 3] {
        let [n1, n2, _] = self.resolution;
        [idx % n1, (idx / n1) % n2, idx / (n1 * n2)]
    }

    pub fn node(&self, i: [usize; 3]) -> [f64; 3] {
        let h = self.spacing();
        let mut x = [0.0; 3];
        for d in 0..3 {
            // pin the last node to the upper corner exactly
            x[d] = if i[d] + 1 == self.resolution[d] { self.upper[d] } else { self.lower[d] + h[d] * i[d] as f64 };
        }
        x
    }

    pub fn is_boundary(&self, i: [usize; 3]) -> bool {
        (0..3).any(|d| i[d] == 0 || i[d] + 1 == self.resolution[d])
    }

    /// Length of one cell diagonal.
    pub fn cell_diagonal(&self) -> f64 {
        let h = self.spacing();
        (h[0] * h[0] + h[1] * h[1] + h[2] * h[2]).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    /// Whole-space solution with uniform far field `v0`.
    #[default]
    FreeSpace,
    /// `v = v0` imposed on the box surface through a harmonic correction.
    DirichletBox,
}

pub(crate) fn distance(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}
