use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Deserialize;

use super::{distance, solve_harmonic, BoxDomain, HarmonicOptions, SolveMode, Source, SourceSystem};
use crate::error::{Error, Result};
use crate::isentrope::{sigma_star, Isentrope};
use crate::phase::{CoexistenceCurve, PhaseLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeMask {
    Valid,
    /// Within the exclusion radius of a source.
    NearSource,
    /// `u` has no preimage under `Q` (or maps outside the traced curve).
    OutOfRange,
}

impl NodeMask {
    pub fn code(self) -> i32 {
        match self {
            NodeMask::Valid => 0,
            NodeMask::NearSource => 1,
            NodeMask::OutOfRange => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeMask::Valid => "valid",
            NodeMask::NearSource => "near_source",
            NodeMask::OutOfRange => "out_of_range",
        }
    }
}

/// What to do when `Q` is not monotone on the chosen entropy level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchPolicy {
    #[default]
    Refuse,
    /// Use the monotone piece of `Q` containing `v0`; nodes past its ends
    /// are masked out-of-range.
    ConnectedToFarField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldOptions {
    /// Defaults to one cell diagonal.
    pub exclusion_radius: Option<f64>,
    pub harmonic: HarmonicOptions,
    pub branch: BranchPolicy,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions { exclusion_radius: None, harmonic: HarmonicOptions::default(), branch: BranchPolicy::Refuse }
    }
}

/// Per-node solution on a box grid. Masked nodes carry `NaN` in `v`, `t`,
/// `p` and no label.
#[derive(Debug, Clone)]
pub struct PhaseField {
    pub domain: BoxDomain,
    pub sigma0: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub labels: Vec<Option<PhaseLabel>>,
    pub mask: Vec<NodeMask>,
    pub exclusion_radius: f64,
    /// Iterations and final scaled residual of the harmonic correction.
    pub harmonic: Option<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSummary {
    pub nodes: usize,
    pub valid: usize,
    pub near_source: usize,
    pub out_of_range: usize,
    /// Node counts indexed by `PhaseLabel::code`.
    pub phases: [usize; 5],
    pub harmonic: Option<(usize, f64)>,
}

impl FieldSummary {
    pub fn count(&self, label: PhaseLabel) -> usize {
        self.phases[label.code() as usize]
    }
}

impl std::fmt::Display for FieldSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "nodes         {}", self.nodes)?;
        writeln!(f, "valid         {}", self.valid)?;
        writeln!(f, "near_source   {}", self.near_source)?;
        writeln!(f, "out_of_range  {}", self.out_of_range)?;
        for l in PhaseLabel::ALL {
            writeln!(f, "{:<13} {}", l.name(), self.count(l))?;
        }
        match self.harmonic {
            Some((it, r)) => write!(f, "harmonic      {it} iterations, residual {r:.3e}"),
            None => write!(f, "harmonic      none (free space)"),
        }
    }
}

impl PhaseField {
    pub fn summary(&self) -> FieldSummary {
        let mut s = FieldSummary {
            nodes: self.mask.len(),
            valid: 0,
            near_source: 0,
            out_of_range: 0,
            phases: [0; 5],
            harmonic: self.harmonic,
        };
        for (m, l) in self.mask.iter().zip(&self.labels) {
            match m {
                NodeMask::Valid => s.valid += 1,
                NodeMask::NearSource => s.near_source += 1,
                NodeMask::OutOfRange => s.out_of_range += 1,
            }
            if let Some(l) = l {
                s.phases[l.code() as usize] += 1;
            }
        }
        s
    }

    pub fn node_position(&self, idx: usize) -> [f64; 3] {
        self.domain.node(self.domain.indices(idx))
    }

    /// Face-connected components of the nodes carrying `label`, each as a
    /// sorted list of node indices, in order of their smallest index.
    pub fn components(&self, label: PhaseLabel) -> Vec<Vec<usize>> {
        let d = &self.domain;
        let mut seen = vec![false; d.len()];
        let mut out = Vec::new();
        for start in 0..d.len() {
            if seen[start] || self.labels[start] != Some(label) {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(idx) = stack.pop() {
                comp.push(idx);
                let i = d.indices(idx);
                for dim in 0..3 {
                    for up in [false, true] {
                        let mut j = i;
                        if up {
                            if i[dim] + 1 == d.resolution[dim] {
                                continue;
                            }
                            j[dim] += 1;
                        } else {
                            if i[dim] == 0 {
                                continue;
                            }
                            j[dim] -= 1;
                        }
                        let n = d.index(j);
                        if !seen[n] && self.labels[n] == Some(label) {
                            seen[n] = true;
                            stack.push(n);
                        }
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Whether any node of `nodes` lies on the box surface.
    pub fn touches_boundary(&self, nodes: &[usize]) -> bool {
        nodes.iter().any(|&n| self.domain.is_boundary(self.domain.indices(n)))
    }
}

fn coulomb(x: [f64; 3], sources: &[Source]) -> Result<f64> {
    let mut sum = 0.0;
    for s in sources {
        let r = distance(x, s.position);
        if r == 0.0 {
            return Err(Error::Singularity { point: x });
        }
        sum += s.intensity / (4.0 * PI * r);
    }
    Ok(sum)
}

/// Free-space potential `sum J_i / (4 pi |x - a_i|) + Q(v0)`.
pub fn u_free_space(x: [f64; 3], sys: &SourceSystem, iso: &Isentrope) -> Result<f64> {
    Ok(coulomb(x, &sys.sources)? + iso.q_at(sys.far_field_v)?)
}

struct NodeValue {
    u: f64,
    v: f64,
    t: f64,
    p: f64,
    label: Option<PhaseLabel>,
    mask: NodeMask,
}

impl NodeValue {
    fn masked(u: f64, mask: NodeMask) -> Self {
        NodeValue { u, v: f64::NAN, t: f64::NAN, p: f64::NAN, label: None, mask }
    }
}

pub fn solve_field(
    sys: &SourceSystem,
    domain: &BoxDomain,
    mode: SolveMode,
    iso: &Isentrope,
    curve: &CoexistenceCurve,
    opts: FieldOptions,
) -> Result<PhaseField> {
    sys.validate()?;
    domain.validate()?;
    for (i, s) in sys.sources.iter().enumerate() {
        if !domain.contains_strictly(s.position) {
            return Err(Error::Config(format!("source {i} at {:?} is not strictly inside the domain", s.position)));
        }
    }
    if iso.sigma0() != sys.sigma0 || iso.medium() != &sys.medium {
        return Err(Error::Config("isentrope was built for a different entropy level or medium".into()));
    }
    if !iso.invertible() && opts.branch == BranchPolicy::Refuse {
        return Err(Error::NonInvertible { sigma0: sys.sigma0, sigma_star: sigma_star(iso.gas())? });
    }
    let gas = iso.gas();
    let v0 = sys.far_field_v;
    let q0 = iso.q_at(v0)?;
    let r_excl = opts.exclusion_radius.unwrap_or_else(|| domain.cell_diagonal());

    let (correction, harmonic) = match mode {
        SolveMode::FreeSpace => (None, None),
        SolveMode::DirichletBox => {
            let sol = solve_harmonic(domain, |x| q0 - coulomb(x, &sys.sources).unwrap_or(f64::NAN), opts.harmonic)?;
            let report = (sol.iterations, sol.residual());
            (Some(sol.values), Some(report))
        }
    };

    let invert = |u: f64| match opts.branch {
        BranchPolicy::Refuse => iso.invert_q(u),
        BranchPolicy::ConnectedToFarField => iso.invert_q_on_branch(u, v0),
    };

    let nodes: Vec<NodeValue> = (0..domain.len())
        .into_par_iter()
        .map(|idx| -> Result<NodeValue> {
            let x = domain.node(domain.indices(idx));
            let near = sys.sources.iter().any(|s| distance(x, s.position) < r_excl);
            let base = match &correction {
                Some(c) => c[idx],
                None => q0,
            };
            let u = match coulomb(x, &sys.sources) {
                Ok(c) => c + base,
                Err(_) => f64::NAN,
            };
            if near {
                return Ok(NodeValue::masked(u, NodeMask::NearSource));
            }
            let v = match invert(u) {
                Ok(v) => v,
                Err(Error::Range { .. }) => return Ok(NodeValue::masked(u, NodeMask::OutOfRange)),
                Err(e) => return Err(e),
            };
            let t = iso.temperature(v)?;
            let p = gas.pressure(v, t)?;
            match curve.classify(gas, v, t) {
                Ok(label) => Ok(NodeValue { u, v, t, p, label: Some(label), mask: NodeMask::Valid }),
                Err(Error::Extrapolation { .. }) => Ok(NodeValue::masked(u, NodeMask::OutOfRange)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let valid = nodes.iter().filter(|n| n.mask == NodeMask::Valid).count();
    let out = nodes.iter().filter(|n| n.mask == NodeMask::OutOfRange).count();
    if valid == 0 && out > 0 {
        return Err(Error::Config(format!(
            "all {out} evaluated nodes are out of range: the source intensities are incompatible with the range of Q at sigma0 = {}",
            sys.sigma0
        )));
    }

    let mut field = PhaseField {
        domain: *domain,
        sigma0: sys.sigma0,
        u: Vec::with_capacity(nodes.len()),
        v: Vec::with_capacity(nodes.len()),
        t: Vec::with_capacity(nodes.len()),
        p: Vec::with_capacity(nodes.len()),
        labels: Vec::with_capacity(nodes.len()),
        mask: Vec::with_capacity(nodes.len()),
        exclusion_radius: r_excl,
        harmonic,
    };
    for n in nodes {
        field.u.push(n.u);
        field.v.push(n.v);
        field.t.push(n.t);
        field.p.push(n.p);
        field.labels.push(n.label);
        field.mask.push(n.mask);
    }
    Ok(field)
}

/// Feasibility of one source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceCheck {
    pub index: usize,
    pub nearest: Option<usize>,
    /// Extremes of `u` sampled from the exclusion radius towards the
    /// nearest neighbour.
    pub u_min: f64,
    pub u_max: f64,
    pub feasible: bool,
    /// Largest `|J|` (with the sign of the given `J`) keeping `u` in range
    /// at the exclusion radius; infinite when unbounded.
    pub max_intensity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceReport {
    pub q_far: f64,
    pub q_range: (f64, f64),
    pub exclusion_radius: f64,
    pub checks: Vec<SourceCheck>,
}

impl SourceReport {
    pub fn feasible(&self) -> bool {
        self.checks.iter().all(|c| c.feasible)
    }
}

/// Checks that the free-space potential stays inside the range of `Q` off
/// the exclusion balls. Report only.
pub fn validate_sources(sys: &SourceSystem, iso: &Isentrope, exclusion_radius: f64) -> Result<SourceReport> {
    let q0 = iso.q_at(sys.far_field_v)?;
    let (lo, hi) = iso.q_range();
    let n = sys.sources.len();
    let mut checks = Vec::with_capacity(n);
    for (i, s) in sys.sources.iter().enumerate() {
        let nearest = (0..n).filter(|&j| j != i).min_by(|&a, &b| {
            distance(s.position, sys.sources[a].position).total_cmp(&distance(s.position, sys.sources[b].position))
        });
        let (dir, reach) = match nearest {
            Some(j) => {
                let d = distance(s.position, sys.sources[j].position);
                let a = sys.sources[j].position;
                (
                    [(a[0] - s.position[0]) / d, (a[1] - s.position[1]) / d, (a[2] - s.position[2]) / d],
                    d - exclusion_radius,
                )
            }
            None => ([1.0, 0.0, 0.0], 10.0 * exclusion_radius),
        };
        let at = |r: f64| [s.position[0] + r * dir[0], s.position[1] + r * dir[1], s.position[2] + r * dir[2]];
        let samples = 33;
        let (mut u_min, mut u_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let span = (reach - exclusion_radius).max(0.0);
        for k in 0..samples {
            let r = exclusion_radius + span * k as f64 / (samples - 1) as f64;
            let u = coulomb(at(r), &sys.sources)? + q0;
            u_min = u_min.min(u);
            u_max = u_max.max(u);
        }
        let feasible = u_min > lo && u_max < hi;
        let others: f64 = sys
            .sources
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, o)| o.intensity / (4.0 * PI * distance(at(exclusion_radius), o.position)))
            .sum();
        let shell = 4.0 * PI * exclusion_radius;
        let max_intensity = if s.intensity >= 0.0 {
            (shell * (hi - q0 - others)).max(0.0)
        } else if lo == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            (shell * (q0 + others - lo)).max(0.0)
        };
        checks.push(SourceCheck { index: i, nearest, u_min, u_max, feasible, max_intensity });
    }
    Ok(SourceReport { q_far: q0, q_range: (lo, hi), exclusion_radius, checks })
}
