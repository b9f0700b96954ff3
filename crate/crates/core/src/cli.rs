//! Command-line front end and scenario configuration.
//!
//! Every subcommand writes CSV (header row, 12 significant digits) to
//! `--output` or standard output; remarks go to standard error so that the
//! CSV stream stays clean. Exit codes: 0 success, 2 input or domain error,
//! 3 numerical failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::eos::{GasModel, GasParams, StateTuple};
use crate::error::{Error, Result};
use crate::filtration::{
    solve_field, validate_sources, write_csv_slice, write_vtk, BoxDomain, BranchPolicy, FieldOptions, HarmonicOptions,
    PhaseField, SliceAxis, SolveMode, Source, SourceSystem,
};
use crate::format::{sig12, write_csv};
use crate::isentrope::{h_curve, sigma_star, Isentrope, IsentropeOptions, MediumParams};
use crate::phase::{trace_curve, CoexistenceCurve, PhaseLabel, DEFAULT_T_MIN};

#[derive(Debug, Parser)]
#[command(name = "realgas", version, about = "Redlich-Kwong real-gas thermodynamics and adiabatic filtration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thermodynamic state at one (v, T), in reduced units.
    State(StateArgs),
    /// Spinodal temperature against volume.
    Spinodal(SpinodalArgs),
    /// Coexistence (binodal) curve from T_min up to the critical point.
    Coexistence(CoexistenceArgs),
    /// Tabulated isentrope: v, T, p and the filtration potential Q.
    Isentrope(IsentropeArgs),
    /// The curve sigma0 = H(v) bounding invertibility of Q, and its limit.
    Hcurve(HcurveArgs),
    /// Point-source filtration field from a scenario file.
    Filtration(FiltrationArgs),
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long)]
    pub v: f64,
    #[arg(long = "T")]
    pub t: f64,
    /// Degrees of freedom.
    #[arg(long, default_value_t = 3.0)]
    pub n: f64,
    /// Also print the state in physical units.
    #[arg(long)]
    pub physical: bool,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long = "R", default_value_t = 1.0)]
    pub r: f64,
}

#[derive(Debug, Args)]
pub struct SpinodalArgs {
    #[arg(long, default_value_t = 1.01)]
    pub vmin: f64,
    #[arg(long, default_value_t = 100.0)]
    pub vmax: f64,
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 3.0)]
    pub n: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoexistenceArgs {
    #[arg(long, default_value_t = DEFAULT_T_MIN)]
    pub tmin: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 3.0)]
    pub n: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IsentropeArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub sigma0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e8)]
    pub vmax: f64,
    #[arg(long, default_value_t = 1201)]
    pub knots: usize,
    #[arg(long, default_value_t = 3.0)]
    pub n: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HcurveArgs {
    #[arg(long, default_value_t = 1.05)]
    pub vmin: f64,
    #[arg(long, default_value_t = 1e5)]
    pub vmax: f64,
    #[arg(long, default_value_t = 300)]
    pub samples: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FiltrationArgs {
    /// Scenario file (TOML).
    pub config: PathBuf,
    /// Overrides `output.directory` from the scenario.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub gas: GasParams,
    pub sigma0: f64,
    #[serde(default)]
    pub medium: MediumParams,
    #[serde(default)]
    pub sources: Vec<Source>,
    pub far_field_v: f64,
    pub domain: BoxDomain,
    #[serde(default)]
    pub mode: SolveMode,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub curve: CurveConfig,
    #[serde(default)]
    pub isentrope: IsentropeConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub vtk: bool,
    /// Grid planes written as CSV; the middle `x3` plane when empty.
    pub slices: Vec<SliceConfig>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: PathBuf::from("filtration_out"), vtk: true, slices: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceConfig {
    pub axis: AxisName,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    X1,
    X2,
    X3,
}

impl AxisName {
    fn axis(self) -> SliceAxis {
        match self {
            AxisName::X1 => SliceAxis::X1,
            AxisName::X2 => SliceAxis::X2,
            AxisName::X3 => SliceAxis::X3,
        }
    }

    fn dim(self) -> usize {
        match self {
            AxisName::X1 => 0,
            AxisName::X2 => 1,
            AxisName::X3 => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            AxisName::X1 => "x1",
            AxisName::X2 => "x2",
            AxisName::X3 => "x3",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    /// Scaled residual target of the harmonic solve.
    pub harmonic: f64,
    pub harmonic_max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        let h = HarmonicOptions::default();
        ToleranceConfig { harmonic: h.tol, harmonic_max_iter: h.max_iter }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveConfig {
    /// Lowest traced temperature; colder nodes are masked out-of-range.
    pub t_min: f64,
    pub steps: usize,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig { t_min: DEFAULT_T_MIN, steps: 200 }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IsentropeConfig {
    pub v_max: f64,
    pub knots: usize,
}

impl Default for IsentropeConfig {
    fn default() -> Self {
        let o = IsentropeOptions::default();
        IsentropeConfig { v_max: o.v_max, knots: o.knots }
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Defaults to one cell diagonal.
    pub exclusion_radius: Option<f64>,
    pub branch: BranchPolicy,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.gas.validate()?;
        self.medium.validate()?;
        self.domain.validate()?;
        self.source_system().validate()?;
        if !self.sigma0.is_finite() {
            return Err(Error::Config("sigma0 must be finite".into()));
        }
        for (i, s) in self.sources.iter().enumerate() {
            if !self.domain.contains_strictly(s.position) {
                return Err(Error::Config(format!(
                    "sources[{i}] at {:?} is not strictly inside the domain",
                    s.position
                )));
            }
        }
        if let Some(r) = self.solver.exclusion_radius {
            if !(r >= 0.0) {
                return Err(Error::Config(format!("solver.exclusion_radius must be non-negative, got {r}")));
            }
        }
        for (i, s) in self.output.slices.iter().enumerate() {
            let n = self.domain.resolution[s.axis.dim()];
            if s.index >= n {
                return Err(Error::Config(format!("output.slices[{i}].index = {} exceeds {n} nodes", s.index)));
            }
        }
        if !(self.curve.t_min > 0.0) || self.curve.steps < 2 {
            return Err(Error::Config("curve needs t_min > 0 and at least 2 steps".into()));
        }
        Ok(())
    }

    pub fn source_system(&self) -> SourceSystem {
        SourceSystem {
            sources: self.sources.clone(),
            far_field_v: self.far_field_v,
            sigma0: self.sigma0,
            medium: self.medium,
        }
    }

    pub fn field_options(&self) -> FieldOptions {
        FieldOptions {
            exclusion_radius: self.solver.exclusion_radius,
            harmonic: HarmonicOptions {
                tol: self.tolerances.harmonic,
                max_iter: self.tolerances.harmonic_max_iter,
                omega: None,
            },
            branch: self.solver.branch,
        }
    }
}

/// Everything a scenario run produces.
pub struct ScenarioRun {
    pub gas: GasModel,
    pub isentrope: Isentrope,
    pub curve: CoexistenceCurve,
    pub field: PhaseField,
}

/// Builds the isentrope and coexistence curve for a scenario and solves the
/// field.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    let gas = GasModel::new(cfg.gas)?;
    let opts = IsentropeOptions { v_max: cfg.isentrope.v_max, knots: cfg.isentrope.knots, ..Default::default() };
    let isentrope = Isentrope::build(&gas, cfg.sigma0, cfg.medium, opts)?;
    let curve = trace_curve(&gas, cfg.curve.t_min, gas.critical_point().t_c, cfg.curve.steps)?;
    let field = solve_field(&cfg.source_system(), &cfg.domain, cfg.mode, &isentrope, &curve, cfg.field_options())?;
    Ok(ScenarioRun { gas, isentrope, curve, field })
}

fn sink(
    path: &Option<PathBuf>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut file = io::BufWriter::new(fs::File::create(p)?);
            f(&mut file)?;
            file.flush()?;
        }
        None => f(stdout)?,
    }
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
}

/// Runs one parsed command, writing results to `out` and remarks to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::State(a) => cmd_state(&a, out),
        Command::Spinodal(a) => cmd_spinodal(&a, out),
        Command::Coexistence(a) => cmd_coexistence(&a, out),
        Command::Isentrope(a) => cmd_isentrope(&a, out, err),
        Command::Hcurve(a) => cmd_hcurve(&a, out, err),
        Command::Filtration(a) => cmd_filtration(&a, out, err),
    }
}

fn cmd_state(a: &StateArgs, out: &mut dyn Write) -> Result<()> {
    let gas = GasModel::new(GasParams { n: a.n, a: a.a, b: a.b, r: a.r })?;
    let s = gas.state(a.v, a.t)?;
    let rows = [("v", s.v), ("T", s.t), ("p", s.p), ("e", s.e), ("sigma", s.sigma), ("gamma", s.gamma)];
    for (k, v) in rows {
        writeln!(out, "{k:<6} {}", sig12(v))?;
    }
    if a.physical {
        let phys = gas.from_reduced(StateTuple { p: s.p, t: s.t, v: s.v, e: s.e, sigma: s.sigma });
        writeln!(out, "# physical units")?;
        let rows = [
            ("v", phys.v),
            ("T", phys.t),
            ("p", phys.p),
            ("e", phys.e),
            ("sigma", phys.sigma),
            ("gamma", s.gamma * gas.gibbs_scale()),
        ];
        for (k, v) in rows {
            writeln!(out, "{k:<6} {}", sig12(v))?;
        }
    }
    Ok(())
}

fn cmd_spinodal(a: &SpinodalArgs, out: &mut dyn Write) -> Result<()> {
    if !(a.vmin > 1.0) || !(a.vmax > a.vmin) || a.samples < 2 {
        return Err(Error::domain("spinodal needs 1 < vmin < vmax and at least 2 samples"));
    }
    let gas = GasModel::with_dof(a.n)?;
    let mut rows = Vec::with_capacity(a.samples);
    for v in linspace(a.vmin, a.vmax, a.samples) {
        let t = gas.spinodal_t(v)?;
        rows.push(vec![v, t, gas.pressure(v, t)?]);
    }
    sink(&a.output, out, |w| write_csv(w, &["v", "T", "p"], rows))
}

fn cmd_coexistence(a: &CoexistenceArgs, out: &mut dyn Write) -> Result<()> {
    let gas = GasModel::with_dof(a.n)?;
    let curve = trace_curve(&gas, a.tmin, gas.critical_point().t_c, a.steps)?;
    let rows = curve.points().iter().map(|p| vec![p.t, p.p_sat, p.v_liquid, p.v_gas]).collect::<Vec<_>>();
    sink(&a.output, out, |w| write_csv(w, &["T", "p", "v_liquid", "v_gas"], rows))
}

fn cmd_isentrope(a: &IsentropeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let gas = GasModel::with_dof(a.n)?;
    let medium = MediumParams { k: a.k, mu: a.mu };
    let opts = IsentropeOptions { v_max: a.vmax, knots: a.knots, ..Default::default() };
    let iso = Isentrope::build(&gas, a.sigma0, medium, opts)?;
    let rows = (0..iso.v_grid().len())
        .map(|i| vec![iso.v_grid()[i], iso.t_tab()[i], iso.p_tab()[i], iso.q_tab()[i]])
        .collect::<Vec<_>>();
    sink(&a.output, out, |w| write_csv(w, &["v", "T", "p", "Q"], rows))?;
    writeln!(err, "invertible: {}", iso.invertible())?;
    Ok(())
}

fn cmd_hcurve(a: &HcurveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let gas = GasModel::default();
    let (curve, excluded) = h_curve(&gas, a.vmin, a.vmax, a.samples)?;
    let rows = curve.iter().map(|&(v, h)| vec![v, h]).collect::<Vec<_>>();
    sink(&a.output, out, |w| write_csv(w, &["v", "H"], rows))?;
    if !excluded.is_empty() {
        writeln!(err, "no root of G at {} volumes: {:?}", excluded.len(), excluded)?;
    }
    let line = format!("sigma* = {}", sig12(sigma_star(&gas)?));
    // keep a CSV on stdout parseable
    if a.output.is_some() {
        writeln!(out, "{line}")?;
    } else {
        writeln!(err, "{line}")?;
    }
    Ok(())
}

fn cmd_filtration(a: &FiltrationArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = ScenarioConfig::load(&a.config)?;
    let run = run_scenario(&cfg)?;
    let report = validate_sources(&cfg.source_system(), &run.isentrope, run.field.exclusion_radius)?;
    for c in report.checks.iter().filter(|c| !c.feasible) {
        writeln!(
            err,
            "source {}: u leaves the range of Q near the source (u in [{}, {}]); max intensity {}",
            c.index,
            sig12(c.u_min),
            sig12(c.u_max),
            sig12(c.max_intensity)
        )?;
    }
    let dir = a.out_dir.clone().unwrap_or_else(|| cfg.output.directory.clone());
    fs::create_dir_all(&dir)?;
    if cfg.output.vtk {
        let mut f = io::BufWriter::new(fs::File::create(dir.join("field.vtk"))?);
        write_vtk(&run.field, &mut f)?;
        f.flush()?;
    }
    let mut slices = cfg.output.slices.clone();
    if slices.is_empty() {
        slices.push(SliceConfig { axis: AxisName::X3, index: cfg.domain.resolution[2] / 2 });
    }
    for s in &slices {
        let name = format!("slice_{}_{}.csv", s.axis.name(), s.index);
        let mut f = io::BufWriter::new(fs::File::create(dir.join(name))?);
        write_csv_slice(&run.field, s.axis.axis(), s.index, &mut f)?;
        f.flush()?;
    }
    let summary = run.field.summary();
    let components = run.field.components(PhaseLabel::Condensation);
    let text = format!("{summary}\ncondensation components {}\noutput        {}\n", components.len(), dir.display());
    fs::write(dir.join("summary.txt"), &text)?;
    write!(out, "{text}")?;
    Ok(())
}
