//! States at a fixed entropy level `sigma0`.
//!
//! Along an isentrope every quantity is a function of `v`: the temperature
//! solves `sigma(v, T) = sigma0`, the pressure follows from the equation of
//! state, and the filtration potential is
//!
//! ```text
//! Q(v) = -(k / mu) * int_inf^v p'(s) / s ds,      Q(inf) = 0.
//! ```
//!
//! Steady adiabatic Darcy filtration is the Laplace equation for `Q(v(x))`,
//! so the field `v(x)` is recovered by inverting `Q`. `Q` is monotone only
//! above the threshold `sigma*` where the curve `sigma0 = H(v)` (the locus
//! `dp/dv = 0` along isentropes) has no solution.

use serde::Deserialize;

use crate::eos::GasModel;
use crate::error::{Error, RangeEnd, Result};
use crate::numerics::{find_root, integrate_gk_scaled, Bracket, MonotoneTable};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MediumParams {
    /// Permeability.
    pub k: f64,
    /// Dynamic viscosity.
    pub mu: f64,
}

impl Default for MediumParams {
    fn default() -> Self {
        MediumParams { k: 1.0, mu: 1.0 }
    }
}

impl MediumParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) || !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::Config(format!(
                "medium requires k > 0 and mu > 0, got k = {}, mu = {}",
                self.k, self.mu
            )));
        }
        Ok(())
    }

    fn ratio(&self) -> f64 {
        self.k / self.mu
    }
}

/// Coefficients of the large-`v` and `v -> 1` asymptotics (n = 3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticCoeffs {
    /// Root of `-sigma0 = B/2 + ln B`.
    pub b_star: f64,
    /// `B*^(-2/3) - B*^(1/3)`, so that `p ~ c v^(-5/3)`.
    pub c: f64,
    /// `e^sigma0`, for the `v -> 1` regime.
    pub b: f64,
}

pub fn asymptotic_coeffs(sigma0: f64) -> AsymptoticCoeffs {
    // y = ln B; f is strictly increasing
    let f = |y: f64| 0.5 * y.exp() + y + sigma0;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while f(lo) > 0.0 {
        lo *= 2.0;
    }
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let y =
        Bracket::new(f, lo, hi).and_then(|b| find_root(f, b, 1e-15)).expect("B* equation always has a bracketed root");
    let b_star = y.exp();
    AsymptoticCoeffs { b_star, c: b_star.powf(-2.0 / 3.0) - b_star.cbrt(), b: sigma0.exp() }
}

/// Far-field asymptotics (n = 3): `T ~ (B* v)^(-2/3)`.
pub fn temperature_far(sigma0: f64, v: f64) -> f64 {
    (asymptotic_coeffs(sigma0).b_star * v).powf(-2.0 / 3.0)
}

/// Near-covolume asymptotics (n = 3): `T ~ B^(2/3) (v - 1)^(-2/3)`.
pub fn temperature_near(sigma0: f64, v: f64) -> f64 {
    (sigma0.exp() / (v - 1.0)).powf(2.0 / 3.0)
}

/// Leading far-field term `Q ~ -5 k c / (8 mu v^(8/3))`.
pub fn q_far(sigma0: f64, v: f64, medium: &MediumParams) -> f64 {
    -5.0 * medium.ratio() * asymptotic_coeffs(sigma0).c / (8.0 * v.powf(8.0 / 3.0))
}

/// Leading near-covolume term `Q ~ -k B^(2/3) / (mu (v - 1)^(5/3))`.
pub fn q_near(sigma0: f64, v: f64, medium: &MediumParams) -> f64 {
    -medium.ratio() * sigma0.exp().powf(2.0 / 3.0) / (v - 1.0).powf(5.0 / 3.0)
}

fn check_v(v: f64) -> Result<()> {
    if !(v > 1.0) || !v.is_finite() {
        return Err(Error::domain(format!("isentrope requires v > 1, got {v}")));
    }
    Ok(())
}

/// Temperature on the isentrope `sigma0` at volume `v`.
///
/// `sigma` is increasing and concave in `ln T`, so Newton from the ideal-gas
/// guess (which lies below the root) converges monotonically; a bracketed
/// solve is kept as a fallback.
pub fn temperature(gas: &GasModel, v: f64, sigma0: f64) -> Result<f64> {
    check_v(v)?;
    let half_n = 0.5 * gas.dof();
    let mut x = (sigma0 - (v - 1.0).ln()) / half_n;
    for _ in 0..100 {
        let t = x.exp();
        let (Ok(s), Ok((_, s_t))) = (gas.entropy(v, t), gas.entropy_gradient(v, t)) else { break };
        let step = (s - sigma0) / (s_t * t);
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            return Ok(x.exp());
        }
    }
    temperature_bracketed(gas, v, sigma0)
}

fn temperature_bracketed(gas: &GasModel, v: f64, sigma0: f64) -> Result<f64> {
    let f = |x: f64| gas.entropy(v, x.exp()).map(|s| s - sigma0).unwrap_or(f64::NAN);
    let guesses = [temperature_far(sigma0, v), temperature_near(sigma0, v)];
    let mut lo = (0.1 * guesses[0].min(guesses[1])).ln();
    let mut hi = (10.0 * guesses[0].max(guesses[1])).ln();
    let mut tries = 0;
    while !(f(lo) < 0.0) || !(f(hi) > 0.0) {
        lo -= 2.0;
        hi += 2.0;
        tries += 1;
        if tries > 300 || !lo.is_finite() {
            let (f_lo, f_hi) = (f(lo), f(hi));
            return Err(Error::Bracket { lo: lo.exp(), hi: hi.exp(), f_lo, f_hi });
        }
    }
    let x = find_root(f, Bracket::new(f, lo, hi)?, 1e-15).map_err(|e| match e {
        Error::Bracket { .. } | Error::Convergence { .. } => Error::Convergence {
            context: format!("temperature at v = {v}, sigma0 = {sigma0}"),
            iterations: 0,
            last: vec![v, sigma0],
            residual: f64::NAN,
        },
        other => other,
    })?;
    Ok(x.exp())
}

/// `dT/dv` along an isentrope, at a state `(v, T)` on it.
fn dt_dv(gas: &GasModel, v: f64, t: f64) -> Result<f64> {
    let (s_v, s_t) = gas.entropy_gradient(v, t)?;
    Ok(-s_v / s_t)
}

/// `dp/dv` along an isentrope through `(v, T)`.
fn dp_dv_at(gas: &GasModel, v: f64, t: f64) -> Result<f64> {
    let (p_v, p_t) = gas.pressure_gradient(v, t)?;
    Ok(p_v + p_t * dt_dv(gas, v, t)?)
}

pub fn pressure_on_isentrope(gas: &GasModel, v: f64, sigma0: f64) -> Result<f64> {
    let t = temperature(gas, v, sigma0)?;
    gas.pressure(v, t)
}

/// Total derivative `dp/dv = p_v + p_T dT/dv` along the isentrope.
pub fn dp_dv(gas: &GasModel, v: f64, sigma0: f64) -> Result<f64> {
    let t = temperature(gas, v, sigma0)?;
    dp_dv_at(gas, v, t)
}

/// `Q'(v) = -(k/mu) p'(v) / v` for unit `k/mu`.
fn q_rate_unit(gas: &GasModel, v: f64, sigma0: f64) -> Result<f64> {
    Ok(-dp_dv(gas, v, sigma0)? / v)
}

pub fn q_derivative(gas: &GasModel, v: f64, sigma0: f64, medium: &MediumParams) -> Result<f64> {
    Ok(medium.ratio() * q_rate_unit(gas, v, sigma0)?)
}

/// `(-p'(s) / s, (|p_v| + |p_T dT/dv|) / s)`: the unit-`k/mu` rate and the
/// size of the two terms whose sum is `p'`.
fn rate_terms(gas: &GasModel, s: f64, sigma0: f64) -> Result<(f64, f64)> {
    let t = temperature(gas, s, sigma0)?;
    let (p_v, p_t) = gas.pressure_gradient(s, t)?;
    let b = p_t * dt_dv(gas, s, t)?;
    Ok((-(p_v + b) / s, (p_v.abs() + b.abs()) / s))
}

/// Integrates the rate over `x in [a, b]` with `s = map(x)` and Jacobian
/// `jac(x)`. `p'` cancels near the threshold entropy, so the achievable
/// accuracy is floored by the size of the cancelling terms; `noise` adds a
/// relative floor for roundoff already present in `s`.
fn integrate_rate<M: Fn(f64) -> (f64, f64)>(
    gas: &GasModel,
    sigma0: f64,
    map: M,
    a: f64,
    b: f64,
    rel: f64,
    noise: f64,
) -> Result<f64> {
    let err = std::cell::Cell::new(None);
    let eval = |x: f64| {
        let (s, jac) = map(x);
        if jac == 0.0 {
            return (0.0, 0.0);
        }
        match rate_terms(gas, s, sigma0) {
            Ok((r, m)) => (jac * r, jac * m),
            Err(e) => {
                err.set(Some(e));
                (f64::NAN, f64::NAN)
            }
        }
    };
    let out = integrate_gk_scaled(eval, a, b, 0.0, rel, (64.0 * f64::EPSILON).max(noise));
    if let Some(e) = err.take() {
        return Err(e);
    }
    out
}

/// `int_v^inf Q'(s) ds` for unit `k/mu`, via `s = v / w` on `w in (0, 1]`.
fn q_tail_unit(gas: &GasModel, v: f64, sigma0: f64, rel: f64) -> Result<f64> {
    let map = |w: f64| if w <= 0.0 { (f64::INFINITY, 0.0) } else { (v / w, v / (w * w)) };
    integrate_rate(gas, sigma0, map, 0.0, 1.0, rel, 0.0)
}

/// `int_a^b Q'(s) ds` for unit `k/mu`, in `t = ln(s - 1)` split into unit
/// chunks.
fn q_span_unit(gas: &GasModel, a: f64, b: f64, sigma0: f64, rel: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (ta, tb) = ((a - 1.0).ln(), (b - 1.0).ln());
    let map = |t: f64| {
        let d = t.exp();
        (1.0 + d, d)
    };
    let chunks = ((tb - ta).abs().ceil() as usize).max(1);
    let mut sum = 0.0;
    for i in 0..chunks {
        let lo = ta + (tb - ta) * i as f64 / chunks as f64;
        let hi = if i + 1 == chunks { tb } else { ta + (tb - ta) * (i + 1) as f64 / chunks as f64 };
        // Q' inherits roundoff ~eps/(v - 1) from forming v - 1
        let noise = 16.0 * f64::EPSILON / lo.min(hi).exp();
        sum += integrate_rate(gas, sigma0, map, lo, hi, rel, noise)?;
    }
    Ok(sum)
}

/// Default seam between the log-coordinate quadrature and the tail integral.
pub const DEFAULT_V_SWITCH: f64 = 1e4;
const Q_REL_TOL: f64 = 1e-13;

/// Filtration potential `Q(v, sigma0)` normalised to `Q(inf) = 0`.
pub fn q_potential(gas: &GasModel, v: f64, sigma0: f64, medium: &MediumParams) -> Result<f64> {
    q_potential_with_switch(gas, v, sigma0, medium, DEFAULT_V_SWITCH)
}

pub fn q_potential_with_switch(
    gas: &GasModel,
    v: f64,
    sigma0: f64,
    medium: &MediumParams,
    v_switch: f64,
) -> Result<f64> {
    check_v(v)?;
    medium.validate()?;
    let unit = if v >= v_switch {
        -q_tail_unit(gas, v, sigma0, Q_REL_TOL)?
    } else {
        -q_tail_unit(gas, v_switch, sigma0, Q_REL_TOL)? - q_span_unit(gas, v, v_switch, sigma0, Q_REL_TOL)?
    };
    Ok(medium.ratio() * unit)
}

/// `G(T, v) = p_v sigma_T - p_T sigma_v`; its zero set is `dp/dv = 0` along
/// isentropes.
fn g_function(gas: &GasModel, v: f64, t: f64) -> Result<f64> {
    let (p_v, p_t) = gas.pressure_gradient(v, t)?;
    let (s_v, s_t) = gas.entropy_gradient(v, t)?;
    Ok(p_v * s_t - p_t * s_v)
}

/// `H(v)`: the entropy level whose isentrope has `dp/dv = 0` at `v`.
pub fn h_function(gas: &GasModel, v: f64) -> Result<f64> {
    check_v(v)?;
    // G < 0 on the spinodal (p_v = 0, p_T > 0, sigma_v > 0) and in the
    // whole applicable region; the root lies below the spinodal.
    let g = |x: f64| g_function(gas, v, x.exp()).unwrap_or(f64::NAN);
    let hi = gas.spinodal_t(v)?.ln();
    if !(g(hi) < 0.0) {
        return Err(Error::OutOfBranch { v });
    }
    let mut lo = hi - 1.0;
    while !(g(lo) > 0.0) {
        lo -= 1.0;
        if lo < -690.0 {
            return Err(Error::OutOfBranch { v });
        }
    }
    let x = find_root(g, Bracket::new(g, lo, hi)?, 1e-15)?;
    gas.entropy(v, x.exp())
}

/// `H` sampled on log-spaced volumes; volumes without a root of `G` are
/// returned separately.
pub fn h_curve(gas: &GasModel, v_lo: f64, v_hi: f64, samples: usize) -> Result<(Vec<(f64, f64)>, Vec<f64>)> {
    check_v(v_lo)?;
    if !(v_hi > v_lo) || samples < 2 {
        return Err(Error::domain("h_curve needs v_hi > v_lo and at least two samples"));
    }
    let (a, b) = (v_lo.ln(), v_hi.ln());
    let mut curve = Vec::with_capacity(samples);
    let mut excluded = Vec::new();
    for i in 0..samples {
        let v = (a + (b - a) * i as f64 / (samples - 1) as f64).exp();
        match h_function(gas, v) {
            Ok(h) => curve.push((v, h)),
            Err(Error::OutOfBranch { v }) => excluded.push(v),
            Err(e) => return Err(e),
        }
    }
    Ok((curve, excluded))
}

/// Limit of `H(v)` as `v -> inf` by two rounds of Richardson extrapolation
/// (error ~ 1/v) over `v = 1e3, 1e4, 1e5`.
pub fn sigma_star(gas: &GasModel) -> Result<f64> {
    let h3 = h_function(gas, 1e3)?;
    let h4 = h_function(gas, 1e4)?;
    let h5 = h_function(gas, 1e5)?;
    let r1 = (10.0 * h4 - h3) / 9.0;
    let r2 = (10.0 * h5 - h4) / 9.0;
    Ok((100.0 * r2 - r1) / 99.0)
}

/// `sign(Q) * ln(1 + |Q| / eps)`: a monotone, log-like coordinate for Q
/// values that span dozens of decades.
fn slog(q: f64) -> f64 {
    const LN_EPS: f64 = -690.7755278982137; // ln(1e-300)
    let a = q.abs();
    if a > 1e-300 {
        (a.ln() - LN_EPS + (1e-300 / a).ln_1p()).copysign(q)
    } else {
        (a * 1e300).ln_1p().copysign(q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsentropeOptions {
    /// Smallest tabulated `v` (must be > 1).
    pub v_min: f64,
    pub v_max: f64,
    pub knots: usize,
    pub v_switch: f64,
}

impl Default for IsentropeOptions {
    fn default() -> Self {
        IsentropeOptions { v_min: 1.0 + 1e-10, v_max: 1e8, knots: 1201, v_switch: DEFAULT_V_SWITCH }
    }
}

/// Maximal monotone run of the tabulated Q.
#[derive(Debug, Clone)]
struct Branch {
    first: usize,
    last: usize,
    increasing: bool,
    /// ln(v - 1) against slog(Q)
    table: MonotoneTable,
}

/// A tabulated isentrope. Immutable after [`Isentrope::build`] and shareable
/// across threads.
#[derive(Debug, Clone)]
pub struct Isentrope {
    gas: GasModel,
    sigma0: f64,
    medium: MediumParams,
    v_grid: Vec<f64>,
    t_tab: Vec<f64>,
    p_tab: Vec<f64>,
    q_tab: Vec<f64>,
    invertible: bool,
    q_range: (f64, f64),
    branches: Vec<Branch>,
}

impl Isentrope {
    pub fn build(gas: &GasModel, sigma0: f64, medium: MediumParams, opts: IsentropeOptions) -> Result<Self> {
        medium.validate()?;
        if !sigma0.is_finite() {
            return Err(Error::domain("sigma0 must be finite"));
        }
        check_v(opts.v_min)?;
        if !(opts.v_max > opts.v_min) || opts.knots < 4 || !(opts.v_switch > 1.0) {
            return Err(Error::domain(format!("invalid isentrope tabulation options {opts:?}")));
        }
        let (xa, xb) = ((opts.v_min - 1.0).ln(), (opts.v_max - 1.0).ln());
        let n = opts.knots;
        let xs: Vec<f64> = (0..n).map(|i| xa + (xb - xa) * i as f64 / (n - 1) as f64).collect();
        let v_grid: Vec<f64> = xs.iter().map(|x| 1.0 + x.exp()).collect();

        let mut t_tab = Vec::with_capacity(n);
        let mut p_tab = Vec::with_capacity(n);
        let mut rate = Vec::with_capacity(n);
        for &v in &v_grid {
            let t = temperature(gas, v, sigma0)?;
            t_tab.push(t);
            p_tab.push(gas.pressure(v, t)?);
            rate.push(-dp_dv_at(gas, v, t)? / v);
        }

        // anchor at the first knot at or beyond the seam, then accumulate
        let anchor = v_grid.iter().position(|&v| v >= opts.v_switch).unwrap_or(n - 1);
        let mut q_unit = vec![0.0; n];
        q_unit[anchor] = -q_tail_unit(gas, v_grid[anchor], sigma0, Q_REL_TOL)?;
        for i in (0..anchor).rev() {
            q_unit[i] = q_unit[i + 1] - q_span_unit(gas, v_grid[i], v_grid[i + 1], sigma0, Q_REL_TOL)?;
        }
        for i in anchor + 1..n {
            q_unit[i] = q_unit[i - 1] + q_span_unit(gas, v_grid[i - 1], v_grid[i], sigma0, Q_REL_TOL)?;
        }
        let q_tab: Vec<f64> = q_unit.iter().map(|q| medium.ratio() * q).collect();

        let invertible = rate.iter().all(|&r| r > 0.0) && q_tab.windows(2).all(|w| w[1] > w[0]);
        let sup = if invertible { 0.0 } else { q_tab.iter().copied().fold(0.0, f64::max) };
        let branches = split_branches(&xs, &q_tab)?;
        Ok(Isentrope {
            gas: gas.clone(),
            sigma0,
            medium,
            v_grid,
            t_tab,
            p_tab,
            q_tab,
            invertible,
            q_range: (f64::NEG_INFINITY, sup),
            branches,
        })
    }

    pub fn gas(&self) -> &GasModel {
        &self.gas
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn medium(&self) -> &MediumParams {
        &self.medium
    }

    pub fn invertible(&self) -> bool {
        self.invertible
    }

    /// `(inf Q, sup Q)` over `v > 1`.
    pub fn q_range(&self) -> (f64, f64) {
        self.q_range
    }

    /// Range of Q covered by the table.
    pub fn table_range(&self) -> (f64, f64) {
        let lo = self.q_tab.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.q_tab.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn v_grid(&self) -> &[f64] {
        &self.v_grid
    }

    pub fn t_tab(&self) -> &[f64] {
        &self.t_tab
    }

    pub fn p_tab(&self) -> &[f64] {
        &self.p_tab
    }

    pub fn q_tab(&self) -> &[f64] {
        &self.q_tab
    }

    pub fn temperature(&self, v: f64) -> Result<f64> {
        temperature(&self.gas, v, self.sigma0)
    }

    /// `Q(v)` integrated from the nearest knot.
    pub fn q_at(&self, v: f64) -> Result<f64> {
        check_v(v)?;
        let n = self.v_grid.len();
        if v < self.v_grid[0] || v > self.v_grid[n - 1] {
            return q_potential(&self.gas, v, self.sigma0, &self.medium);
        }
        let i = self.v_grid.partition_point(|&k| k <= v).clamp(1, n - 1);
        let (a, b) = (i - 1, i);
        let (ta, tb) = ((self.v_grid[a] - 1.0).ln(), (self.v_grid[b] - 1.0).ln());
        let tv = (v - 1.0).ln();
        let k = if tv - ta <= tb - tv { a } else { b };
        let span = q_span_unit(&self.gas, self.v_grid[k], v, self.sigma0, Q_REL_TOL)?;
        Ok(self.q_tab[k] + self.medium.ratio() * span)
    }

    /// `v` with `Q(v) = q`. Refuses non-invertible isentropes, listing every
    /// branch preimage.
    pub fn invert_q(&self, q: f64) -> Result<f64> {
        if !self.invertible {
            let mut roots = Vec::new();
            for b in &self.branches {
                if let Ok(v) = self.invert_on(b, q) {
                    roots.push(v);
                }
            }
            return Err(Error::Multivalued { q, branches: roots });
        }
        self.invert_on(&self.branches[0], q)
    }

    /// Inverse on the monotone branch containing `v_anchor`.
    pub fn invert_q_on_branch(&self, q: f64, v_anchor: f64) -> Result<f64> {
        let b = self.branch_containing(v_anchor)?;
        self.invert_on(b, q)
    }

    /// `(v_lo, v_hi, increasing)` for each monotone piece of the table.
    pub fn branch_spans(&self) -> Vec<(f64, f64, bool)> {
        self.branches.iter().map(|b| (self.v_grid[b.first], self.v_grid[b.last], b.increasing)).collect()
    }

    fn branch_containing(&self, v: f64) -> Result<&Branch> {
        self.branches.iter().find(|b| self.v_grid[b.first] <= v && v <= self.v_grid[b.last]).ok_or_else(|| {
            let (lo, hi) = (self.v_grid[0], *self.v_grid.last().unwrap());
            let end = if v < lo { RangeEnd::Below } else { RangeEnd::Above };
            Error::Range { value: v, lo, hi, end }
        })
    }

    fn invert_on(&self, branch: &Branch, q: f64) -> Result<f64> {
        let (lo, hi) = (
            self.q_tab[branch.first].min(self.q_tab[branch.last]),
            self.q_tab[branch.first].max(self.q_tab[branch.last]),
        );
        if !(q >= lo) {
            return Err(Error::Range { value: q, lo, hi, end: RangeEnd::Below });
        }
        if q > hi {
            return Err(Error::Range { value: q, lo, hi, end: RangeEnd::Above });
        }
        let target = slog(q);
        let (a, b) = branch.table.bracket_of(target)?;
        // Newton in ln(v - 1) from the interpolated guess, with Q' exact
        let mut x = branch.table.invert(target)?;
        for _ in 0..8 {
            let d = x.exp();
            let v = 1.0 + d;
            let g = self.q_at(v)? - q;
            let slope = q_derivative(&self.gas, v, self.sigma0, &self.medium)? * d;
            let step = g / slope;
            if !step.is_finite() || !(a..=b).contains(&(x - step)) {
                break;
            }
            x -= step;
            if step.abs() <= 1e-14 * x.abs().max(1.0) {
                return Ok(1.0 + x.exp());
            }
        }
        let f = |x: f64| self.q_at(1.0 + x.exp()).map(slog).unwrap_or(f64::NAN);
        let x = branch.table.invert_refined(target, f, 1e-14)?;
        Ok(1.0 + x.exp())
    }
}

fn split_branches(xs: &[f64], q: &[f64]) -> Result<Vec<Branch>> {
    let n = xs.len();
    let mut out = Vec::new();
    let mut start = 0;
    while start < n - 1 {
        let up = q[start + 1] > q[start];
        let mut end = start + 1;
        while end + 1 < n && (q[end + 1] > q[end]) == up && q[end + 1] != q[end] {
            end += 1;
        }
        let ys: Vec<f64> = q[start..=end].iter().map(|&v| slog(v)).collect();
        let table = MonotoneTable::new(xs[start..=end].to_vec(), ys)?;
        out.push(Branch { first: start, last: end, increasing: up, table });
        start = end;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasModel {
        GasModel::default()
    }

    #[test]
    fn b_star_and_c_at_zero_entropy() {
        let a = asymptotic_coeffs(0.0);
        assert!((a.b_star - 0.7035).abs() < 1e-4);
        assert!((0.5 * a.b_star + a.b_star.ln()).abs() < 1e-14);
        assert!((a.c - 0.375).abs() < 1e-3);
        assert_eq!(a.b, 1.0);
        let half = asymptotic_coeffs(-0.5);
        assert!((half.b_star - 1.0).abs() < 1e-14);
        assert!(half.c.abs() < 1e-14);
    }

    #[test]
    fn temperature_round_trip() {
        let g = gas();
        for &(v, s0) in &[(1.0 + 1e-9, 0.0), (1.5, -0.3), (5.0, 2.0), (1e6, -0.1), (30.0, -3.0)] {
            let t = temperature(&g, v, s0).unwrap();
            assert!((g.entropy(v, t).unwrap() - s0).abs() < 1e-10);
        }
    }

    #[test]
    fn temperature_asymptotics() {
        let g = gas();
        let t = temperature(&g, 1e4, 0.0).unwrap();
        assert!((t / temperature_far(0.0, 1e4) - 1.0).abs() < 0.01);
        let v = 1.0 + 1e-6;
        let t = temperature(&g, v, 0.0).unwrap();
        assert!((t * (v - 1.0).powf(2.0 / 3.0) - 1.0).abs() < 0.02);
    }

    #[test]
    fn dp_dv_matches_finite_difference() {
        let g = gas();
        for &(v, s0) in &[(1.5, 0.0), (4.0, 0.0), (20.0, -1.0), (300.0, 0.7)] {
            let h = 1e-5 * v;
            let fd = (pressure_on_isentrope(&g, v + h, s0).unwrap() - pressure_on_isentrope(&g, v - h, s0).unwrap())
                / (2.0 * h);
            let an = dp_dv(&g, v, s0).unwrap();
            assert!((fd - an).abs() / an.abs() < 1e-6, "v {v}: {fd} vs {an}");
        }
    }

    #[test]
    fn far_pressure_coefficient() {
        let g = gas();
        let v: f64 = 1e5;
        let p = pressure_on_isentrope(&g, v, 0.0).unwrap();
        assert!((p * v.powf(5.0 / 3.0) / asymptotic_coeffs(0.0).c - 1.0).abs() < 1e-3);
    }

    #[test]
    fn q_asymptotics() {
        let g = gas();
        let m = MediumParams::default();
        let q = q_potential(&g, 1e4, 0.0, &m).unwrap();
        assert!((q / q_far(0.0, 1e4, &m) - 1.0).abs() < 0.01);
        let v = 1.0 + 1e-4;
        let q = q_potential(&g, v, 0.0, &m).unwrap();
        assert!((q / q_near(0.0, v, &m) - 1.0).abs() < 0.05);
    }

    #[test]
    fn tail_and_span_agree_across_the_seam() {
        let g = gas();
        let m = MediumParams::default();
        let a = q_potential_with_switch(&g, 50.0, 0.0, &m, 1e3).unwrap();
        let b = q_potential_with_switch(&g, 50.0, 0.0, &m, 1e5).unwrap();
        assert!((a / b - 1.0).abs() < 1e-8);
    }

    #[test]
    fn h_limit_is_minus_half() {
        let s = sigma_star(&gas()).unwrap();
        assert!((s + 0.5).abs() < 0.05, "{s}");
    }

    #[test]
    fn slog_is_monotone() {
        let qs = [-1e16, -3.0, -1e-20, -1e-305, 0.0, 1e-305, 1e-20, 2.0, 1e16];
        let ys: Vec<f64> = qs.iter().map(|&q| slog(q)).collect();
        assert!(ys.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn table_is_invertible_above_threshold() {
        let g = gas();
        let iso = Isentrope::build(&g, 0.0, MediumParams::default(), IsentropeOptions::default()).unwrap();
        assert!(iso.invertible());
        assert_eq!(iso.q_range(), (f64::NEG_INFINITY, 0.0));
        assert!(iso.q_tab().windows(2).all(|w| w[1] > w[0]));
        assert!(*iso.q_tab().last().unwrap() < 0.0);
        for &v in &[1.0 + 1e-8, 1.0001, 1.3, 3.8, 17.0, 512.0, 2.5e4, 9e7] {
            let q = iso.q_at(v).unwrap();
            let back = iso.invert_q(q).unwrap();
            assert!((back - v).abs() / v < 1e-8, "{v} -> {q} -> {back}");
        }
        // knot values agree with the standalone potential
        let i = 400;
        let v = iso.v_grid()[i];
        let direct = q_potential(&g, v, 0.0, &MediumParams::default()).unwrap();
        assert!((direct / iso.q_tab()[i] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn table_below_threshold_reports_branches() {
        let g = gas();
        let iso = Isentrope::build(&g, -1.0, MediumParams::default(), IsentropeOptions::default()).unwrap();
        assert!(!iso.invertible());
        let spans = iso.branch_spans();
        assert!(spans.len() >= 2);
        assert!(spans[0].2 && !spans[1].2);
        let (_, sup) = iso.q_range();
        assert!(sup > 0.0);
        let q = 0.5 * sup;
        match iso.invert_q(q).unwrap_err() {
            Error::Multivalued { branches, .. } => {
                assert_eq!(branches.len(), 2);
                for v in branches {
                    assert!((iso.q_at(v).unwrap() / q - 1.0).abs() < 1e-8);
                }
            }
            e => panic!("{e:?}"),
        }
        let v = iso.invert_q_on_branch(q, spans[1].0 + 1.0).unwrap();
        assert!(v > spans[1].0);
    }
}
