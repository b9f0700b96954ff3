//! Vapour–liquid coexistence.
//!
//! Phase-equivalent volumes `(v1, v2)` on an isotherm satisfy
//!
//! ```text
//! phi_v(v2, T) = phi_v(v1, T)
//! phi(v2, T) - v2 phi_v(v2, T) = phi(v1, T) - v1 phi_v(v1, T)
//! ```
//!
//! i.e. equal pressure and equal Gibbs potential. [`solve_pair`] solves this
//! system with damped Newton in `ln(v - 1)` coordinates;
//! [`equal_area_pressure`] is an independent route through the Maxwell
//! equal-area rule, evaluated by quadrature.

use std::fmt;

use crate::eos::GasModel;
use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate, newton2, Bracket, MonotoneTable, NewtonOptions};

/// Fraction of `T_c` where continuation starts; above it the pair collapses
/// analytically onto the critical point.
pub const NEAR_CRITICAL: f64 = 0.995;

/// Default lower end of a traced curve.
pub const DEFAULT_T_MIN: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoexistencePoint {
    pub t: f64,
    pub p_sat: f64,
    pub v_liquid: f64,
    pub v_gas: f64,
}

impl CoexistencePoint {
    /// `(p(v_gas) - p(v_liquid), gamma(v_gas) - gamma(v_liquid))`.
    pub fn residuals(&self, gas: &GasModel) -> Result<(f64, f64)> {
        let a = gas.state(self.v_liquid, self.t)?;
        let b = gas.state(self.v_gas, self.t)?;
        Ok((b.p - a.p, b.gamma - a.gamma))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseLabel {
    Liquid,
    Gas,
    Condensation,
    Supercritical,
    Inapplicable,
}

impl PhaseLabel {
    pub const ALL: [PhaseLabel; 5] = [
        PhaseLabel::Liquid,
        PhaseLabel::Gas,
        PhaseLabel::Condensation,
        PhaseLabel::Supercritical,
        PhaseLabel::Inapplicable,
    ];

    /// Integer code used in VTK and CSV output.
    pub fn code(self) -> i32 {
        match self {
            PhaseLabel::Liquid => 0,
            PhaseLabel::Gas => 1,
            PhaseLabel::Condensation => 2,
            PhaseLabel::Supercritical => 3,
            PhaseLabel::Inapplicable => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PhaseLabel::Liquid => "liquid",
            PhaseLabel::Gas => "gas",
            PhaseLabel::Condensation => "condensation",
            PhaseLabel::Supercritical => "supercritical",
            PhaseLabel::Inapplicable => "inapplicable",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn pair_system(gas: &GasModel, t: f64) -> impl Fn([f64; 2]) -> Result<([f64; 2], [[f64; 2]; 2])> + '_ {
    move |x: [f64; 2]| {
        let (d1, d2) = (x[0].exp(), x[1].exp());
        let (v1, v2) = (1.0 + d1, 1.0 + d2);
        let a = gas.potential(v1, t)?;
        let b = gas.potential(v2, t)?;
        let f = [b.phi_v - a.phi_v, (b.phi - v2 * b.phi_v) - (a.phi - v1 * a.phi_v)];
        let jac = [[-a.phi_vv * d1, b.phi_vv * d2], [v1 * a.phi_vv * d1, -v2 * b.phi_vv * d2]];
        Ok((f, jac))
    }
}

fn check_subcritical(gas: &GasModel, t: f64) -> Result<f64> {
    let t_c = gas.critical_point().t_c;
    if !(t > 0.0) || t >= t_c {
        return Err(Error::NoCoexistence { t, t_c });
    }
    Ok(t_c)
}

/// Outer roots of `p(v, T) = p`: one on the liquid side of the left
/// spinodal volume and one on the gas side of the right one.
fn outer_roots(gas: &GasModel, t: f64, p: f64, spinodal: (f64, f64)) -> Result<(f64, f64)> {
    let f = |x: f64| gas.pressure(1.0 + x.exp(), t).unwrap_or(f64::NAN) - p;
    let xl = (spinodal.0 - 1.0).ln();
    let mut lo = xl - 1.0;
    while f(lo) < 0.0 {
        lo -= 2.0;
        if lo < -700.0 {
            return Err(Error::domain(format!("no liquid root for p = {p} at T = {t}")));
        }
    }
    let xr = (spinodal.1 - 1.0).ln();
    let mut hi = xr + 1.0;
    while f(hi) > 0.0 {
        hi += 2.0;
        if hi > 700.0 {
            return Err(Error::domain(format!("no gas root for p = {p} at T = {t}")));
        }
    }
    let tol = 1e-15;
    let x1 = find_root(f, Bracket::new(f, lo, xl)?, tol)?;
    let x2 = find_root(f, Bracket::new(f, xr, hi)?, tol)?;
    Ok((1.0 + x1.exp(), 1.0 + x2.exp()))
}

/// Coexistence pair at `T` from a cold start seeded by the spinodal.
pub fn solve_pair(gas: &GasModel, t: f64) -> Result<CoexistencePoint> {
    check_subcritical(gas, t)?;
    let spin = gas.spinodal_volumes(t)?;
    let p_min = gas.pressure(spin.0, t)?;
    let p_max = gas.pressure(spin.1, t)?;
    // trial pressure inside the spinodal window, biased low: p_sat sits
    // far below p_max on cold isotherms
    let p_trial = if p_min > 0.0 { (p_min * p_max).sqrt() } else { 0.1 * p_max };
    let (v1, v2) = outer_roots(gas, t, p_trial, spin)?;
    solve_pair_from(gas, t, (v1, v2))
}

/// Coexistence pair at `T` refined from a seed `(v_liquid, v_gas)`.
pub fn solve_pair_from(gas: &GasModel, t: f64, seed: (f64, f64)) -> Result<CoexistencePoint> {
    let t_c = check_subcritical(gas, t)?;
    if !(seed.0 > 1.0 && seed.1 > seed.0) {
        return Err(Error::domain(format!("invalid coexistence seed {seed:?} at T = {t}")));
    }
    let guess = [(seed.0 - 1.0).ln(), (seed.1 - 1.0).ln()];
    let opts = NewtonOptions { tol: 1e-13, max_iter: 200, ..NewtonOptions::default() };
    let sol = newton2(pair_system(gas, t), guess, opts).map_err(|e| match e {
        Error::Convergence { context, iterations, last, residual } => Error::Convergence {
            context: format!("coexistence pair at T = {t}: {context}"),
            iterations,
            last: last.iter().map(|x| 1.0 + x.exp()).collect(),
            residual,
        },
        other => other,
    })?;
    let (v_liquid, v_gas) = (1.0 + sol.x[0].exp(), 1.0 + sol.x[1].exp());
    let v_c = gas.critical_point().v_c;
    if !(v_liquid < v_c && v_c < v_gas) {
        return Err(Error::Convergence {
            context: format!("coexistence pair at T = {t} (T_c = {t_c}) collapsed to a trivial solution"),
            iterations: sol.iterations,
            last: vec![v_liquid, v_gas],
            residual: sol.residual,
        });
    }
    Ok(CoexistencePoint { t, p_sat: gas.pressure(v_gas, t)?, v_liquid, v_gas })
}

/// Equal-area (Maxwell) saturation state at `T`: the pressure at which
/// `int_{v1}^{v2} p(v, T) dv = p (v2 - v1)`.
pub fn equal_area_pressure(gas: &GasModel, t: f64) -> Result<CoexistencePoint> {
    check_subcritical(gas, t)?;
    let spin = gas.spinodal_volumes(t)?;
    let p_min = gas.pressure(spin.0, t)?;
    let p_max = gas.pressure(spin.1, t)?;

    let area = |p: f64| -> Result<f64> {
        let (v1, v2) = outer_roots(gas, t, p, spin)?;
        // substitute v = e^s
        let integrand = |s: f64| {
            let v = s.exp();
            (gas.pressure(v, t).unwrap_or(f64::NAN) - p) * v
        };
        let scale = p * (v2 - v1);
        integrate(integrand, v1.ln(), v2.ln(), 1e-13 * scale)
    };
    let signed = |p: f64| area(p).unwrap_or(f64::NAN);

    let p_hi = p_max * (1.0 - 1e-12);
    let mut p_lo = if p_min > 0.0 { p_min * (1.0 + 1e-12) } else { p_max * 1e-6 };
    while signed(p_lo) <= 0.0 {
        p_lo *= 1e-3;
        if p_lo < p_max * 1e-60 {
            return Err(Error::domain(format!("equal-area bracket not found at T = {t}")));
        }
    }
    let bracket = Bracket::new(signed, p_lo, p_hi)?;
    let p_sat = find_root(signed, bracket, 1e-15 * p_max)?;
    let (v_liquid, v_gas) = outer_roots(gas, t, p_sat, spin)?;
    Ok(CoexistencePoint { t, p_sat, v_liquid, v_gas })
}

/// Seed for the pair close below `T_c` from the cubic expansion of the
/// isotherm about the critical point.
fn near_critical_seed(gas: &GasModel, t: f64) -> (f64, f64) {
    let cp = gas.critical_point();
    let (phi_vvt, _, phi_vvvv) = gas.higher_partials(cp.v_c, cp.t_c);
    let p_vt = cp.t_c * phi_vvt;
    let p_vvv = cp.t_c * phi_vvvv;
    let dv = (-6.0 * p_vt * (t - cp.t_c) / p_vvv).sqrt();
    (cp.v_c - dv, cp.v_c + dv)
}

/// A traced binodal, ordered by ascending temperature.
#[derive(Debug, Clone)]
pub struct CoexistenceCurve {
    points: Vec<CoexistencePoint>,
    t_min: f64,
    t_max: f64,
    liquid: MonotoneTable,
    /// ln(v_gas) against T
    gas_branch: MonotoneTable,
}

impl CoexistenceCurve {
    /// Builds a curve from points; validates ordering and branch monotonicity.
    pub fn from_points(mut points: Vec<CoexistencePoint>) -> Result<Self> {
        points.sort_by(|a, b| a.t.total_cmp(&b.t));
        if points.len() < 2 {
            return Err(Error::domain("a coexistence curve needs at least two points"));
        }
        let ts: Vec<f64> = points.iter().map(|p| p.t).collect();
        let liquid = MonotoneTable::new(ts.clone(), points.iter().map(|p| p.v_liquid).collect())
            .map_err(|_| Error::domain("liquid branch must be strictly increasing in T"))?;
        let gas_branch = MonotoneTable::new(ts.clone(), points.iter().map(|p| p.v_gas.ln()).collect())
            .map_err(|_| Error::domain("gas branch must be strictly decreasing in T"))?;
        if liquid.direction() != crate::numerics::Direction::Increasing
            || gas_branch.direction() != crate::numerics::Direction::Decreasing
        {
            return Err(Error::domain("binodal branches have the wrong orientation"));
        }
        Ok(CoexistenceCurve { t_min: ts[0], t_max: *ts.last().unwrap(), points, liquid, gas_branch })
    }

    pub fn points(&self) -> &[CoexistencePoint] {
        &self.points
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    /// Interpolated `(v_liquid(T), v_gas(T))`.
    pub fn branches_at(&self, t: f64) -> Result<(f64, f64)> {
        if t < self.t_min || t > self.t_max || t.is_nan() {
            return Err(Error::Extrapolation { t, t_min: self.t_min, t_max: self.t_max });
        }
        Ok((self.liquid.eval(t)?, self.gas_branch.eval(t)?.exp()))
    }

    /// `(v_liquid, v_gas)` pairs.
    pub fn volume_pairs(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.v_liquid, p.v_gas)).collect()
    }

    /// `(p_sat, T)` projection.
    pub fn pt_projection(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.p_sat, p.t)).collect()
    }

    /// `(v, T)` dome: liquid branch upward, then gas branch downward.
    pub fn vt_projection(&self) -> Vec<(f64, f64)> {
        let up = self.points.iter().map(|p| (p.v_liquid, p.t));
        let down = self.points.iter().rev().map(|p| (p.v_gas, p.t));
        up.chain(down).collect()
    }

    /// `(p, v, T)` lift of both branches.
    pub fn pvt_lift(&self) -> Vec<(f64, f64, f64)> {
        let up = self.points.iter().map(|p| (p.p_sat, p.v_liquid, p.t));
        let down = self.points.iter().rev().map(|p| (p.p_sat, p.v_gas, p.t));
        up.chain(down).collect()
    }

    /// Phase of the state `(v, T)`. Points exactly on a branch count as the
    /// single phase on that side.
    pub fn classify(&self, gas: &GasModel, v: f64, t: f64) -> Result<PhaseLabel> {
        if t >= gas.critical_point().t_c {
            gas.potential(v, t)?;
            return Ok(PhaseLabel::Supercritical);
        }
        if !gas.is_applicable(v, t)? {
            return Ok(PhaseLabel::Inapplicable);
        }
        let (v_liq, v_gas) = self.branches_at(t)?;
        Ok(if v <= v_liq {
            PhaseLabel::Liquid
        } else if v >= v_gas {
            PhaseLabel::Gas
        } else {
            PhaseLabel::Condensation
        })
    }
}

/// Predictor–corrector continuation of the binodal from just below `T_c`
/// down to `t_min`, emitting `steps` evenly spaced isotherms on
/// `[t_min, min(t_max, NEAR_CRITICAL * T_c)]`, plus the critical endpoint
/// when `t_max` reaches `T_c`.
pub fn trace_curve(gas: &GasModel, t_min: f64, t_max: f64, steps: usize) -> Result<CoexistenceCurve> {
    let cp = gas.critical_point();
    let t_c = cp.t_c;
    let reaches_critical = t_max >= t_c * (1.0 - 1e-12);
    if !(t_min > 0.0 && t_min < t_max && t_max <= t_c * (1.0 + 1e-12)) {
        return Err(Error::domain(format!(
            "trace range must satisfy 0 < t_min < t_max <= T_c = {t_c}, got [{t_min}, {t_max}]"
        )));
    }
    if steps < 2 {
        return Err(Error::domain("trace needs at least two steps"));
    }
    let t_start = NEAR_CRITICAL * t_c;
    let t_top = t_max.min(t_start);
    if t_min >= t_top {
        return Err(Error::domain(format!("t_min = {t_min} is above the continuation start {t_top}")));
    }
    let dt = (t_top - t_min) / (steps - 1) as f64;
    let targets: Vec<f64> = (0..steps).rev().map(|k| t_min + dt * k as f64).collect();

    let mut march = Marcher::new(gas, t_start)?;
    let mut out = Vec::with_capacity(steps + 1);
    for &target in &targets {
        march.advance_to(target, dt)?;
        out.push(march.current());
    }
    if reaches_critical {
        out.push(CoexistencePoint { t: t_c, p_sat: cp.p_c, v_liquid: cp.v_c, v_gas: cp.v_c });
    }
    for p in &out {
        let (dp, dg) = p.residuals(gas)?;
        if dp.abs() > 1e-9 || dg.abs() > 1e-9 {
            return Err(Error::Convergence {
                context: format!("coexistence residual check at T = {}", p.t),
                iterations: 0,
                last: vec![p.v_liquid, p.v_gas],
                residual: dp.abs().max(dg.abs()),
            });
        }
    }
    CoexistenceCurve::from_points(out)
}

struct Marcher<'a> {
    gas: &'a GasModel,
    history: Vec<CoexistencePoint>,
}

impl<'a> Marcher<'a> {
    fn new(gas: &'a GasModel, t_start: f64) -> Result<Self> {
        let first = solve_pair_from(gas, t_start, near_critical_seed(gas, t_start))?;
        Ok(Marcher { gas, history: vec![first] })
    }

    fn current(&self) -> CoexistencePoint {
        *self.history.last().unwrap()
    }

    /// Secant predictor in `ln(v - 1)` from the last two solutions.
    fn predict(&self, t: f64) -> (f64, f64) {
        let cur = self.current();
        if self.history.len() < 2 {
            return (cur.v_liquid, cur.v_gas);
        }
        let prev = self.history[self.history.len() - 2];
        let s = (t - cur.t) / (cur.t - prev.t);
        let ext = |a: f64, b: f64| {
            let (la, lb) = ((a - 1.0).ln(), (b - 1.0).ln());
            1.0 + (lb + s * (lb - la)).exp()
        };
        (ext(prev.v_liquid, cur.v_liquid), ext(prev.v_gas, cur.v_gas))
    }

    fn advance_to(&mut self, target: f64, max_step: f64) -> Result<()> {
        let mut step = max_step;
        while self.current().t > target {
            let t = (self.current().t - step).max(target);
            match solve_pair_from(self.gas, t, self.predict(t)) {
                Ok(p) => {
                    self.history.push(p);
                    if self.history.len() > 2 {
                        self.history.remove(0);
                    }
                    step = (step * 1.5).min(max_step);
                }
                Err(e) => {
                    step *= 0.5;
                    if step < max_step * 1e-6 {
                        return Err(match e {
                            Error::Convergence { context, iterations, last, residual } => Error::Convergence {
                                context: format!("continuation failed at T = {t}: {context}"),
                                iterations,
                                last,
                                residual,
                            },
                            other => other,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasModel {
        GasModel::default()
    }

    #[test]
    fn pair_at_030_matches_equal_area() {
        let g = gas();
        let a = solve_pair(&g, 0.30).unwrap();
        let b = equal_area_pressure(&g, 0.30).unwrap();
        let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
        assert!(rel(a.p_sat, b.p_sat) < 1e-6);
        assert!(rel(a.v_liquid, b.v_liquid) < 1e-6);
        assert!(rel(a.v_gas, b.v_gas) < 1e-6);
        let (dp, dg) = a.residuals(&g).unwrap();
        assert!(dp.abs() < 1e-10 && dg.abs() < 1e-10);
    }

    #[test]
    fn p_sat_between_spinodal_pressures() {
        let g = gas();
        for t in [0.2, 0.3, 0.34] {
            let pt = solve_pair(&g, t).unwrap();
            let (l, r) = g.spinodal_volumes(t).unwrap();
            let (p_min, p_max) = (g.pressure(l, t).unwrap(), g.pressure(r, t).unwrap());
            assert!(p_min < pt.p_sat && pt.p_sat < p_max);
            assert!(pt.v_liquid < l && r < pt.v_gas);
        }
    }

    #[test]
    fn supercritical_has_no_pair() {
        let g = gas();
        let t_c = g.critical_point().t_c;
        assert!(matches!(solve_pair(&g, t_c), Err(Error::NoCoexistence { .. })));
        assert!(matches!(equal_area_pressure(&g, 0.4), Err(Error::NoCoexistence { .. })));
    }

    #[test]
    fn pair_collapses_towards_critical() {
        let g = gas();
        let cp = g.critical_point();
        let mut last_gap = f64::INFINITY;
        for frac in [NEAR_CRITICAL, 0.999, 0.9999, 0.99999] {
            let pt = solve_pair_from(&g, frac * cp.t_c, near_critical_seed(&g, frac * cp.t_c)).unwrap();
            let gap = pt.v_gas - pt.v_liquid;
            assert!(gap < last_gap);
            last_gap = gap;
        }
        assert!(last_gap < 0.1);
    }

    #[test]
    fn maxwell_area_vanishes_near_critical() {
        let g = gas();
        let t_c = g.critical_point().t_c;
        let (l, r) = g.spinodal_volumes(0.999 * t_c).unwrap();
        let (l2, r2) = g.spinodal_volumes(0.9 * t_c).unwrap();
        assert!(r - l < r2 - l2);
        // gap closes like sqrt(T_c - T)
        let near = equal_area_pressure(&g, 0.9999 * t_c).unwrap();
        let far = equal_area_pressure(&g, 0.99 * t_c).unwrap();
        let ratio = (near.v_gas - near.v_liquid) / (far.v_gas - far.v_liquid);
        assert!((ratio - 0.1).abs() < 0.02, "ratio {ratio}");
    }

    #[test]
    fn trace_curve_shape() {
        let g = gas();
        let cp = g.critical_point();
        let curve = trace_curve(&g, 0.2, cp.t_c, 40).unwrap();
        let pts = curve.points();
        assert_eq!(pts.len(), 41);
        for w in pts.windows(2) {
            assert!(w[1].t > w[0].t);
            assert!(w[1].v_liquid > w[0].v_liquid);
            assert!(w[1].v_gas < w[0].v_gas);
            assert!(w[1].p_sat > w[0].p_sat);
        }
        let last = pts.last().unwrap();
        assert!((last.v_liquid - cp.v_c).abs() < 1e-4 && (last.v_gas - cp.v_c).abs() < 1e-4);
        // v_gas decreasing along the (v1, v2) curve
        let pairs = curve.volume_pairs();
        assert!(pairs.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 < w[0].1));
        assert_eq!(curve.vt_projection().len(), 2 * pts.len());
        assert_eq!(curve.pvt_lift().len(), 2 * pts.len());
    }

    #[test]
    fn classify_examples() {
        let g = gas();
        let cp = g.critical_point();
        let curve = trace_curve(&g, 0.15, cp.t_c, 60).unwrap();
        assert_eq!(curve.classify(&g, cp.v_c, 2.0 * cp.t_c).unwrap(), PhaseLabel::Supercritical);
        assert_eq!(curve.classify(&g, 100.0, 0.30).unwrap(), PhaseLabel::Gas);
        let (vl, vg) = curve.branches_at(0.30).unwrap();
        let mid = 0.5 * (vl + vg);
        // the midpoint sits inside the spinodal at T = 0.30
        let (l, r) = g.spinodal_volumes(0.30).unwrap();
        let probe = if mid > l && mid < r { 0.5 * (vl + l) } else { mid };
        assert_eq!(curve.classify(&g, probe, 0.30).unwrap(), PhaseLabel::Condensation);
        assert_eq!(
            curve.classify(&g, mid, 0.30).unwrap(),
            if mid > l && mid < r { PhaseLabel::Inapplicable } else { PhaseLabel::Condensation }
        );
        assert_eq!(curve.classify(&g, vl, 0.30).unwrap(), PhaseLabel::Liquid);
        assert_eq!(curve.classify(&g, vg, 0.30).unwrap(), PhaseLabel::Gas);
        assert_eq!(curve.classify(&g, 1.05, 0.30).unwrap(), PhaseLabel::Liquid);
        assert!(matches!(curve.classify(&g, 1.01, 0.1), Err(Error::Extrapolation { .. })));
    }
}
