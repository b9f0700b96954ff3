//! The reduced Redlich–Kwong gas expressed through its Massieu–Planck
//! potential
//!
//! ```text
//! phi(v, T) = (n/2) ln T + ln(v - 1) - T^(-3/2) ln(v / (v + 1))
//! ```
//!
//! All state quantities follow from `phi` and its partials: `p = T phi_v`,
//! `e = T^2 phi_T`, `gamma = T (v phi_v - phi)`. The reduced entropy drops
//! the additive constant `n/2` of `phi + T phi_T`, so that
//!
//! ```text
//! sigma(v, T) = (n/2) ln T + ln(v - 1) + (1 / (2 T^(3/2))) ln(v / (v + 1)).
//! ```
//!
//! Reduced coordinates are used everywhere; physical units only appear at
//! the [`GasModel::to_reduced`] / [`GasModel::from_reduced`] boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{find_root, newton2, Bracket, NewtonOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GasParams {
    /// Degrees of freedom.
    pub n: f64,
    /// Attraction constant (physical units).
    pub a: f64,
    /// Covolume (physical units).
    pub b: f64,
    /// Gas constant.
    #[serde(rename = "R")]
    pub r: f64,
}

impl Default for GasParams {
    fn default() -> Self {
        GasParams { n: 3.0, a: 1.0, b: 1.0, r: 1.0 }
    }
}

impl GasParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.n >= 1.0) {
            return Err(Error::Config(format!("gas.n must be >= 1, got {}", self.n)));
        }
        for (name, val) in [("a", self.a), ("b", self.b), ("R", self.r)] {
            if !(val > 0.0) || !val.is_finite() {
                return Err(Error::Config(format!("gas.{name} must be positive, got {val}")));
            }
        }
        Ok(())
    }
}

/// `phi` and its analytic partial derivatives at one `(v, T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    pub phi: f64,
    pub phi_v: f64,
    pub phi_t: f64,
    pub phi_vv: f64,
    pub phi_tt: f64,
    pub phi_vt: f64,
    pub phi_vvv: f64,
}

/// A point on the state surface, reduced units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePoint {
    pub v: f64,
    pub t: f64,
    pub p: f64,
    pub e: f64,
    pub sigma: f64,
    pub gamma: f64,
}

/// Coefficients of the quadratic form `kappa / R = k_tt dT.dT + k_vv dv.dv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaForm {
    pub k_tt: f64,
    pub k_vv: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub v_c: f64,
    pub t_c: f64,
    pub p_c: f64,
}

/// Physical-unit state tuple `(p, T, v, e, sigma)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateTuple {
    pub p: f64,
    pub t: f64,
    pub v: f64,
    pub e: f64,
    pub sigma: f64,
}

/// `L(v) = ln(v / (v + 1))` and its first four v-derivatives.
#[derive(Debug, Clone, Copy)]
struct LogRatio {
    l: f64,
    l1: f64,
    l2: f64,
    l3: f64,
    l4: f64,
}

impl LogRatio {
    fn at(v: f64) -> Self {
        let w = v + 1.0;
        LogRatio {
            l: -(1.0 / v).ln_1p(),
            l1: 1.0 / (v * w),
            l2: -(2.0 * v + 1.0) / (v * v * w * w),
            l3: 2.0 * (3.0 * v * v + 3.0 * v + 1.0) / (v.powi(3) * w.powi(3)),
            l4: -6.0 / v.powi(4) + 6.0 / w.powi(4),
        }
    }
}

fn check_domain(v: f64, t: f64) -> Result<()> {
    if !(v > 1.0) || !(t > 0.0) || !v.is_finite() || !t.is_finite() {
        return Err(Error::domain(format!("state requires v > 1 and T > 0, got v = {v}, T = {t}")));
    }
    Ok(())
}

/// Reduced Redlich–Kwong gas. Immutable once built; the critical point is
/// solved once at construction.
#[derive(Debug, Clone)]
pub struct GasModel {
    params: GasParams,
    critical: CriticalPoint,
}

impl Default for GasModel {
    fn default() -> Self {
        GasModel::new(GasParams::default()).expect("default gas parameters are valid")
    }
}

impl GasModel {
    pub fn new(params: GasParams) -> Result<Self> {
        params.validate()?;
        let mut model = GasModel { params, critical: CriticalPoint { v_c: f64::NAN, t_c: f64::NAN, p_c: f64::NAN } };
        model.critical = model.solve_critical_point()?;
        Ok(model)
    }

    /// Reduced gas with `n` degrees of freedom and unit scaling constants.
    pub fn with_dof(n: f64) -> Result<Self> {
        GasModel::new(GasParams { n, ..GasParams::default() })
    }

    pub fn params(&self) -> &GasParams {
        &self.params
    }

    pub fn dof(&self) -> f64 {
        self.params.n
    }

    pub fn potential(&self, v: f64, t: f64) -> Result<Potential> {
        check_domain(v, t)?;
        let n = self.params.n;
        let lr = LogRatio::at(v);
        let s = t.powf(-1.5); // T^(-3/2)
        let u = v - 1.0;
        Ok(Potential {
            phi: 0.5 * n * t.ln() + u.ln() - s * lr.l,
            phi_v: 1.0 / u - s * lr.l1,
            phi_t: 0.5 * n / t + 1.5 * s / t * lr.l,
            phi_vv: -1.0 / (u * u) - s * lr.l2,
            phi_tt: -0.5 * n / (t * t) - 3.75 * s / (t * t) * lr.l,
            phi_vt: 1.5 * s / t * lr.l1,
            phi_vvv: 2.0 / (u * u * u) - s * lr.l3,
        })
    }

    /// Partials needed only by the critical-point Jacobian:
    /// `(phi_vvT, phi_vvvT, phi_vvvv)`.
    pub(crate) fn higher_partials(&self, v: f64, t: f64) -> (f64, f64, f64) {
        let lr = LogRatio::at(v);
        let s = t.powf(-1.5);
        let u = v - 1.0;
        (1.5 * s / t * lr.l2, 1.5 * s / t * lr.l3, -6.0 / u.powi(4) - s * lr.l4)
    }

    pub fn state(&self, v: f64, t: f64) -> Result<StatePoint> {
        let pot = self.potential(v, t)?;
        Ok(StatePoint {
            v,
            t,
            p: t * pot.phi_v,
            e: t * t * pot.phi_t,
            sigma: self.entropy_unchecked(v, t),
            gamma: t * (v * pot.phi_v - pot.phi),
        })
    }

    pub fn pressure(&self, v: f64, t: f64) -> Result<f64> {
        Ok(t * self.potential(v, t)?.phi_v)
    }

    /// Reduced specific entropy.
    pub fn entropy(&self, v: f64, t: f64) -> Result<f64> {
        check_domain(v, t)?;
        Ok(self.entropy_unchecked(v, t))
    }

    fn entropy_unchecked(&self, v: f64, t: f64) -> f64 {
        0.5 * self.params.n * t.ln() + (v - 1.0).ln() - 0.5 * t.powf(-1.5) * (1.0 / v).ln_1p()
    }

    /// `(d sigma / dv, d sigma / dT)`.
    pub fn entropy_gradient(&self, v: f64, t: f64) -> Result<(f64, f64)> {
        check_domain(v, t)?;
        let lr = LogRatio::at(v);
        let s = t.powf(-1.5);
        Ok((1.0 / (v - 1.0) + 0.5 * s * lr.l1, 0.5 * self.params.n / t - 0.75 * s / t * lr.l))
    }

    /// `(dp/dv, dp/dT)` at fixed T and v respectively.
    pub fn pressure_gradient(&self, v: f64, t: f64) -> Result<(f64, f64)> {
        let pot = self.potential(v, t)?;
        Ok((t * pot.phi_vv, pot.phi_v + t * pot.phi_vt))
    }

    pub fn kappa(&self, v: f64, t: f64) -> Result<KappaForm> {
        let pot = self.potential(v, t)?;
        Ok(KappaForm { k_tt: -(pot.phi_tt + 2.0 * pot.phi_t / t), k_vv: pot.phi_vv })
    }

    /// Both applicability inequalities hold strictly.
    pub fn is_applicable(&self, v: f64, t: f64) -> Result<bool> {
        let pot = self.potential(v, t)?;
        Ok(pot.phi_vv < 0.0 && pot.phi_tt + 2.0 * pot.phi_t / t > 0.0)
    }

    /// Closed-form spinodal temperature `((v-1)^2 (2v+1) / (v^2 (v+1)^2))^(2/3)`.
    pub fn spinodal_t(&self, v: f64) -> Result<f64> {
        if !(v > 1.0) || !v.is_finite() {
            return Err(Error::domain(format!("spinodal requires v > 1, got {v}")));
        }
        let u = v - 1.0;
        let w = v + 1.0;
        Ok((u * u * (2.0 * v + 1.0) / (v * v * w * w)).powf(2.0 / 3.0))
    }

    /// Spinodal temperature from a root solve of `phi_vv(v, .) = 0`.
    pub fn spinodal_t_numeric(&self, v: f64, tol: f64) -> Result<f64> {
        if !(v > 1.0) {
            return Err(Error::domain(format!("spinodal requires v > 1, got {v}")));
        }
        // phi_vv is strictly decreasing in T; work in ln T
        let f = |x: f64| self.potential(v, x.exp()).map(|p| p.phi_vv).unwrap_or(f64::NAN);
        let mut lo = -5.0;
        while f(lo) <= 0.0 {
            lo -= 5.0;
            if lo < -700.0 {
                return Err(Error::domain(format!("no spinodal temperature bracket at v = {v}")));
            }
        }
        let mut hi = 5.0;
        while f(hi) >= 0.0 {
            hi += 5.0;
            if hi > 700.0 {
                return Err(Error::domain(format!("no spinodal temperature bracket at v = {v}")));
            }
        }
        let x = find_root(f, Bracket::new(f, lo, hi)?, tol)?;
        Ok(x.exp())
    }

    /// The two volumes where the isotherm `T` meets the spinodal, `v_left < v_c < v_right`.
    pub fn spinodal_volumes(&self, t: f64) -> Result<(f64, f64)> {
        let cp = self.critical;
        if !(t > 0.0) || t >= cp.t_c {
            return Err(Error::NoCoexistence { t, t_c: cp.t_c });
        }
        let f = |x: f64| self.spinodal_t(1.0 + x.exp()).unwrap_or(f64::NAN) - t;
        let xc = (cp.v_c - 1.0).ln();
        let mut lo = xc - 1.0;
        while f(lo) > 0.0 {
            lo -= 1.0;
        }
        let mut hi = xc + 1.0;
        while f(hi) > 0.0 {
            hi += 1.0;
        }
        let tol = 1e-14;
        let left = find_root(f, Bracket::new(f, lo, xc)?, tol)?;
        let right = find_root(f, Bracket::new(f, xc, hi)?, tol)?;
        Ok((1.0 + left.exp(), 1.0 + right.exp()))
    }

    pub fn critical_point(&self) -> CriticalPoint {
        self.critical
    }

    fn solve_critical_point(&self) -> Result<CriticalPoint> {
        let system = |x: [f64; 2]| -> Result<([f64; 2], [[f64; 2]; 2])> {
            let (v, t) = (x[0], x[1]);
            let pot = self.potential(v, t)?;
            let (vvt, vvvt, vvvv) = self.higher_partials(v, t);
            Ok(([pot.phi_vv, pot.phi_vvv], [[pot.phi_vvv, vvt], [vvvv, vvvt]]))
        };
        let opts = NewtonOptions { tol: 1e-13, ..NewtonOptions::default() };
        let sol = newton2(system, [4.0, 0.3], opts)?;
        let (v_c, t_c) = (sol.x[0], sol.x[1]);
        Ok(CriticalPoint { v_c, t_c, p_c: self.pressure(v_c, t_c)? })
    }

    fn scales(&self) -> StateTuple {
        let GasParams { a, b, r, .. } = self.params;
        StateTuple {
            p: (r * a * a / b.powi(5)).cbrt(),
            t: (a / (r * b)).powf(2.0 / 3.0),
            v: b,
            e: (r * a * a / (b * b)).cbrt(),
            sigma: r,
        }
    }

    /// Physical -> reduced.
    pub fn to_reduced(&self, phys: StateTuple) -> StateTuple {
        let s = self.scales();
        StateTuple { p: phys.p / s.p, t: phys.t / s.t, v: phys.v / s.v, e: phys.e / s.e, sigma: phys.sigma / s.sigma }
    }

    /// Reduced -> physical.
    pub fn from_reduced(&self, red: StateTuple) -> StateTuple {
        let s = self.scales();
        StateTuple { p: red.p * s.p, t: red.t * s.t, v: red.v * s.v, e: red.e * s.e, sigma: red.sigma * s.sigma }
    }

    /// Physical-unit scale of the Gibbs potential (same as energy).
    pub fn gibbs_scale(&self) -> f64 {
        self.scales().e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::central_difference;

    fn gas() -> GasModel {
        GasModel::default()
    }

    #[test]
    fn potential_hand_values() {
        let p = gas().potential(2.0, 1.0).unwrap();
        assert!((p.phi - (-(2.0f64 / 3.0).ln())).abs() < 1e-15);
        assert!((p.phi - 0.405465).abs() < 1e-6);
        assert!((p.phi_v - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn partials_match_finite_differences() {
        let g = gas();
        let h = 1e-5;
        for &(v, t) in &[(2.0, 1.0), (1.3, 0.2), (7.5, 0.33), (40.0, 2.0)] {
            let p = g.potential(v, t).unwrap();
            let fd = |f: &dyn Fn(f64) -> f64, x: f64| central_difference(f, x, h * x);
            let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1e-3);
            assert!(rel(p.phi_v, fd(&|x| g.potential(x, t).unwrap().phi, v)) < 1e-7);
            assert!(rel(p.phi_t, fd(&|x| g.potential(v, x).unwrap().phi, t)) < 1e-7);
            assert!(rel(p.phi_vv, fd(&|x| g.potential(x, t).unwrap().phi_v, v)) < 1e-7);
            assert!(rel(p.phi_tt, fd(&|x| g.potential(v, x).unwrap().phi_t, t)) < 1e-7);
            assert!(rel(p.phi_vt, fd(&|x| g.potential(v, x).unwrap().phi_v, t)) < 1e-7);
            assert!(rel(p.phi_vvv, fd(&|x| g.potential(x, t).unwrap().phi_vv, v)) < 1e-7);
            let (vvt, vvvt, vvvv) = g.higher_partials(v, t);
            assert!(rel(vvt, fd(&|x| g.potential(v, x).unwrap().phi_vv, t)) < 1e-7);
            assert!(rel(vvvt, fd(&|x| g.potential(v, x).unwrap().phi_vvv, t)) < 1e-7);
            assert!(rel(vvvv, fd(&|x| g.potential(x, t).unwrap().phi_vvv, v)) < 1e-7);
        }
    }

    #[test]
    fn state_hand_values() {
        let s = gas().state(2.0, 1.0).unwrap();
        assert!((s.p - 5.0 / 6.0).abs() < 1e-15);
        assert!((s.e - (1.5 + 1.5 * (2.0f64 / 3.0).ln())).abs() < 1e-15);
        assert!((s.e - 0.891802).abs() < 1e-6);
        assert!((s.sigma - 0.5 * (2.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((s.sigma + 0.202733).abs() < 1e-6);
    }

    #[test]
    fn entropy_gauge_differs_by_half_n() {
        let g = gas();
        for &(v, t) in &[(2.0, 1.0), (1.01, 0.05), (300.0, 4.0)] {
            let p = g.potential(v, t).unwrap();
            let full = p.phi + t * p.phi_t;
            assert!((full - g.entropy(v, t).unwrap() - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_errors() {
        let g = gas();
        assert!(matches!(g.state(1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(g.state(0.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(g.state(2.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(g.kappa(2.0, -1.0), Err(Error::Domain(_))));
        assert!(GasModel::new(GasParams { n: 0.5, ..GasParams::default() }).is_err());
        assert!(GasModel::new(GasParams { b: 0.0, ..GasParams::default() }).is_err());
    }

    #[test]
    fn kappa_values() {
        let g = gas();
        let k = g.kappa(2.0, 1.0).unwrap();
        assert!((k.k_vv + 31.0 / 36.0).abs() < 1e-14);
        // explicit form of the dT.dT coefficient
        let expect = -(1.5 + 0.75 * 1.5f64.ln());
        assert!((k.k_tt - expect).abs() < 1e-14);
        for &(v, t) in &[(1.001, 1e-3), (2.0, 0.01), (1e4, 50.0)] {
            assert!(g.kappa(v, t).unwrap().k_tt < 0.0);
        }
        let tsp = g.spinodal_t(3.0).unwrap();
        assert!(g.kappa(3.0, tsp).unwrap().k_vv.abs() < 1e-12);
    }

    #[test]
    fn spinodal_values() {
        let g = gas();
        assert!((g.spinodal_t(2.0).unwrap() - (5.0f64 / 36.0).powf(2.0 / 3.0)).abs() < 1e-15);
        assert!((g.spinodal_t(2.0).unwrap() - 0.26819).abs() < 1e-5);
        assert!(g.spinodal_t(1.0 + 1e-8).unwrap() < 1e-10);
        let cp = g.critical_point();
        assert!((g.spinodal_t(cp.v_c).unwrap() - cp.t_c).abs() < 1e-12);
        // factorisation used by the closed form
        for v in [1.5, 2.0, 9.0] {
            let lhs: f64 = 2.0 * v * v * v - 3.0 * v * v + 1.0;
            assert!((lhs - (v - 1.0) * (v - 1.0) * (2.0 * v + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn applicability() {
        let g = gas();
        assert!(g.is_applicable(2.0, 1.0).unwrap());
        assert!(!g.is_applicable(2.0, 0.1).unwrap());
        let tsp = g.spinodal_t(2.0).unwrap();
        assert!(g.is_applicable(2.0, tsp * (1.0 + 1e-9)).unwrap());
        assert!(!g.is_applicable(2.0, tsp * (1.0 - 1e-9)).unwrap());
    }

    #[test]
    fn critical_point_matches_closed_form() {
        let cp = gas().critical_point();
        let v_c = 1.0 / (2f64.cbrt() - 1.0);
        assert!((cp.v_c - v_c).abs() < 1e-10);
        assert!((cp.v_c - 3.847322).abs() < 1e-6);
        assert!((cp.t_c - 0.345).abs() < 1e-3);
        let pot = gas().potential(cp.v_c, cp.t_c).unwrap();
        assert!(pot.phi_vv.abs() < 1e-10 && pot.phi_vvv.abs() < 1e-10);
    }

    #[test]
    fn scaling_round_trip() {
        let unit = gas();
        let x = StateTuple { p: 1.0, t: 1.0, v: 2.0, e: 1.0, sigma: 0.0 };
        assert_eq!(unit.to_reduced(x), x);
        let g = GasModel::new(GasParams { n: 3.0, a: 2.0, b: 0.5, r: 8.314 }).unwrap();
        let back = g.from_reduced(g.to_reduced(x));
        for (a, b) in [(back.p, x.p), (back.t, x.t), (back.v, x.v), (back.e, x.e), (back.sigma, x.sigma)] {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn textbook_rk_constants_reproduce_reduced_critical_point() {
        // methane-like inputs in SI units
        let (r, tc, pc): (f64, f64, f64) = (8.314_462_618, 190.56, 4.599e6);
        let a = 0.427_48 * r * r * tc.powf(2.5) / pc;
        let b = 0.086_64 * r * tc / pc;
        let g = GasModel::new(GasParams { n: 3.0, a, b, r }).unwrap();
        let red = g.to_reduced(StateTuple { p: pc, t: tc, v: r * tc / (3.0 * pc), e: 0.0, sigma: 0.0 });
        let cp = g.critical_point();
        assert!((red.v - 1.0 / (3.0 * 0.086_64)).abs() < 1e-9);
        assert!((red.v - cp.v_c).abs() / cp.v_c < 1e-4);
        assert!((red.t - cp.t_c).abs() / cp.t_c < 1e-4);
    }

    #[test]
    fn ideal_gas_limit() {
        let g = gas();
        for t in [0.5, 1.0, 3.0] {
            let s = g.state(1e8, t).unwrap();
            assert!((s.p * s.v / t - 1.0).abs() < 1e-6);
        }
    }
}
