//! Properties of the equation of state and the coexistence computation.

use proptest::prelude::*;
use realgas::eos::StateTuple;
use realgas::numerics::{central_difference, newton2, NewtonOptions};
use realgas::phase::{equal_area_pressure, solve_pair, solve_pair_from, trace_curve, PhaseLabel};
use realgas::{GasModel, GasParams};

fn gas() -> GasModel {
    GasModel::with_dof(3.0).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pressure_is_t_times_phi_v(lv in -3.0f64..6.0, lt in -4.0f64..3.0) {
        let g = gas();
        let (v, t) = (1.0 + lv.exp(), lt.exp());
        let pot = g.potential(v, t).unwrap();
        let s = g.state(v, t).unwrap();
        prop_assert!(rel(s.p, t * pot.phi_v) < 1e-14 || (s.p - t * pot.phi_v).abs() < 1e-14);
        prop_assert!(rel(s.e, t * t * pot.phi_t) < 1e-13 || (s.e - t * t * pot.phi_t).abs() < 1e-13);
    }

    #[test]
    fn k_tt_is_negative_everywhere(lv in -3.0f64..6.0, lt in -4.0f64..3.0) {
        let k = gas().kappa(1.0 + lv.exp(), lt.exp()).unwrap();
        prop_assert!(k.k_tt < 0.0);
    }

    #[test]
    fn spinodal_closed_form_matches_root_solve(v in 1.01f64..100.0) {
        let g = gas();
        let closed = g.spinodal_t(v).unwrap();
        let numeric = g.spinodal_t_numeric(v, 1e-14).unwrap();
        prop_assert!(rel(closed, numeric) < 1e-10);
        prop_assert!(g.kappa(v, closed).unwrap().k_vv.abs() < 1e-9);
    }

    #[test]
    fn scaling_round_trips(a in 0.1f64..10.0, b in 0.01f64..2.0, r in 0.5f64..10.0,
                           p in 0.01f64..10.0, t in 0.05f64..5.0, v in 1.1f64..50.0) {
        let g = GasModel::new(GasParams { n: 3.0, a, b, r }).unwrap();
        let red = StateTuple { p, t, v, e: 0.3, sigma: -0.2 };
        let back = g.to_reduced(g.from_reduced(red));
        for (x, y) in [(back.p, red.p), (back.t, red.t), (back.v, red.v), (back.e, red.e), (back.sigma, red.sigma)] {
            prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn binodal_encloses_spinodal(f in 0.3f64..0.99) {
        let g = gas();
        let t = f * g.critical_point().t_c;
        let pair = solve_pair(&g, t).unwrap();
        let (sl, sr) = g.spinodal_volumes(t).unwrap();
        prop_assert!(1.0 < pair.v_liquid && pair.v_liquid < sl);
        prop_assert!(sl < sr && sr < pair.v_gas);
        let (dp, dg) = pair.residuals(&g).unwrap();
        prop_assert!(dp.abs() < 1e-9 && dg.abs() < 1e-9);
    }
}

#[test]
fn mixed_partial_matches_difference_of_phi_v() {
    let g = gas();
    for &(v, t) in &[(1.5, 0.2), (2.0, 1.0), (7.0, 0.35), (300.0, 3.0)] {
        let fd = central_difference(|tt| g.potential(v, tt).unwrap().phi_v, t, 1e-5 * t);
        assert!(rel(g.potential(v, t).unwrap().phi_vt, fd) < 1e-7, "v = {v}, T = {t}");
    }
}

#[test]
fn newton_on_phase_equivalence_from_textbook_guess() {
    let g = gas();
    let t = 0.30;
    let system = |x: [f64; 2]| -> realgas::Result<([f64; 2], [[f64; 2]; 2])> {
        let (a, b) = (g.potential(x[0], t)?, g.potential(x[1], t)?);
        let gibbs = |p: &realgas::eos::Potential, v: f64| p.phi - v * p.phi_v;
        let f = [b.phi_v - a.phi_v, gibbs(&b, x[1]) - gibbs(&a, x[0])];
        let j = [[-a.phi_vv, b.phi_vv], [x[0] * a.phi_vv, -x[1] * b.phi_vv]];
        Ok((f, j))
    };
    let sol = newton2(system, [1.5, 20.0], NewtonOptions::default()).unwrap();
    let oracle = equal_area_pressure(&g, t).unwrap();
    assert!(rel(sol.x[0], oracle.v_liquid) < 1e-6);
    assert!(rel(sol.x[1], oracle.v_gas) < 1e-6);
    let seeded = solve_pair_from(&g, t, (1.5, 20.0)).unwrap();
    assert!(rel(seeded.p_sat, oracle.p_sat) < 1e-6);
}

#[test]
fn saturation_pressure_rises_with_temperature() {
    let g = gas();
    let curve = trace_curve(&g, 0.1, g.critical_point().t_c, 120).unwrap();
    let pts = curve.points();
    for w in pts.windows(2) {
        assert!(w[1].t > w[0].t);
        assert!(w[1].p_sat > w[0].p_sat);
        assert!(w[1].v_liquid > w[0].v_liquid);
        assert!(w[1].v_gas < w[0].v_gas);
    }
    let last = pts.last().unwrap();
    let cp = g.critical_point();
    assert!((last.v_liquid - cp.v_c).abs() < 1e-4 && (last.v_gas - cp.v_c).abs() < 1e-4);
    for p in &pts[..pts.len() - 1] {
        let (dp, dg) = p.residuals(&g).unwrap();
        assert!(dp.abs() < 1e-9 && dg.abs() < 1e-9);
    }
}

#[test]
fn classification_examples() {
    let g = gas();
    let cp = g.critical_point();
    let curve = trace_curve(&g, 0.15, cp.t_c, 100).unwrap();
    assert_eq!(curve.classify(&g, cp.v_c, 2.0 * cp.t_c).unwrap(), PhaseLabel::Supercritical);
    assert_eq!(curve.classify(&g, 100.0, 0.30).unwrap(), PhaseLabel::Gas);
    let (vl, vg) = curve.branches_at(0.30).unwrap();
    assert_eq!(curve.classify(&g, 0.5 * (vl + vg), 0.30).unwrap(), PhaseLabel::Condensation);
    assert_eq!(curve.classify(&g, 1.05, 0.30).unwrap(), PhaseLabel::Liquid);
    assert_eq!(curve.classify(&g, 2.0, 0.1).unwrap(), PhaseLabel::Inapplicable);
}
