use std::ffi::{CStr, CString};
use std::ptr;

use realgas_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rg_last_error_message()) }.to_string_lossy().into_owned()
}

fn gas() -> *mut RgGas {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { rg_gas_new(3.0, 1.0, 1.0, 1.0, &mut g) }, RgStatus::Ok);
    assert!(!g.is_null());
    g
}

#[test]
fn state_and_critical_point() {
    let g = gas();
    let mut s = RgState::default();
    assert_eq!(unsafe { rg_gas_state(g, 2.0, 1.0, &mut s) }, RgStatus::Ok);
    assert!((s.p - 5.0 / 6.0).abs() < 1e-12);
    let mut c = RgCriticalPoint::default();
    assert_eq!(unsafe { rg_gas_critical_point(g, &mut c) }, RgStatus::Ok);
    assert!((c.v_c - 1.0 / (2f64.cbrt() - 1.0)).abs() < 1e-8);
    let mut t = 0.0;
    assert_eq!(unsafe { rg_gas_spinodal_t(g, c.v_c, &mut t) }, RgStatus::Ok);
    assert!((t - c.t_c).abs() < 1e-10);
    unsafe { rg_gas_free(g) };
}

#[test]
fn domain_error_sets_message() {
    let g = gas();
    let mut s = RgState::default();
    assert_eq!(unsafe { rg_gas_state(g, 0.5, 1.0, &mut s) }, RgStatus::Domain);
    assert!(!last_error().is_empty());
    let name = unsafe { CStr::from_ptr(rg_status_name(RgStatus::Domain)) };
    assert_eq!(name.to_str().unwrap(), "domain");
    unsafe { rg_gas_free(g) };
}

#[test]
fn null_pointers_are_rejected() {
    let mut s = RgState::default();
    assert_eq!(unsafe { rg_gas_state(ptr::null(), 2.0, 1.0, &mut s) }, RgStatus::NullPointer);
    assert_eq!(unsafe { rg_gas_new(3.0, 1.0, 1.0, 1.0, ptr::null_mut()) }, RgStatus::NullPointer);
    assert_eq!(unsafe { rg_curve_len(ptr::null()) }, 0);
    unsafe {
        rg_gas_free(ptr::null_mut());
        rg_curve_free(ptr::null_mut());
        rg_isentrope_free(ptr::null_mut());
        rg_field_free(ptr::null_mut());
    }
}

#[test]
fn curve_points_and_classification() {
    let g = gas();
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { rg_curve_trace(g, 0.2, 0.33, 40, &mut c) }, RgStatus::Ok);
    let n = unsafe { rg_curve_len(c) };
    assert!(n >= 2);
    let mut pt = RgCoexistencePoint::default();
    assert_eq!(unsafe { rg_curve_point(c, n / 2, &mut pt) }, RgStatus::Ok);
    assert!(pt.v_liquid < pt.v_gas);
    let mut code = -1;
    let mid = 0.5 * (pt.v_liquid + pt.v_gas);
    assert_eq!(unsafe { rg_curve_classify(c, g, mid, pt.t, &mut code) }, RgStatus::Ok);
    assert_eq!(code, 2);
    assert_eq!(unsafe { rg_curve_point(c, n, &mut pt) }, RgStatus::Range);
    unsafe {
        rg_curve_free(c);
        rg_gas_free(g);
    }
}

#[test]
fn isentrope_round_trip_and_threshold() {
    let g = gas();
    let mut iso = ptr::null_mut();
    assert_eq!(unsafe { rg_isentrope_build(g, 0.0, 1.0, 1.0, &mut iso) }, RgStatus::Ok);
    assert_eq!(unsafe { rg_isentrope_invertible(iso) }, 1);
    let (mut q, mut v) = (0.0, 0.0);
    assert_eq!(unsafe { rg_isentrope_q(iso, 5.0, &mut q) }, RgStatus::Ok);
    assert_eq!(unsafe { rg_isentrope_invert_q(iso, q, &mut v) }, RgStatus::Ok);
    assert!((v - 5.0).abs() < 1e-8);
    assert_eq!(unsafe { rg_isentrope_invert_q(iso, 1.0, &mut v) }, RgStatus::Range);
    let mut s = 0.0;
    assert_eq!(unsafe { rg_sigma_star(g, &mut s) }, RgStatus::Ok);
    assert!((s + 0.5).abs() < 0.05);
    unsafe {
        rg_isentrope_free(iso);
        rg_gas_free(g);
    }
}

#[test]
fn field_from_scenario_text() {
    let text = CString::new(
        "sigma0 = 3.0\nfar_field_v = 150.0\n[medium]\nk = 1e6\nmu = 1.0\n\
         [[sources]]\nposition = [0.0, 0.0, 0.0]\nintensity = 30.0\n\
         [domain]\nlower = [-2.0, -2.0, -2.0]\nupper = [2.0, 2.0, 2.0]\nresolution = [9, 9, 9]\n\
         [curve]\nt_min = 0.1\n",
    )
    .unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { rg_field_from_scenario(text.as_ptr(), &mut f) }, RgStatus::Ok, "{}", last_error());
    let mut s = RgFieldSummary::default();
    assert_eq!(unsafe { rg_field_summary(f, &mut s) }, RgStatus::Ok);
    assert_eq!(s.nodes, 729);
    assert_eq!(s.valid + s.near_source + s.out_of_range, s.nodes);
    let mut v = vec![0.0; s.nodes];
    assert_eq!(unsafe { rg_field_volumes(f, v.as_mut_ptr(), v.len()) }, RgStatus::Ok);
    assert!(v.iter().filter(|x| x.is_finite()).count() == s.valid);
    assert_eq!(unsafe { rg_field_volumes(f, v.as_mut_ptr(), 3) }, RgStatus::Config);
    unsafe { rg_field_free(f) };

    let bad = CString::new("sigma0 = 3.0\nbogus = 1\n").unwrap();
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { rg_field_from_scenario(bad.as_ptr(), &mut f) }, RgStatus::Config);
    assert!(f.is_null());
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/realgas.h");
    for name in [
        "rg_gas_new",
        "rg_gas_state",
        "rg_curve_trace",
        "rg_isentrope_invert_q",
        "rg_field_from_scenario",
        "rg_last_error_message",
        "RG_STATUS_PANIC",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
