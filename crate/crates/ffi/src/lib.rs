//! C ABI over the `realgas` library.
//!
//! Objects are opaque handles created by `rg_*_new`/`rg_*_build` functions
//! and released with the matching `rg_*_free`. Every fallible call returns an
//! [`RgStatus`]; on failure, `rg_last_error_message` describes the error
//! for the calling thread. Outputs are written through pointers only on
//! success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use realgas::filtration::PhaseField;
use realgas::isentrope::{sigma_star, Isentrope, IsentropeOptions, MediumParams};
use realgas::phase::{trace_curve, CoexistenceCurve};
use realgas::{Error, GasModel, GasParams};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Bracket = 3,
    Convergence = 4,
    Quadrature = 5,
    Range = 6,
    NoCoexistence = 7,
    Extrapolation = 8,
    NonInvertible = 9,
    Multivalued = 10,
    OutOfBranch = 11,
    Singularity = 12,
    Solver = 13,
    Config = 14,
    Io = 15,
    Panic = 16,
}

impl From<&Error> for RgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => RgStatus::Domain,
            Error::Bracket { .. } => RgStatus::Bracket,
            Error::Convergence { .. } => RgStatus::Convergence,
            Error::Quadrature { .. } => RgStatus::Quadrature,
            Error::Range { .. } => RgStatus::Range,
            Error::NoCoexistence { .. } => RgStatus::NoCoexistence,
            Error::Extrapolation { .. } => RgStatus::Extrapolation,
            Error::NonInvertible { .. } => RgStatus::NonInvertible,
            Error::Multivalued { .. } => RgStatus::Multivalued,
            Error::OutOfBranch { .. } => RgStatus::OutOfBranch,
            Error::Singularity { .. } => RgStatus::Singularity,
            Error::Solver { .. } => RgStatus::Solver,
            Error::Config(_) => RgStatus::Config,
            Error::Io(_) => RgStatus::Io,
        }
    }
}

/// Opaque gas model.
pub struct RgGas(GasModel);
/// Opaque tabulated isentrope.
pub struct RgIsentrope(Isentrope);
/// Opaque coexistence curve.
pub struct RgCurve(CoexistenceCurve);
/// Opaque filtration field.
pub struct RgField(PhaseField);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RgState {
    pub v: f64,
    pub t: f64,
    pub p: f64,
    pub e: f64,
    pub sigma: f64,
    pub gamma: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RgCriticalPoint {
    pub v_c: f64,
    pub t_c: f64,
    pub p_c: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RgCoexistencePoint {
    pub t: f64,
    pub p_sat: f64,
    pub v_liquid: f64,
    pub v_gas: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RgFieldSummary {
    pub nodes: usize,
    pub valid: usize,
    pub near_source: usize,
    pub out_of_range: usize,
    /// Node counts by phase code: liquid, gas, condensation, supercritical,
    /// inapplicable.
    pub phases: [usize; 5],
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `f`, translating errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), Error>>(f: F) -> RgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RgStatus::Ok,
        Ok(Err(e)) => {
            set_error(e.to_string());
            RgStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            RgStatus::Panic
        }
    }
}

fn null(what: &str) -> RgStatus {
    set_error(format!("null pointer: {what}"));
    RgStatus::NullPointer
}

/// Message for the last failed call on this thread (empty if none). The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn rg_status_name(status: RgStatus) -> *const c_char {
    let s: &'static CStr = match status {
        RgStatus::Ok => c"ok",
        RgStatus::NullPointer => c"null_pointer",
        RgStatus::Domain => c"domain",
        RgStatus::Bracket => c"bracket",
        RgStatus::Convergence => c"convergence",
        RgStatus::Quadrature => c"quadrature",
        RgStatus::Range => c"range",
        RgStatus::NoCoexistence => c"no_coexistence",
        RgStatus::Extrapolation => c"extrapolation",
        RgStatus::NonInvertible => c"non_invertible",
        RgStatus::Multivalued => c"multivalued",
        RgStatus::OutOfBranch => c"out_of_branch",
        RgStatus::Singularity => c"singularity",
        RgStatus::Solver => c"solver",
        RgStatus::Config => c"config",
        RgStatus::Io => c"io",
        RgStatus::Panic => c"panic",
    };
    s.as_ptr()
}

/// Creates a gas with `n` degrees of freedom and physical constants `a`,
/// `b`, `r` (used only for unit conversion).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn rg_gas_new(n: f64, a: f64, b: f64, r: f64, out: *mut *mut RgGas) -> RgStatus {
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        let gas = GasModel::new(GasParams { n, a, b, r })?;
        *out = Box::into_raw(Box::new(RgGas(gas)));
        Ok(())
    })
}

/// # Safety
/// `gas` must be null or a handle from `rg_gas_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_gas_free(gas: *mut RgGas) {
    if !gas.is_null() {
        drop(Box::from_raw(gas));
    }
}

/// Reduced state at `(v, t)`.
///
/// # Safety
/// `gas` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_gas_state(gas: *const RgGas, v: f64, t: f64, out: *mut RgState) -> RgStatus {
    let (Some(gas), false) = (gas.as_ref(), out.is_null()) else { return null("gas or out") };
    guard(|| {
        let s = gas.0.state(v, t)?;
        *out = RgState { v: s.v, t: s.t, p: s.p, e: s.e, sigma: s.sigma, gamma: s.gamma };
        Ok(())
    })
}

/// # Safety
/// `gas` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_gas_critical_point(gas: *const RgGas, out: *mut RgCriticalPoint) -> RgStatus {
    let (Some(gas), false) = (gas.as_ref(), out.is_null()) else { return null("gas or out") };
    guard(|| {
        let c = gas.0.critical_point();
        *out = RgCriticalPoint { v_c: c.v_c, t_c: c.t_c, p_c: c.p_c };
        Ok(())
    })
}

/// Spinodal temperature at volume `v`.
///
/// # Safety
/// `gas` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_gas_spinodal_t(gas: *const RgGas, v: f64, out: *mut f64) -> RgStatus {
    let (Some(gas), false) = (gas.as_ref(), out.is_null()) else { return null("gas or out") };
    guard(|| {
        *out = gas.0.spinodal_t(v)?;
        Ok(())
    })
}

/// Limit of `H(v)`: the entropy level above which `Q` is invertible.
///
/// # Safety
/// `gas` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_sigma_star(gas: *const RgGas, out: *mut f64) -> RgStatus {
    let (Some(gas), false) = (gas.as_ref(), out.is_null()) else { return null("gas or out") };
    guard(|| {
        *out = sigma_star(&gas.0)?;
        Ok(())
    })
}

/// Traces the coexistence curve on `[t_min, t_max]` (`t_max >= T_c` adds
/// the critical endpoint).
///
/// # Safety
/// `gas` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_curve_trace(
    gas: *const RgGas,
    t_min: f64,
    t_max: f64,
    steps: usize,
    out: *mut *mut RgCurve,
) -> RgStatus {
    let (Some(gas), false) = (gas.as_ref(), out.is_null()) else { return null("gas or out") };
    guard(|| {
        let c = trace_curve(&gas.0, t_min, t_max, steps)?;
        *out = Box::into_raw(Box::new(RgCurve(c)));
        Ok(())
    })
}

/// # Safety
/// `curve` must be null or a handle from `rg_curve_trace` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_curve_free(curve: *mut RgCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Number of points on the curve (0 for a null handle).
///
/// # Safety
/// `curve` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rg_curve_len(curve: *const RgCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.0.points().len())
}

/// Point `index`, in order of increasing temperature.
///
/// # Safety
/// `curve` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_curve_point(curve: *const RgCurve, index: usize, out: *mut RgCoexistencePoint) -> RgStatus {
    let (Some(curve), false) = (curve.as_ref(), out.is_null()) else { return null("curve or out") };
    guard(|| {
        let pts = curve.0.points();
        let p = pts.get(index).ok_or(Error::Range {
            value: index as f64,
            lo: 0.0,
            hi: pts.len() as f64 - 1.0,
            end: realgas::error::RangeEnd::Above,
        })?;
        *out = RgCoexistencePoint { t: p.t, p_sat: p.p_sat, v_liquid: p.v_liquid, v_gas: p.v_gas };
        Ok(())
    })
}

/// Phase code of `(v, t)`: 0 liquid, 1 gas, 2 condensation, 3
/// supercritical, 4 inapplicable.
///
/// # Safety
/// `curve` and `gas` must be live handles and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_curve_classify(
    curve: *const RgCurve,
    gas: *const RgGas,
    v: f64,
    t: f64,
    out: *mut i32,
) -> RgStatus {
    let (Some(curve), Some(gas), false) = (curve.as_ref(), gas.as_ref(), out.is_null()) else {
        return null("curve, gas or out");
    };
    guard(|| {
        *out = curve.0.classify(&gas.0, v, t)?.code();
        Ok(())
    })
}

/// Tabulates the isentrope `sigma0` for a medium with permeability `k` and
/// viscosity `mu`, with default tabulation options.
///
/// # Safety
/// `gas` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_isentrope_build(
    gas: *const RgGas,
    sigma0: f64,
    k: f64,
    mu: f64,
    out: *mut *mut RgIsentrope,
) -> RgStatus {
    let (Some(gas), false) = (gas.as_ref(), out.is_null()) else { return null("gas or out") };
    guard(|| {
        let iso = Isentrope::build(&gas.0, sigma0, MediumParams { k, mu }, IsentropeOptions::default())?;
        *out = Box::into_raw(Box::new(RgIsentrope(iso)));
        Ok(())
    })
}

/// # Safety
/// `iso` must be null or a handle from `rg_isentrope_build` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rg_isentrope_free(iso: *mut RgIsentrope) {
    if !iso.is_null() {
        drop(Box::from_raw(iso));
    }
}

/// 1 if `Q` is monotone on this isentrope, 0 otherwise or for a null handle.
///
/// # Safety
/// `iso` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rg_isentrope_invertible(iso: *const RgIsentrope) -> i32 {
    iso.as_ref().map_or(0, |i| i32::from(i.0.invertible()))
}

/// Temperature at volume `v`.
///
/// # Safety
/// `iso` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_isentrope_temperature(iso: *const RgIsentrope, v: f64, out: *mut f64) -> RgStatus {
    let (Some(iso), false) = (iso.as_ref(), out.is_null()) else { return null("isentrope or out") };
    guard(|| {
        *out = iso.0.temperature(v)?;
        Ok(())
    })
}

/// Filtration potential `Q(v)`, normalised to vanish as `v -> inf`.
///
/// # Safety
/// `iso` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_isentrope_q(iso: *const RgIsentrope, v: f64, out: *mut f64) -> RgStatus {
    let (Some(iso), false) = (iso.as_ref(), out.is_null()) else { return null("isentrope or out") };
    guard(|| {
        *out = iso.0.q_at(v)?;
        Ok(())
    })
}

/// Volume `v` with `Q(v) = q`.
///
/// # Safety
/// `iso` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_isentrope_invert_q(iso: *const RgIsentrope, q: f64, out: *mut f64) -> RgStatus {
    let (Some(iso), false) = (iso.as_ref(), out.is_null()) else { return null("isentrope or out") };
    guard(|| {
        *out = iso.0.invert_q(q)?;
        Ok(())
    })
}

/// Runs a filtration scenario given as TOML text (the CLI scenario format).
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_field_from_scenario(toml: *const c_char, out: *mut *mut RgField) -> RgStatus {
    if toml.is_null() || out.is_null() {
        return null("toml or out");
    }
    guard(|| {
        let text = CStr::from_ptr(toml).to_str().map_err(|e| Error::Config(format!("scenario is not UTF-8: {e}")))?;
        let cfg = realgas::cli::ScenarioConfig::from_toml(text)?;
        let run = realgas::cli::run_scenario(&cfg)?;
        *out = Box::into_raw(Box::new(RgField(run.field)));
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a handle from `rg_field_from_scenario` not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn rg_field_free(field: *mut RgField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Node counts of a field.
///
/// # Safety
/// `field` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn rg_field_summary(field: *const RgField, out: *mut RgFieldSummary) -> RgStatus {
    let (Some(field), false) = (field.as_ref(), out.is_null()) else { return null("field or out") };
    guard(|| {
        let s = field.0.summary();
        *out = RgFieldSummary {
            nodes: s.nodes,
            valid: s.valid,
            near_source: s.near_source,
            out_of_range: s.out_of_range,
            phases: s.phases,
        };
        Ok(())
    })
}

/// Copies the per-node volumes (NaN on masked nodes) into `buf`, which must
/// hold `len` values; `len` must equal the node count. Nodes run with `x1`
/// fastest, then `x2`, then `x3`.
///
/// # Safety
/// `field` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn rg_field_volumes(field: *const RgField, buf: *mut f64, len: usize) -> RgStatus {
    let (Some(field), false) = (field.as_ref(), buf.is_null()) else { return null("field or buf") };
    guard(|| {
        let v = &field.0.v;
        if len != v.len() {
            return Err(Error::Config(format!("buffer holds {len} values, field has {}", v.len())));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buf, len);
        Ok(())
    })
}
