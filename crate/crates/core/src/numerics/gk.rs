#![allow(clippy::excessive_precision)] // published nodes and weights, kept verbatim

use crate::error::{Error, Result};

/// Interval cap of the adaptive Gauss–Kronrod rule.
pub const MAX_INTERVALS: usize = 2000;

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
    scale: f64,
}

fn rule<F: FnMut(f64) -> (f64, f64)>(f: &mut F, a: f64, b: f64) -> Piece {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (fc, sc) = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    let mut scale = WGK[7] * sc.abs();
    for j in 0..7 {
        let ((f1, s1), (f2, s2)) = (f(c - h * XGK[j]), f(c + h * XGK[j]));
        k += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        scale += WGK[j] * (s1.abs() + s2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let w = h.abs();
    Piece { a, b, value: k * h, error: ((k - g) * h).abs(), abs: abs * w, scale: scale * w }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature.
///
/// Stops once the summed error estimate is below
/// `max(abs_tol, rel_tol * int |f|)`. `a > b` flips the sign.
pub fn integrate_gk<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    integrate_gk_scaled(|x| (f(x), 0.0), a, b, abs_tol, rel_tol, 0.0)
}

/// As [`integrate_gk`], for an integrand returned together with a magnitude
/// `s(x)` that bounds its roundoff (e.g. the size of terms that cancel in
/// `f`). The target is relaxed to at least `floor * int |s|`.
pub fn integrate_gk_scaled<F: FnMut(f64) -> (f64, f64)>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    floor: f64,
) -> Result<f64> {
    if !(abs_tol >= 0.0 && rel_tol >= 0.0 && floor >= 0.0) || (abs_tol == 0.0 && rel_tol == 0.0 && floor == 0.0) {
        return Err(Error::domain("quadrature needs a positive tolerance"));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut pieces = vec![rule(&mut f, a, b)];
    loop {
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        let mag: f64 = pieces.iter().map(|p| p.abs).sum();
        let scale: f64 = pieces.iter().map(|p| p.scale).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Quadrature { a, b, depth: pieces.len() });
        }
        if error <= abs_tol.max(rel_tol * mag).max(floor * scale) {
            return Ok(value);
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature { a, b, depth: pieces.len() });
        }
        let worst = pieces.iter().enumerate().max_by(|x, y| x.1.error.total_cmp(&y.1.error)).map(|(i, _)| i).unwrap();
        let p = pieces.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        pieces.push(rule(&mut f, p.a, m));
        pieces.push(rule(&mut f, m, p.b));
    }
}
