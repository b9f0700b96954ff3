use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// A sign-change interval of a scalar function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    /// Evaluates `f` at both ends and checks for a sign change.
    pub fn new<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> Result<Self> {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        Self::from_values(lo, hi, f(lo), f(hi))
    }

    pub fn from_values(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        let valid = lo < hi && f_lo.is_finite() && f_hi.is_finite() && f_lo * f_hi <= 0.0;
        if !valid {
            return Err(Error::Bracket { lo, hi, f_lo, f_hi });
        }
        Ok(Bracket { lo, hi, f_lo, f_hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Brent's method. Returns the best iterate; the final bracket is no wider
/// than about `tol`.
pub fn find_root<F: FnMut(f64) -> f64>(f: F, bracket: Bracket, tol: f64) -> Result<f64> {
    find_root_in(f, bracket, tol).map(|(x, _)| x)
}

/// Like [`find_root`] but also returns the final sign-change bracket.
pub fn find_root_in<F: FnMut(f64) -> f64>(mut f: F, bracket: Bracket, tol: f64) -> Result<(f64, Bracket)> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("root tolerance must be positive, got {tol}")));
    }
    let Bracket { lo, hi, f_lo, f_hi } = Bracket::from_values(bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi)?;
    if f_lo == 0.0 {
        return Ok((lo, Bracket { lo, hi: lo, f_lo, f_hi: f_lo }));
    }
    if f_hi == 0.0 {
        return Ok((hi, Bracket { lo: hi, hi, f_lo: f_hi, f_hi }));
    }

    // b is the best estimate, c the contrapoint, a the previous b.
    let (mut a, mut fa) = (lo, f_lo);
    let (mut b, mut fb) = (hi, f_hi);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..MAX_ITER {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.25 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            let out = if b < c {
                Bracket { lo: b, hi: c, f_lo: fb, f_hi: fc }
            } else {
                Bracket { lo: c, hi: b, f_lo: fc, f_hi: fb }
            };
            return Ok((b, out));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::Convergence {
                context: "find_root: non-finite function value".into(),
                iterations: 0,
                last: vec![b],
                residual: fb,
            });
        }
    }
    Err(Error::Convergence { context: "find_root".into(), iterations: MAX_ITER, last: vec![b], residual: fb.abs() })
}
