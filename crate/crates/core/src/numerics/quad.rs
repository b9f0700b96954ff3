use crate::error::{Error, Result};

/// Recursion-depth cap of the adaptive Simpson rule.
pub const MAX_DEPTH: usize = 50;

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
///
/// `a > b` is allowed and flips the sign.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    integrate_with_depth(f, a, b, tol, MAX_DEPTH)
}

pub fn integrate_with_depth<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_depth: usize) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("quadrature tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let fa = f(lo);
    let fb = f(hi);
    let m = 0.5 * (lo + hi);
    let fm = f(m);
    let whole = simpson(lo, hi, fa, fm, fb);
    let mut ctx = Ctx { f: &mut f, max_depth, a: lo, b: hi };
    let value = ctx.recurse(lo, hi, fa, fm, fb, whole, tol, 0)?;
    Ok(sign * value)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

struct Ctx<'a, F> {
    f: &'a mut F,
    max_depth: usize,
    a: f64,
    b: f64,
}

impl<F: FnMut(f64) -> f64> Ctx<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if !delta.is_finite() || depth >= self.max_depth {
            return Err(Error::Quadrature { a: self.a, b: self.b, depth: self.max_depth });
        }
        // Simpson error estimate is delta / 15
        if delta.abs() <= 15.0 * tol {
            return Ok(left + right + delta / 15.0);
        }
        Ok(self.recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?
            + self.recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?)
    }
}
