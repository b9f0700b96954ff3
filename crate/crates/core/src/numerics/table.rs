use super::root::{find_root, Bracket};
use crate::error::{Error, RangeEnd, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Strictly monotone tabulated function with Fritsch–Carlson monotone cubic
/// interpolation in both directions (`x -> y` and `y -> x`).
#[derive(Debug, Clone)]
pub struct MonotoneTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
    direction: Direction,
    /// dy/dx at the knots
    slopes: Vec<f64>,
    /// Inverse knots sorted by ascending y, with dx/dy slopes.
    inv_ys: Vec<f64>,
    inv_xs: Vec<f64>,
    inv_slopes: Vec<f64>,
}

impl MonotoneTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::domain("monotone table needs at least two (x, y) knots"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::domain("monotone table knots must be finite"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("monotone table x must be strictly increasing"));
        }
        let direction = if ys[1] > ys[0] { Direction::Increasing } else { Direction::Decreasing };
        let monotone = ys.windows(2).all(|w| match direction {
            Direction::Increasing => w[1] > w[0],
            Direction::Decreasing => w[1] < w[0],
        });
        if !monotone {
            return Err(Error::domain("monotone table y must be strictly monotone"));
        }
        let slopes = fritsch_carlson(&xs, &ys);
        let (mut inv_ys, mut inv_xs) = (ys.clone(), xs.clone());
        if direction == Direction::Decreasing {
            inv_ys.reverse();
            inv_xs.reverse();
        }
        let inv_slopes = fritsch_carlson(&inv_ys, &inv_xs);
        Ok(MonotoneTable { xs, ys, direction, slopes, inv_ys, inv_xs, inv_slopes })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    pub fn y_range(&self) -> (f64, f64) {
        (self.inv_ys[0], *self.inv_ys.last().unwrap())
    }

    /// Interpolated `y(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.x_range();
        check_range(x, lo, hi)?;
        Ok(hermite(&self.xs, &self.ys, &self.slopes, x))
    }

    /// Interpolated `x(y)`.
    pub fn invert(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.y_range();
        check_range(y, lo, hi)?;
        Ok(hermite(&self.inv_ys, &self.inv_xs, &self.inv_slopes, y))
    }

    /// Knot interval `[x_i, x_{i+1}]` whose y-span contains `y`.
    pub fn bracket_of(&self, y: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.y_range();
        check_range(y, lo, hi)?;
        let i = segment(&self.inv_ys, y);
        let (a, b) = (self.inv_xs[i], self.inv_xs[i + 1]);
        Ok((a.min(b), a.max(b)))
    }

    /// Inverts the table and polishes the interpolated guess with a root
    /// solve on the underlying function `f` (which the knots sample).
    pub fn invert_refined<F: FnMut(f64) -> f64>(&self, y: f64, mut f: F, tol: f64) -> Result<f64> {
        let guess = self.invert(y)?;
        let (a, b) = self.bracket_of(y)?;
        let g = |x: f64| f(x) - y;
        let mut g = g;
        // try a tight bracket around the interpolant first
        let half = (b - a) * 1e-3;
        let (ta, tb) = ((guess - half).max(a), (guess + half).min(b));
        let (ga, gb) = (g(ta), g(tb));
        let bracket =
            if ga * gb <= 0.0 && ta < tb { Bracket::from_values(ta, tb, ga, gb)? } else { Bracket::new(&mut g, a, b)? };
        find_root(g, bracket, tol)
    }
}

fn check_range(v: f64, lo: f64, hi: f64) -> Result<()> {
    if v < lo || v.is_nan() {
        return Err(Error::Range { value: v, lo, hi, end: RangeEnd::Below });
    }
    if v > hi {
        return Err(Error::Range { value: v, lo, hi, end: RangeEnd::Above });
    }
    Ok(())
}

fn segment(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    match xs.partition_point(|&k| k <= x) {
        0 => 0,
        i if i >= n => n - 2,
        i => i - 1,
    }
}

fn hermite(xs: &[f64], ys: &[f64], ms: &[f64], x: f64) -> f64 {
    let i = segment(xs, x);
    let h = xs[i + 1] - xs[i];
    let t = (x - xs[i]) / h;
    if t == 0.0 {
        return ys[i];
    }
    if t == 1.0 {
        return ys[i + 1];
    }
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * ys[i] + h10 * h * ms[i] + h01 * ys[i + 1] + h11 * h * ms[i + 1]
}

fn fritsch_carlson(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for k in 1..n - 1 {
        m[k] = if delta[k - 1] * delta[k] > 0.0 { 0.5 * (delta[k - 1] + delta[k]) } else { 0.0 };
    }
    for k in 0..n - 1 {
        if delta[k] == 0.0 {
            m[k] = 0.0;
            m[k + 1] = 0.0;
            continue;
        }
        let a = m[k] / delta[k];
        let b = m[k + 1] / delta[k];
        let s = a * a + b * b;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            m[k] = tau * a * delta[k];
            m[k + 1] = tau * b * delta[k];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn identity_table() {
        let xs = linspace(0.0, 1.0, 11);
        let t = MonotoneTable::new(xs.clone(), xs).unwrap();
        assert!((t.invert(0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cube_root_from_cubic_knots() {
        let xs = linspace(0.0, 1.0, 41);
        let ys = xs.iter().map(|x| x * x * x).collect();
        let t = MonotoneTable::new(xs, ys).unwrap();
        assert!((t.invert(0.008).unwrap() - 0.2).abs() < 1e-3);
        let refined = t.invert_refined(0.008, |x| x * x * x, 1e-14).unwrap();
        assert!((refined - 0.2).abs() < 1e-13);
    }

    #[test]
    fn out_of_range_names_the_end() {
        let t = MonotoneTable::new(vec![0.0, 1.0], vec![2.0, 1.0]).unwrap();
        assert_eq!(t.direction(), Direction::Decreasing);
        match t.invert(0.5).unwrap_err() {
            Error::Range { end, .. } => assert_eq!(end, RangeEnd::Below),
            e => panic!("{e:?}"),
        }
        match t.invert(3.0).unwrap_err() {
            Error::Range { end, .. } => assert_eq!(end, RangeEnd::Above),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn non_monotone_rejected() {
        assert!(MonotoneTable::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.5]).is_err());
        assert!(MonotoneTable::new(vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn knots_round_trip_exactly(steps in prop::collection::vec(0.01f64..2.0, 2..40),
                                    rises in prop::collection::vec(0.01f64..5.0, 40),
                                    decreasing in any::<bool>()) {
            let mut xs = vec![0.0];
            for s in &steps { xs.push(xs.last().unwrap() + s); }
            let mut ys = vec![0.0];
            for r in rises.iter().take(xs.len() - 1) { ys.push(ys.last().unwrap() + r); }
            if decreasing { ys.iter_mut().for_each(|y| *y = -*y); }
            let t = MonotoneTable::new(xs.clone(), ys.clone()).unwrap();
            for (x, y) in xs.iter().zip(&ys) {
                prop_assert_eq!(t.invert(*y).unwrap(), *x);
                prop_assert_eq!(t.eval(*x).unwrap(), *y);
            }
            // interpolant stays monotone between knots
            let last = xs[xs.len() - 1];
            let probe: Vec<f64> = (0..200).map(|i| (xs[0] + (last - xs[0]) * i as f64 / 199.0).min(last)).collect();
            let vals: Vec<f64> = probe.iter().map(|x| t.eval(*x).unwrap()).collect();
            for w in vals.windows(2) {
                if decreasing { prop_assert!(w[1] <= w[0] + 1e-12); } else { prop_assert!(w[1] >= w[0] - 1e-12); }
            }
        }
    }
}
