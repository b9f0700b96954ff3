use rayon::prelude::*;

use super::BoxDomain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicOptions {
    /// Target for the scaled residual
    /// `max |L u| / (diag * max(|u|))`.
    pub tol: f64,
    pub max_iter: usize,
    /// Over-relaxation factor; the Jacobi-optimal value when `None`.
    pub omega: Option<f64>,
}

impl Default for HarmonicOptions {
    fn default() -> Self {
        HarmonicOptions { tol: 1e-10, max_iter: 100_000, omega: None }
    }
}

#[derive(Debug, Clone)]
pub struct HarmonicSolution {
    pub values: Vec<f64>,
    pub iterations: usize,
    /// Scaled residual after every checked sweep.
    pub residuals: Vec<f64>,
}

impl HarmonicSolution {
    pub fn residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }
}

struct Stencil {
    n: [usize; 3],
    w: [f64; 3],
    diag: f64,
}

impl Stencil {
    fn new(domain: &BoxDomain) -> Self {
        let h = domain.spacing();
        let w = [1.0 / (h[0] * h[0]), 1.0 / (h[1] * h[1]), 1.0 / (h[2] * h[2])];
        Stencil { n: domain.resolution, w, diag: 2.0 * (w[0] + w[1] + w[2]) }
    }

    fn interior(&self, i: [usize; 3]) -> bool {
        (0..3).all(|d| i[d] > 0 && i[d] + 1 < self.n[d])
    }

    /// Weighted neighbour sum at an interior node.
    fn neighbours(&self, u: &[f64], idx: usize) -> f64 {
        let s1 = 1;
        let s2 = self.n[0];
        let s3 = self.n[0] * self.n[1];
        self.w[0] * (u[idx - s1] + u[idx + s1])
            + self.w[1] * (u[idx - s2] + u[idx + s2])
            + self.w[2] * (u[idx - s3] + u[idx + s3])
    }

    fn optimal_omega(&self) -> f64 {
        let mut rho = 0.0;
        for d in 0..3 {
            let m = (self.n[d] - 1).max(1) as f64;
            rho += self.w[d] * (std::f64::consts::PI / m).cos();
        }
        rho /= self.w[0] + self.w[1] + self.w[2];
        2.0 / (1.0 + (1.0 - rho * rho).max(0.0).sqrt())
    }
}

/// Dirichlet problem for the 7-point Laplacian on a box, by red-black
/// successive over-relaxation. Each half-sweep reads only the other colour,
/// so the parallel update is deterministic.
pub fn solve_harmonic<G: Fn([f64; 3]) -> f64 + Sync>(
    domain: &BoxDomain,
    boundary: G,
    opts: HarmonicOptions,
) -> Result<HarmonicSolution> {
    domain.validate()?;
    let st = Stencil::new(domain);
    let len = domain.len();
    let mut u = vec![0.0; len];
    let mut bmin = f64::INFINITY;
    let mut bmax = f64::NEG_INFINITY;
    for (idx, slot) in u.iter_mut().enumerate() {
        let i = domain.indices(idx);
        if domain.is_boundary(i) {
            let g = boundary(domain.node(i));
            if !g.is_finite() {
                return Err(Error::domain(format!("boundary value at node {i:?} is not finite")));
            }
            *slot = g;
            bmin = bmin.min(g);
            bmax = bmax.max(g);
        }
    }
    // start the interior from the boundary mean
    let mean = 0.5 * (bmin + bmax);
    for (idx, slot) in u.iter_mut().enumerate() {
        if st.interior(domain.indices(idx)) {
            *slot = mean;
        }
    }
    let omega = opts.omega.unwrap_or_else(|| st.optimal_omega());
    let mut next = u.clone();
    let mut residuals = Vec::new();
    let check_every = 10;
    for iter in 1..=opts.max_iter {
        for colour in 0..2 {
            next.par_iter_mut().enumerate().for_each(|(idx, out)| {
                let i = domain.indices(idx);
                if st.interior(i) && (i[0] + i[1] + i[2]) % 2 == colour {
                    let gs = st.neighbours(&u, idx) / st.diag;
                    *out = (1.0 - omega) * u[idx] + omega * gs;
                } else {
                    *out = u[idx];
                }
            });
            std::mem::swap(&mut u, &mut next);
        }
        if iter % check_every == 0 || iter == opts.max_iter {
            let r = scaled_residual(&st, domain, &u);
            residuals.push(r);
            if !r.is_finite() {
                return Err(Error::Solver { iterations: iter, residuals });
            }
            if r < opts.tol {
                return Ok(HarmonicSolution { values: u, iterations: iter, residuals });
            }
        }
    }
    Err(Error::Solver { iterations: opts.max_iter, residuals })
}

fn scaled_residual(st: &Stencil, domain: &BoxDomain, u: &[f64]) -> f64 {
    let scale = u.par_iter().map(|x| x.abs()).reduce(|| 0.0, f64::max).max(f64::MIN_POSITIVE);
    let worst = (0..u.len())
        .into_par_iter()
        .map(
            |idx| {
                if st.interior(domain.indices(idx)) {
                    (st.neighbours(u, idx) - st.diag * u[idx]).abs()
                } else {
                    0.0
                }
            },
        )
        .reduce(|| 0.0, f64::max);
    worst / (st.diag * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(n: usize) -> BoxDomain {
        BoxDomain { lower: [0.0; 3], upper: [1.0; 3], resolution: [n; 3] }
    }

    #[test]
    fn constant_boundary_gives_constant() {
        let s = solve_harmonic(&cube(9), |_| 3.0, HarmonicOptions::default()).unwrap();
        assert!(s.values.iter().all(|v| (v - 3.0).abs() < 1e-12));
    }

    #[test]
    fn linear_boundary_gives_linear_interior() {
        let d = BoxDomain { lower: [-1.0, 0.0, 0.0], upper: [2.0, 1.0, 0.5], resolution: [13, 7, 5] };
        let s = solve_harmonic(&d, |x| x[0] - 2.0 * x[2], HarmonicOptions::default()).unwrap();
        for (idx, v) in s.values.iter().enumerate() {
            let x = d.node(d.indices(idx));
            assert!((v - (x[0] - 2.0 * x[2])).abs() < 1e-8);
        }
        assert!(s.residual() < 1e-10);
    }

    #[test]
    fn iteration_cap_reports_history() {
        let opts = HarmonicOptions { max_iter: 20, ..Default::default() };
        match solve_harmonic(&cube(17), |x| x[0] * x[0], opts).unwrap_err() {
            Error::Solver { iterations, residuals } => {
                assert_eq!(iterations, 20);
                assert_eq!(residuals.len(), 2);
            }
            e => panic!("{e:?}"),
        }
    }
}
