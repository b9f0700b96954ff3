use crate::error::{Error, Result};

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Smallest damping factor tried before giving up on a step.
    pub min_damping: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: super::DEFAULT_TOL, max_iter: 100, min_damping: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub x: Vec2,
    pub residual: f64,
    pub iterations: usize,
    /// Residual norm after every accepted step, starting with the guess.
    pub history: Vec<f64>,
}

fn norm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

/// Damped Newton iteration for a 2x2 system with an analytic Jacobian.
///
/// `system` returns `(F(x), J(x))`; an `Err` or non-finite output at a trial
/// point is treated like a residual increase and the step is halved.
pub fn newton2<F>(mut system: F, guess: Vec2, opts: NewtonOptions) -> Result<NewtonSolution>
where
    F: FnMut(Vec2) -> Result<(Vec2, Mat2)>,
{
    let fail = |x: Vec2, residual: f64, iterations: usize, why: &str| Error::Convergence {
        context: format!("newton2: {why}"),
        iterations,
        last: x.to_vec(),
        residual,
    };

    let mut x = guess;
    let (mut fx, mut jac) = system(x)?;
    let mut r = norm(fx);
    if !r.is_finite() {
        return Err(fail(x, r, 0, "non-finite residual at the initial guess"));
    }
    let mut history = vec![r];

    for it in 0..opts.max_iter {
        if r < opts.tol {
            return Ok(NewtonSolution { x, residual: r, iterations: it, history });
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(fail(x, r, it, "singular Jacobian"));
        }
        let dx = [(-fx[0] * jac[1][1] + fx[1] * jac[0][1]) / det, (-fx[1] * jac[0][0] + fx[0] * jac[1][0]) / det];

        let mut lambda = 1.0;
        loop {
            let trial = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
            if let Ok((ft, jt)) = system(trial) {
                let rt = norm(ft);
                if rt.is_finite() && rt < r {
                    x = trial;
                    fx = ft;
                    jac = jt;
                    r = rt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < opts.min_damping {
                if r < opts.tol.max(1e3 * f64::EPSILON * norm(x)) {
                    return Ok(NewtonSolution { x, residual: r, iterations: it, history });
                }
                return Err(fail(x, r, it, "damping could not reduce the residual"));
            }
        }
        history.push(r);
    }
    if r < opts.tol {
        return Ok(NewtonSolution { x, residual: r, iterations: opts.max_iter, history });
    }
    Err(fail(x, r, opts.max_iter, "iteration cap reached"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_system() {
        let sol =
            newton2(|x| Ok(([x[0] - 1.0, x[1] - 2.0], [[1.0, 0.0], [0.0, 1.0]])), [0.0, 0.0], NewtonOptions::default())
                .unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-12 && (sol.x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn circle_meets_diagonal() {
        let sol = newton2(
            |x| Ok(([x[0] * x[0] + x[1] * x[1] - 1.0, x[0] - x[1]], [[2.0 * x[0], 2.0 * x[1]], [1.0, -1.0]])),
            [1.0, 0.0],
            NewtonOptions::default(),
        )
        .unwrap();
        let h = 0.5f64.sqrt();
        assert!((sol.x[0] - h).abs() < 1e-10 && (sol.x[1] - h).abs() < 1e-10);
        assert!(sol.history.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn singular_jacobian_reports_last_iterate() {
        let err = newton2(
            |x| Ok(([x[0] + x[1] - 1.0, x[0] + x[1] - 3.0], [[1.0, 1.0], [1.0, 1.0]])),
            [0.0, 0.0],
            NewtonOptions::default(),
        )
        .unwrap_err();
        match err {
            Error::Convergence { last, .. } => assert_eq!(last, vec![0.0, 0.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn damping_keeps_residual_decreasing() {
        // atan has a tiny basin for undamped Newton
        let sol = newton2(
            |x| Ok(([x[0].atan(), x[1] - 0.5], [[1.0 / (1.0 + x[0] * x[0]), 0.0], [0.0, 1.0]])),
            [3.0, 0.0],
            NewtonOptions::default(),
        )
        .unwrap();
        assert!(sol.x[0].abs() < 1e-10);
        assert!(sol.history.windows(2).all(|w| w[1] < w[0]));
    }
}
