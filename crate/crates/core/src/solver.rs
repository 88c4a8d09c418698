//! Least-norm solves and the box/lock-constrained least-squares QP behind
//! PCA backward projection.
//!
//! A basis `E` is stored by rows: `basis[i] = [E[i][0], E[i][1]]`, so a row
//! vector `x` maps to the plane as `x E = sum_i x[i] * basis[i]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Point2;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Attempt an exact solve on the current face every this many iterations.
const FACE_SOLVE_EVERY: usize = 16;

/// `x E` for a row vector `x`.
pub fn apply_basis(basis: &[Point2], x: &[f64]) -> Point2 {
    debug_assert_eq!(basis.len(), x.len());
    let mut y = [0.0; 2];
    for (row, &v) in basis.iter().zip(x) {
        y[0] += v * row[0];
        y[1] += v * row[1];
    }
    y
}

/// Largest absolute entry of `E^T E - I`.
pub fn orthonormality_error(basis: &[Point2]) -> f64 {
    let g = gram(basis.iter());
    (g[0][0] - 1.0).abs().max((g[1][1] - 1.0).abs()).max(g[0][1].abs())
}

fn gram<'a>(rows: impl Iterator<Item = &'a Point2>) -> [[f64; 2]; 2] {
    let mut g = [[0.0; 2]; 2];
    for r in rows {
        g[0][0] += r[0] * r[0];
        g[0][1] += r[0] * r[1];
        g[1][1] += r[1] * r[1];
    }
    g[1][0] = g[0][1];
    g
}

/// Least-norm `dx` with `dx E = dy` for orthonormal `E`: `dx = dy E^T`.
pub fn least_norm(basis: &[Point2], delta_y: Point2) -> Result<Vec<f64>> {
    let err = orthonormality_error(basis);
    if !(err <= 1e-8) {
        return Err(Error::NotOrthonormal(err));
    }
    Ok(basis.iter().map(|r| delta_y[0] * r[0] + delta_y[1] * r[1]).collect())
}

/// `minimize ||dx E - target||^2  s.t.  dx[i] = lock[i] (locked i),  lower <= dx <= upper`.
///
/// Unbounded sides are `-inf` / `+inf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpProblem {
    pub basis: Vec<Point2>,
    pub target: Point2,
    pub locks: Vec<Option<f64>>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QpSolution {
    pub delta_x: Vec<f64>,
    /// `||delta_x E - target||`.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl QpProblem {
    /// Problem with no locks and no bounds.
    pub fn unconstrained(basis: Vec<Point2>, target: Point2) -> Self {
        let d = basis.len();
        QpProblem {
            basis,
            target,
            locks: vec![None; d],
            lower: vec![f64::NEG_INFINITY; d],
            upper: vec![f64::INFINITY; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        for len in [self.locks.len(), self.lower.len(), self.upper.len()] {
            if len != d {
                return Err(Error::DimensionMismatch { expected: d, found: len });
            }
        }
        if !self.target.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidConfig("target must be finite".into()));
        }
        for i in 0..d {
            let (lo, hi) = (self.lower[i], self.upper[i]);
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::Infeasible {
                    feature: i,
                    reason: format!("invalid bounds [{lo}, {hi}]"),
                });
            }
            if lo > hi {
                return Err(Error::Infeasible {
                    feature: i,
                    reason: format!("lower bound {lo} exceeds upper bound {hi}"),
                });
            }
            if let Some(v) = self.locks[i] {
                if !v.is_finite() || v < lo || v > hi {
                    return Err(Error::Infeasible {
                        feature: i,
                        reason: format!("locked value {v} outside [{lo}, {hi}]"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn residual(&self, dx: &[f64]) -> f64 {
        let y = apply_basis(&self.basis, dx);
        (y[0] - self.target[0]).hypot(y[1] - self.target[1])
    }

    pub fn objective(&self, dx: &[f64]) -> f64 {
        self.residual(dx).powi(2)
    }

    pub fn is_feasible(&self, dx: &[f64], bound_tol: f64) -> bool {
        dx.iter().enumerate().all(|(i, &v)| match self.locks[i] {
            Some(l) => v == l,
            None => v >= self.lower[i] - bound_tol && v <= self.upper[i] + bound_tol,
        })
    }
}

/// Projected gradient descent on the unlocked coordinates with fixed step
/// `1/L`, `L = 2 * lambda_max(E_F^T E_F)`.
///
/// Every few iterations the iterate also takes the largest feasible step
/// towards the exact minimizer on its current face (coordinates strictly
/// inside their bounds). Both moves never increase the objective; the stop
/// rule is the gradient-mapping norm `L * ||x - P(x - grad/L)|| < tol`.
pub fn solve_qp(problem: &QpProblem, tol: f64, max_iter: usize) -> Result<QpSolution> {
    problem.validate()?;
    let d = problem.dim();
    let basis = &problem.basis;
    let free: Vec<usize> = (0..d).filter(|&i| problem.locks[i].is_none()).collect();

    let mut x: Vec<f64> = (0..d)
        .map(|i| match problem.locks[i] {
            Some(v) => v,
            None => 0.0f64.clamp(problem.lower[i], problem.upper[i]),
        })
        .collect();

    let lipschitz = 2.0 * lambda_max(gram(free.iter().map(|&i| &basis[i])));
    let mut iterations = 0;
    let mut converged = false;
    if free.is_empty() || lipschitz == 0.0 {
        converged = true;
    } else {
        let mut next = vec![0.0; d];
        loop {
            let y = apply_basis(basis, &x);
            let r = [y[0] - problem.target[0], y[1] - problem.target[1]];
            let mut step_sq = 0.0;
            for &i in &free {
                let g = 2.0 * (r[0] * basis[i][0] + r[1] * basis[i][1]);
                let v = (x[i] - g / lipschitz).clamp(problem.lower[i], problem.upper[i]);
                step_sq += (v - x[i]).powi(2);
                next[i] = v;
            }
            if lipschitz * step_sq.sqrt() < tol {
                converged = true;
                break;
            }
            if iterations >= max_iter {
                break;
            }
            for &i in &free {
                x[i] = next[i];
            }
            iterations += 1;
            if iterations % FACE_SOLVE_EVERY == 0 || iterations == 1 {
                face_step(problem, &free, &mut x);
            }
        }
    }
    let residual = problem.residual(&x);
    Ok(QpSolution {
        delta_x: x,
        residual,
        converged,
        iterations,
    })
}

/// Moves `x` towards the least-norm correction that zeroes the residual
/// using only coordinates strictly inside their bounds, stopping at the
/// first bound hit.
fn face_step(problem: &QpProblem, free: &[usize], x: &mut [f64]) {
    let basis = &problem.basis;
    let interior: Vec<usize> = free
        .iter()
        .copied()
        .filter(|&i| x[i] > problem.lower[i] && x[i] < problem.upper[i])
        .collect();
    if interior.is_empty() {
        return;
    }
    let y = apply_basis(basis, x);
    let r = [problem.target[0] - y[0], problem.target[1] - y[1]];
    let Some(w) = pinv_apply(gram(interior.iter().map(|&i| &basis[i])), r) else {
        return;
    };
    let mut alpha: f64 = 1.0;
    let deltas: Vec<f64> = interior
        .iter()
        .map(|&i| {
            let delta = basis[i][0] * w[0] + basis[i][1] * w[1];
            if delta > 0.0 {
                alpha = alpha.min((problem.upper[i] - x[i]) / delta);
            } else if delta < 0.0 {
                alpha = alpha.min((problem.lower[i] - x[i]) / delta);
            }
            delta
        })
        .collect();
    if !(alpha > 0.0) {
        return;
    }
    let before = problem.objective(x);
    let old: Vec<f64> = interior.iter().map(|&i| x[i]).collect();
    for (&i, delta) in interior.iter().zip(&deltas) {
        x[i] = (x[i] + alpha * delta).clamp(problem.lower[i], problem.upper[i]);
    }
    if problem.objective(x) > before {
        for (&i, v) in interior.iter().zip(old) {
            x[i] = v;
        }
    }
}

fn lambda_max(g: [[f64; 2]; 2]) -> f64 {
    let tr = g[0][0] + g[1][1];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    tr / 2.0 + disc
}

/// `G^+ r` for a symmetric positive semidefinite 2x2 `G`.
fn pinv_apply(g: [[f64; 2]; 2], r: Point2) -> Option<Point2> {
    let lmax = lambda_max(g);
    if !(lmax > 0.0) {
        return None;
    }
    let tr = g[0][0] + g[1][1];
    let lmin = tr - lmax;
    if lmin > 1e-12 * lmax {
        let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
        return Some([
            (g[1][1] * r[0] - g[0][1] * r[1]) / det,
            (g[0][0] * r[1] - g[1][0] * r[0]) / det,
        ]);
    }
    // Rank one: G ~ lmax v v^T.
    let v = if (g[0][0] - lmin).abs() >= (g[1][1] - lmin).abs() {
        [g[0][0] - lmin, g[1][0]]
    } else {
        [g[0][1], g[1][1] - lmin]
    };
    let norm = v[0].hypot(v[1]);
    if norm == 0.0 {
        return None;
    }
    let v = [v[0] / norm, v[1] / norm];
    let s = (v[0] * r[0] + v[1] * r[1]) / lmax;
    Some([s * v[0], s * v[1]])
}
