//! Solvers for `(-a Δ_h + b) x = rhs` with `a > 0`, `b ≥ 0`.
//!
//! 1D uses a precomputed Thomas factorization of the constant tridiagonal
//! matrix. 2D uses Jacobi-preconditioned conjugate gradients with a fixed
//! iteration budget, so identical inputs always take identical paths.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{dot, laplacian_raw, Grid};

pub const DEFAULT_CG_TOL: f64 = 1e-12;
pub const DEFAULT_CG_MAX_ITER: usize = 500;

#[derive(Clone, Debug)]
pub struct ShiftedLaplacian {
    grid: Arc<Grid>,
    a: f64,
    b: f64,
    tol: f64,
    max_iter: usize,
    /// Thomas factors for 1D: modified super-diagonal and inverse pivots.
    thomas: Option<(Vec<f64>, Vec<f64>)>,
}

impl ShiftedLaplacian {
    pub fn new(grid: &Arc<Grid>, a: f64, b: f64) -> Self {
        let thomas = (grid.dim() == 1).then(|| {
            let n = grid.nodes()[0];
            let h = grid.spacing()[0];
            let off = -a / (h * h);
            let diag = b + 2.0 * a / (h * h);
            let mut cprime = vec![0.0; n];
            let mut inv_pivot = vec![0.0; n];
            let mut prev_c = 0.0;
            for i in 0..n {
                let pivot = diag - off * prev_c;
                inv_pivot[i] = 1.0 / pivot;
                cprime[i] = off * inv_pivot[i];
                prev_c = cprime[i];
            }
            (cprime, inv_pivot)
        });
        ShiftedLaplacian {
            grid: Arc::clone(grid),
            a,
            b,
            tol: DEFAULT_CG_TOL,
            max_iter: DEFAULT_CG_MAX_ITER,
            thomas,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iterations(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        laplacian_raw(&self.grid, x, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = -self.a * *o + self.b * xi;
        }
    }

    /// Returns the solution and the iteration count (0 for the direct path).
    pub fn solve(&self, rhs: &[f64], guess: Option<&[f64]>) -> Result<(Vec<f64>, usize)> {
        match &self.thomas {
            Some((cprime, inv_pivot)) => {
                let n = rhs.len();
                let h = self.grid.spacing()[0];
                let off = -self.a / (h * h);
                let mut x = vec![0.0; n];
                let mut prev = 0.0;
                for i in 0..n {
                    let d = (rhs[i] - off * prev) * inv_pivot[i];
                    x[i] = d;
                    prev = d;
                }
                for i in (0..n.saturating_sub(1)).rev() {
                    x[i] -= cprime[i] * x[i + 1];
                }
                Ok((x, 0))
            }
            None => self.pcg(rhs, guess),
        }
    }

    fn pcg(&self, rhs: &[f64], guess: Option<&[f64]>) -> Result<(Vec<f64>, usize)> {
        let n = rhs.len();
        let inv_diag = {
            let h = self.grid.spacing();
            let d: f64 = self.b + h.iter().map(|hi| 2.0 * self.a / (hi * hi)).sum::<f64>();
            1.0 / d
        };
        let mut x = guess.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
        let mut r = vec![0.0; n];
        self.apply(&x, &mut r);
        for (ri, bi) in r.iter_mut().zip(rhs) {
            *ri = bi - *ri;
        }
        let bnorm = dot(rhs, rhs).sqrt();
        if bnorm == 0.0 {
            return Ok((vec![0.0; n], 0));
        }
        let target = self.tol * bnorm;
        let mut z: Vec<f64> = r.iter().map(|ri| ri * inv_diag).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];
        let mut rnorm = dot(&r, &r).sqrt();
        if rnorm <= target {
            return Ok((x, 0));
        }
        for it in 1..=self.max_iter {
            self.apply(&p, &mut ap);
            let alpha = rz / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            rnorm = dot(&r, &r).sqrt();
            if !rnorm.is_finite() {
                break;
            }
            if rnorm <= target {
                return Ok((x, it));
            }
            for i in 0..n {
                z[i] = r[i] * inv_diag;
            }
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::SolverDiverged {
            iterations: self.max_iter,
            residual: rnorm / bnorm,
        })
    }
}
