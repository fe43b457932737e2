//! Lanczos iteration with full reorthogonalization for one extreme eigenpair
//! of a symmetric operator, restricted to the orthogonal complement of a set
//! of locked vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::dense::Tridiagonal;
use super::operator::LinearOperator;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Largest,
    Smallest,
}

#[derive(Clone, Debug)]
pub struct RitzPair {
    pub value: f64,
    /// Euclidean unit vector.
    pub vector: Vec<f64>,
    /// `||A x - value x||_2`.
    pub residual: f64,
    pub steps: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    if a.len() > 4096 {
        a.par_chunks(1024).zip(b.par_chunks(1024)).map(|(x, y)| dot(x, y)).sum()
    } else {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.par_iter_mut().zip(x.par_iter()).for_each(|(y, x)| *y += a * x);
}

fn project_out(x: &mut [f64], basis: &[Vec<f64>]) {
    for q in basis {
        let c = dot(x, q);
        axpy(x, -c, q);
    }
}

pub struct LanczosOptions {
    /// Accept when `||A x - theta x|| <= tol * ||A||_bound`.
    pub tol: f64,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-11,
            max_steps: 800,
            seed: 0,
        }
    }
}

/// Extreme eigenpair of `op` on the complement of `locked` (orthonormal).
pub fn lanczos_extreme(op: &dyn LinearOperator, locked: &[Vec<f64>], end: End, opts: &LanczosOptions) -> Result<RitzPair> {
    let n = op.dim();
    let free = n.saturating_sub(locked.len());
    if free == 0 {
        return Err(Error::InvalidInput("no directions left outside the locked subspace".into()));
    }
    let scale = op.norm_bound().max(f64::MIN_POSITIVE);
    let target = opts.tol * scale;
    let max_steps = opts.max_steps.min(free);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project_out(&mut q, locked);
    project_out(&mut q, locked);
    let nq = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|v| *v /= nq);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_steps);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_steps);
    let mut beta: Vec<f64> = Vec::with_capacity(max_steps);
    let mut w = vec![0.0; n];
    let mut best_residual = f64::INFINITY;

    for step in 0..max_steps {
        op.apply(&q, &mut w);
        let a = dot(&q, &w);
        axpy(&mut w, -a, &q);
        if let Some(prev) = basis.last() {
            axpy(&mut w, -beta[step - 1], prev);
        }
        basis.push(q.clone());
        alpha.push(a);
        // full reorthogonalization, twice
        for _ in 0..2 {
            project_out(&mut w, locked);
            let coeffs: Vec<f64> = basis.par_iter().map(|b| dot(&w, b)).collect();
            for (c, b) in coeffs.iter().zip(&basis) {
                axpy(&mut w, -c, b);
            }
        }
        let b = dot(&w, &w).sqrt();
        let m = alpha.len();
        let exhausted = b <= 1e-14 * scale || m == max_steps;
        if m % 5 == 0 || exhausted || m < 5 {
            let t = Tridiagonal {
                d: alpha.clone(),
                e: beta.clone(),
            };
            let k = match end {
                End::Largest => m - 1,
                End::Smallest => 0,
            };
            let theta = t.eigenvalue(k);
            let s = t.eigenvector(theta, &[], 7);
            let estimate = (b * s[m - 1]).abs();
            if estimate <= target || exhausted {
                let mut x = vec![0.0; n];
                for (c, v) in s.iter().zip(&basis) {
                    axpy(&mut x, *c, v);
                }
                let nx = dot(&x, &x).sqrt();
                x.iter_mut().for_each(|v| *v /= nx);
                let mut ax = vec![0.0; n];
                op.apply(&x, &mut ax);
                let value = dot(&x, &ax);
                let residual = ax.iter().zip(&x).map(|(p, q)| (p - value * q).powi(2)).sum::<f64>().sqrt();
                best_residual = best_residual.min(residual);
                if residual <= 10.0 * target.max(estimate) || (exhausted && residual <= 1e-8 * scale.max(1.0)) {
                    return Ok(RitzPair {
                        value,
                        vector: x,
                        residual,
                        steps: m,
                    });
                }
                if exhausted {
                    break;
                }
            }
        }
        beta.push(b);
        q = w.iter().map(|v| v / b).collect();
    }
    Err(Error::NonConvergence {
        what: format!("Lanczos ({:?} eigenvalue, n = {n})", end),
        iterations: alpha.len(),
        residual: best_residual,
    })
}
