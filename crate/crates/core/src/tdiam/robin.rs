use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom2d::{BoundaryNode, PixelMask, Shape, Vec2};

/// Discrete Robin constant and the minimizing weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobinResult {
    pub nodes: Vec<Vec2>,
    /// On the simplex.
    pub weights: Vec<f64>,
    pub v_e: f64,
    /// `exp(-v_e)`
    pub tdiam: f64,
    pub iterations: usize,
    /// Frank-Wolfe gap at exit, an upper bound on `energy - minimum` up to a factor 2.
    pub gap: f64,
}

const MAX_ITER: usize = 50_000;
const POLISH_EVERY: usize = 200;
const GAP_TOL: f64 = 1e-11;
/// Accepted at the iteration limit; `tdiam` then carries a relative error of
/// at most this much.
const GAP_ACCEPT: f64 = 1e-7;

/// Robin constant of a primitive or composite shape from `node_count`
/// boundary samples.
pub fn robin_constant(shape: &Shape, node_count: usize) -> Result<RobinResult> {
    if node_count < 8 {
        return Err(Error::InvalidInput(format!("need at least 8 boundary nodes, got {node_count}")));
    }
    shape.validate()?;
    robin_from_nodes(&shape.boundary_nodes(node_count))
}

/// Mask fallback: exposed cell centres, each standing for a segment of length `h`.
pub fn robin_constant_mask(mask: &PixelMask) -> Result<RobinResult> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let h = mask.h();
    let nodes: Vec<BoundaryNode> = mask
        .exposed_cells()
        .into_iter()
        .map(|c| BoundaryNode {
            p: mask.center(c),
            len: h,
        })
        .collect();
    robin_from_nodes(&nodes)
}

/// Minimize `w^T G w` over the simplex, with `G_ij = log(1/|x_i - x_j|)` and
/// the segment-averaged self term `log(1/l) + 3/2` on the diagonal.
pub fn robin_from_nodes(nodes: &[BoundaryNode]) -> Result<RobinResult> {
    let n = nodes.len();
    if n < 2 {
        return Err(Error::InvalidInput("need at least two boundary nodes".into()));
    }
    let mut g = vec![0.0; n * n];
    g.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (j, v) in row.iter_mut().enumerate() {
            *v = if i == j {
                (1.0 / nodes[i].len).ln() + 1.5
            } else {
                -(nodes[i].p.dist(nodes[j].p)).ln()
            };
        }
    });
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("coincident or degenerate boundary nodes".into()));
    }
    let matvec = |w: &[f64], out: &mut [f64]| {
        out.par_iter_mut().enumerate().for_each(|(i, o)| {
            *o = g[i * n..(i + 1) * n].iter().zip(w).map(|(a, b)| a * b).sum();
        });
    };

    let lip = 2.0 * centered_norm(&matvec, n) * 1.05;
    let mut w = vec![1.0 / n as f64; n];
    let mut y = w.clone();
    let mut t = 1.0f64;
    let mut gw = vec![0.0; n];
    let mut gy = vec![0.0; n];
    matvec(&w, &mut gw);
    let mut f = dot(&w, &gw);
    let mut gap = f64::INFINITY;
    for it in 0..MAX_ITER {
        gap = f - gw.iter().copied().fold(f64::INFINITY, f64::min);
        if gap <= GAP_TOL * (1.0 + f.abs()) {
            return Ok(finish(nodes, w, f, it, gap));
        }
        if it % POLISH_EVERY == POLISH_EVERY - 1 {
            // the current support, and the nodes where the potential is near its minimum
            let near = f - gap + 1e-3 * gap;
            let candidates = [polish(&g, n, |i| w[i] > 0.0), polish(&g, n, |i| gw[i] <= near)];
            for p in candidates.into_iter().flatten() {
                let mut gp = vec![0.0; n];
                matvec(&p, &mut gp);
                let fp = dot(&p, &gp);
                let gap_p = fp - gp.iter().copied().fold(f64::INFINITY, f64::min);
                if gap_p < gap && fp <= f + 1e-15 * (1.0 + f.abs()) {
                    w = p;
                    gw = gp;
                    f = fp;
                    y.clone_from(&w);
                    t = 1.0;
                    gap = gap_p;
                }
            }
            if gap <= GAP_TOL * (1.0 + f.abs()) {
                return Ok(finish(nodes, w, f, it, gap));
            }
        }
        matvec(&y, &mut gy);
        let mut next: Vec<f64> = y.iter().zip(&gy).map(|(a, b)| a - 2.0 * b / lip).collect();
        project_simplex(&mut next);
        let mut g_next = vec![0.0; n];
        matvec(&next, &mut g_next);
        let f_next = dot(&next, &g_next);
        if f_next > f {
            // adaptive restart: drop the momentum
            t = 1.0;
            y.clone_from(&w);
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = next.iter().zip(&w).map(|(a, b)| a + beta * (a - b)).collect();
        w = next;
        gw = g_next;
        f = f_next;
        t = t_next;
    }
    if gap <= GAP_ACCEPT * (1.0 + f.abs()) {
        return Ok(finish(nodes, w, f, MAX_ITER, gap));
    }
    Err(Error::NonConvergence {
        what: "Robin energy minimization".into(),
        iterations: MAX_ITER,
        residual: gap,
    })
}

/// Exact minimizer on the current support: solve `G_SS w = V 1`, `sum w = 1`.
/// Returns `None` when the system is singular or the solution leaves the simplex.
fn polish(g: &[f64], n: usize, keep: impl Fn(usize) -> bool) -> Option<Vec<f64>> {
    let support: Vec<usize> = (0..n).filter(|&i| keep(i)).collect();
    let m = support.len();
    if m == 0 {
        return None;
    }
    let dim = m + 1;
    let mut a = vec![0.0; dim * dim];
    let mut b = vec![0.0; dim];
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[r * dim + c] = g[i * n + j];
        }
        a[r * dim + m] = -1.0;
        a[m * dim + r] = 1.0;
    }
    b[m] = 1.0;
    let x = solve_dense(a, b, dim)?;
    if x[..m].iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return None;
    }
    let mut out = vec![0.0; n];
    for (r, &i) in support.iter().enumerate() {
        out[i] = x[r];
    }
    Some(out)
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))?;
        if a[p * n + k].abs() < 1e-300 {
            return None;
        }
        if p != k {
            for c in 0..n {
                a.swap(k * n + c, p * n + c);
            }
            b.swap(k, p);
        }
        let pivot = a[k * n + k];
        let (top, rest) = a.split_at_mut((k + 1) * n);
        let row_k = &top[k * n..];
        let bk = b[k];
        rest.par_chunks_mut(n).zip(b[k + 1..].par_iter_mut()).for_each(|(row, bi)| {
            let f = row[k] / pivot;
            if f != 0.0 {
                for c in k..n {
                    row[c] -= f * row_k[c];
                }
                *bi -= f * bk;
            }
        });
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|c| a[k * n + c] * x[c]).sum();
        x[k] = (b[k] - s) / a[k * n + k];
    }
    Some(x)
}

fn finish(nodes: &[BoundaryNode], weights: Vec<f64>, v_e: f64, iterations: usize, gap: f64) -> RobinResult {
    RobinResult {
        nodes: nodes.iter().map(|n| n.p).collect(),
        weights,
        v_e,
        tdiam: (-v_e).exp(),
        iterations,
        gap,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest eigenvalue magnitude of `G` restricted to zero-sum vectors, which is
/// the curvature that matters on the simplex.
fn centered_norm(matvec: &dyn Fn(&[f64], &mut [f64]), n: usize) -> f64 {
    let center = |v: &mut [f64]| {
        let m = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= m);
    };
    let mut v: Vec<f64> = (0..n).map(|i| ((i * 7919 % 104_729) as f64 / 104_729.0) - 0.5).collect();
    center(&mut v);
    let mut av = vec![0.0; n];
    let mut lambda = 0.0;
    for _ in 0..300 {
        let nv = dot(&v, &v).sqrt();
        if nv == 0.0 {
            break;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        matvec(&v, &mut av);
        center(&mut av);
        let l = dot(&av, &av).sqrt();
        let done = (l - lambda).abs() <= 1e-6 * l;
        lambda = l;
        std::mem::swap(&mut v, &mut av);
        if done {
            break;
        }
    }
    lambda.max(1e-12)
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (k, &x) in u.iter().enumerate() {
        css += x;
        let t = (css - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}
