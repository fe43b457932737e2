use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom2d::{Shape, Vec2};

/// Largest point count accepted by [`rho_n`].
pub const DEFAULT_FEKETE_CAP: usize = 40;

/// A locally optimal Fekete configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeketeResult {
    pub n: usize,
    pub points: Vec<Vec2>,
    /// `[prod_{i<j} |x_i - x_j|]^(2 / (n (n - 1)))`
    pub rho_n: f64,
    pub restarts_used: usize,
}

impl FeketeResult {
    /// `rho_n` recomputed from the stored points.
    pub fn recompute(&self) -> f64 {
        rho_of(&self.points)
    }
}

fn log_product(points: &[Vec2]) -> f64 {
    let mut s = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            s += points[i].dist(points[j]).ln();
        }
    }
    s
}

/// Geometric mean of the pairwise distances.
pub fn rho_of(points: &[Vec2]) -> f64 {
    let n = points.len() as f64;
    (2.0 * log_product(points) / (n * (n - 1.0))).exp()
}

fn point_term(points: &[Vec2], i: usize, x: Vec2) -> f64 {
    points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, p)| x.dist(*p).ln())
        .sum()
}

fn random_start(shape: &Shape, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec2> {
    let (lo, hi) = shape.bbox();
    let mut pts = Vec::with_capacity(n);
    let mut tries = 0usize;
    while pts.len() < n {
        let p = Vec2::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        tries += 1;
        if shape.contains_closed(p) {
            pts.push(p);
        } else if tries > 10_000 * n {
            pts.push(shape.project(p));
        }
    }
    pts
}

/// Coordinate ascent on the log-product, one point at a time. Returns the
/// final configuration; the objective never decreases.
fn ascend(shape: &Shape, mut pts: Vec<Vec2>, diam: f64) -> Vec<Vec2> {
    let n = pts.len();
    let max_step = diam / 4.0;
    let min_step = 1e-15 * diam.max(1e-300);
    let mut steps = vec![max_step; n];
    for _sweep in 0..200_000 {
        let mut best_gain: f64 = 0.0;
        for i in 0..n {
            let x = pts[i];
            let mut g = Vec2::ZERO;
            for (j, p) in pts.iter().enumerate() {
                if j != i {
                    let d = x - *p;
                    g = g + d * (1.0 / d.norm_sq());
                }
            }
            let gn = g.norm();
            if !(gn > 0.0 && gn.is_finite()) {
                continue;
            }
            let dir = g * (1.0 / gn);
            let f0 = point_term(&pts, i, x);
            let mut s = steps[i];
            loop {
                let y = shape.project(x + dir * s);
                let f1 = point_term(&pts, i, y);
                if f1 > f0 {
                    pts[i] = y;
                    best_gain = best_gain.max(f1 - f0);
                    steps[i] = (2.0 * s).min(max_step);
                    break;
                }
                s *= 0.5;
                if s < min_step {
                    steps[i] = min_step.max(max_step * 1e-6);
                    break;
                }
            }
        }
        if best_gain < 1e-12 {
            break;
        }
    }
    pts
}

/// n-th diameter of the closed shape: best local maximum of the pairwise
/// distance product over `restarts` seeded random starts.
pub fn rho_n(shape: &Shape, n: usize, restarts: usize, seed: u64) -> Result<FeketeResult> {
    rho_n_with_cap(shape, n, restarts, seed, DEFAULT_FEKETE_CAP)
}

pub fn rho_n_with_cap(shape: &Shape, n: usize, restarts: usize, seed: u64, cap: usize) -> Result<FeketeResult> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("n-th diameter needs n >= 2, got {n}")));
    }
    if n > cap {
        return Err(Error::InvalidInput(format!("n = {n} exceeds the point cap {cap}")));
    }
    shape.validate()?;
    let restarts = restarts.max(1);
    let (lo, hi) = shape.bbox();
    let diam = lo.dist(hi);
    let runs: Vec<(f64, Vec<Vec2>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(r as u64));
            let start = random_start(shape, n, &mut rng);
            let pts = ascend(shape, start, diam);
            (log_product(&pts), pts)
        })
        .collect();
    // first best wins, so the result does not depend on thread scheduling
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.0 > runs[best].0 {
            best = k;
        }
    }
    let points = runs[best].1.clone();
    Ok(FeketeResult {
        n,
        rho_n: rho_of(&points),
        points,
        restarts_used: restarts,
    })
}
