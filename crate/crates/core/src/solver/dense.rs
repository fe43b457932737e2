//! Dense symmetric eigensolvers: Householder tridiagonalization with Sturm
//! bisection and inverse iteration for selected eigenpairs, and cyclic Jacobi
//! for full decompositions of small matrices.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: diagonal `d`, off-diagonal `e`
/// (`e[k] = T[k+1][k]`).
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl Tridiagonal {
    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.e[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.n();
        let (lo, hi) = self.bounds();
        let tiny = f64::MIN_POSITIVE.sqrt() * (1.0 + lo.abs().max(hi.abs()));
        let mut count = 0;
        let mut q = self.d[0] - x;
        for i in 0..n {
            if i > 0 {
                q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.n());
        let (mut lo, mut hi) = self.bounds();
        let pad = f64::EPSILON * (1.0 + lo.abs().max(hi.abs()));
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for the approximate eigenvalue `lambda` by inverse
    /// iteration, kept orthogonal to `against` (vectors of nearby eigenvalues).
    pub fn eigenvector(&self, lambda: f64, against: &[Vec<f64>], seed: u64) -> Vec<f64> {
        let n = self.n();
        let (lo, hi) = self.bounds();
        let norm = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let lu = TriLu::factor(self, lambda, norm);
        // deterministic, non-degenerate start
        let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
        let mut x: Vec<f64> = (0..n)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            })
            .collect();
        for _ in 0..6 {
            orthogonalize(&mut x, against);
            normalize(&mut x);
            lu.solve(&mut x);
        }
        orthogonalize(&mut x, against);
        normalize(&mut x);
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(x: &mut [f64]) {
    let s = dot(x, x).sqrt();
    if s > 0.0 {
        x.iter_mut().for_each(|v| *v /= s);
    }
}

fn orthogonalize(x: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(x, q);
            x.iter_mut().zip(q).for_each(|(v, w)| *v -= c * w);
        }
    }
}

/// LU factorization of `T - lambda I` with partial pivoting.
struct TriLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swap: Vec<bool>,
}

impl TriLu {
    fn factor(t: &Tridiagonal, lambda: f64, norm: f64) -> Self {
        let n = t.n();
        let eps = f64::EPSILON * norm;
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n];
        let mut swap = vec![false; n];
        let mut b = t.d[0] - lambda;
        let mut c = if n > 1 { t.e[0] } else { 0.0 };
        for i in 0..n.saturating_sub(1) {
            let a = t.e[i];
            let b_next = t.d[i + 1] - lambda;
            let c_next = if i + 2 < n { t.e[i + 1] } else { 0.0 };
            if b.abs() >= a.abs() {
                let piv = if b == 0.0 { eps } else { b };
                u0[i] = piv;
                u1[i] = c;
                u2[i] = 0.0;
                let m = a / piv;
                mult[i] = m;
                b = b_next - m * c;
                c = c_next;
            } else {
                swap[i] = true;
                u0[i] = a;
                u1[i] = b_next;
                u2[i] = c_next;
                let m = b / a;
                mult[i] = m;
                b = c - m * b_next;
                c = -m * c_next;
            }
        }
        u0[n - 1] = if b == 0.0 { eps } else { b };
        TriLu { u0, u1, u2, mult, swap }
    }

    fn solve(&self, x: &mut [f64]) {
        let n = x.len();
        for i in 0..n.saturating_sub(1) {
            if self.swap[i] {
                x.swap(i, i + 1);
            }
            x[i + 1] -= self.mult[i] * x[i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            x[i] = s / self.u0[i];
            if !x[i].is_finite() {
                x[i] = 0.0;
            }
        }
        // guard against overflow by rescaling
        let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if m > 1e100 {
            x.iter_mut().for_each(|v| *v /= m);
        }
    }
}

/// Householder reduction `A = Q T Q^T` of a row-major symmetric matrix.
pub struct HouseholderTridiagonal {
    pub tri: Tridiagonal,
    n: usize,
    /// Unit reflector for step k acts on indices k+1..n.
    reflectors: Vec<Vec<f64>>,
}

impl HouseholderTridiagonal {
    pub fn new(a: &[f64], n: usize) -> Self {
        assert_eq!(a.len(), n * n);
        let mut w = a.to_vec();
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n.saturating_sub(1)];
        let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
        for k in 0..n.saturating_sub(2) {
            let m = n - k - 1;
            let mut v: Vec<f64> = (0..m).map(|r| w[(k + 1 + r) * n + k]).collect();
            let xnorm = dot(&v, &v).sqrt();
            d[k] = w[k * n + k];
            if xnorm == 0.0 {
                e[k] = 0.0;
                reflectors.push(vec![0.0; m]);
                continue;
            }
            let alpha = if v[0] > 0.0 { -xnorm } else { xnorm };
            e[k] = alpha;
            v[0] -= alpha;
            normalize(&mut v);
            // p = A22 v
            let base = k + 1;
            let p: Vec<f64> = (0..m)
                .into_par_iter()
                .map(|r| dot(&w[(base + r) * n + base..(base + r) * n + n], &v))
                .collect();
            let kk = dot(&v, &p);
            let q: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi - kk * vi).collect();
            // A22 -= 2 v q^T + 2 q v^T
            w[base * n..].par_chunks_mut(n).enumerate().for_each(|(r, row)| {
                let (vr, qr) = (v[r], q[r]);
                for ((x, vc), qc) in row[base..].iter_mut().zip(&v).zip(&q) {
                    *x -= 2.0 * (vr * qc + qr * vc);
                }
            });
            reflectors.push(v);
        }
        if n >= 2 {
            d[n - 2] = w[(n - 2) * n + n - 2];
            e[n - 2] = w[(n - 1) * n + n - 2];
        }
        if n >= 1 {
            d[n - 1] = w[(n - 1) * n + n - 1];
        }
        HouseholderTridiagonal {
            tri: Tridiagonal { d, e },
            n,
            reflectors,
        }
    }

    /// Map an eigenvector of `T` to one of `A`.
    pub fn back_transform(&self, z: &[f64]) -> Vec<f64> {
        let mut y = z.to_vec();
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            let tail = &mut y[k + 1..self.n];
            let c = 2.0 * dot(tail, v);
            tail.iter_mut().zip(v).for_each(|(t, vi)| *t -= c * vi);
        }
        y
    }
}

/// Selected eigenpairs (by ascending index) of a dense symmetric matrix.
/// Vectors are Euclidean unit vectors.
pub fn dense_eigenpairs(a: &[f64], n: usize, indices: &[usize]) -> Vec<(f64, Vec<f64>)> {
    let ht = HouseholderTridiagonal::new(a, n);
    let t = &ht.tri;
    let (lo, hi) = t.bounds();
    let cluster = 1e-3 * lo.abs().max(hi.abs());
    let values: Vec<f64> = indices.iter().map(|&k| t.eigenvalue(k)).collect();
    let mut zs: Vec<Vec<f64>> = Vec::with_capacity(indices.len());
    for (i, &lam) in values.iter().enumerate() {
        let near: Vec<Vec<f64>> = (0..i)
            .filter(|&j| (values[j] - lam).abs() <= cluster)
            .map(|j| zs[j].clone())
            .collect();
        zs.push(t.eigenvector(lam, &near, indices[i] as u64 + 1));
    }
    values
        .into_iter()
        .zip(zs.par_iter().map(|z| ht.back_transform(z)).collect::<Vec<_>>())
        .collect()
}

/// Full eigendecomposition by cyclic Jacobi rotations. Returns eigenvalues in
/// ascending order with matching unit eigenvectors.
pub fn jacobi_eigen(a: &[f64], n: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut converged = n <= 1;
    let mut off = 0.0;
    for _sweep in 0..100 {
        off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        off = off.sqrt();
        if off <= 1e-15 * total {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "cyclic Jacobi".into(),
            iterations: 100,
            residual: off,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let vals = order.iter().map(|&i| m[i * n + i]).collect();
    let vecs = order.iter().map(|&i| (0..n).map(|k| v[k * n + i]).collect()).collect();
    Ok((vals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.gen_range(-1.0..1.0);
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        a
    }

    fn residual(a: &[f64], n: usize, lam: f64, x: &[f64]) -> f64 {
        (0..n)
            .map(|i| {
                let r = dot(&a[i * n..(i + 1) * n], x) - lam * x[i];
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn jacobi_diagonalizes() {
        let n = 30;
        let a = random_symmetric(n, 3);
        let (vals, vecs) = jacobi_eigen(&a, n).unwrap();
        for (l, x) in vals.iter().zip(&vecs) {
            assert!(residual(&a, n, *l, x) < 1e-12);
        }
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let tr: f64 = (0..n).map(|i| a[i * n + i]).sum();
        assert!((vals.iter().sum::<f64>() - tr).abs() < 1e-12);
    }

    #[test]
    fn tridiagonal_route_matches_jacobi() {
        for (n, seed) in [(1, 1), (2, 2), (3, 5), (17, 7), (60, 11)] {
            let a = random_symmetric(n, seed);
            let (vals, _) = jacobi_eigen(&a, n).unwrap();
            let idx: Vec<usize> = (0..n).collect();
            let pairs = dense_eigenpairs(&a, n, &idx);
            for (k, (l, x)) in pairs.iter().enumerate() {
                assert!((l - vals[k]).abs() < 1e-12, "n={n} k={k}: {l} vs {}", vals[k]);
                assert!(residual(&a, n, *l, x) < 1e-10, "n={n} k={k}");
                assert!((dot(x, x) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_eigenvalues_get_orthogonal_vectors() {
        // block diagonal with an exactly repeated eigenvalue
        let n = 6;
        let mut a = vec![0.0; n * n];
        let block = [[2.0, 1.0], [1.0, 2.0]];
        for b in 0..3 {
            for i in 0..2 {
                for j in 0..2 {
                    a[(2 * b + i) * n + 2 * b + j] = block[i][j];
                }
            }
        }
        let pairs = dense_eigenpairs(&a, n, &[5, 4, 3]);
        for (l, x) in &pairs {
            assert!((l - 3.0).abs() < 1e-12);
            assert!(residual(&a, n, *l, x) < 1e-12);
        }
        for i in 0..3 {
            for j in i + 1..3 {
                assert!(dot(&pairs[i].1, &pairs[j].1).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sturm_count_on_known_matrix() {
        // tridiag(-1, 2, -1) of size n: eigenvalues 2 - 2 cos(k pi / (n+1))
        let n = 50;
        let t = Tridiagonal {
            d: vec![2.0; n],
            e: vec![-1.0; n - 1],
        };
        for k in 0..n {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k) - want).abs() < 1e-13);
        }
        assert_eq!(t.count_below(2.0), n / 2);
    }
}
