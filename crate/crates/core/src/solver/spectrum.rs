use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::dense::dense_eigenpairs;
use super::kernel::KernelSpec;
use super::lanczos::{lanczos_extreme, End, LanczosOptions};
use super::lattice::LatticeOperator;
use super::operator::{assemble_with_cap, cell_cap, LinearOperator, OperatorMatrix};
use crate::error::{Error, Result};
use crate::geom2d::{diameter, same_spacing, GridFunction, PixelMask, Shape};

/// Largest system solved by the dense tridiagonal route.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethod {
    /// Householder tridiagonalization, bisection, inverse iteration.
    DenseTridiagonal,
    /// Lanczos with full reorthogonalization and locking.
    Lanczos,
}

/// One eigenpair; the vector is normalized so that `h^2 sum v_i^2 = 1`.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub tau: f64,
    pub vector: GridFunction,
    /// `||A v - tau v||_2 / ||v||_2`.
    pub residual: f64,
}

/// Extremal spectrum of a discretized operator.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    pub h: f64,
    pub n: usize,
    pub kernel: KernelSpec,
    pub method: EigenMethod,
    /// Largest eigenvalues, descending.
    pub top: Vec<EigenPair>,
    /// Smallest eigenvalue.
    pub bottom: EigenPair,
}

impl SpectralResult {
    pub fn tau_top(&self) -> Vec<f64> {
        self.top.iter().map(|p| p.tau).collect()
    }

    pub fn tau_bottom(&self) -> f64 {
        self.bottom.tau
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.top.iter().chain(std::iter::once(&self.bottom)).map(|p| p.residual).collect()
    }

    pub fn summary(&self) -> SpectralSummary {
        SpectralSummary {
            schema_version: 1,
            h: self.h,
            n: self.n,
            kernel: self.kernel,
            method: self.method,
            tau_top: self.tau_top(),
            tau_bottom: self.tau_bottom(),
            residuals_top: self.top.iter().map(|p| p.residual).collect(),
            residual_bottom: self.bottom.residual,
            vectors: None,
        }
    }
}

/// Serializable view of a [`SpectralResult`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub schema_version: u32,
    pub h: f64,
    pub n: usize,
    pub kernel: KernelSpec,
    pub method: EigenMethod,
    pub tau_top: Vec<f64>,
    pub tau_bottom: f64,
    pub residuals_top: Vec<f64>,
    pub residual_bottom: f64,
    /// Eigenvectors on the canonical cell order: top ones, then the bottom one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<Vec<Vec<f64>>>,
}

fn to_grid(mask: &Arc<PixelMask>, mut v: Vec<f64>) -> Result<GridFunction> {
    // Euclidean unit vector -> discrete L2 unit vector
    let s = 1.0 / mask.h();
    v.iter_mut().for_each(|x| *x *= s);
    GridFunction::new(mask.clone(), v)
}

fn residual_of(op: &dyn LinearOperator, tau: f64, x: &[f64]) -> f64 {
    let mut ax = vec![0.0; x.len()];
    op.apply(x, &mut ax);
    let r: f64 = ax.iter().zip(x).map(|(a, b)| (a - tau * b).powi(2)).sum();
    let nx: f64 = x.iter().map(|v| v * v).sum();
    (r / nx).sqrt()
}

fn dense_route(a: &OperatorMatrix, k: usize, bottom: bool) -> Result<(Vec<EigenPair>, Option<EigenPair>)> {
    let n = a.n();
    let k = k.min(n);
    let mut idx: Vec<usize> = (0..k).map(|i| n - 1 - i).collect();
    if bottom {
        idx.push(0);
    }
    let pairs = dense_eigenpairs(a.data(), n, &idx);
    let mut out = Vec::with_capacity(pairs.len());
    for (tau, x) in pairs {
        let residual = residual_of(a, tau, &x);
        out.push(EigenPair {
            tau,
            vector: to_grid(LinearOperator::mask(a), x)?,
            residual,
        });
    }
    let b = if bottom { out.pop() } else { None };
    Ok((out, b))
}

/// The `k` largest eigenpairs of any operator, by Lanczos with locking.
pub fn top_eigs(op: &dyn LinearOperator, k: usize) -> Result<Vec<EigenPair>> {
    let k = k.min(op.dim());
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let opts = LanczosOptions {
            seed: i as u64,
            ..Default::default()
        };
        let p = lanczos_extreme(op, &locked, End::Largest, &opts)?;
        let residual = residual_of(op, p.value, &p.vector);
        out.push(EigenPair {
            tau: p.value,
            vector: to_grid(op.mask(), p.vector.clone())?,
            residual,
        });
        locked.push(p.vector);
    }
    // locking can deliver near-ties out of order
    out.sort_by(|a, b| b.tau.total_cmp(&a.tau));
    Ok(out)
}

/// The smallest eigenpair of any operator, by Lanczos.
pub fn bottom_eig(op: &dyn LinearOperator) -> Result<EigenPair> {
    let p = lanczos_extreme(op, &[], End::Smallest, &LanczosOptions::default())?;
    let residual = residual_of(op, p.value, &p.vector);
    Ok(EigenPair {
        tau: p.value,
        vector: to_grid(op.mask(), p.vector)?,
        residual,
    })
}

/// The `k` largest and the smallest eigenpair of an assembled matrix: dense
/// tridiagonal route for `n <= 2000`, Lanczos above.
pub fn extremal_eigs(a: &OperatorMatrix, k: usize) -> Result<SpectralResult> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let (top, bottom, method) = if a.n() <= DENSE_LIMIT {
        let (t, b) = dense_route(a, k, true)?;
        (t, b.expect("bottom requested"), EigenMethod::DenseTridiagonal)
    } else {
        (top_eigs(a, k)?, bottom_eig(a)?, EigenMethod::Lanczos)
    };
    Ok(SpectralResult {
        h: a.h(),
        n: a.n(),
        kernel: *LinearOperator::kernel(a),
        method,
        top,
        bottom,
    })
}

/// Which ends of the spectrum to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ends {
    Top(usize),
    Bottom,
    Both(usize),
}

/// Discretize `mask` with `kernel` and compute the requested eigenpairs:
/// dense for `n <= 2000`, matrix-free FFT operator with Lanczos otherwise.
pub fn solve_ends(mask: &Arc<PixelMask>, kernel: &KernelSpec, ends: Ends) -> Result<(Vec<EigenPair>, Option<EigenPair>)> {
    solve_ends_with_cap(mask, kernel, ends, cell_cap())
}

/// [`solve_ends`] with an explicit cell cap in place of [`cell_cap`].
pub fn solve_ends_with_cap(
    mask: &Arc<PixelMask>,
    kernel: &KernelSpec,
    ends: Ends,
    cap: usize,
) -> Result<(Vec<EigenPair>, Option<EigenPair>)> {
    let (k, want_bottom) = match ends {
        Ends::Top(k) => (k, false),
        Ends::Bottom => (0, true),
        Ends::Both(k) => (k, true),
    };
    if mask.active_count() <= DENSE_LIMIT {
        let a = assemble_with_cap(mask, kernel, cap)?;
        dense_route(&a, k, want_bottom)
    } else {
        let op = LatticeOperator::with_cap(mask, kernel, cap)?;
        let top = if k > 0 { top_eigs(&op, k)? } else { Vec::new() };
        let b = if want_bottom { Some(bottom_eig(&op)?) } else { None };
        Ok((top, b))
    }
}

/// Full solve: `k` largest and the smallest eigenpair.
pub fn solve(mask: &Arc<PixelMask>, kernel: &KernelSpec, k: usize) -> Result<SpectralResult> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let (top, bottom) = solve_ends(mask, kernel, Ends::Both(k))?;
    Ok(SpectralResult {
        h: mask.h(),
        n: mask.active_count(),
        kernel: *kernel,
        method: if mask.active_count() <= DENSE_LIMIT {
            EigenMethod::DenseTridiagonal
        } else {
            EigenMethod::Lanczos
        },
        top,
        bottom: bottom.expect("bottom requested"),
    })
}

/// Largest eigenvalue only.
pub fn tau_top1(mask: &Arc<PixelMask>, kernel: &KernelSpec) -> Result<f64> {
    Ok(solve_ends(mask, kernel, Ends::Top(1))?.0[0].tau)
}

/// Smallest eigenvalue only.
pub fn tau_bottom(mask: &Arc<PixelMask>, kernel: &KernelSpec) -> Result<f64> {
    Ok(solve_ends(mask, kernel, Ends::Bottom)?.1.expect("bottom requested").tau)
}

/// Discrete quadratic form `u^T A u` with the `h^2` weights built into `A`.
pub fn energy(u: &GridFunction, op: &dyn LinearOperator) -> Result<f64> {
    check_same_mask(u, op)?;
    let mut au = vec![0.0; op.dim()];
    op.apply(u.values(), &mut au);
    Ok(au.iter().zip(u.values()).map(|(a, b)| a * b).sum())
}

fn check_same_mask(u: &GridFunction, op: &dyn LinearOperator) -> Result<()> {
    if !(same_spacing(u.mask().h(), op.mask().h()) && u.mask().same_cells(op.mask())) {
        return Err(Error::InvalidInput("function and operator live on different masks".into()));
    }
    Ok(())
}

/// Rayleigh quotient `u^T A u / u^T u`, the discrete `E(u) / ||u||^2`.
/// `A` carries the `h^2` quadrature weight, so eigenvalues of `A` approximate
/// the continuum eigenvalues and the quotient uses the plain Euclidean product.
pub fn rayleigh(u: &GridFunction, op: &dyn LinearOperator) -> Result<f64> {
    check_same_mask(u, op)?;
    let uu: f64 = u.values().iter().map(|v| v * v).sum();
    if uu == 0.0 {
        return Err(Error::InvalidInput("Rayleigh quotient of the zero vector".into()));
    }
    Ok(energy(u, op)? / uu)
}

/// Sign structure of an eigenvector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignReport {
    /// Extremes after flipping the sign so that the sum is non-negative.
    pub min: f64,
    pub max: f64,
    pub one_signed: bool,
    pub diameter: f64,
    /// A sign change where one-signedness is guaranteed (diameter <= 1).
    pub flagged: bool,
}

/// Sign report for an eigenvector on `mask`.
pub fn sign_report(v: &GridFunction, mask: &PixelMask) -> Result<SignReport> {
    let s: f64 = v.values().iter().sum();
    let flip = if s < 0.0 { -1.0 } else { 1.0 };
    let min = v.values().iter().map(|x| flip * x).fold(f64::INFINITY, f64::min);
    let max = v.values().iter().map(|x| flip * x).fold(f64::NEG_INFINITY, f64::max);
    let diameter = diameter(mask)?;
    let one_signed = min > 0.0;
    Ok(SignReport {
        min,
        max,
        one_signed,
        diameter,
        flagged: !one_signed && diameter <= 1.0,
    })
}

/// Sign report of the top eigenvector.
pub fn positive_sign_check(result: &SpectralResult, mask: &PixelMask) -> Result<SignReport> {
    let top = result
        .top
        .first()
        .ok_or_else(|| Error::InvalidInput("result has no top eigenvector".into()))?;
    sign_report(&top.vector, mask)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineRow {
    pub h: f64,
    pub n: usize,
    pub tau_top: f64,
    pub tau_bottom: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub limit: f64,
    /// Observed order, when three or more levels are available.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineTable {
    pub schema_version: u32,
    pub kernel: KernelSpec,
    pub rows: Vec<RefineRow>,
    pub tau_top: Option<Extrapolation>,
    pub tau_bottom: Option<Extrapolation>,
}

/// Richardson extrapolation from the last levels of a refinement sequence.
/// With three levels the order is observed; with two it is assumed to be 2.
pub fn richardson(hs: &[f64], vals: &[f64]) -> Option<Extrapolation> {
    let m = vals.len();
    if m < 2 {
        return None;
    }
    let (h2, h3) = (hs[m - 2], hs[m - 1]);
    let (v2, v3) = (vals[m - 2], vals[m - 1]);
    let r = h2 / h3;
    let mut order = None;
    let mut p = 2.0;
    if m >= 3 {
        let (h1, v1) = (hs[m - 3], vals[m - 3]);
        let d1 = v2 - v1;
        let d2 = v3 - v2;
        let r1 = h1 / h2;
        if d1 != 0.0 && d2 != 0.0 && d1.signum() == d2.signum() && (r1 - r).abs() < 1e-9 * r {
            let q = (d1 / d2).ln() / r.ln();
            if q.is_finite() && q > 0.0 {
                p = q;
                order = Some(q);
            }
        }
    }
    let limit = v3 + (v3 - v2) / (r.powf(p) - 1.0);
    Some(Extrapolation { limit, order })
}

/// Top and bottom eigenvalue at each spacing in `h_list` (descending).
pub fn refine_study(shape: &Shape, kernel: &KernelSpec, h_list: &[f64]) -> Result<RefineTable> {
    if h_list.is_empty() {
        return Err(Error::InvalidInput("h list is empty".into()));
    }
    if h_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("h list must be strictly descending".into()));
    }
    let mut rows = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let mask = Arc::new(PixelMask::rasterize(shape, h)?);
        let (top, bottom) = solve_ends(&mask, kernel, Ends::Both(1))?;
        rows.push(RefineRow {
            h,
            n: mask.active_count(),
            tau_top: top[0].tau,
            tau_bottom: bottom.expect("bottom requested").tau,
        });
    }
    let tops: Vec<f64> = rows.iter().map(|r| r.tau_top).collect();
    let bots: Vec<f64> = rows.iter().map(|r| r.tau_bottom).collect();
    Ok(RefineTable {
        schema_version: 1,
        kernel: *kernel,
        tau_top: richardson(h_list, &tops),
        tau_bottom: richardson(h_list, &bots),
        rows,
    })
}
