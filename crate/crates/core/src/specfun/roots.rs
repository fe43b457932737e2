use serde::{Deserialize, Serialize};

use super::bessel::{bessel_i0e, bessel_i1e, bessel_j0, bessel_j1};
use super::zeros::{bessel_zero, refine_root};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootKind {
    /// Zero of `J_0(t) - log R * t * J_0'(t)`.
    Oscillatory,
    /// Zero of `I_0(t) - log R * t * I_0'(t)`.
    Modified,
}

/// A root of one of the disc boundary-condition equations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRoot {
    pub radius: f64,
    pub n: usize,
    pub value: f64,
    pub kind: RootKind,
    /// Relative residual of the defining equation at `value`.
    pub residual: f64,
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("radius must be positive, got {radius}")))
    }
}

/// `F(t) = J_0(t) - log R * t * J_0'(t) = J_0(t) + log R * t * J_1(t)`.
fn radial_equation(log_r: f64, t: f64) -> f64 {
    bessel_j0(t) + log_r * t * bessel_j1(t)
}

/// The `n`-th positive zero `mu_{0,n}(B_R)` of `J_0(t) - log R * t * J_0'(t)`.
///
/// Brackets: `R = 1` gives `j_{0,n}`; for `R < 1` the first root lies in
/// `(0, j_{0,1})` and the `n`-th in `(j_{0,n-1}, j_{0,n})`; for `R > 1` it lies
/// in `(j_{0,n}, j_{0,n+1})`.
pub fn mu_radial(radius: f64, n: usize) -> Result<BoundaryRoot> {
    check_radius(radius)?;
    if n == 0 {
        return Err(Error::InvalidInput("root index starts at 1".into()));
    }
    let log_r = radius.ln();
    let value = if log_r == 0.0 {
        bessel_zero(0, n)
    } else {
        let (lo, hi) = if log_r < 0.0 {
            let lo = if n == 1 { 0.0 } else { bessel_zero(0, n - 1) };
            (lo, bessel_zero(0, n))
        } else {
            (bessel_zero(0, n), bessel_zero(0, n + 1))
        };
        let f = |t: f64| radial_equation(log_r, t);
        // F'(t) = -J_1 + log R * (J_1 + t J_1') = -J_1 + log R * t * J_0
        let df = |t: f64| -bessel_j1(t) + log_r * t * bessel_j0(t);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            lo
        } else if fhi == 0.0 {
            hi
        } else if (flo < 0.0) == (fhi < 0.0) {
            return Err(Error::NonConvergence {
                what: format!("bracket for mu_0,{n}(B_{radius})"),
                iterations: 0,
                residual: flo.abs().min(fhi.abs()),
            });
        } else {
            refine_root(f, df, lo, hi)
        }
    };
    let scale = 1.0f64.max((value * bessel_j1(value)).abs() * log_r.abs()).max(bessel_j1(value).abs());
    Ok(BoundaryRoot {
        radius,
        n,
        value,
        kind: RootKind::Oscillatory,
        residual: radial_equation(log_r, value).abs() / scale,
    })
}

/// `g(t) = t I_0'(t) / I_0(t) = t I_1(t) / I_0(t)`; increasing from 0 to infinity.
pub fn g_ratio(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    t * bessel_i1e(t) / bessel_i0e(t)
}

/// The unique positive root `mu_0(B_R)` of `I_0(t) - log R * t * I_0'(t)`,
/// i.e. `g(t) = 1 / log R`. Exists only for `R > 1`.
pub fn mu_modified(radius: f64) -> Result<BoundaryRoot> {
    check_radius(radius)?;
    if radius <= 1.0 {
        return Err(Error::NoNegativeEigenvalue { radius });
    }
    let log_r = radius.ln();
    let target = 1.0 / log_r;
    let f = |t: f64| g_ratio(t) - target;
    let df = |t: f64| {
        let r = bessel_i1e(t) / bessel_i0e(t);
        t * (1.0 - r * r)
    };
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NonConvergence {
                what: format!("bracket for mu_0(B_{radius})"),
                iterations: 0,
                residual: f64::NAN,
            });
        }
    }
    let value = refine_root(f, df, 0.0, hi);
    let (i0, i1) = (bessel_i0e(value), bessel_i1e(value));
    Ok(BoundaryRoot {
        radius,
        n: 1,
        value,
        kind: RootKind::Modified,
        residual: ((i0 - log_r * value * i1) / i0).abs(),
    })
}

const POLE_EPS: f64 = 1e-14;

/// `h(t) = t J_0'(t) / J_0(t) = -t J_1(t) / J_0(t)`.
pub fn h_ratio(t: f64) -> Result<f64> {
    let d = bessel_j0(t);
    if d.abs() < POLE_EPS {
        return Err(Error::Pole { name: "h", t });
    }
    Ok(-t * bessel_j1(t) / d)
}

/// `f(t) = -J_0(t) / (t J_1(t))`.
pub fn f_ratio(t: f64) -> Result<f64> {
    let d = t * bessel_j1(t);
    if d.abs() < POLE_EPS {
        return Err(Error::Pole { name: "f", t });
    }
    Ok(-bessel_j0(t) / d)
}
