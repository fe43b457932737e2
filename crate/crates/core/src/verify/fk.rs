use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::placement::{eig_on, refinement_delta, End, SweepOptions};
use super::report::{ExperimentReport, Verdict, STRICT_FACTOR};
use crate::disc_spectrum::neg_eig;
use crate::error::{Error, Result};
use crate::geom2d::{diameter, hull_points, min_enclosing_circle, polarize_set, schwarz_set, PixelMask, Polarizer, Shape};
use crate::solver::KernelSpec;

/// Largest eigenvalue before and after a rearrangement on the same grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FkGap {
    pub tau: f64,
    pub tau_rearranged: f64,
    pub gap: f64,
    /// Sum of the two eigenpair residuals, a bound on each eigenvalue error.
    pub tolerance: f64,
    pub cells: usize,
    pub diameter: f64,
    /// The positive-eigenfunction hypothesis, via `diameter <= 1`.
    pub hypothesis_verified: bool,
    /// The rearranged mask has the same cells as the input.
    pub unchanged: bool,
}

impl FkGap {
    /// Pass when strictly positive beyond `3 x tolerance`; fail when below
    /// `-tolerance`; inconclusive in between (equality cases land here).
    pub fn verdict(&self) -> Verdict {
        if self.gap < -self.tolerance {
            Verdict::Fail
        } else if self.gap > STRICT_FACTOR * self.tolerance {
            Verdict::Pass
        } else {
            Verdict::Inconclusive
        }
    }
}

fn gap_between(a: &Arc<PixelMask>, b: &Arc<PixelMask>, kernel: &KernelSpec, force: bool, cap: usize) -> Result<FkGap> {
    let diam = diameter(a)?;
    if diam > 1.0 && !force {
        return Err(Error::Inapplicable(format!(
            "mask diameter {diam:.4} exceeds 1; the positive eigenfunction hypothesis is unverified (use force)"
        )));
    }
    let e1 = eig_on(a, kernel, End::Top, cap)?;
    let e2 = eig_on(b, kernel, End::Top, cap)?;
    let tolerance = (e1.residual + e2.residual).max(1e-14 * e1.tau.abs());
    Ok(FkGap {
        tau: e1.tau,
        tau_rearranged: e2.tau,
        gap: e2.tau - e1.tau,
        tolerance,
        cells: a.active_count(),
        diameter: diam,
        hypothesis_verified: diam <= 1.0,
        unchanged: a.same_cells(b),
    })
}

/// `tau_1` of the rasterized shape against its polarization by `pol`.
pub fn reverse_fk_polarization(shape: &Shape, pol: &Polarizer, h: f64, force: bool, opts: &SweepOptions) -> Result<FkGap> {
    pol.require_grid(h)?;
    let m = Arc::new(PixelMask::rasterize(shape, h)?);
    let p = Arc::new(polarize_set(&m, pol)?);
    gap_between(&m, &p, &opts.kernel, force, opts.cap)
}

/// `tau_1` of the rasterized shape against its discrete Schwarz symmetrization.
pub fn reverse_fk_schwarz(shape: &Shape, h: f64, force: bool, opts: &SweepOptions) -> Result<FkGap> {
    let m = Arc::new(PixelMask::rasterize(shape, h)?);
    let s = Arc::new(schwarz_set(&m)?);
    gap_between(&m, &s, &opts.kernel, force, opts.cap)
}

/// Both extreme eigenvalues on `inner` and `outer`, which must be nested
/// cell by cell. The discrete matrices are a principal submatrix pair, so the
/// inequalities hold exactly up to solver residuals.
pub fn domain_monotonicity_check(inner: &Shape, outer: &Shape, h: f64, opts: &SweepOptions) -> Result<ExperimentReport> {
    let a = Arc::new(PixelMask::rasterize(inner, h)?);
    let b = Arc::new(PixelMask::rasterize(outer, h)?);
    if !a.is_subset_of(&b) {
        return Err(Error::InvalidShape("inner mask is not contained in the outer mask".into()));
    }
    let mut rep = ExperimentReport::new("domain_monotonicity", &["domain", "cells", "tau1", "tau_tilde1"]);
    rep.param("inner", inner).param("outer", outer).param("h", h).param("kernel", opts.kernel.to_string());
    let mut taus = Vec::new();
    let mut tol = 0.0;
    for (k, m) in [&a, &b].into_iter().enumerate() {
        let top = eig_on(m, &opts.kernel, End::Top, opts.cap)?;
        let bot = eig_on(m, &opts.kernel, End::Bottom, opts.cap)?;
        tol += top.residual + bot.residual;
        rep.push_row(vec![k as f64, m.active_count() as f64, top.tau, bot.tau]);
        taus.push((top.tau, bot.tau));
    }
    tol = tol.max(1e-14);
    rep.tolerance_used = tol;
    let d_top = taus[1].0 - taus[0].0;
    let d_bot = taus[0].1 - taus[1].1;
    rep.metric("top_increase", d_top).metric("bottom_decrease", d_bot);
    rep.verdict = if d_top < -tol || d_bot < -tol {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    if a.same_cells(&b) {
        rep.notes.push("identical masks: both differences are rounding only".into());
    } else {
        rep.notes.push(format!(
            "strict top increase: {}; strict bottom decrease: {}",
            d_top > STRICT_FACTOR * tol,
            d_bot > STRICT_FACTOR * tol
        ));
    }
    Ok(rep)
}

/// Two-sided disc bound on the negative eigenvalue. `R1` is the inscribed
/// radius of the mask (cells fully covered), `R2` the enclosing radius of all
/// cells; grid slack is the `h/2` refinement change of the numeric value.
pub fn sandwich_check(shape: &Shape, h: f64, opts: &SweepOptions) -> Result<ExperimentReport> {
    let m = Arc::new(PixelMask::rasterize(shape, h)?);
    let (_, r1) = m.inscribed_disc()?;
    if r1 <= 1.0 {
        return Err(Error::Inapplicable(format!("inscribed radius {r1:.4} is not above 1")));
    }
    let (_, rc) = min_enclosing_circle(&hull_points(&m));
    let r2 = rc + h / std::f64::consts::SQRT_2;
    let upper = neg_eig(r1)?.tau;
    let lower = neg_eig(r2)?.tau;
    let bottom = eig_on(&m, &opts.kernel, End::Bottom, opts.cap)?;
    let slack = if opts.refine {
        refinement_delta(shape, h, End::Bottom, opts)?
    } else {
        0.0
    } + bottom.residual;

    let mut rep = ExperimentReport::new("sandwich", &["r1", "r2", "lower", "tau_tilde1", "upper"]);
    rep.param("shape", shape).param("h", h);
    rep.push_row(vec![r1, r2, lower, bottom.tau, upper]);
    rep.metric("slack", slack).metric("cells", m.active_count() as f64);
    rep.tolerance_used = slack;
    rep.verdict = if bottom.tau >= lower - slack && bottom.tau <= upper + slack {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(rep)
}
