//! Transfinite diameter by two independent routes: the Robin constant of an
//! equilibrium measure on boundary nodes (primary) and n-th diameters from
//! Fekete point ascent (a decreasing upper-bound sequence).

mod fekete;
mod robin;

pub use fekete::{rho_n, rho_n_with_cap, rho_of, FeketeResult, DEFAULT_FEKETE_CAP};
pub use robin::{project_simplex, robin_constant, robin_constant_mask, robin_from_nodes, RobinResult};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom2d::{PixelMask, Shape};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TdiamOptions {
    pub nodes: usize,
    /// Largest n in the rho_n sequence; 0 skips the Fekete route.
    pub n_max: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for TdiamOptions {
    fn default() -> Self {
        TdiamOptions {
            nodes: 512,
            n_max: 12,
            restarts: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoSample {
    pub n: usize,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TdiamEstimate {
    pub tdiam: f64,
    pub v_e: f64,
    /// Robin value with half the nodes; the difference is the resolution band.
    pub tdiam_coarse: f64,
    pub rho_sequence: Vec<RhoSample>,
    /// Every computed rho_n lies above the estimate, minus the band.
    pub upper_bounds_consistent: bool,
}

impl TdiamEstimate {
    /// Resolution band: three times the node-halving change, at least 1e-3.
    pub fn band(&self) -> f64 {
        (3.0 * (self.tdiam - self.tdiam_coarse).abs()).max(1e-3)
    }
}

pub fn tdiam_estimate(shape: &Shape) -> Result<f64> {
    Ok(tdiam_report(shape, &TdiamOptions::default())?.tdiam)
}

/// Robin estimate plus the rho_n check sequence.
pub fn tdiam_report(shape: &Shape, opts: &TdiamOptions) -> Result<TdiamEstimate> {
    let fine = robin_constant(shape, opts.nodes)?;
    let coarse = robin_constant(shape, (opts.nodes / 2).max(8))?;
    let mut seq = Vec::new();
    for n in 2..=opts.n_max {
        let r = rho_n(shape, n, opts.restarts, opts.seed)?;
        seq.push(RhoSample { n, rho: r.rho_n });
    }
    Ok(assemble(fine, coarse.tdiam, seq))
}

/// Mask fallback of [`tdiam_report`], without the Fekete route.
pub fn tdiam_report_mask(mask: &PixelMask) -> Result<TdiamEstimate> {
    let fine = robin_constant_mask(mask)?;
    let coarse = coarse_mask(mask)
        .and_then(|m| robin_constant_mask(&m).ok())
        .map(|r| r.tdiam)
        .unwrap_or(fine.tdiam);
    Ok(assemble(fine, coarse, Vec::new()))
}

/// The same set on a grid twice as coarse: a coarse cell is active when any of
/// its four fine cells is.
fn coarse_mask(mask: &PixelMask) -> Option<PixelMask> {
    let cells = mask
        .active_cells()
        .into_iter()
        .map(|(i, j)| (i.div_euclid(2), j.div_euclid(2)));
    PixelMask::from_cells(2.0 * mask.h(), cells).ok()
}

fn assemble(fine: RobinResult, coarse: f64, rho_sequence: Vec<RhoSample>) -> TdiamEstimate {
    let mut est = TdiamEstimate {
        tdiam: fine.tdiam,
        v_e: fine.v_e,
        tdiam_coarse: coarse,
        rho_sequence,
        upper_bounds_consistent: true,
    };
    let band = est.band();
    est.upper_bounds_consistent = est.rho_sequence.iter().all(|s| s.rho >= est.tdiam - band);
    est
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositivityClass {
    /// `T <= 1`: the log operator has no negative eigenvalue.
    Positive,
    /// `T > 1`: a negative eigenvalue exists.
    Indefinite,
    /// Within the band of the threshold.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub class: PositivityClass,
    pub tdiam: f64,
    pub band: f64,
}

pub fn classify(est: &TdiamEstimate) -> Classification {
    let band = est.band();
    let class = if (est.tdiam - 1.0).abs() < band {
        PositivityClass::Inconclusive
    } else if est.tdiam < 1.0 {
        PositivityClass::Positive
    } else {
        PositivityClass::Indefinite
    };
    Classification {
        class,
        tdiam: est.tdiam,
        band,
    }
}

/// Positive / indefinite from the Robin estimate alone.
pub fn positivity_classifier(shape: &Shape) -> Result<Classification> {
    let opts = TdiamOptions {
        n_max: 0,
        ..TdiamOptions::default()
    };
    Ok(classify(&tdiam_report(shape, &opts)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::Vec2;

    #[test]
    fn ellipse_and_annulus() {
        let t = tdiam_estimate(&Shape::ellipse(Vec2::ZERO, 2.0, 0.25)).unwrap();
        assert!((t - 1.125).abs() < 0.03 * 1.125, "{t}");
        let t = tdiam_estimate(&Shape::annulus(Vec2::ZERO, 1.5, 0.5)).unwrap();
        assert!((t - 1.5).abs() < 0.03 * 1.5, "{t}");
    }

    #[test]
    fn classes() {
        let c = |s: Shape| positivity_classifier(&s).unwrap().class;
        assert_eq!(c(Shape::disc(Vec2::ZERO, 0.5)), PositivityClass::Positive);
        assert_eq!(c(Shape::disc(Vec2::ZERO, 2.0)), PositivityClass::Indefinite);
        assert_eq!(c(Shape::ellipse(Vec2::ZERO, 2.0, 0.25)), PositivityClass::Indefinite);
        assert_eq!(c(Shape::disc(Vec2::ZERO, 1.0)), PositivityClass::Inconclusive);
    }

    #[test]
    fn rho_sequence_sits_above_the_limit() {
        let est = tdiam_report(&Shape::square(Vec2::ZERO, 1.0), &TdiamOptions::default()).unwrap();
        assert!(est.upper_bounds_consistent, "{est:?}");
        // square of side a: capacity a * Gamma(1/4)^2 / (4 pi^1.5)
        assert!((est.tdiam - 0.590_170).abs() < 0.01, "{}", est.tdiam);
    }

    #[test]
    fn mask_route_tracks_the_shape_route() {
        let m = PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 1.0), 0.02).unwrap();
        let est = tdiam_report_mask(&m).unwrap();
        assert!((est.tdiam - 1.0).abs() < 0.03, "{}", est.tdiam);
    }
}
