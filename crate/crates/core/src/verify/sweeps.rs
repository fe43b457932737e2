use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::placement::{placed_tau, refinement_delta, End, SweepOptions};
use super::report::{monotone_verdict, Direction, ExperimentReport, Verdict};
use crate::error::{Error, Result};
use crate::geom2d::{Shape, Vec2};

/// Shared sweep driver: one extreme eigenvalue per parameter, endpoint
/// refinement probes, and the monotone verdict.
fn run_sweep(
    rep: &mut ExperimentReport,
    params: &[f64],
    shapes: &[Shape],
    h: f64,
    end: End,
    dir: Direction,
    opts: &SweepOptions,
) -> Result<Vec<f64>> {
    let vals: Vec<(f64, f64)> = shapes
        .par_iter()
        .map(|s| placed_tau(s, h, end, opts))
        .collect::<Result<_>>()?;
    let taus: Vec<f64> = vals.iter().map(|v| v.0).collect();
    let mut uncertainty = 0.0f64;
    let mut deltas = vec![f64::NAN; params.len()];
    if opts.refine && !shapes.is_empty() {
        let ends: Vec<usize> = if shapes.len() == 1 { vec![0] } else { vec![0, shapes.len() - 1] };
        for k in ends {
            let d = refinement_delta(&shapes[k], h, end, opts)?;
            deltas[k] = d;
            uncertainty = uncertainty.max(d);
        }
    }
    for (k, &p) in params.iter().enumerate() {
        rep.push_row(vec![p, taus[k], vals[k].1]);
    }
    rep.param("h", h).param("placement", opts.placement).param("kernel", opts.kernel.to_string());
    rep.metric("uncertainty", uncertainty);
    for (k, d) in deltas.iter().enumerate() {
        if d.is_finite() {
            rep.metric(&format!("refine_delta_{k}"), *d);
        }
    }
    let diffs: Vec<f64> = taus.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    if let Some(min) = diffs.iter().copied().reduce(f64::min) {
        rep.metric("min_step", min);
        if uncertainty > 0.0 {
            rep.metric("step_to_uncertainty", min / uncertainty);
        }
    }
    rep.tolerance_used = uncertainty;
    rep.verdict = monotone_verdict(params, &taus, dir, uncertainty);
    if !opts.refine {
        rep.notes.push("refinement probe disabled: steps compared against zero uncertainty".into());
    }
    Ok(taus)
}

/// `tau_1` of `B_R(0)` minus the closed disc `B_r((t, 0))` along `t_values`;
/// expected strictly increasing.
pub fn annulus_sweep(outer: f64, inner: f64, t_values: &[f64], h: f64, opts: &SweepOptions) -> Result<ExperimentReport> {
    for &t in t_values {
        if !(t >= 0.0 && t < outer - inner) {
            return Err(Error::InvalidInput(format!("t = {t} outside [0, R - r) = [0, {})", outer - inner)));
        }
    }
    let mut rep = ExperimentReport::new("annulus_sweep", &["t", "tau1", "cells"]);
    rep.param("outer", outer).param("inner", inner).param("t_values", t_values);
    if outer >= 0.5 {
        rep.notes.push(format!("hypothesis R < 1/2 violated (R = {outer}); run allowed"));
    }
    let shapes: Vec<Shape> = t_values.iter().map(|&t| Shape::eccentric_annulus(outer, inner, t)).collect();
    run_sweep(&mut rep, t_values, &shapes, h, End::Top, Direction::Increasing, opts)?;
    Ok(rep)
}

/// Built-in obstacle families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObstacleFamily {
    /// `domain` minus `obstacle + s * direction`.
    Translate {
        domain: Shape,
        obstacle: Shape,
        direction: Vec2,
    },
    /// `B_radius(0)` minus `B_radius((-radius, 0))` (a lune, foliated Schwarz
    /// symmetric about the x-axis), minus a diamond centred at
    /// `(obstacle_at, 0)` rotated about the origin by the parameter.
    Rotate {
        radius: f64,
        obstacle_at: f64,
        half_diagonal: f64,
    },
}

impl ObstacleFamily {
    /// Square of side 0.7 with a diamond of half-diagonal 0.08 slid along
    /// the diagonal; the parameter is the common coordinate `c` of the
    /// obstacle centre `(c, c)`.
    pub fn default_translate() -> Self {
        ObstacleFamily::Translate {
            domain: Shape::square(Vec2::ZERO, 0.7),
            obstacle: Shape::diamond(Vec2::ZERO, 0.08),
            direction: Vec2::new(1.0, 1.0),
        }
    }

    pub fn default_rotate() -> Self {
        ObstacleFamily::Rotate {
            radius: 0.5,
            obstacle_at: 0.3,
            half_diagonal: 0.06,
        }
    }

    fn parts(&self, p: f64) -> (Shape, Shape) {
        match self {
            ObstacleFamily::Translate {
                domain,
                obstacle,
                direction,
            } => (domain.clone(), obstacle.translated(*direction * p)),
            ObstacleFamily::Rotate {
                radius,
                obstacle_at,
                half_diagonal,
            } => (
                Shape::difference(
                    Shape::disc(Vec2::ZERO, *radius),
                    Shape::disc(Vec2::new(-radius, 0.0), *radius),
                ),
                Shape::diamond(Vec2::new(*obstacle_at, 0.0), *half_diagonal).rotated(p),
            ),
        }
    }

    /// The punctured domain at parameter `p`; errors when the obstacle
    /// leaves the domain.
    pub fn shape_at(&self, p: f64) -> Result<Shape> {
        let (domain, obstacle) = self.parts(p);
        let inside = obstacle.boundary_nodes(256).iter().all(|n| domain.contains(n.p));
        if !inside {
            return Err(Error::InvalidShape(format!("obstacle leaves the domain at parameter {p}")));
        }
        Ok(Shape::difference(domain, obstacle))
    }
}

/// `tau_1` along translations or rotations of an obstacle; expected strictly
/// increasing.
pub fn obstacle_sweep(family: &ObstacleFamily, params: &[f64], h: f64, opts: &SweepOptions) -> Result<ExperimentReport> {
    let name = match family {
        ObstacleFamily::Translate { .. } => "obstacle_translate",
        ObstacleFamily::Rotate { .. } => "obstacle_rotate",
    };
    let mut rep = ExperimentReport::new(name, &["param", "tau1", "cells"]);
    rep.param("family", family).param("params", params);
    let shapes: Vec<Shape> = params.iter().map(|&p| family.shape_at(p)).collect::<Result<_>>()?;
    run_sweep(&mut rep, params, &shapes, h, End::Top, Direction::Increasing, opts)?;
    Ok(rep)
}

/// Two unit discs with centres `d` apart.
pub fn two_balls(d: f64) -> Result<Shape> {
    if !(d > 2.0) {
        return Err(Error::InvalidShape(format!("unit discs overlap or touch at distance {d}")));
    }
    Ok(Shape::union(vec![
        Shape::disc(Vec2::new(-d / 2.0, 0.0), 1.0),
        Shape::disc(Vec2::new(d / 2.0, 0.0), 1.0),
    ]))
}

/// Negative eigenvalue of two unit discs against their distance; expected
/// strictly decreasing. `ratio` is `tau(last) / tau(first)`.
pub fn two_ball_sweep(d_values: &[f64], h: f64, opts: &SweepOptions) -> Result<ExperimentReport> {
    let shapes: Vec<Shape> = d_values.iter().map(|&d| two_balls(d)).collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new("two_ball_sweep", &["d", "tau_tilde1", "cells"]);
    rep.param("d_values", d_values);
    let taus = run_sweep(&mut rep, d_values, &shapes, h, End::Bottom, Direction::Decreasing, opts)?;
    if let (Some(f), Some(l)) = (taus.first(), taus.last()) {
        rep.metric("ratio", l / f);
    }
    Ok(rep)
}

/// Two squares of area `c/3` with centres `d` apart, joined by a corridor of
/// area `c/3`, so `|Omega| = c` for every admissible `d`.
pub fn dumbbell(c: f64, d: f64) -> Result<Shape> {
    let side = (c / 3.0).sqrt();
    let len = d - side;
    if !(c > 0.0 && len > 0.0) {
        return Err(Error::InvalidShape(format!("squares of side {side:.4} overlap at distance {d}")));
    }
    let width = (c / 3.0) / len;
    if width >= side {
        return Err(Error::InvalidShape(format!("corridor width {width:.4} is not below the square side {side:.4}")));
    }
    // the corridor runs centre to centre; its overlap with the squares is
    // already counted, and no cell centre falls into a seam
    Ok(Shape::union(vec![
        Shape::square(Vec2::new(-d / 2.0, 0.0), side),
        Shape::square(Vec2::new(d / 2.0, 0.0), side),
        Shape::rect(Vec2::new(-d / 2.0, -width / 2.0), Vec2::new(d / 2.0, width / 2.0)),
    ]))
}

/// Dumbbell family at fixed area; expected strictly decreasing negative
/// eigenvalue. Passes only when the rasterized area also stays within 2% of `c`.
pub fn dumbbell_sweep(c: f64, d_values: &[f64], h: f64, opts: &SweepOptions) -> Result<ExperimentReport> {
    let shapes: Vec<Shape> = d_values.iter().map(|&d| dumbbell(c, d)).collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new("dumbbell_sweep", &["d", "tau_tilde1", "cells"]);
    rep.param("c", c).param("d_values", d_values);
    let taus = run_sweep(&mut rep, d_values, &shapes, h, End::Bottom, Direction::Decreasing, opts)?;
    let area_err = rep
        .rows
        .iter()
        .map(|r| (r[2] * h * h - c).abs() / c)
        .fold(0.0, f64::max);
    rep.metric("area_rel_err", area_err);
    if let (Some(f), Some(l)) = (taus.first(), taus.last()) {
        rep.metric("ratio", l / f);
    }
    if area_err > 0.02 && rep.verdict == Verdict::Pass {
        rep.verdict = Verdict::Fail;
        rep.notes.push(format!("rasterized area drifts by {:.2}%", 100.0 * area_err));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SweepOptions {
        SweepOptions {
            refine: false,
            ..SweepOptions::default()
        }
    }

    #[test]
    fn trivial_sweeps() {
        let r = annulus_sweep(0.45, 0.1, &[0.1], 0.05, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let r = annulus_sweep(0.45, 0.1, &[0.2, 0.2], 0.05, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let r = obstacle_sweep(&ObstacleFamily::default_translate(), &[], 0.05, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(annulus_sweep(0.45, 0.1, &[0.4], 0.05, &quick()).is_err());
    }

    #[test]
    fn obstacle_must_stay_inside() {
        assert!(ObstacleFamily::default_translate().shape_at(0.3).is_err());
        assert!(ObstacleFamily::default_translate().shape_at(0.2).is_ok());
        assert!(ObstacleFamily::default_rotate().shape_at(std::f64::consts::PI).is_err());
    }

    #[test]
    fn geometry_errors() {
        assert!(two_balls(2.0).is_err());
        assert!(dumbbell(3.0 * std::f64::consts::PI, 1.0).is_err());
        let s = dumbbell(3.0 * std::f64::consts::PI, 6.0).unwrap();
        assert!(s.contains(Vec2::new(0.0, 0.0)) && s.contains(Vec2::new(3.0, 0.8)));
    }

    #[test]
    fn translation_is_exactly_monotone_on_the_lattice() {
        // obstacle positions on lattice multiples: each step is an exact grid polarization
        let h = 0.04;
        let r = obstacle_sweep(&ObstacleFamily::default_translate(), &[0.0, 0.08, 0.16, 0.24], h, &quick()).unwrap();
        let t = r.column("tau1").unwrap();
        assert!(t.windows(2).all(|w| w[1] > w[0]), "{t:?}");
    }
}
