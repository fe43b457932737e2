use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{ExperimentReport, Verdict};
use crate::error::{Error, Result};
use crate::geom2d::{polarize_fn, GridFunction, GridNormal, PixelMask, Polarizer};
use crate::solver::KernelSpec;

/// Margin below which the discrete Riesz inequality counts as violated.
pub const RIESZ_TOL: f64 = 1e-12;

/// Discrete interaction energy `sum_ij u_i u_j A_ij`, by direct pairwise sums
/// (no operator assembly, so it is an independent route to the solver's
/// quadratic form). Compensated summation keeps the rounding near 1e-16.
pub fn pair_energy(u: &GridFunction, kernel: &KernelSpec) -> Result<f64> {
    kernel.validate()?;
    let mask = u.mask();
    let h = mask.h();
    let cells = mask.active_cells();
    let v = u.values();
    let partial: Vec<(f64, f64)> = (0..cells.len())
        .into_par_iter()
        .map(|i| {
            let (xi, yi) = cells[i];
            let mut s = 0.0;
            let mut c = 0.0;
            for j in 0..cells.len() {
                let (xj, yj) = cells[j];
                let t = v[i] * v[j] * kernel.entry(h, xi - xj, yi - yj);
                let y = s + t;
                c += if s.abs() >= t.abs() { (s - y) + t } else { (t - y) + s };
                s = y;
            }
            (s, c)
        })
        .collect();
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for (a, b) in partial {
        for t in [a, b] {
            let y = s + t;
            c += if s.abs() >= t.abs() { (s - y) + t } else { (t - y) + s };
            s = y;
        }
    }
    Ok(s + c)
}

/// `I(P_H u) - I(u)` for non-negative `u` and a grid-compatible `H`.
pub fn check_riesz_polarization(u: &GridFunction, pol: &Polarizer, kernel: &KernelSpec) -> Result<f64> {
    let min = u.min();
    if min < 0.0 {
        return Err(Error::NegativeValues { min });
    }
    let pu = polarize_fn(u, pol)?;
    Ok(pair_energy(&pu, kernel)? - pair_energy(u, kernel)?)
}

/// One random case: a sparse random mask, a non-negative function with some
/// zeros, and a grid polarizer whose line crosses the mask window.
pub fn random_case(rng: &mut ChaCha8Rng) -> Result<(GridFunction, Polarizer)> {
    let h = [0.05, 0.1, 0.2, 0.5, 1.0][rng.gen_range(0..5)];
    let (nx, ny) = (rng.gen_range(3..14i64), rng.gen_range(3..14i64));
    let (ox, oy) = (rng.gen_range(-8..8i64), rng.gen_range(-8..8i64));
    let density = rng.gen_range(0.2..0.9);
    let mut cells = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if rng.gen_bool(density) {
                cells.push((ox + i, oy + j));
            }
        }
    }
    if cells.is_empty() {
        cells.push((ox, oy));
    }
    let mask = Arc::new(PixelMask::from_cells(h, cells)?);
    let n = mask.active_count();
    let vals: Vec<f64> = (0..n)
        .map(|_| if rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.0..1.0) })
        .collect();
    let u = GridFunction::new(mask, vals)?;
    let normal = GridNormal::ALL[rng.gen_range(0..8)];
    // projections of the window lie within about +-2 (|o| + n)
    let reach = 2 * (ox.abs().max(oy.abs()) + nx.max(ny)) + 2;
    let k = rng.gen_range(-reach..=reach);
    Ok((u, Polarizer::grid(normal, k, h)))
}

/// Randomized suite: `count` cases, pass when every margin is at least `-RIESZ_TOL`.
pub fn riesz_suite(kernel: &KernelSpec, count: usize, seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("riesz_polarization", &["case", "cells", "energy", "margin"]);
    rep.param("kernel", kernel.to_string()).param("count", count);
    rep.seeds.push(seed);
    rep.tolerance_used = RIESZ_TOL;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<_> = (0..count).map(|_| random_case(&mut rng)).collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = cases
        .par_iter()
        .enumerate()
        .map(|(i, (u, pol))| {
            let e = pair_energy(u, kernel)?;
            let m = check_riesz_polarization(u, pol, kernel)?;
            Ok(vec![i as f64, u.values().len() as f64, e, m])
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().map(|r| r[3]).fold(f64::INFINITY, f64::min);
    rep.rows = rows;
    rep.metric("min_margin", worst);
    rep.verdict = if worst >= -RIESZ_TOL { Verdict::Pass } else { Verdict::Fail };
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{Shape, Vec2};
    use crate::solver::{assemble, energy};

    #[test]
    fn pair_energy_matches_the_operator_form() {
        let m = Arc::new(PixelMask::rasterize(&Shape::ellipse(Vec2::new(0.1, 0.0), 0.3, 0.2), 0.04).unwrap());
        let u = GridFunction::from_fn(m.clone(), |p| 1.0 + p.x).unwrap();
        for k in [KernelSpec::log(), KernelSpec::riesz(1.0).unwrap()] {
            let a = assemble(&m, &k).unwrap();
            let e1 = pair_energy(&u, &k).unwrap();
            let e2 = energy(&u, &a).unwrap();
            assert!((e1 - e2).abs() < 1e-13 * e1.abs().max(1e-3), "{e1} vs {e2}");
        }
    }

    #[test]
    fn symmetric_function_has_zero_margin() {
        let h = 0.1;
        let m = Arc::new(PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 0.5), h).unwrap());
        let u = GridFunction::from_fn(m, |p| 1.0 - p.norm()).unwrap();
        let pol = Polarizer::grid(GridNormal::PosX, 0, h);
        let margin = check_riesz_polarization(&u, &pol, &KernelSpec::log()).unwrap();
        assert!(margin.abs() < 1e-15, "{margin}");
    }

    #[test]
    fn sign_changing_input_is_rejected() {
        let m = Arc::new(PixelMask::from_cells(0.1, [(0, 0), (1, 0)]).unwrap());
        let u = GridFunction::new(m, vec![1.0, -0.5]).unwrap();
        let pol = Polarizer::grid(GridNormal::PosX, 1, 0.1);
        assert!(matches!(
            check_riesz_polarization(&u, &pol, &KernelSpec::log()),
            Err(Error::NegativeValues { .. })
        ));
    }

    #[test]
    fn small_suite_passes() {
        let r = riesz_suite(&KernelSpec::log(), 60, 7).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.metrics);
        // some cases must actually move mass
        assert!(r.rows.iter().any(|row| row[3] > 1e-9));
    }
}
