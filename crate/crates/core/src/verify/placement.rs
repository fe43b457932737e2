use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geom2d::{PixelMask, Shape, Vec2};
use crate::solver::{solve_ends_with_cap, EigenPair, Ends, KernelSpec};

/// Cell cap for experiments. Sweeps pick their own resolution, so they do
/// not inherit the interactive default of 20000 cells.
pub const DEFAULT_EXPERIMENT_CAP: usize = 250_000;

/// Where the shape sits relative to the lattice.
///
/// `Lattice` rasterizes the shape as given. `Jitter { k }` averages the
/// eigenvalue over the `k x k` stratified sub-cell translations
/// `((a + 1/2) h / k, (b + 1/2) h / k)`. Eigenvalues are translation
/// invariant, so the average only smooths the rasterization error, which for
/// circles commensurate with the lattice is systematic at a fixed placement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Placement {
    Lattice,
    Jitter { k: u32 },
}

impl Placement {
    pub fn offsets(&self, h: f64) -> Vec<Vec2> {
        match *self {
            Placement::Lattice => vec![Vec2::ZERO],
            Placement::Jitter { k } => {
                let k = k.max(1);
                let mut v = Vec::with_capacity((k * k) as usize);
                for b in 0..k {
                    for a in 0..k {
                        v.push(Vec2::new(
                            (a as f64 + 0.5) / k as f64 * h,
                            (b as f64 + 0.5) / k as f64 * h,
                        ));
                    }
                }
                v
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub kernel: KernelSpec,
    pub placement: Placement,
    pub cap: usize,
    /// Run the `h/2` refinement probe at the sweep endpoints.
    pub refine: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            kernel: KernelSpec::log(),
            placement: Placement::Lattice,
            cap: DEFAULT_EXPERIMENT_CAP,
            refine: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum End {
    Top,
    Bottom,
}

/// One eigenpair at the requested end, on the mask of `shape` at spacing `h`.
pub(crate) fn eig_on(mask: &Arc<PixelMask>, kernel: &KernelSpec, end: End, cap: usize) -> Result<EigenPair> {
    Ok(match end {
        End::Top => solve_ends_with_cap(mask, kernel, Ends::Top(1), cap)?.0.remove(0),
        End::Bottom => solve_ends_with_cap(mask, kernel, Ends::Bottom, cap)?
            .1
            .expect("bottom requested"),
    })
}

/// Placement-averaged extreme eigenvalue and the mean active-cell count.
pub(crate) fn placed_tau(shape: &Shape, h: f64, end: End, opts: &SweepOptions) -> Result<(f64, f64)> {
    let offs = opts.placement.offsets(h);
    let mut sum = 0.0;
    let mut cells = 0.0;
    for off in &offs {
        let s = if *off == Vec2::ZERO { shape.clone() } else { shape.translated(*off) };
        let mask = Arc::new(PixelMask::rasterize(&s, h)?);
        cells += mask.active_count() as f64;
        sum += eig_on(&mask, &opts.kernel, end, opts.cap)?.tau;
    }
    let m = offs.len() as f64;
    Ok((sum / m, cells / m))
}

/// `|tau(h) - tau(h/2)|` under the same placement rule.
pub(crate) fn refinement_delta(shape: &Shape, h: f64, end: End, opts: &SweepOptions) -> Result<f64> {
    let (a, _) = placed_tau(shape, h, end, opts)?;
    let (b, _) = placed_tau(shape, h / 2.0, end, opts)?;
    Ok((a - b).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stratified_offsets() {
        let o = Placement::Jitter { k: 2 }.offsets(0.1);
        assert_eq!(o.len(), 4);
        assert!((o[0].x - 0.025).abs() < 1e-15 && (o[3].y - 0.075).abs() < 1e-15);
        assert_eq!(Placement::Lattice.offsets(0.1), vec![Vec2::ZERO]);
    }
}
