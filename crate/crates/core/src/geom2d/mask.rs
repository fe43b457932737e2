use std::sync::Arc;

use super::{Shape, Vec2};
use crate::error::{Error, Result};

/// Integer coordinates of a cell on the lattice `h * Z^2`.
pub type Cell = (i64, i64);

/// A discrete open set: occupied cells of the lattice `h * Z^2`.
///
/// Cell `(i, j)` has its centre at `(i h, j h)`. The mask stores a bounding
/// window `[ix0, ix0 + nx) x [iy0, iy0 + ny)` of that lattice. Active cells
/// are always enumerated row-major: ascending `j` (row), then ascending `i`
/// (column); grid functions index their values in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct PixelMask {
    h: f64,
    ix0: i64,
    iy0: i64,
    nx: usize,
    ny: usize,
    occupancy: Vec<bool>,
    active_count: usize,
}

impl PixelMask {
    /// Build a mask from its window and row-major occupancy.
    pub fn new(h: f64, ix0: i64, iy0: i64, nx: usize, ny: usize, occupancy: Vec<bool>) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidInput(format!("cell spacing must be positive, got {h}")));
        }
        if occupancy.len() != nx * ny {
            return Err(Error::InvalidInput(format!(
                "occupancy has {} entries, expected {nx} x {ny}",
                occupancy.len()
            )));
        }
        let active_count = occupancy.iter().filter(|&&b| b).count();
        Ok(PixelMask {
            h,
            ix0,
            iy0,
            nx,
            ny,
            occupancy,
            active_count,
        })
    }

    /// Smallest mask containing exactly the given cells.
    pub fn from_cells(h: f64, cells: impl IntoIterator<Item = Cell>) -> Result<Self> {
        let cells: Vec<Cell> = cells.into_iter().collect();
        if cells.is_empty() {
            return Err(Error::EmptyMask);
        }
        let (mut i0, mut i1, mut j0, mut j1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
        for &(i, j) in &cells {
            i0 = i0.min(i);
            i1 = i1.max(i);
            j0 = j0.min(j);
            j1 = j1.max(j);
        }
        let nx = (i1 - i0 + 1) as usize;
        let ny = (j1 - j0 + 1) as usize;
        let mut occ = vec![false; nx * ny];
        for (i, j) in cells {
            occ[(j - j0) as usize * nx + (i - i0) as usize] = true;
        }
        PixelMask::new(h, i0, j0, nx, ny, occ)
    }

    /// Rasterize by cell-centre membership in the open shape.
    pub fn rasterize(shape: &Shape, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidInput(format!("cell spacing must be positive, got {h}")));
        }
        shape.validate()?;
        let (lo, hi) = shape.bbox();
        let i0 = (lo.x / h).floor() as i64;
        let i1 = (hi.x / h).ceil() as i64;
        let j0 = (lo.y / h).floor() as i64;
        let j1 = (hi.y / h).ceil() as i64;
        let mut cells = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                if shape.contains(Vec2::new(i as f64 * h, j as f64 * h)) {
                    cells.push((i, j));
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::ResolutionTooCoarse { h });
        }
        PixelMask::from_cells(h, cells)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Lattice index of the window's first cell.
    pub fn window_origin(&self) -> Cell {
        (self.ix0, self.iy0)
    }

    /// Centre of the window's first cell.
    pub fn origin(&self) -> Vec2 {
        Vec2::new(self.ix0 as f64 * self.h, self.iy0 as f64 * self.h)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn active_count(&self) -> usize {
        self.active_count
    }

    pub fn is_empty(&self) -> bool {
        self.active_count == 0
    }

    /// Total area of the active cells.
    pub fn area(&self) -> f64 {
        self.active_count as f64 * self.h * self.h
    }

    pub fn is_active(&self, c: Cell) -> bool {
        let (i, j) = c;
        if i < self.ix0 || j < self.iy0 {
            return false;
        }
        let (di, dj) = ((i - self.ix0) as usize, (j - self.iy0) as usize);
        di < self.nx && dj < self.ny && self.occupancy[dj * self.nx + di]
    }

    /// Active cells in canonical (row-major) order.
    pub fn active_cells(&self) -> Vec<Cell> {
        let mut out = Vec::with_capacity(self.active_count);
        for dj in 0..self.ny {
            for di in 0..self.nx {
                if self.occupancy[dj * self.nx + di] {
                    out.push((self.ix0 + di as i64, self.iy0 + dj as i64));
                }
            }
        }
        out
    }

    pub fn center(&self, c: Cell) -> Vec2 {
        Vec2::new(c.0 as f64 * self.h, c.1 as f64 * self.h)
    }

    pub fn centers(&self) -> Vec<Vec2> {
        self.active_cells().into_iter().map(|c| self.center(c)).collect()
    }

    /// Position of each active cell in canonical order, or `None`.
    pub fn index_map(&self) -> Vec<Option<usize>> {
        let mut map = vec![None; self.nx * self.ny];
        let mut k = 0;
        for (slot, &b) in map.iter_mut().zip(&self.occupancy) {
            if b {
                *slot = Some(k);
                k += 1;
            }
        }
        map
    }

    /// Canonical index of an active cell.
    pub fn index_of(&self, c: Cell) -> Option<usize> {
        if !self.is_active(c) {
            return None;
        }
        // Count active cells before c; linear but only used off hot paths.
        let (di, dj) = ((c.0 - self.ix0) as usize, (c.1 - self.iy0) as usize);
        let flat = dj * self.nx + di;
        Some(self.occupancy[..flat].iter().filter(|&&b| b).count())
    }

    /// Every active cell of `self` is active in `other` (same spacing).
    pub fn is_subset_of(&self, other: &PixelMask) -> bool {
        same_spacing(self.h, other.h) && self.active_cells().into_iter().all(|c| other.is_active(c))
    }

    /// Same set of active cells (windows may differ).
    pub fn same_cells(&self, other: &PixelMask) -> bool {
        same_spacing(self.h, other.h)
            && self.active_count == other.active_count
            && self.is_subset_of(other)
    }

    /// Copy with the window shrunk to the active cells.
    pub fn trimmed(&self) -> Result<PixelMask> {
        PixelMask::from_cells(self.h, self.active_cells())
    }

    /// Translation by a lattice vector.
    pub fn shifted(&self, di: i64, dj: i64) -> PixelMask {
        PixelMask {
            ix0: self.ix0 + di,
            iy0: self.iy0 + dj,
            ..self.clone()
        }
    }

    /// Active cells with at least one inactive 4-neighbour.
    pub fn exposed_cells(&self) -> Vec<Cell> {
        self.active_cells()
            .into_iter()
            .filter(|&(i, j)| {
                !(self.is_active((i + 1, j))
                    && self.is_active((i - 1, j))
                    && self.is_active((i, j + 1))
                    && self.is_active((i, j - 1)))
            })
            .collect()
    }

    /// Inactive cells with at least one active 4-neighbour.
    pub fn frontier_cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for j in (self.iy0 - 1)..=(self.iy0 + self.ny as i64) {
            for i in (self.ix0 - 1)..=(self.ix0 + self.nx as i64) {
                if !self.is_active((i, j))
                    && (self.is_active((i + 1, j))
                        || self.is_active((i - 1, j))
                        || self.is_active((i, j + 1))
                        || self.is_active((i, j - 1)))
                {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Largest disc contained in the union of active cells, centred at an
    /// active cell centre. Returns `(center, radius)`.
    pub fn inscribed_disc(&self) -> Result<(Vec2, f64)> {
        if self.is_empty() {
            return Err(Error::EmptyMask);
        }
        let frontier = self.frontier_cells();
        let mut best = (Vec2::ZERO, f64::NEG_INFINITY);
        for c in self.active_cells() {
            let d2 = frontier
                .iter()
                .map(|&(i, j)| ((i - c.0).pow(2) + (j - c.1).pow(2)) as f64)
                .fold(f64::INFINITY, f64::min);
            // every lattice point closer than the nearest inactive one is
            // active, and each point of the disc is within h/sqrt(2) of one
            let r = d2.sqrt() * self.h - self.h / std::f64::consts::SQRT_2;
            if r > best.1 {
                best = (self.center(c), r);
            }
        }
        Ok((best.0, best.1.max(0.0)))
    }
}

pub(crate) fn same_spacing(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Real values on the active cells of a mask, in canonical order.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    mask: Arc<PixelMask>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(mask: Arc<PixelMask>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mask.active_count() {
            return Err(Error::InvalidInput(format!(
                "{} values for {} active cells",
                values.len(),
                mask.active_count()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite value {v}")));
        }
        Ok(GridFunction { mask, values })
    }

    pub fn constant(mask: Arc<PixelMask>, c: f64) -> Self {
        let n = mask.active_count();
        GridFunction {
            mask,
            values: vec![c; n],
        }
    }

    /// Indicator function of the mask.
    pub fn indicator(mask: Arc<PixelMask>) -> Self {
        GridFunction::constant(mask, 1.0)
    }

    pub fn from_fn(mask: Arc<PixelMask>, f: impl Fn(Vec2) -> f64) -> Result<Self> {
        let values = mask.centers().into_iter().map(f).collect();
        GridFunction::new(mask, values)
    }

    pub fn mask(&self) -> &Arc<PixelMask> {
        &self.mask
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at a lattice cell, zero outside the mask.
    pub fn value_at(&self, c: Cell) -> f64 {
        self.mask.index_of(c).map_or(0.0, |k| self.values[k])
    }

    /// Discrete L2 norm, `sqrt(h^2 * sum v^2)`.
    pub fn l2_norm(&self) -> f64 {
        let h = self.mask.h();
        (h * h * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Values sorted ascending.
    pub fn sorted_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Discrete L2 distance between two functions on the same lattice, each
    /// zero-extended outside its mask.
    pub fn l2_distance(&self, other: &GridFunction) -> f64 {
        let h = self.mask.h();
        let theirs = other.lookup();
        let mut acc = 0.0;
        for (c, v) in self.mask.active_cells().into_iter().zip(&self.values) {
            acc += (v - theirs(c)).powi(2);
        }
        for (c, w) in other.mask.active_cells().into_iter().zip(&other.values) {
            if !self.mask.is_active(c) {
                acc += w * w;
            }
        }
        (h * h * acc).sqrt()
    }

    /// Constant-time evaluator for `value_at`.
    pub fn lookup(&self) -> impl Fn(Cell) -> f64 + '_ {
        let map = self.mask.index_map();
        let (ix0, iy0) = self.mask.window_origin();
        let (nx, ny) = self.mask.dims();
        move |(i, j)| {
            if i < ix0 || j < iy0 {
                return 0.0;
            }
            let (di, dj) = ((i - ix0) as usize, (j - iy0) as usize);
            if di >= nx || dj >= ny {
                return 0.0;
            }
            map[dj * nx + di].map_or(0.0, |k| self.values[k])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disc_area_within_two_percent() {
        let m = PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 1.0), 0.05).unwrap();
        assert!((m.area() - PI).abs() / PI < 0.02);
        assert_eq!(m.active_count(), m.active_cells().len());
    }

    #[test]
    fn active_centres_lie_in_shape() {
        let s = Shape::ellipse(Vec2::new(0.13, -0.2), 0.7, 0.3);
        let m = PixelMask::rasterize(&s, 0.03).unwrap();
        assert!(m.centers().into_iter().all(|p| s.contains(p)));
    }

    #[test]
    fn eccentric_annulus_hole_centred_at_offset() {
        let h = 0.01;
        let m = PixelMask::rasterize(&Shape::eccentric_annulus(0.45, 0.1, 0.2), h).unwrap();
        // centroid of the missing cells inside the outer disc
        let outer = PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 0.45), h).unwrap();
        let missing: Vec<Vec2> = outer
            .active_cells()
            .into_iter()
            .filter(|&c| !m.is_active(c))
            .map(|c| outer.center(c))
            .collect();
        let n = missing.len() as f64;
        let cx = missing.iter().map(|p| p.x).sum::<f64>() / n;
        let cy = missing.iter().map(|p| p.y).sum::<f64>() / n;
        assert!((cx - 0.2).abs() < 1e-9 && cy.abs() < 1e-9, "{cx} {cy}");
    }

    #[test]
    fn degenerate_rect_is_rejected() {
        let r = Shape::rect(Vec2::new(0.3, 0.3), Vec2::new(0.3, 0.3));
        assert!(PixelMask::rasterize(&r, 0.1).is_err());
    }

    #[test]
    fn too_coarse_resolution_errors() {
        let err = PixelMask::rasterize(&Shape::disc(Vec2::new(0.05, 0.05), 0.01), 1.0).unwrap_err();
        assert!(matches!(err, Error::ResolutionTooCoarse { .. }));
    }

    #[test]
    fn inscribed_disc_of_disc() {
        let h = 0.05;
        let m = PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 1.0), h).unwrap();
        let (c, r) = m.inscribed_disc().unwrap();
        assert!(c.norm() <= 2.0 * h);
        assert!(r <= 1.0 && r > 1.0 - 2.0 * h, "{r}");
    }

    #[test]
    fn index_map_matches_canonical_order() {
        let m = PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 0.3), 0.1).unwrap();
        for (k, c) in m.active_cells().into_iter().enumerate() {
            assert_eq!(m.index_of(c), Some(k));
        }
    }
}
