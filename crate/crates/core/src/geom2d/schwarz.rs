use std::sync::Arc;

use super::mask::{Cell, GridFunction, PixelMask};
use crate::error::{Error, Result};

/// The `n` lattice cells nearest the origin, ties broken by (row, col).
fn nearest_cells(n: usize) -> Vec<Cell> {
    let r = ((n as f64 / std::f64::consts::PI).sqrt()).ceil() as i64 + 3;
    let mut cells: Vec<Cell> = Vec::with_capacity(((2 * r + 1) * (2 * r + 1)) as usize);
    for j in -r..=r {
        for i in -r..=r {
            cells.push((i, j));
        }
    }
    cells.sort_by_key(|&(i, j)| (i * i + j * j, j, i));
    cells.truncate(n);
    cells
}

/// Discrete Schwarz symmetrization of a set: the same number of cells,
/// packed by distance to the origin.
pub fn schwarz_set(mask: &PixelMask) -> Result<PixelMask> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    PixelMask::from_cells(mask.h(), nearest_cells(mask.active_count()))
}

/// Discrete Schwarz symmetrization of a non-negative function: values sorted
/// descending are laid out on cells sorted by distance to the origin.
pub fn schwarz_fn(u: &GridFunction) -> Result<GridFunction> {
    let min = u.min();
    if min < 0.0 {
        return Err(Error::NegativeValues { min });
    }
    let order = nearest_cells(u.values().len());
    let mask = Arc::new(PixelMask::from_cells(u.mask().h(), order.iter().copied())?);
    let mut vals = u.values().to_vec();
    vals.sort_by(|a, b| b.total_cmp(a));
    let idx = mask.index_map();
    let (ix0, iy0) = mask.window_origin();
    let (nx, _) = mask.dims();
    let mut out = vec![0.0; vals.len()];
    for (c, v) in order.into_iter().zip(vals) {
        let flat = (c.1 - iy0) as usize * nx + (c.0 - ix0) as usize;
        out[idx[flat].expect("cell of the symmetrized mask")] = v;
    }
    GridFunction::new(mask, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{Shape, Vec2};

    #[test]
    fn recentred_disc_keeps_count() {
        let h = 0.05;
        let m = PixelMask::rasterize(&Shape::disc(Vec2::new(0.7, -0.3), 0.4), h).unwrap();
        let s = schwarz_set(&m).unwrap();
        assert_eq!(s.active_count(), m.active_count());
        // centred: centroid at the origin within a cell
        let c = s.centers();
        let n = c.len() as f64;
        let cx: f64 = c.iter().map(|p| p.x).sum::<f64>() / n;
        let cy: f64 = c.iter().map(|p| p.y).sum::<f64>() / n;
        assert!(cx.abs() < h && cy.abs() < h);
    }

    #[test]
    fn annulus_becomes_equal_area_disc() {
        let h = 0.02;
        let m = PixelMask::rasterize(&Shape::annulus(Vec2::ZERO, 1.0, 0.5), h).unwrap();
        let s = schwarz_set(&m).unwrap();
        let rmax = s.centers().iter().map(|p| p.norm()).fold(0.0, f64::max);
        assert!((rmax - 0.75f64.sqrt()).abs() < 2.0 * h, "{rmax}");
    }

    #[test]
    fn single_cell_goes_to_origin() {
        let m = PixelMask::from_cells(0.1, [(5, -2)]).unwrap();
        let s = schwarz_set(&m).unwrap();
        assert_eq!(s.active_cells(), vec![(0, 0)]);
    }

    #[test]
    fn tie_break_is_row_major() {
        let m = PixelMask::from_cells(1.0, (0..2).map(|k| (k, 7))).unwrap();
        // second-nearest cells at distance 1: (0,-1) has the lowest row
        assert_eq!(schwarz_set(&m).unwrap().active_cells(), vec![(0, -1), (0, 0)]);
    }

    #[test]
    fn schwarz_fn_properties() {
        let h = 0.05;
        let m = Arc::new(PixelMask::rasterize(&Shape::ellipse(Vec2::new(0.2, 0.0), 0.5, 0.2), h).unwrap());
        let c = GridFunction::constant(m.clone(), 2.5);
        let sc = schwarz_fn(&c).unwrap();
        assert!(sc.values().iter().all(|&v| v == 2.5));
        assert!(sc.mask().same_cells(&schwarz_set(&m).unwrap()));

        let u = GridFunction::from_fn(m.clone(), |p| (p.x * 3.0).sin().abs() + p.y * p.y).unwrap();
        let su = schwarz_fn(&u).unwrap();
        assert_eq!(su.sorted_values(), u.sorted_values());

        let neg = GridFunction::from_fn(m, |p| p.x).unwrap();
        assert!(matches!(schwarz_fn(&neg), Err(Error::NegativeValues { .. })));
    }

    #[test]
    fn radial_decreasing_function_is_fixed() {
        let h = 0.05;
        let m = Arc::new(PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 0.6), h).unwrap());
        // strictly decreasing in |x|, with exact ties only at equal distance
        let u = GridFunction::from_fn(m, |p| 1.0 - p.norm_sq()).unwrap();
        let su = schwarz_fn(&u).unwrap();
        for (a, b) in su.values().iter().zip(u.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
