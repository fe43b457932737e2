use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use super::kernel::KernelSpec;
use crate::error::{Error, Result};
use crate::geom2d::{Cell, PixelMask};

pub const DEFAULT_MAX_CELLS: usize = 20_000;
pub const MAX_CELLS_ENV: &str = "LOGPOT_MAX_CELLS";

/// Active-cell cap for operator construction: `LOGPOT_MAX_CELLS` if set and
/// valid, else 20000.
pub fn cell_cap() -> usize {
    std::env::var(MAX_CELLS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_CELLS)
}

pub(crate) fn check_cap(mask: &PixelMask, cap: usize) -> Result<()> {
    let cells = mask.active_count();
    if cells == 0 {
        return Err(Error::EmptyMask);
    }
    if cells > cap {
        return Err(Error::CapExceeded {
            cells,
            cap,
            suggested_h: mask.h() * (cells as f64 / cap as f64).sqrt() * 1.01,
        });
    }
    Ok(())
}

/// Symmetric operator on the active cells of a mask.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn mask(&self) -> &Arc<PixelMask>;
    fn kernel(&self) -> &KernelSpec;

    /// Upper bound on the spectral radius (max absolute row sum).
    fn norm_bound(&self) -> f64;
}

/// Kernel entries by absolute lattice offset, `table[|dj| * nx + |di|]`.
pub(crate) fn offset_table(kernel: &KernelSpec, h: f64, nx: usize, ny: usize) -> Vec<f64> {
    let mut t = vec![0.0; nx * ny];
    t.par_chunks_mut(nx).enumerate().for_each(|(dj, row)| {
        for (di, v) in row.iter_mut().enumerate() {
            *v = kernel.entry(h, di as i64, dj as i64);
        }
    });
    t
}

/// Dense Nyström matrix `A_ij = prefactor * h^2 * K(|x_i - x_j|)`, diagonal
/// from the equal-area disc rule. Rows follow the mask's canonical cell order.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    mask: Arc<PixelMask>,
    kernel: KernelSpec,
    n: usize,
    data: Vec<f64>,
}

/// Assemble the dense operator matrix, subject to [`cell_cap`].
pub fn assemble(mask: &Arc<PixelMask>, kernel: &KernelSpec) -> Result<OperatorMatrix> {
    assemble_with_cap(mask, kernel, cell_cap())
}

pub fn assemble_with_cap(mask: &Arc<PixelMask>, kernel: &KernelSpec, cap: usize) -> Result<OperatorMatrix> {
    kernel.validate()?;
    check_cap(mask, cap)?;
    let (nx, ny) = mask.dims();
    let table = offset_table(kernel, mask.h(), nx, ny);
    let cells: Vec<Cell> = mask.active_cells();
    let n = cells.len();
    let mut data = vec![0.0; n * n];
    data.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        let (xi, yi) = cells[i];
        for (j, v) in row.iter_mut().enumerate() {
            let (xj, yj) = cells[j];
            let di = (xi - xj).unsigned_abs() as usize;
            let dj = (yi - yj).unsigned_abs() as usize;
            *v = table[dj * nx + di];
        }
    });
    Ok(OperatorMatrix {
        mask: mask.clone(),
        kernel: *kernel,
        n,
        data,
    })
}

impl OperatorMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.mask.h()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Row-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// Binary dump: magic `LPMATRIX`, `n` as u64, `h` as f64, then `n * n`
    /// row-major f64 entries; all little-endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"LPMATRIX")?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.h().to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.n * 8);
        for i in 0..self.n {
            buf.clear();
            for v in self.row(i) {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }
}

impl LinearOperator for OperatorMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let row = &self.data[i * n..(i + 1) * n];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        });
    }

    fn mask(&self) -> &Arc<PixelMask> {
        &self.mask
    }

    fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    fn norm_bound(&self) -> f64 {
        (0..self.n)
            .into_par_iter()
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .reduce(|| 0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{Shape, Vec2};
    use std::f64::consts::PI;

    #[test]
    fn two_cell_matrix() {
        let h = 0.1;
        let m = Arc::new(PixelMask::from_cells(h, [(0, 0), (1, 0)]).unwrap());
        let a = assemble(&m, &KernelSpec::log()).unwrap();
        let off = h * h / (2.0 * PI) * (1.0 / h).ln();
        assert!((a.get(0, 1) - off).abs() < 1e-16);
        assert_eq!(a.get(0, 1), a.get(1, 0));
        let rho = h / PI.sqrt();
        let diag = PI * rho * rho * ((1.0 / rho).ln() + 0.5) / (2.0 * PI);
        assert!((a.get(0, 0) - diag).abs() < 1e-16);
    }

    #[test]
    fn symmetric_and_matches_direct_formula() {
        let m = Arc::new(PixelMask::rasterize(&Shape::ellipse(Vec2::new(0.05, 0.0), 0.4, 0.25), 0.05).unwrap());
        for k in [KernelSpec::log(), KernelSpec::riesz(0.7).unwrap()] {
            let a = assemble(&m, &k).unwrap();
            assert!(a.is_symmetric());
            let c = m.centers();
            for (i, j) in [(0, 5), (3, 17), (10, 2)] {
                let want = m.h() * m.h() * k.eval(c[i].dist(c[j]));
                assert!((a.get(i, j) - want).abs() < 1e-15 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let m = Arc::new(PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 1.0), 0.1).unwrap());
        let err = assemble_with_cap(&m, &KernelSpec::log(), 100).unwrap_err();
        match err {
            Error::CapExceeded { suggested_h, cells, .. } => {
                assert_eq!(cells, m.active_count());
                assert!(suggested_h > 0.1);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn binary_dump_layout() {
        let m = Arc::new(PixelMask::from_cells(0.2, [(0, 0), (2, 1), (1, 1)]).unwrap());
        let a = assemble(&m, &KernelSpec::log()).unwrap();
        let mut buf = Vec::new();
        a.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"LPMATRIX");
        assert_eq!(buf.len(), 24 + 9 * 8);
        let v = f64::from_le_bytes(buf[24 + 8..24 + 16].try_into().unwrap());
        assert_eq!(v, a.get(0, 1));
    }
}
