use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::kernel::KernelSpec;
use super::operator::{cell_cap, check_cap, offset_table, LinearOperator};
use crate::error::Result;
use crate::geom2d::PixelMask;

/// Smallest 2^a 3^b 5^c not below `n`.
fn fft_size(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut k = m;
        for p in [2, 3, 5] {
            while k % p == 0 {
                k /= p;
            }
        }
        if k == 1 {
            return m;
        }
        m += 1;
    }
}

/// Matrix-free Nyström operator. The kernel depends only on the lattice
/// offset, so the product is a 2-D Toeplitz convolution evaluated through a
/// circulant embedding and FFTs. Entries agree with [`super::assemble`].
pub struct LatticeOperator {
    mask: Arc<PixelMask>,
    kernel: KernelSpec,
    /// Flat window index of each active cell.
    slots: Vec<usize>,
    nx: usize,
    mx: usize,
    my: usize,
    /// Kernel spectrum in transposed (column-major) layout, scaled by 1/(mx my).
    spectrum: Vec<Complex64>,
    row_fft: Arc<dyn Fft<f64>>,
    row_ifft: Arc<dyn Fft<f64>>,
    col_fft: Arc<dyn Fft<f64>>,
    col_ifft: Arc<dyn Fft<f64>>,
    bound: f64,
}

impl LatticeOperator {
    pub fn new(mask: &Arc<PixelMask>, kernel: &KernelSpec) -> Result<Self> {
        Self::with_cap(mask, kernel, cell_cap())
    }

    pub fn with_cap(mask: &Arc<PixelMask>, kernel: &KernelSpec, cap: usize) -> Result<Self> {
        kernel.validate()?;
        check_cap(mask, cap)?;
        let (nx, ny) = mask.dims();
        let mx = fft_size(2 * nx - 1);
        let my = fft_size(2 * ny - 1);
        let table = offset_table(kernel, mask.h(), nx, ny);
        let mut planner = FftPlanner::new();
        let row_fft = planner.plan_fft_forward(mx);
        let row_ifft = planner.plan_fft_inverse(mx);
        let col_fft = planner.plan_fft_forward(my);
        let col_ifft = planner.plan_fft_inverse(my);

        // circulant first column: offsets wrap modulo (mx, my)
        let mut c = vec![Complex64::new(0.0, 0.0); mx * my];
        for dj in 0..ny {
            for di in 0..nx {
                let v = Complex64::new(table[dj * nx + di], 0.0);
                let xs = if di == 0 { vec![0] } else { vec![di, mx - di] };
                let ys = if dj == 0 { vec![0] } else { vec![dj, my - dj] };
                for &y in &ys {
                    for &x in &xs {
                        c[y * mx + x] = v;
                    }
                }
            }
        }
        let slots: Vec<usize> = mask
            .occupancy()
            .iter()
            .enumerate()
            .filter_map(|(k, &b)| b.then_some(k))
            .collect();
        let mut op = LatticeOperator {
            mask: mask.clone(),
            kernel: *kernel,
            slots,
            nx,
            mx,
            my,
            spectrum: Vec::new(),
            row_fft,
            row_ifft,
            col_fft,
            col_ifft,
            bound: 0.0,
        };
        let mut spec = op.forward(c);
        let scale = 1.0 / (mx * my) as f64;
        spec.iter_mut().for_each(|z| *z *= scale);
        op.spectrum = spec;

        // max absolute row sum, by convolving |K| with the indicator
        let mut abs_c = vec![Complex64::new(0.0, 0.0); mx * my];
        for dj in 0..ny {
            for di in 0..nx {
                let v = Complex64::new(table[dj * nx + di].abs(), 0.0);
                for &y in &(if dj == 0 { vec![0] } else { vec![dj, my - dj] }) {
                    for &x in &(if di == 0 { vec![0] } else { vec![di, mx - di] }) {
                        abs_c[y * mx + x] = v;
                    }
                }
            }
        }
        let abs_spec: Vec<Complex64> = op.forward(abs_c).into_iter().map(|z| z * scale).collect();
        let ones = vec![1.0; op.slots.len()];
        let mut sums = vec![0.0; op.slots.len()];
        op.convolve(&abs_spec, &ones, &mut sums);
        op.bound = sums.iter().copied().fold(0.0, f64::max);
        Ok(op)
    }

    /// 2-D forward FFT of a row-major `my x mx` grid; output transposed
    /// (`mx x my`, column index fastest).
    fn forward(&self, mut grid: Vec<Complex64>) -> Vec<Complex64> {
        let (mx, my) = (self.mx, self.my);
        grid.par_chunks_mut(mx).for_each(|row| self.row_fft.process(row));
        let mut t = transpose(&grid, my, mx);
        t.par_chunks_mut(my).for_each(|col| self.col_fft.process(col));
        t
    }

    fn inverse(&self, mut t: Vec<Complex64>) -> Vec<Complex64> {
        let (mx, my) = (self.mx, self.my);
        t.par_chunks_mut(my).for_each(|col| self.col_ifft.process(col));
        let mut grid = transpose(&t, mx, my);
        grid.par_chunks_mut(mx).for_each(|row| self.row_ifft.process(row));
        grid
    }

    fn convolve(&self, spec: &[Complex64], x: &[f64], y: &mut [f64]) {
        let (nx, mx, my) = (self.nx, self.mx, self.my);
        let mut grid = vec![Complex64::new(0.0, 0.0); mx * my];
        for (&s, &v) in self.slots.iter().zip(x) {
            grid[(s / nx) * mx + s % nx] = Complex64::new(v, 0.0);
        }
        let mut f = self.forward(grid);
        f.par_iter_mut().zip(spec.par_iter()).for_each(|(a, b)| *a *= b);
        let g = self.inverse(f);
        for (&s, out) in self.slots.iter().zip(y.iter_mut()) {
            *out = g[(s / nx) * mx + s % nx].re;
        }
    }
}

fn transpose(a: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); rows * cols];
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    out[c * rows + r] = a[r * cols + c];
                }
            }
        }
    }
    out
}

impl LinearOperator for LatticeOperator {
    fn dim(&self) -> usize {
        self.slots.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.convolve(&self.spectrum, x, y);
    }

    fn mask(&self) -> &Arc<PixelMask> {
        &self.mask
    }

    fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    fn norm_bound(&self) -> f64 {
        self.bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{Shape, Vec2};
    use crate::solver::assemble;

    #[test]
    fn sizes_are_smooth() {
        assert_eq!(fft_size(7), 8);
        assert_eq!(fft_size(97), 100);
        assert_eq!(fft_size(1), 1);
    }

    #[test]
    fn matches_dense_product() {
        let shapes = [
            Shape::eccentric_annulus(0.45, 0.1, 0.2),
            Shape::ellipse(Vec2::new(0.3, -0.1), 0.5, 0.15),
            Shape::rect(Vec2::new(0.0, 0.0), Vec2::new(0.05, 0.6)),
        ];
        for s in &shapes {
            let m = Arc::new(PixelMask::rasterize(s, 0.03).unwrap());
            for k in [KernelSpec::log(), KernelSpec::riesz(1.0).unwrap()] {
                let a = assemble(&m, &k).unwrap();
                let l = LatticeOperator::new(&m, &k).unwrap();
                let n = a.n();
                let x: Vec<f64> = (0..n).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
                let (mut y1, mut y2) = (vec![0.0; n], vec![0.0; n]);
                a.apply(&x, &mut y1);
                l.apply(&x, &mut y2);
                let scale = y1.iter().map(|v| v.abs()).fold(0.0, f64::max);
                for (p, q) in y1.iter().zip(&y2) {
                    assert!((p - q).abs() < 1e-12 * scale, "{p} vs {q}");
                }
                assert!((a.norm_bound() - l.norm_bound()).abs() < 1e-12 * a.norm_bound());
            }
        }
    }
}
