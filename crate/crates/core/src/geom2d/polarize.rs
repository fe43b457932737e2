use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::mask::{same_spacing, Cell, GridFunction, PixelMask};
use super::Vec2;
use crate::error::{Error, Result};

/// Unit normals whose reflections permute the lattice `h * Z^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridNormal {
    /// (1, 0)
    PosX,
    /// (-1, 0)
    NegX,
    /// (0, 1)
    PosY,
    /// (0, -1)
    NegY,
    /// (1, 1)/sqrt 2
    PosDiag,
    /// (-1, -1)/sqrt 2
    NegDiag,
    /// (1, -1)/sqrt 2
    PosAnti,
    /// (-1, 1)/sqrt 2
    NegAnti,
}

impl GridNormal {
    pub const ALL: [GridNormal; 8] = [
        GridNormal::PosX,
        GridNormal::NegX,
        GridNormal::PosY,
        GridNormal::NegY,
        GridNormal::PosDiag,
        GridNormal::NegDiag,
        GridNormal::PosAnti,
        GridNormal::NegAnti,
    ];

    pub fn vector(self) -> Vec2 {
        let r = 1.0 / SQRT_2;
        match self {
            GridNormal::PosX => Vec2::new(1.0, 0.0),
            GridNormal::NegX => Vec2::new(-1.0, 0.0),
            GridNormal::PosY => Vec2::new(0.0, 1.0),
            GridNormal::NegY => Vec2::new(0.0, -1.0),
            GridNormal::PosDiag => Vec2::new(r, r),
            GridNormal::NegDiag => Vec2::new(-r, -r),
            GridNormal::PosAnti => Vec2::new(r, -r),
            GridNormal::NegAnti => Vec2::new(-r, r),
        }
    }

    pub fn is_diagonal(self) -> bool {
        !matches!(
            self,
            GridNormal::PosX | GridNormal::NegX | GridNormal::PosY | GridNormal::NegY
        )
    }

    /// Offset quantum: `s = k * quantum(h)`.
    pub fn quantum(self, h: f64) -> f64 {
        if self.is_diagonal() {
            h / SQRT_2
        } else {
            h / 2.0
        }
    }

    /// Integer projection `proj(c)` with `x . a > s  <=>  proj(c) > k`.
    fn project(self, (i, j): Cell) -> i64 {
        match self {
            GridNormal::PosX => 2 * i,
            GridNormal::NegX => -2 * i,
            GridNormal::PosY => 2 * j,
            GridNormal::NegY => -2 * j,
            GridNormal::PosDiag => i + j,
            GridNormal::NegDiag => -(i + j),
            GridNormal::PosAnti => i - j,
            GridNormal::NegAnti => j - i,
        }
    }

    fn reflect(self, k: i64, (i, j): Cell) -> Cell {
        match self {
            GridNormal::PosX => (k - i, j),
            GridNormal::NegX => (-k - i, j),
            GridNormal::PosY => (i, k - j),
            GridNormal::NegY => (i, -k - j),
            GridNormal::PosDiag => (k - j, k - i),
            GridNormal::NegDiag => (-k - j, -k - i),
            GridNormal::PosAnti => (j + k, i - k),
            GridNormal::NegAnti => (j - k, i + k),
        }
    }
}

/// Exact lattice data of a grid-compatible polarizer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridReflection {
    pub normal: GridNormal,
    /// Offset in units of [`GridNormal::quantum`].
    pub k: i64,
    pub h: f64,
}

impl GridReflection {
    /// Strictly inside the open half-plane H.
    pub fn in_h(&self, c: Cell) -> bool {
        self.normal.project(c) > self.k
    }

    /// On the reflecting line.
    pub fn on_boundary(&self, c: Cell) -> bool {
        self.normal.project(c) == self.k
    }

    pub fn reflect(&self, c: Cell) -> Cell {
        self.normal.reflect(self.k, c)
    }
}

/// The half-plane `H = {x : x . a > s}` together with its reflection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polarizer {
    a: Vec2,
    s: f64,
    grid: Option<GridReflection>,
}

impl Polarizer {
    /// Arbitrary half-plane; `a` is normalized.
    pub fn new(a: Vec2, s: f64) -> Result<Self> {
        let n = a.norm();
        if !(n.is_finite() && n > 0.0 && s.is_finite()) {
            return Err(Error::InvalidInput(format!("bad polarizer normal {a:?} / offset {s}")));
        }
        Ok(Polarizer {
            a: a * (1.0 / n),
            s,
            grid: None,
        })
    }

    /// Grid-compatible half-plane with `s = k * normal.quantum(h)`.
    pub fn grid(normal: GridNormal, k: i64, h: f64) -> Self {
        Polarizer {
            a: normal.vector(),
            s: k as f64 * normal.quantum(h),
            grid: Some(GridReflection { normal, k, h }),
        }
    }

    /// Grid-compatible version of `(a, s)` when one exists for spacing `h`.
    pub fn snap(a: Vec2, s: f64, h: f64) -> Option<Self> {
        let a = a.normalized();
        for normal in GridNormal::ALL {
            if (normal.vector() - a).norm() < 1e-12 {
                let q = s / normal.quantum(h);
                let k = q.round();
                if (q - k).abs() < 1e-9 {
                    return Some(Polarizer::grid(normal, k as i64, h));
                }
            }
        }
        None
    }

    pub fn normal(&self) -> Vec2 {
        self.a
    }

    pub fn offset(&self) -> f64 {
        self.s
    }

    pub fn grid_reflection(&self) -> Option<&GridReflection> {
        self.grid.as_ref()
    }

    pub fn is_grid_compatible(&self) -> bool {
        self.grid.is_some()
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.dot(self.a) > self.s
    }

    /// Lattice data, checked against the mask spacing.
    pub fn require_grid(&self, h: f64) -> Result<&GridReflection> {
        match &self.grid {
            Some(g) if same_spacing(g.h, h) => Ok(g),
            _ => Err(Error::NotGridCompatible { h }),
        }
    }
}

/// Reflection across the boundary line of `H`: `p + 2 (s - p.a) a`.
pub fn reflect(p: Vec2, pol: &Polarizer) -> Vec2 {
    p + pol.a * (2.0 * (pol.s - p.dot(pol.a)))
}

/// Polarization of a set: `[(Ω ∪ σΩ) ∩ H] ∪ [Ω ∩ σΩ]`, applied cellwise.
pub fn polarize_set(mask: &PixelMask, pol: &Polarizer) -> Result<PixelMask> {
    let g = pol.require_grid(mask.h())?;
    let mut cells = Vec::with_capacity(mask.active_count());
    for c in mask.active_cells() {
        let r = g.reflect(c);
        let r_active = mask.is_active(r);
        if g.on_boundary(c) {
            cells.push(c);
        } else if g.in_h(c) {
            // c stays; its mirror stays only if both are present
            cells.push(c);
            if r_active {
                cells.push(r);
            }
        } else if !r_active {
            // lone cell outside H moves to its mirror inside H
            cells.push(r);
        }
    }
    PixelMask::from_cells(mask.h(), cells)
}

/// Polarization of a function: larger of `u(x)`, `u(σx)` on the H side.
///
/// Values travel with their cells, so the multiset of values is preserved.
/// For non-negative `u` this coincides with polarizing the zero extension.
pub fn polarize_fn(u: &GridFunction, pol: &Polarizer) -> Result<GridFunction> {
    let mask = u.mask();
    let g = pol.require_grid(mask.h())?;
    let lookup: HashMap<Cell, f64> = mask
        .active_cells()
        .into_iter()
        .zip(u.values().iter().copied())
        .collect();
    let mut out: HashMap<Cell, f64> = HashMap::with_capacity(lookup.len());
    for (&c, &v) in &lookup {
        let r = g.reflect(c);
        if g.on_boundary(c) {
            out.insert(c, v);
        } else if g.in_h(c) {
            match lookup.get(&r) {
                Some(&w) => {
                    out.insert(c, v.max(w));
                    out.insert(r, v.min(w));
                }
                None => {
                    out.insert(c, v);
                }
            }
        } else if !lookup.contains_key(&r) {
            out.insert(r, v);
        }
    }
    let new_mask = Arc::new(PixelMask::from_cells(mask.h(), out.keys().copied())?);
    let values = new_mask.active_cells().into_iter().map(|c| out[&c]).collect();
    GridFunction::new(new_mask, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom2d::{diameter, Shape};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn reflect_examples() {
        let pol = Polarizer::new(Vec2::new(1.0, 0.0), 1.0).unwrap();
        assert_eq!(reflect(Vec2::new(2.0, 0.0), &pol), Vec2::new(0.0, 0.0));
        let on = Vec2::new(1.0, 3.7);
        assert_eq!(reflect(on, &pol), on);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let diag = Polarizer::new(Vec2::new(1.0, -2.0), 0.3).unwrap();
        for _ in 0..100 {
            let p = Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let back = reflect(reflect(p, &diag), &diag);
            assert!((back - p).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_reflection_matches_formula() {
        let h = 0.1;
        for normal in GridNormal::ALL {
            for k in -3..=3 {
                let pol = Polarizer::grid(normal, k, h);
                let g = *pol.grid_reflection().unwrap();
                for c in [(0, 0), (2, -1), (-4, 5)] {
                    let p = Vec2::new(c.0 as f64 * h, c.1 as f64 * h);
                    let r = g.reflect(c);
                    let q = reflect(p, &pol);
                    assert!((Vec2::new(r.0 as f64 * h, r.1 as f64 * h) - q).norm() < 1e-12);
                    assert_eq!(g.in_h(c), pol.contains(p) && !g.on_boundary(c));
                }
            }
        }
    }

    #[test]
    fn disjoint_set_is_reflected() {
        let h = 0.05;
        let m = PixelMask::rasterize(&Shape::disc(Vec2::new(1.0, 0.0), 0.4), h).unwrap();
        let pol = Polarizer::grid(GridNormal::NegX, 0, h);
        let p = polarize_set(&m, &pol).unwrap();
        let expect = PixelMask::rasterize(&Shape::disc(Vec2::new(-1.0, 0.0), 0.4), h).unwrap();
        assert!(p.same_cells(&expect));
    }

    #[test]
    fn symmetric_set_is_fixed() {
        let h = 0.05;
        let m = PixelMask::rasterize(&Shape::ellipse(Vec2::ZERO, 0.6, 0.3), h).unwrap();
        let p = polarize_set(&m, &Polarizer::grid(GridNormal::PosY, 0, h)).unwrap();
        assert!(p.same_cells(&m));
    }

    #[test]
    fn count_preserved_and_idempotent() {
        let h = 0.04;
        let m = PixelMask::rasterize(
            &Shape::Ellipse {
                center: Vec2::new(0.1, 0.05),
                semi_a: 0.5,
                semi_b: 0.2,
                angle: 0.4,
            },
            h,
        )
        .unwrap();
        for normal in GridNormal::ALL {
            for k in [-3, 0, 2, 5] {
                let pol = Polarizer::grid(normal, k, h);
                let p = polarize_set(&m, &pol).unwrap();
                assert_eq!(p.active_count(), m.active_count());
                let pp = polarize_set(&p, &pol).unwrap();
                assert!(pp.same_cells(&p));
                assert!(diameter(&p).unwrap() <= diameter(&m).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn non_grid_polarizer_rejected() {
        let m = PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 0.3), 0.1).unwrap();
        let pol = Polarizer::new(Vec2::new(1.0, 0.3), 0.0).unwrap();
        assert!(matches!(polarize_set(&m, &pol), Err(Error::NotGridCompatible { .. })));
        let u = GridFunction::indicator(Arc::new(m));
        assert!(polarize_fn(&u, &pol).is_err());
        // right normal, wrong spacing
        let other = Polarizer::grid(GridNormal::PosX, 1, 0.05);
        assert!(polarize_set(u.mask(), &other).is_err());
    }

    #[test]
    fn indicator_maps_to_indicator_of_polarized_set() {
        let h = 0.05;
        let m = PixelMask::rasterize(&Shape::disc(Vec2::new(0.3, 0.1), 0.35), h).unwrap();
        let pol = Polarizer::grid(GridNormal::NegDiag, 1, h);
        let u = GridFunction::indicator(Arc::new(m.clone()));
        let pu = polarize_fn(&u, &pol).unwrap();
        assert!(pu.mask().same_cells(&polarize_set(&m, &pol).unwrap()));
        assert!(pu.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn symmetric_function_unchanged() {
        let h = 0.05;
        let m = Arc::new(PixelMask::rasterize(&Shape::disc(Vec2::ZERO, 0.5), h).unwrap());
        let u = GridFunction::from_fn(m, |p| (1.0 + p.y * p.y) * (2.0 - p.x.abs())).unwrap();
        let pol = Polarizer::grid(GridNormal::NegX, 0, h);
        let pu = polarize_fn(&u, &pol).unwrap();
        assert_eq!(pu, u);
    }
}
