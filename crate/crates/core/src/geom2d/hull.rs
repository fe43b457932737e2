use super::mask::{Cell, PixelMask};
use super::Vec2;
use crate::error::{Error, Result};

fn cross(o: Cell, a: Cell, b: Cell) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn dist2(a: Cell, b: Cell) -> i64 {
    (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)
}

/// Convex hull of lattice points (Andrew's monotone chain), counter-clockwise,
/// without collinear points. Exact in integer arithmetic.
pub fn convex_hull(points: &[Cell]) -> Vec<Cell> {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<Cell> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Largest squared distance between hull vertices, by rotating calipers.
fn calipers_max_dist2(hull: &[Cell]) -> i64 {
    let n = hull.len();
    match n {
        0 | 1 => return 0,
        2 => return dist2(hull[0], hull[1]),
        _ => {}
    }
    let mut best = 0;
    let mut j = 1;
    for i in 0..n {
        let ni = (i + 1) % n;
        // advance the antipodal pointer while the triangle area grows
        while cross(hull[i], hull[ni], hull[(j + 1) % n]).abs() > cross(hull[i], hull[ni], hull[j]).abs() {
            j = (j + 1) % n;
        }
        best = best.max(dist2(hull[i], hull[j])).max(dist2(hull[ni], hull[j]));
    }
    best
}

/// Row extremes of the mask: every hull vertex is among them.
fn row_extremes(mask: &PixelMask) -> Vec<Cell> {
    let (ix0, iy0) = mask.window_origin();
    let (nx, ny) = mask.dims();
    let occ = mask.occupancy();
    let mut out = Vec::with_capacity(2 * ny);
    for dj in 0..ny {
        let row = &occ[dj * nx..(dj + 1) * nx];
        if let Some(first) = row.iter().position(|&b| b) {
            let last = row.iter().rposition(|&b| b).unwrap_or(first);
            let j = iy0 + dj as i64;
            out.push((ix0 + first as i64, j));
            if last != first {
                out.push((ix0 + last as i64, j));
            }
        }
    }
    out
}

/// Maximum distance between active cell centres.
pub fn diameter(mask: &PixelMask) -> Result<f64> {
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let hull = convex_hull(&row_extremes(mask));
    Ok((calipers_max_dist2(&hull) as f64).sqrt() * mask.h())
}

/// Convex hull vertices of the active cell centres.
pub fn hull_points(mask: &PixelMask) -> Vec<Vec2> {
    convex_hull(&row_extremes(mask))
        .into_iter()
        .map(|c| mask.center(c))
        .collect()
}

/// Smallest circle enclosing the points, `(center, radius)`.
///
/// Welzl's algorithm in its iterative move-to-front form; the input order is
/// shuffled deterministically.
pub fn min_enclosing_circle(points: &[Vec2]) -> (Vec2, f64) {
    let mut pts = points.to_vec();
    if pts.is_empty() {
        return (Vec2::ZERO, 0.0);
    }
    // deterministic scramble (a fixed LCG) to avoid adversarial orderings
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    for i in (1..pts.len()).rev() {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let j = (state >> 33) as usize % (i + 1);
        pts.swap(i, j);
    }
    let inside = |c: (Vec2, f64), p: Vec2| p.dist(c.0) <= c.1 * (1.0 + 1e-12) + 1e-15;
    let mut c = (pts[0], 0.0);
    for i in 1..pts.len() {
        if inside(c, pts[i]) {
            continue;
        }
        c = (pts[i], 0.0);
        for j in 0..i {
            if inside(c, pts[j]) {
                continue;
            }
            let mid = (pts[i] + pts[j]) * 0.5;
            c = (mid, mid.dist(pts[i]));
            for k in 0..j {
                if !inside(c, pts[k]) {
                    c = circumcircle(pts[i], pts[j], pts[k]);
                }
            }
        }
    }
    c
}

fn circumcircle(a: Vec2, b: Vec2, c: Vec2) -> (Vec2, f64) {
    let bx = b - a;
    let cx = c - a;
    let d = 2.0 * bx.cross(cx);
    if d.abs() < 1e-300 {
        // collinear: widest pair
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs
            .into_iter()
            .max_by(|x, y| x.0.dist(x.1).total_cmp(&y.0.dist(y.1)))
            .unwrap();
        let m = (p + q) * 0.5;
        return (m, m.dist(p));
    }
    let ux = (cx.y * bx.norm_sq() - bx.y * cx.norm_sq()) / d;
    let uy = (bx.x * cx.norm_sq() - cx.x * bx.norm_sq()) / d;
    let center = a + Vec2::new(ux, uy);
    (center, center.dist(a))
}
