use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Vec2;
use crate::error::{Error, Result};

/// A bounded planar region, described analytically.
///
/// Membership tests treat every shape as an open set; `contains_closed`
/// gives the closure. The JSON form is tagged by `kind`, e.g.
/// `{"kind": "disc", "center": [0, 0], "radius": 1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Disc {
        center: Vec2,
        radius: f64,
    },
    Annulus {
        center: Vec2,
        outer: f64,
        inner: f64,
    },
    /// `B_outer(0)` minus the closed disc of radius `inner` centred at `(offset, 0)`.
    EccentricAnnulus {
        outer: f64,
        inner: f64,
        offset: f64,
    },
    Ellipse {
        center: Vec2,
        semi_a: f64,
        semi_b: f64,
        /// Rotation of the `semi_a` axis from the x-axis, radians.
        #[serde(default)]
        angle: f64,
    },
    Rect {
        lo: Vec2,
        hi: Vec2,
    },
    Polygon {
        vertices: Vec<Vec2>,
    },
    Union {
        shapes: Vec<Shape>,
    },
    /// `outer` with the closure of `obstacle` removed.
    Difference {
        outer: Box<Shape>,
        obstacle: Box<Shape>,
    },
}

/// A boundary sample: position and the arc length it represents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryNode {
    pub p: Vec2,
    pub len: f64,
}

impl Shape {
    pub fn disc(center: Vec2, radius: f64) -> Shape {
        Shape::Disc { center, radius }
    }

    pub fn annulus(center: Vec2, outer: f64, inner: f64) -> Shape {
        Shape::Annulus {
            center,
            outer,
            inner,
        }
    }

    pub fn eccentric_annulus(outer: f64, inner: f64, offset: f64) -> Shape {
        Shape::EccentricAnnulus {
            outer,
            inner,
            offset,
        }
    }

    pub fn ellipse(center: Vec2, semi_a: f64, semi_b: f64) -> Shape {
        Shape::Ellipse {
            center,
            semi_a,
            semi_b,
            angle: 0.0,
        }
    }

    pub fn rect(lo: Vec2, hi: Vec2) -> Shape {
        Shape::Rect { lo, hi }
    }

    /// Axis-aligned square of the given side centred at `center`.
    pub fn square(center: Vec2, side: f64) -> Shape {
        let d = Vec2::new(side / 2.0, side / 2.0);
        Shape::Rect {
            lo: center - d,
            hi: center + d,
        }
    }

    /// Square rotated by 45 degrees: `|x - cx| + |y - cy| < half_diagonal`.
    pub fn diamond(center: Vec2, half_diagonal: f64) -> Shape {
        let r = half_diagonal;
        Shape::Polygon {
            vertices: vec![
                center + Vec2::new(r, 0.0),
                center + Vec2::new(0.0, r),
                center + Vec2::new(-r, 0.0),
                center + Vec2::new(0.0, -r),
            ],
        }
    }

    pub fn polygon(vertices: Vec<Vec2>) -> Shape {
        Shape::Polygon { vertices }
    }

    pub fn union(shapes: Vec<Shape>) -> Shape {
        Shape::Union { shapes }
    }

    pub fn difference(outer: Shape, obstacle: Shape) -> Shape {
        Shape::Difference {
            outer: Box::new(outer),
            obstacle: Box::new(obstacle),
        }
    }

    /// Check the structural invariants of the shape.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidShape(msg));
        match self {
            Shape::Disc { center, radius } => {
                if !center.is_finite() || !(radius.is_finite() && *radius > 0.0) {
                    return bad(format!("disc radius must be positive and finite, got {radius}"));
                }
            }
            Shape::Annulus {
                center,
                outer,
                inner,
            } => {
                if !center.is_finite() || !(*inner > 0.0 && inner < outer && outer.is_finite()) {
                    return bad(format!("annulus needs 0 < inner < outer, got {inner}, {outer}"));
                }
            }
            Shape::EccentricAnnulus {
                outer,
                inner,
                offset,
            } => {
                if !(*inner > 0.0 && inner < outer && outer.is_finite()) {
                    return bad(format!("eccentric annulus needs 0 < r < R, got r={inner}, R={outer}"));
                }
                if !(*offset >= 0.0 && offset + inner < *outer) {
                    return bad(format!(
                        "eccentric annulus needs 0 <= t < R - r, got t={offset}, R-r={}",
                        outer - inner
                    ));
                }
            }
            Shape::Ellipse {
                center,
                semi_a,
                semi_b,
                angle,
            } => {
                if !center.is_finite()
                    || !angle.is_finite()
                    || !(*semi_a > 0.0 && *semi_b > 0.0 && semi_a.is_finite() && semi_b.is_finite())
                {
                    return bad(format!("ellipse semi-axes must be positive, got {semi_a}, {semi_b}"));
                }
            }
            Shape::Rect { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() || !(lo.x < hi.x && lo.y < hi.y) {
                    return bad(format!(
                        "degenerate rectangle [{}, {}] x [{}, {}]",
                        lo.x, hi.x, lo.y, hi.y
                    ));
                }
            }
            Shape::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return bad("polygon needs at least 3 vertices".into());
                }
                if vertices.iter().any(|v| !v.is_finite()) {
                    return bad("polygon vertex is not finite".into());
                }
                if polygon_signed_area(vertices).abs() <= 0.0 {
                    return bad("polygon has zero area".into());
                }
                if !polygon_is_simple(vertices) {
                    return bad("polygon is not simple".into());
                }
            }
            Shape::Union { shapes } => {
                if shapes.is_empty() {
                    return bad("empty union".into());
                }
                for s in shapes {
                    s.validate()?;
                }
            }
            Shape::Difference { outer, obstacle } => {
                outer.validate()?;
                obstacle.validate()?;
                let (lo, hi) = obstacle.bbox();
                if !(hi.x > lo.x && hi.y > lo.y) {
                    return bad("obstacle has zero area".into());
                }
            }
        }
        Ok(())
    }

    /// Membership in the open set.
    pub fn contains(&self, p: Vec2) -> bool {
        match self {
            Shape::Disc { center, radius } => (p - *center).norm_sq() < radius * radius,
            Shape::Annulus {
                center,
                outer,
                inner,
            } => {
                let d2 = (p - *center).norm_sq();
                d2 < outer * outer && d2 > inner * inner
            }
            Shape::EccentricAnnulus {
                outer,
                inner,
                offset,
            } => {
                p.norm_sq() < outer * outer
                    && (p - Vec2::new(*offset, 0.0)).norm_sq() > inner * inner
            }
            Shape::Ellipse {
                center,
                semi_a,
                semi_b,
                angle,
            } => {
                let q = (p - *center).rotated(-angle);
                (q.x / semi_a).powi(2) + (q.y / semi_b).powi(2) < 1.0
            }
            Shape::Rect { lo, hi } => p.x > lo.x && p.x < hi.x && p.y > lo.y && p.y < hi.y,
            Shape::Polygon { vertices } => {
                point_in_polygon(vertices, p) && polygon_boundary_dist(vertices, p) > 0.0
            }
            Shape::Union { shapes } => shapes.iter().any(|s| s.contains(p)),
            Shape::Difference { outer, obstacle } => {
                outer.contains(p) && !obstacle.contains_closed(p)
            }
        }
    }

    /// Membership in the closure.
    pub fn contains_closed(&self, p: Vec2) -> bool {
        match self {
            Shape::Disc { center, radius } => (p - *center).norm_sq() <= radius * radius,
            Shape::Annulus {
                center,
                outer,
                inner,
            } => {
                let d2 = (p - *center).norm_sq();
                d2 <= outer * outer && d2 >= inner * inner
            }
            Shape::EccentricAnnulus {
                outer,
                inner,
                offset,
            } => {
                p.norm_sq() <= outer * outer
                    && (p - Vec2::new(*offset, 0.0)).norm_sq() >= inner * inner
            }
            Shape::Ellipse {
                center,
                semi_a,
                semi_b,
                angle,
            } => {
                let q = (p - *center).rotated(-angle);
                (q.x / semi_a).powi(2) + (q.y / semi_b).powi(2) <= 1.0
            }
            Shape::Rect { lo, hi } => p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y,
            Shape::Polygon { vertices } => {
                point_in_polygon(vertices, p) || polygon_boundary_dist(vertices, p) == 0.0
            }
            Shape::Union { shapes } => shapes.iter().any(|s| s.contains_closed(p)),
            Shape::Difference { outer, obstacle } => {
                outer.contains_closed(p) && !obstacle.contains(p)
            }
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bbox(&self) -> (Vec2, Vec2) {
        match self {
            Shape::Disc { center, radius } => {
                let d = Vec2::new(*radius, *radius);
                (*center - d, *center + d)
            }
            Shape::Annulus { center, outer, .. } => {
                let d = Vec2::new(*outer, *outer);
                (*center - d, *center + d)
            }
            Shape::EccentricAnnulus { outer, .. } => {
                (Vec2::new(-outer, -outer), Vec2::new(*outer, *outer))
            }
            Shape::Ellipse {
                center,
                semi_a,
                semi_b,
                angle,
            } => {
                let (s, c) = angle.sin_cos();
                let ex = ((semi_a * c).powi(2) + (semi_b * s).powi(2)).sqrt();
                let ey = ((semi_a * s).powi(2) + (semi_b * c).powi(2)).sqrt();
                let d = Vec2::new(ex, ey);
                (*center - d, *center + d)
            }
            Shape::Rect { lo, hi } => (*lo, *hi),
            Shape::Polygon { vertices } => bbox_of(vertices.iter().copied()),
            Shape::Union { shapes } => {
                let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for s in shapes {
                    let (l, h) = s.bbox();
                    lo = Vec2::new(lo.x.min(l.x), lo.y.min(l.y));
                    hi = Vec2::new(hi.x.max(h.x), hi.y.max(h.y));
                }
                (lo, hi)
            }
            Shape::Difference { outer, .. } => outer.bbox(),
        }
    }

    /// Exact area for primitive shapes; `None` for unions and differences,
    /// whose overlap is not tracked analytically.
    pub fn nominal_area(&self) -> Option<f64> {
        match self {
            Shape::Disc { radius, .. } => Some(PI * radius * radius),
            Shape::Annulus { outer, inner, .. } | Shape::EccentricAnnulus { outer, inner, .. } => {
                Some(PI * (outer * outer - inner * inner))
            }
            Shape::Ellipse { semi_a, semi_b, .. } => Some(PI * semi_a * semi_b),
            Shape::Rect { lo, hi } => Some((hi.x - lo.x) * (hi.y - lo.y)),
            Shape::Polygon { vertices } => Some(polygon_signed_area(vertices).abs()),
            Shape::Union { .. } | Shape::Difference { .. } => None,
        }
    }

    /// Approximate perimeter of the boundary sampled by [`Shape::boundary_nodes`].
    pub fn perimeter(&self) -> f64 {
        match self {
            Shape::Disc { radius, .. } => 2.0 * PI * radius,
            Shape::Annulus { outer, .. } | Shape::EccentricAnnulus { outer, .. } => 2.0 * PI * outer,
            Shape::Ellipse { semi_a, semi_b, .. } => {
                // Ramanujan's second approximation.
                let (a, b) = (*semi_a, *semi_b);
                let hh = ((a - b) / (a + b)).powi(2);
                PI * (a + b) * (1.0 + 3.0 * hh / (10.0 + (4.0 - 3.0 * hh).sqrt()))
            }
            Shape::Rect { lo, hi } => 2.0 * ((hi.x - lo.x) + (hi.y - lo.y)),
            Shape::Polygon { vertices } => polygon_edges(vertices).map(|(a, b)| a.dist(b)).sum(),
            Shape::Union { shapes } => shapes.iter().map(Shape::perimeter).sum(),
            Shape::Difference { outer, obstacle } => outer.perimeter() + obstacle.perimeter(),
        }
    }

    /// Samples of the boundary carrying the equilibrium measure, with the
    /// arc length each sample stands for. Annuli contribute only their outer
    /// circle. Composite shapes keep the component boundary pieces that lie on
    /// the boundary of the composite.
    pub fn boundary_nodes(&self, count: usize) -> Vec<BoundaryNode> {
        let count = count.max(3);
        match self {
            Shape::Disc { center, radius } => circle_nodes(*center, *radius, count),
            Shape::Annulus { center, outer, .. } => circle_nodes(*center, *outer, count),
            Shape::EccentricAnnulus { outer, .. } => circle_nodes(Vec2::ZERO, *outer, count),
            Shape::Ellipse {
                center,
                semi_a,
                semi_b,
                angle,
            } => {
                // Equal parameter spacing: the equilibrium measure of an
                // ellipse is uniform in the eccentric-anomaly parameter.
                let pts: Vec<Vec2> = (0..count)
                    .map(|k| {
                        let t = 2.0 * PI * (k as f64) / (count as f64);
                        *center + Vec2::new(semi_a * t.cos(), semi_b * t.sin()).rotated(*angle)
                    })
                    .collect();
                closed_curve_nodes(&pts)
            }
            Shape::Rect { lo, hi } => {
                let v = rect_vertices(*lo, *hi);
                polygon_nodes(&v, count)
            }
            Shape::Polygon { vertices } => polygon_nodes(vertices, count),
            Shape::Union { shapes } => {
                let total: f64 = shapes.iter().map(Shape::perimeter).sum();
                let mut out = Vec::new();
                for (i, s) in shapes.iter().enumerate() {
                    let n = ((count as f64) * s.perimeter() / total).round().max(3.0) as usize;
                    for node in s.boundary_nodes(n) {
                        let covered = shapes
                            .iter()
                            .enumerate()
                            .any(|(j, o)| j != i && o.contains(node.p));
                        if !covered {
                            out.push(node);
                        }
                    }
                }
                out
            }
            Shape::Difference { outer, obstacle } => {
                let total = outer.perimeter() + obstacle.perimeter();
                let n_out = ((count as f64) * outer.perimeter() / total).round().max(3.0) as usize;
                let n_obs = count.saturating_sub(n_out).max(3);
                let mut out: Vec<BoundaryNode> = outer
                    .boundary_nodes(n_out)
                    .into_iter()
                    .filter(|n| !obstacle.contains_closed(n.p))
                    .collect();
                out.extend(
                    obstacle
                        .boundary_nodes(n_obs)
                        .into_iter()
                        .filter(|n| outer.contains(n.p)),
                );
                out
            }
        }
    }

    /// Closest point of the closed shape to `p`.
    pub fn project(&self, p: Vec2) -> Vec2 {
        if self.contains_closed(p) {
            return p;
        }
        match self {
            Shape::Disc { center, radius } => project_circle(*center, *radius, p),
            Shape::Annulus {
                center,
                outer,
                inner,
            } => {
                if (p - *center).norm_sq() < inner * inner {
                    project_circle(*center, *inner, p)
                } else {
                    project_circle(*center, *outer, p)
                }
            }
            Shape::EccentricAnnulus {
                outer,
                inner,
                offset,
            } => {
                let hole = Vec2::new(*offset, 0.0);
                if (p - hole).norm_sq() < inner * inner {
                    project_circle(hole, *inner, p)
                } else {
                    project_circle(Vec2::ZERO, *outer, p)
                }
            }
            Shape::Ellipse {
                center,
                semi_a,
                semi_b,
                angle,
            } => {
                let q = (p - *center).rotated(-angle);
                let c = closest_on_ellipse(*semi_a, *semi_b, q);
                *center + c.rotated(*angle)
            }
            Shape::Rect { lo, hi } => Vec2::new(p.x.clamp(lo.x, hi.x), p.y.clamp(lo.y, hi.y)),
            Shape::Polygon { vertices } => nearest_on_edges(vertices, p),
            Shape::Union { shapes } => shapes
                .iter()
                .map(|s| s.project(p))
                .min_by(|a, b| a.dist(p).total_cmp(&b.dist(p)))
                .unwrap_or(p),
            Shape::Difference { .. } => self.project_sampled(p),
        }
    }

    fn project_sampled(&self, p: Vec2) -> Vec2 {
        // Nearest point on a fine boundary polyline, restricted to the closure.
        let nodes = self.all_boundary_points(4096);
        let mut best = p;
        let mut best_d = f64::INFINITY;
        for w in nodes.windows(2) {
            let q = nearest_on_segment(w[0], w[1], p);
            let d = q.dist(p);
            if d < best_d && self.contains_closed(q) {
                best_d = d;
                best = q;
            }
        }
        if best_d.is_finite() {
            best
        } else {
            nodes
                .into_iter()
                .min_by(|a, b| a.dist(p).total_cmp(&b.dist(p)))
                .unwrap_or(p)
        }
    }

    /// Every boundary curve (inner ones included), as closed polylines
    /// concatenated. Used for sampled projection only.
    fn all_boundary_points(&self, count: usize) -> Vec<Vec2> {
        match self {
            Shape::Annulus {
                center,
                outer,
                inner,
            } => {
                let mut v = circle_points(*center, *outer, count);
                v.extend(circle_points(*center, *inner, count));
                v
            }
            Shape::EccentricAnnulus {
                outer,
                inner,
                offset,
            } => {
                let mut v = circle_points(Vec2::ZERO, *outer, count);
                v.extend(circle_points(Vec2::new(*offset, 0.0), *inner, count));
                v
            }
            Shape::Union { shapes } => shapes
                .iter()
                .flat_map(|s| s.all_boundary_points(count))
                .collect(),
            Shape::Difference { outer, obstacle } => {
                let mut v = outer.all_boundary_points(count);
                v.extend(obstacle.all_boundary_points(count));
                v
            }
            _ => {
                let mut v: Vec<Vec2> = self.boundary_nodes(count).iter().map(|n| n.p).collect();
                if let Some(&f) = v.first() {
                    v.push(f);
                }
                v
            }
        }
    }

    pub fn translated(&self, d: Vec2) -> Shape {
        match self {
            Shape::Disc { center, radius } => Shape::disc(*center + d, *radius),
            Shape::Annulus {
                center,
                outer,
                inner,
            } => Shape::annulus(*center + d, *outer, *inner),
            Shape::EccentricAnnulus {
                outer,
                inner,
                offset,
            } => Shape::difference(
                Shape::disc(d, *outer),
                Shape::disc(Vec2::new(*offset, 0.0) + d, *inner),
            ),
            Shape::Ellipse {
                center,
                semi_a,
                semi_b,
                angle,
            } => Shape::Ellipse {
                center: *center + d,
                semi_a: *semi_a,
                semi_b: *semi_b,
                angle: *angle,
            },
            Shape::Rect { lo, hi } => Shape::rect(*lo + d, *hi + d),
            Shape::Polygon { vertices } => {
                Shape::polygon(vertices.iter().map(|v| *v + d).collect())
            }
            Shape::Union { shapes } => Shape::union(shapes.iter().map(|s| s.translated(d)).collect()),
            Shape::Difference { outer, obstacle } => {
                Shape::difference(outer.translated(d), obstacle.translated(d))
            }
        }
    }

    /// Dilation about the origin by `c > 0`.
    pub fn scaled(&self, c: f64) -> Shape {
        match self {
            Shape::Disc { center, radius } => Shape::disc(*center * c, radius * c),
            Shape::Annulus {
                center,
                outer,
                inner,
            } => Shape::annulus(*center * c, outer * c, inner * c),
            Shape::EccentricAnnulus {
                outer,
                inner,
                offset,
            } => Shape::eccentric_annulus(outer * c, inner * c, offset * c),
            Shape::Ellipse {
                center,
                semi_a,
                semi_b,
                angle,
            } => Shape::Ellipse {
                center: *center * c,
                semi_a: semi_a * c,
                semi_b: semi_b * c,
                angle: *angle,
            },
            Shape::Rect { lo, hi } => Shape::rect(*lo * c, *hi * c),
            Shape::Polygon { vertices } => Shape::polygon(vertices.iter().map(|v| *v * c).collect()),
            Shape::Union { shapes } => Shape::union(shapes.iter().map(|s| s.scaled(c)).collect()),
            Shape::Difference { outer, obstacle } => {
                Shape::difference(outer.scaled(c), obstacle.scaled(c))
            }
        }
    }

    /// Rotation about the origin by `theta` radians.
    pub fn rotated(&self, theta: f64) -> Shape {
        match self {
            Shape::Disc { center, radius } => Shape::disc(center.rotated(theta), *radius),
            Shape::Annulus {
                center,
                outer,
                inner,
            } => Shape::annulus(center.rotated(theta), *outer, *inner),
            Shape::EccentricAnnulus {
                outer,
                inner,
                offset,
            } => Shape::difference(
                Shape::disc(Vec2::ZERO, *outer),
                Shape::disc(Vec2::new(*offset, 0.0).rotated(theta), *inner),
            ),
            Shape::Ellipse {
                center,
                semi_a,
                semi_b,
                angle,
            } => Shape::Ellipse {
                center: center.rotated(theta),
                semi_a: *semi_a,
                semi_b: *semi_b,
                angle: angle + theta,
            },
            Shape::Rect { lo, hi } => Shape::polygon(
                rect_vertices(*lo, *hi)
                    .into_iter()
                    .map(|v| v.rotated(theta))
                    .collect(),
            ),
            Shape::Polygon { vertices } => {
                Shape::polygon(vertices.iter().map(|v| v.rotated(theta)).collect())
            }
            Shape::Union { shapes } => Shape::union(shapes.iter().map(|s| s.rotated(theta)).collect()),
            Shape::Difference { outer, obstacle } => {
                Shape::difference(outer.rotated(theta), obstacle.rotated(theta))
            }
        }
    }
}

fn bbox_of(points: impl Iterator<Item = Vec2>) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

fn rect_vertices(lo: Vec2, hi: Vec2) -> Vec<Vec2> {
    vec![lo, Vec2::new(hi.x, lo.y), hi, Vec2::new(lo.x, hi.y)]
}

fn circle_points(center: Vec2, r: f64, count: usize) -> Vec<Vec2> {
    let mut v: Vec<Vec2> = (0..count)
        .map(|k| center + Vec2::from_polar(r, 2.0 * PI * (k as f64) / (count as f64)))
        .collect();
    v.push(v[0]);
    v
}

fn circle_nodes(center: Vec2, r: f64, count: usize) -> Vec<BoundaryNode> {
    let len = 2.0 * PI * r / (count as f64);
    (0..count)
        .map(|k| BoundaryNode {
            p: center + Vec2::from_polar(r, 2.0 * PI * (k as f64) / (count as f64)),
            len,
        })
        .collect()
}

/// Nodes at the given points of a closed curve; each node owns half of the
/// chord to each neighbour.
fn closed_curve_nodes(pts: &[Vec2]) -> Vec<BoundaryNode> {
    let n = pts.len();
    (0..n)
        .map(|k| {
            let prev = pts[(k + n - 1) % n];
            let next = pts[(k + 1) % n];
            BoundaryNode {
                p: pts[k],
                len: 0.5 * (pts[k].dist(prev) + pts[k].dist(next)),
            }
        })
        .collect()
}

fn polygon_nodes(vertices: &[Vec2], count: usize) -> Vec<BoundaryNode> {
    let perim: f64 = polygon_edges(vertices).map(|(a, b)| a.dist(b)).sum();
    let mut out = Vec::with_capacity(count + vertices.len());
    for (a, b) in polygon_edges(vertices) {
        let len = a.dist(b);
        let m = ((count as f64) * len / perim).round().max(1.0) as usize;
        let seg = len / m as f64;
        for k in 0..m {
            let t = (k as f64 + 0.5) / m as f64;
            out.push(BoundaryNode {
                p: a + (b - a) * t,
                len: seg,
            });
        }
    }
    out
}

pub(crate) fn polygon_edges(v: &[Vec2]) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
    (0..v.len()).map(move |i| (v[i], v[(i + 1) % v.len()]))
}

pub(crate) fn polygon_signed_area(v: &[Vec2]) -> f64 {
    0.5 * polygon_edges(v).map(|(a, b)| a.cross(b)).sum::<f64>()
}

fn point_in_polygon(v: &[Vec2], p: Vec2) -> bool {
    let mut inside = false;
    for (a, b) in polygon_edges(v) {
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn nearest_on_segment(a: Vec2, b: Vec2, p: Vec2) -> Vec2 {
    let d = b - a;
    let l2 = d.norm_sq();
    if l2 == 0.0 {
        return a;
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    a + d * t
}

fn nearest_on_edges(v: &[Vec2], p: Vec2) -> Vec2 {
    polygon_edges(v)
        .map(|(a, b)| nearest_on_segment(a, b, p))
        .min_by(|x, y| x.dist(p).total_cmp(&y.dist(p)))
        .unwrap_or(p)
}

fn polygon_boundary_dist(v: &[Vec2], p: Vec2) -> f64 {
    nearest_on_edges(v, p).dist(p)
}

fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = (q2 - q1).cross(p1 - q1);
    let d2 = (q2 - q1).cross(p2 - q1);
    let d3 = (p2 - p1).cross(q1 - p1);
    let d4 = (p2 - p1).cross(q2 - p1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Vec2, b: Vec2, c: Vec2| {
        c.x >= a.x.min(b.x) && c.x <= a.x.max(b.x) && c.y >= a.y.min(b.y) && c.y <= a.y.max(b.y)
    };
    (d1 == 0.0 && on(q1, q2, p1))
        || (d2 == 0.0 && on(q1, q2, p2))
        || (d3 == 0.0 && on(p1, p2, q1))
        || (d4 == 0.0 && on(p1, p2, q2))
}

fn polygon_is_simple(v: &[Vec2]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if a == b {
            return false;
        }
        for j in (i + 1)..n {
            // adjacent edges share a vertex
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (v[j], v[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn project_circle(center: Vec2, r: f64, p: Vec2) -> Vec2 {
    let d = p - center;
    let n = d.norm();
    if n == 0.0 {
        center + Vec2::new(r, 0.0)
    } else {
        center + d * (r / n)
    }
}

/// Closest point on the ellipse `(x/a)^2 + (y/b)^2 = 1` to `p` (centred,
/// axis-aligned frame), after D. Eberly's bisection formulation.
pub(crate) fn closest_on_ellipse(a: f64, b: f64, p: Vec2) -> Vec2 {
    let swap = a < b;
    let (e0, e1, y0, y1) = if swap {
        (b, a, p.y.abs(), p.x.abs())
    } else {
        (a, b, p.x.abs(), p.y.abs())
    };
    let (x0, x1) = closest_first_quadrant(e0, e1, y0, y1);
    let (qx, qy) = if swap { (x1, x0) } else { (x0, x1) };
    Vec2::new(qx.copysign(p.x), qy.copysign(p.y))
}

fn closest_first_quadrant(e0: f64, e1: f64, y0: f64, y1: f64) -> (f64, f64) {
    if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (e0 / e1).powi(2);
                let sbar = ellipse_root(r0, z0, z1, g);
                (r0 * y0 / (sbar + r0), y1 / (sbar + 1.0))
            } else {
                (y0, y1)
            }
        } else {
            (0.0, e1)
        }
    } else {
        let numer = e0 * y0;
        let denom = e0 * e0 - e1 * e1;
        if numer < denom {
            let xde = numer / denom;
            (e0 * xde, e1 * (1.0 - xde * xde).max(0.0).sqrt())
        } else {
            (e0, 0.0)
        }
    }
}

fn ellipse_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..1100 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        let gs = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if gs > 0.0 {
            s0 = s;
        } else if gs < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_rejects_degenerate_input() {
        assert!(Shape::rect(Vec2::new(0.0, 0.0), Vec2::new(0.0, 0.0)).validate().is_err());
        assert!(Shape::eccentric_annulus(0.45, 0.1, 0.36).validate().is_err());
        assert!(Shape::eccentric_annulus(0.45, 0.1, 0.3).validate().is_ok());
        let bowtie = Shape::polygon(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.0, 1.0),
        ]);
        assert!(bowtie.validate().is_err());
        assert!(Shape::diamond(Vec2::ZERO, 0.1).validate().is_ok());
    }

    #[test]
    fn eccentric_annulus_hole_is_offset() {
        let s = Shape::eccentric_annulus(0.45, 0.1, 0.2);
        assert!(!s.contains(Vec2::new(0.2, 0.0)));
        assert!(s.contains(Vec2::new(0.0, 0.0)));
        assert!(s.contains(Vec2::new(-0.2, 0.0)));
    }

    #[test]
    fn ellipse_projection_lands_on_boundary() {
        for &(a, b) in &[(2.0, 0.25), (0.3, 1.2), (1.0, 1.0)] {
            for k in 0..37 {
                let p = Vec2::from_polar(3.0, 0.17 * k as f64);
                let q = closest_on_ellipse(a, b, p);
                let lvl = (q.x / a).powi(2) + (q.y / b).powi(2);
                assert!((lvl - 1.0).abs() < 1e-12, "{a} {b} {p:?} -> {q:?}");
                // normal condition: p - q parallel to the gradient at q
                let grad = Vec2::new(q.x / (a * a), q.y / (b * b));
                assert!((p - q).cross(grad).abs() < 1e-9 * (p - q).norm().max(1.0) * grad.norm());
            }
        }
    }

    #[test]
    fn projection_is_identity_inside() {
        let s = Shape::ellipse(Vec2::new(0.5, 0.0), 2.0, 0.25);
        let p = Vec2::new(0.6, 0.1);
        assert_eq!(s.project(p), p);
    }

    #[test]
    fn shape_json_round_trip() {
        let s = Shape::difference(
            Shape::square(Vec2::ZERO, 0.7),
            Shape::diamond(Vec2::new(0.1, 0.1), 0.08),
        );
        let txt = serde_json::to_string(&s).unwrap();
        let back: Shape = serde_json::from_str(&txt).unwrap();
        assert_eq!(s, back);
        let d: Shape = serde_json::from_str(r#"{"kind":"disc","center":[0,0],"radius":1}"#).unwrap();
        assert_eq!(d, Shape::disc(Vec2::ZERO, 1.0));
    }

    #[test]
    fn boundary_nodes_cover_perimeter() {
        let s = Shape::ellipse(Vec2::ZERO, 2.0, 0.25);
        let total: f64 = s.boundary_nodes(2048).iter().map(|n| n.len).sum();
        assert!((total - s.perimeter()).abs() / s.perimeter() < 1e-4);
        let two = Shape::union(vec![
            Shape::disc(Vec2::ZERO, 1.0),
            Shape::disc(Vec2::new(1.5, 0.0), 1.0),
        ]);
        for n in two.boundary_nodes(400) {
            assert!(!Shape::disc(Vec2::ZERO, 1.0).contains(n.p) || !Shape::disc(Vec2::new(1.5, 0.0), 1.0).contains(n.p));
        }
    }
}
