//! Two-sided bounds on the area of metric balls.
//!
//! Distances come from the level-`k` path graph (so they are upper bounds
//! of true distances), extended into triangle interiors by straight
//! segments. A refined triangle contributes to the lower bound the largest
//! flat disk sector `T ∩ D(v, r - d(v))` over its corners `v`, which lies in
//! the ball; it contributes its whole area to the upper bound as soon as
//! one corner is within `r`.

use serde::{Deserialize, Serialize};

use crate::metric::MetricComplex;

use super::steiner::SteinerGraph;
use super::subdivide::{bary_in, chart_point, RootPoint, SubdividedComplex};
use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaBracket {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone)]
struct RefinedTriangle {
    corners: [usize; 3],
    pos: [[f64; 2]; 3],
    area: f64,
}

/// Geometry shared by all balls at one refinement level.
#[derive(Debug, Clone)]
pub struct BallContext<'a> {
    root: &'a MetricComplex,
    sub: SubdividedComplex,
    graph: SteinerGraph,
    triangles: Vec<RefinedTriangle>,
    /// Path-graph nodes on the boundary of each root triangle, with chart
    /// positions.
    rims: Vec<Vec<(usize, [f64; 2])>>,
}

impl<'a> BallContext<'a> {
    pub fn new(root: &'a MetricComplex, level: u32) -> Self {
        let sub = SubdividedComplex::to_level(root, level);
        let graph = SteinerGraph::new(root, level);
        let rc = root.complex();
        let charts: Vec<[[f64; 2]; 3]> = (0..rc.triangle_count()).map(|t| root.triangle_chart(t)).collect();
        let refined = sub.refined();
        let triangles = (0..refined.complex().triangle_count())
            .map(|t| {
                let rt = sub.triangle_carrier(t);
                let corners = refined.complex().triangle(t);
                let pos = corners.map(|v| chart_point(&charts[rt], bary_in(rc, rt, sub.vertex_point(v))));
                RefinedTriangle { corners, pos, area: refined.triangle_area(t) }
            })
            .collect();
        let n = graph.segments();
        let rims = (0..rc.triangle_count())
            .map(|t| {
                let tri = rc.triangle(t);
                let mut rim: Vec<(usize, [f64; 2])> = (0..3).map(|i| (tri[i], charts[t][i])).collect();
                for e in rc.triangle_edges(t) {
                    for j in 1..n {
                        let p = RootPoint::Edge { edge: e, t: j as f64 / n as f64 };
                        let node = graph.node_at(rc, p).expect("dyadic edge point");
                        rim.push((node, chart_point(&charts[t], bary_in(rc, t, p))));
                    }
                }
                rim
            })
            .collect();
        Self { root, sub, graph, triangles, rims }
    }

    pub fn level(&self) -> u32 {
        self.sub.level()
    }

    pub fn subdivided(&self) -> &SubdividedComplex {
        &self.sub
    }

    /// Distance bounds from root vertex `center` to every refined vertex.
    pub fn profile(&self, center: usize) -> Result<BallProfile<'_, 'a>, GeometryError> {
        let nv = self.root.complex().vertex_count();
        if center >= nv {
            return Err(GeometryError::VertexOutOfRange { vertex: center, count: nv });
        }
        let gd = self.graph.distances(center);
        let rc = self.root.complex();
        let dist = self
            .sub
            .vertex_points()
            .iter()
            .map(|&p| match p {
                RootPoint::Triangle { triangle, bary } => {
                    let chart = self.root.triangle_chart(triangle);
                    let q = chart_point(&chart, bary);
                    self.rims[triangle]
                        .iter()
                        .map(|&(node, pos)| gd[node] + (pos[0] - q[0]).hypot(pos[1] - q[1]))
                        .fold(f64::INFINITY, f64::min)
                }
                _ => gd[self.graph.node_at(rc, p).expect("boundary point is a graph node")],
            })
            .collect();
        Ok(BallProfile { ctx: self, center, dist })
    }
}

/// Distances from one center at one level.
#[derive(Debug, Clone)]
pub struct BallProfile<'c, 'a> {
    ctx: &'c BallContext<'a>,
    center: usize,
    dist: Vec<f64>,
}

impl BallProfile<'_, '_> {
    pub fn center(&self) -> usize {
        self.center
    }

    /// Distance bound to each refined vertex.
    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn bracket(&self, r: f64) -> Result<AreaBracket, GeometryError> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(GeometryError::BadRadius(r));
        }
        let mut lower = 0.0;
        let mut upper = 0.0;
        for t in &self.ctx.triangles {
            let d = t.corners.map(|v| self.dist[v]);
            if d.iter().any(|&x| x <= r) {
                upper += t.area;
            }
            let mut best: f64 = 0.0;
            for i in 0..3 {
                let rho = r - d[i];
                if rho <= 0.0 {
                    continue;
                }
                let (p, q, s) = (t.pos[i], t.pos[(i + 1) % 3], t.pos[(i + 2) % 3]);
                let reach = dist2(p, q).max(dist2(p, s));
                let part = if rho * rho >= reach {
                    t.area
                } else {
                    disk_sector_in_triangle(p, q, s, rho).min(t.area)
                };
                best = best.max(part);
            }
            lower += best;
        }
        Ok(AreaBracket { lower, upper })
    }
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Area of `D(p, rho) ∩ triangle(p, q, s)`.
pub fn disk_sector_in_triangle(p: [f64; 2], q: [f64; 2], s: [f64; 2], rho: f64) -> f64 {
    let a = [q[0] - p[0], q[1] - p[1]];
    let b = [s[0] - p[0], s[1] - p[1]];
    let d = [b[0] - a[0], b[1] - a[1]];
    // Points of segment a→b at distance rho from the origin.
    let qa = d[0] * d[0] + d[1] * d[1];
    let qb = 2.0 * (a[0] * d[0] + a[1] * d[1]);
    let qc = a[0] * a[0] + a[1] * a[1] - rho * rho;
    let mut cuts = vec![0.0, 1.0];
    let disc = qb * qb - 4.0 * qa * qc;
    if qa > 0.0 && disc > 0.0 {
        let sq = disc.sqrt();
        for u in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
            if u > 0.0 && u < 1.0 {
                cuts.push(u);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let at = |u: f64| [a[0] + d[0] * u, a[1] + d[1] * u];
    let mut area = 0.0;
    for w in cuts.windows(2) {
        let (x, y) = (at(w[0]), at(w[1]));
        let m = at(0.5 * (w[0] + w[1]));
        let cross = x[0] * y[1] - x[1] * y[0];
        if m[0] * m[0] + m[1] * m[1] <= rho * rho {
            area += 0.5 * cross.abs();
        } else {
            let dot = x[0] * y[0] + x[1] * y[1];
            area += 0.5 * rho * rho * cross.atan2(dot).abs();
        }
    }
    area
}

/// Bounds on the area of the ball of radius `r` about root vertex `x`.
pub fn ball_area(mc: &MetricComplex, x: usize, r: f64, level: u32) -> Result<AreaBracket, GeometryError> {
    BallContext::new(mc, level).profile(x)?.bracket(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::torus_grid;
    use std::f64::consts::PI;

    #[test]
    fn sector_of_right_angle() {
        // Quarter disk of radius 1 inside a large right isosceles corner.
        let a = disk_sector_in_triangle([0.0, 0.0], [10.0, 0.0], [0.0, 10.0], 1.0);
        assert!((a - PI / 4.0).abs() < 1e-12);
        // Disk covering the whole triangle.
        let b = disk_sector_in_triangle([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], 2.0);
        assert!((b - 0.5).abs() < 1e-12);
        // Disk cut by the far side.
        let c = disk_sector_in_triangle([0.0, 0.0], [1.0, -1.0], [1.0, 1.0], 2f64.sqrt());
        assert!((c - 1.0).abs() < 1e-12);
        // Degenerate triangle.
        let h = disk_sector_in_triangle([0.0, 0.0], [0.0, -10.0], [0.0, 10.0], 1.0);
        assert!(h.abs() < 1e-12);
        let cap = disk_sector_in_triangle([0.0, 0.0], [0.5, -1e6], [0.5, 1e6], 1.0);
        let seg = 2.0 * (PI / 3.0) / 2.0 - 0.5 * 3f64.sqrt() / 2.0;
        assert!((cap - (PI / 2.0 - seg)).abs() < 1e-5, "{cap}");
    }

    #[test]
    fn trivial_radii() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let zero = ball_area(&mc, 0, 0.0, 1).unwrap();
        assert_eq!(zero.lower, 0.0);
        assert!(zero.upper > 0.0 && zero.upper < 0.2);
        let big = ball_area(&mc, 0, 10.0, 1).unwrap();
        assert!((big.lower - 1.0).abs() < 1e-12 && (big.upper - 1.0).abs() < 1e-12);
        assert!(matches!(ball_area(&mc, 0, -1.0, 0), Err(GeometryError::BadRadius(_))));
    }

    #[test]
    fn flat_disk_is_bracketed() {
        let mc = torus_grid(16, 16, 1.0, 1.0).unwrap();
        let b = ball_area(&mc, 17, 0.3, 3).unwrap();
        let disk = PI * 0.09;
        assert!(b.lower <= disk + 1e-9 && disk <= b.upper + 1e-9, "{b:?}");
        assert!(b.lower >= 0.9 * disk && b.upper <= 1.1 * disk, "{b:?}");
    }
}
