//! Iterated 4-to-1 midpoint subdivision with carriers in the root complex.

use serde::{Deserialize, Serialize};

use crate::complex::{sorted3, Complex2};
use crate::metric::{MetricComplex, PLMetric};
use crate::z2::Z2Vector;

/// Position of a refined vertex inside the root complex. Edge parameters
/// are measured from the root edge's lower endpoint; barycentric
/// coordinates refer to the root triangle's sorted vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootPoint {
    Vertex(usize),
    Edge { edge: usize, t: f64 },
    Triangle { triangle: usize, bary: [f64; 3] },
}

/// Smallest root simplex containing a refined edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Carrier {
    Edge(usize),
    Triangle(usize),
}

/// A refinement of a root metric complex. Root vertices keep their indices
/// at every level.
#[derive(Debug, Clone)]
pub struct SubdividedComplex {
    refined: MetricComplex,
    level: u32,
    vertex_points: Vec<RootPoint>,
    edge_carriers: Vec<Carrier>,
    triangle_carriers: Vec<usize>,
}

impl SubdividedComplex {
    /// Level 0: the root complex itself.
    pub fn root(mc: &MetricComplex) -> Self {
        let c = mc.complex();
        Self {
            refined: mc.clone(),
            level: 0,
            vertex_points: (0..c.vertex_count()).map(RootPoint::Vertex).collect(),
            edge_carriers: (0..c.edge_count()).map(Carrier::Edge).collect(),
            triangle_carriers: (0..c.triangle_count()).collect(),
        }
    }

    /// `level` rounds of midpoint subdivision.
    pub fn to_level(mc: &MetricComplex, level: u32) -> Self {
        let mut s = Self::root(mc);
        for _ in 0..level {
            s = s.refine(mc.complex());
        }
        s
    }

    pub fn refined(&self) -> &MetricComplex {
        &self.refined
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn vertex_point(&self, v: usize) -> RootPoint {
        self.vertex_points[v]
    }

    pub fn vertex_points(&self) -> &[RootPoint] {
        &self.vertex_points
    }

    pub fn edge_carrier(&self, e: usize) -> Carrier {
        self.edge_carriers[e]
    }

    pub fn triangle_carrier(&self, t: usize) -> usize {
        self.triangle_carriers[t]
    }

    /// Index of the midpoint vertex created for edge `e` of this level in
    /// the next level.
    pub fn midpoint_index(&self, e: usize) -> usize {
        self.refined.complex().vertex_count() + e
    }

    /// One more round of subdivision. `root` must be the complex this
    /// refinement started from.
    pub fn refine(&self, root: &Complex2) -> Self {
        let mc = &self.refined;
        let c = mc.complex();
        let nv = c.vertex_count();
        let mid = |e: usize| nv + e;

        let mut vertex_points = self.vertex_points.clone();
        for (e, &[u, v]) in c.edges().iter().enumerate() {
            let p = match self.edge_carriers[e] {
                Carrier::Edge(re) => RootPoint::Edge {
                    edge: re,
                    t: 0.5 * (edge_param(root, re, self.vertex_points[u]) + edge_param(root, re, self.vertex_points[v])),
                },
                Carrier::Triangle(rt) => {
                    let a = bary_in(root, rt, self.vertex_points[u]);
                    let b = bary_in(root, rt, self.vertex_points[v]);
                    RootPoint::Triangle { triangle: rt, bary: [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])] }
                }
            };
            vertex_points.push(p);
        }

        let mut edges: Vec<([usize; 2], f64, Carrier)> = Vec::with_capacity(2 * c.edge_count() + 3 * c.triangle_count());
        let push_edge = |edges: &mut Vec<([usize; 2], f64, Carrier)>, a: usize, b: usize, l: f64, car: Carrier| {
            edges.push((if a < b { [a, b] } else { [b, a] }, l, car));
        };
        for (e, &[u, v]) in c.edges().iter().enumerate() {
            let half = 0.5 * mc.length(e);
            push_edge(&mut edges, u, mid(e), half, self.edge_carriers[e]);
            push_edge(&mut edges, mid(e), v, half, self.edge_carriers[e]);
        }
        let mut triangles: Vec<([usize; 3], usize)> = Vec::with_capacity(4 * c.triangle_count());
        for t in 0..c.triangle_count() {
            let [a, b, cc] = c.triangle(t);
            let [e01, e12, e02] = c.triangle_edges(t);
            let [l01, l12, l02] = mc.triangle_lengths(t);
            let (m01, m12, m02) = (mid(e01), mid(e12), mid(e02));
            let car = Carrier::Triangle(self.triangle_carriers[t]);
            push_edge(&mut edges, m01, m12, 0.5 * l02, car);
            push_edge(&mut edges, m12, m02, 0.5 * l01, car);
            push_edge(&mut edges, m01, m02, 0.5 * l12, car);
            let rt = self.triangle_carriers[t];
            for tri in [[a, m01, m02], [b, m01, m12], [cc, m12, m02], [m01, m12, m02]] {
                triangles.push((sorted3(tri), rt));
            }
        }
        edges.sort_by_key(|x| x.0);
        triangles.sort_by_key(|x| x.0);

        let complex = Complex2::new(
            nv + c.edge_count(),
            edges.iter().map(|x| x.0).collect(),
            triangles.iter().map(|x| x.0).collect(),
        )
        .expect("midpoint subdivision of a valid complex is valid");
        let metric = PLMetric::new(edges.iter().map(|x| x.1).collect());
        let refined = MetricComplex::new(complex, metric).expect("midpoint subdivision preserves flat triangles");
        Self {
            refined,
            level: self.level + 1,
            vertex_points,
            edge_carriers: edges.iter().map(|x| x.2).collect(),
            triangle_carriers: triangles.iter().map(|x| x.1).collect(),
        }
    }

    /// Transfers a 1-cocycle of this level to the next level `child`
    /// (obtained by `refine`). The result is again a cocycle and pairs with
    /// every refined cycle as the original pairs with its image.
    pub fn refine_cocycle(&self, child: &SubdividedComplex, alpha: &Z2Vector) -> Z2Vector {
        let c = self.refined.complex();
        let cc = child.refined.complex();
        let mid = |e: usize| self.midpoint_index(e);
        let idx = |a: usize, b: usize| cc.edge_index(a, b).expect("child edge exists");
        let mut support = Vec::new();
        for (e, &[u, _]) in c.edges().iter().enumerate() {
            if alpha.get(e) {
                support.push(idx(u, mid(e)));
            }
        }
        for t in 0..c.triangle_count() {
            let [e01, e12, e02] = c.triangle_edges(t);
            if alpha.get(e01) ^ alpha.get(e02) {
                support.push(idx(mid(e01), mid(e02)));
            }
            if alpha.get(e12) {
                support.push(idx(mid(e01), mid(e12)));
            }
        }
        Z2Vector::from_support(cc, 1, support).expect("indices in range")
    }
}

/// Parameter of a point lying on root edge `re`, measured from its lower
/// endpoint.
fn edge_param(root: &Complex2, re: usize, p: RootPoint) -> f64 {
    match p {
        RootPoint::Vertex(v) => {
            if v == root.edge(re)[0] {
                0.0
            } else {
                1.0
            }
        }
        RootPoint::Edge { t, .. } => t,
        RootPoint::Triangle { .. } => unreachable!("interior point on an edge carrier"),
    }
}

/// Barycentric coordinates of a point lying in root triangle `rt`.
pub(crate) fn bary_in(root: &Complex2, rt: usize, p: RootPoint) -> [f64; 3] {
    let tri = root.triangle(rt);
    let slot = |v: usize| tri.iter().position(|&w| w == v).expect("vertex of carrier triangle");
    match p {
        RootPoint::Vertex(v) => {
            let mut b = [0.0; 3];
            b[slot(v)] = 1.0;
            b
        }
        RootPoint::Edge { edge, t } => {
            let [u, w] = root.edge(edge);
            let mut b = [0.0; 3];
            b[slot(u)] = 1.0 - t;
            b[slot(w)] = t;
            b
        }
        RootPoint::Triangle { bary, .. } => bary,
    }
}

/// Planar position of a point of root triangle `rt` in that triangle's
/// chart.
pub(crate) fn chart_point(chart: &[[f64; 2]; 3], bary: [f64; 3]) -> [f64; 2] {
    [
        bary[0] * chart[0][0] + bary[1] * chart[1][0] + bary[2] * chart[2][0],
        bary[0] * chart[0][1] + bary[1] * chart[1][1] + bary[2] * chart[2][1],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{rp2_minimal, torus_grid};
    use crate::z2::{cohomology_basis, is_cocycle, is_coboundary};

    #[test]
    fn equilateral_triangle_splits_into_four() {
        let c = Complex2::from_triangles(3, vec![[0, 1, 2]], vec![]).unwrap();
        let mc = MetricComplex::new(c.clone(), PLMetric::uniform(&c, 1.0)).unwrap();
        let s = SubdividedComplex::root(&mc).refine(&c);
        assert_eq!(s.refined().complex().triangle_count(), 4);
        assert!(s.refined().metric().lengths().iter().all(|&l| l == 0.5));
        assert!((s.refined().total_area() - mc.total_area()).abs() < 1e-15);
    }

    #[test]
    fn counts_and_area() {
        let mc = rp2_minimal().unwrap();
        let (e, f) = (mc.complex().edge_count(), mc.complex().triangle_count());
        let s1 = SubdividedComplex::to_level(&mc, 1);
        let c1 = s1.refined().complex();
        assert_eq!(c1.edge_count(), 2 * e + 3 * f);
        assert_eq!(c1.triangle_count(), 4 * f);
        assert_eq!(c1.euler_characteristic(), 1);
        let s3 = SubdividedComplex::to_level(&mc, 3);
        let rel = (s3.refined().total_area() - mc.total_area()).abs() / mc.total_area();
        assert!(rel < 1e-12);
    }

    #[test]
    fn root_points_match_geometry() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let s = SubdividedComplex::to_level(&mc, 2);
        let root = mc.complex();
        // Each refined edge length equals the chart distance of its ends.
        let rc = s.refined().complex();
        for (e, &[u, v]) in rc.edges().iter().enumerate() {
            if let Carrier::Triangle(rt) = s.edge_carrier(e) {
                let chart = mc.triangle_chart(rt);
                let p = chart_point(&chart, bary_in(root, rt, s.vertex_point(u)));
                let q = chart_point(&chart, bary_in(root, rt, s.vertex_point(v)));
                let d = (p[0] - q[0]).hypot(p[1] - q[1]);
                assert!((d - s.refined().length(e)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn refined_cocycles_stay_nontrivial() {
        let mc = torus_grid(3, 4, 1.0, 1.0).unwrap();
        let s0 = SubdividedComplex::root(&mc);
        let s1 = s0.refine(mc.complex());
        for a in cohomology_basis(mc.complex(), 1).unwrap().representatives {
            let r = s0.refine_cocycle(&s1, &a);
            let c1 = s1.refined().complex();
            assert!(is_cocycle(c1, &r).unwrap());
            assert!(!is_coboundary(c1, &r).unwrap());
        }
    }
}
