//! Explicit double cover defined by a 1-cocycle.

use crate::complex::{sorted3, Complex2};
use crate::metric::{MetricComplex, PLMetric};
use crate::z2::{is_cocycle, Z2Vector};

use super::GeometryError;

/// Cover vertex `v + s·V` is the copy of `v` on sheet `s`.
#[derive(Debug, Clone)]
pub struct DoubleCover {
    cover: MetricComplex,
    cocycle: Z2Vector,
    base_vertices: usize,
    edge_projection: Vec<usize>,
    triangle_projection: Vec<usize>,
    edge_involution: Vec<usize>,
    triangle_involution: Vec<usize>,
}

impl DoubleCover {
    pub fn cover(&self) -> &MetricComplex {
        &self.cover
    }

    pub fn cocycle(&self) -> &Z2Vector {
        &self.cocycle
    }

    pub fn vertex_projection(&self, v: usize) -> usize {
        v % self.base_vertices
    }

    pub fn sheet(&self, v: usize) -> usize {
        v / self.base_vertices
    }

    pub fn edge_projection(&self) -> &[usize] {
        &self.edge_projection
    }

    pub fn triangle_projection(&self) -> &[usize] {
        &self.triangle_projection
    }

    pub fn vertex_involution(&self, v: usize) -> usize {
        (v + self.base_vertices) % (2 * self.base_vertices)
    }

    pub fn edge_involution(&self) -> &[usize] {
        &self.edge_involution
    }

    pub fn triangle_involution(&self) -> &[usize] {
        &self.triangle_involution
    }
}

/// Lifts every edge `uv` to `u^s v^(s+α(uv))`; triangles lift because `α`
/// sums to zero around each of them.
pub fn build_double_cover(mc: &MetricComplex, alpha: &Z2Vector) -> Result<DoubleCover, GeometryError> {
    let c = mc.complex();
    alpha.check_on(c)?;
    if alpha.degree() != 1 {
        return Err(GeometryError::Algebra(crate::z2::AlgebraError::DegreeMismatch { expected: 1, got: alpha.degree() }));
    }
    if !is_cocycle(c, alpha)? {
        return Err(GeometryError::NotCocycle);
    }
    let n = c.vertex_count();
    let lift = |v: usize, s: bool| v + if s { n } else { 0 };

    let mut edges = Vec::with_capacity(2 * c.edge_count());
    for (e, &[u, v]) in c.edges().iter().enumerate() {
        let a = alpha.get(e);
        edges.push([lift(u, false), lift(v, a)]);
        edges.push([lift(u, true), lift(v, !a)]);
    }
    let mut triangles = Vec::with_capacity(2 * c.triangle_count());
    for t in 0..c.triangle_count() {
        let [x, y, z] = c.triangle(t);
        let [e01, _, e02] = c.triangle_edges(t);
        for s in [false, true] {
            triangles.push(sorted3([lift(x, s), lift(y, s ^ alpha.get(e01)), lift(z, s ^ alpha.get(e02))]));
        }
    }
    let cover = Complex2::new(2 * n, edges, triangles).expect("lift of a cocycle is a simplicial complex");
    let edge_projection: Vec<usize> = cover
        .edges()
        .iter()
        .map(|&[u, v]| c.edge_index(u % n, v % n).expect("projected edge"))
        .collect();
    let triangle_projection: Vec<usize> = cover
        .triangles()
        .iter()
        .map(|&[x, y, z]| c.triangle_index(sorted3([x % n, y % n, z % n])).expect("projected triangle"))
        .collect();
    let flip = |v: usize| (v + n) % (2 * n);
    let edge_involution = cover
        .edges()
        .iter()
        .map(|&[u, v]| cover.edge_index(flip(u), flip(v)).expect("deck image of edge"))
        .collect();
    let triangle_involution = cover
        .triangles()
        .iter()
        .map(|&[x, y, z]| cover.triangle_index(sorted3([flip(x), flip(y), flip(z)])).expect("deck image of triangle"))
        .collect();
    let metric = PLMetric::new(edge_projection.iter().map(|&e| mc.length(e)).collect());
    let cover = MetricComplex::new(cover, metric)?;
    Ok(DoubleCover {
        cover,
        cocycle: alpha.clone(),
        base_vertices: n,
        edge_projection,
        triangle_projection,
        edge_involution,
        triangle_involution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circle, torus_grid};
    use crate::z2::{betti_numbers, cohomology_basis};

    #[test]
    fn circle_cover_is_a_hexagon() {
        let mc = circle(3, 3.0).unwrap();
        let a = Z2Vector::from_support(mc.complex(), 1, [0]).unwrap();
        let dc = build_double_cover(&mc, &a).unwrap();
        let c = dc.cover().complex();
        assert_eq!((c.vertex_count(), c.edge_count()), (6, 6));
        assert!(c.is_connected());
        assert_eq!(betti_numbers(c), [0, 1, 0]);
    }

    #[test]
    fn zero_cocycle_gives_two_copies() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let dc = build_double_cover(&mc, &Z2Vector::zero(mc.complex(), 1)).unwrap();
        assert_eq!(dc.cover().complex().component_count(), 2);
        assert!((dc.cover().total_area() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn axis_cover_of_torus() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let a = &cohomology_basis(mc.complex(), 1).unwrap().representatives[0];
        let dc = build_double_cover(&mc, a).unwrap();
        let c = dc.cover().complex();
        assert!(c.is_connected());
        assert_eq!(c.euler_characteristic(), 0);
        for (e, &img) in dc.edge_involution().iter().enumerate() {
            assert_ne!(e, img);
            assert_eq!(dc.edge_projection()[e], dc.edge_projection()[img]);
            assert_eq!(dc.cover().length(e), dc.cover().length(img));
        }
    }

    #[test]
    fn rejects_non_cocycles() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let bad = Z2Vector::from_support(mc.complex(), 1, [0]).unwrap();
        assert!(matches!(build_double_cover(&mc, &bad), Err(GeometryError::NotCocycle)));
    }
}
