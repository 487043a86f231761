//! Standard complexes: flat tori and Klein bottles on grids, the minimal
//! projective plane, polygon models of higher genus surfaces, and the wedge
//! and disjoint-union combinators.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{sorted3, Complex2, ComplexError};
use crate::metric::{MetricComplex, MetricError, PLMetric};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerateError {
    #[error("invalid parameter {name} = {value}: {rule}")]
    InvalidParameter { name: &'static str, value: String, rule: &'static str },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A generator family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    /// `m × n` grid with diagonals on a flat `lx × ly` torus.
    TorusGrid { m: usize, n: usize, lx: f64, ly: f64 },
    /// `m × n` grid on the flat torus spanned by two vectors of length
    /// `side` at 60 degrees, cut into near-equilateral triangles.
    HexTorus { m: usize, n: usize, side: f64 },
    /// `m × n` grid on a flat `lx × ly` Klein bottle (the vertical gluing
    /// reverses the horizontal direction).
    KleinGrid { m: usize, n: usize, lx: f64, ly: f64 },
    /// 6-vertex projective plane, all edges of length 1.
    Rp2Minimal,
    /// 7-vertex torus, all edges of length `side`.
    TorusMinimal { side: f64 },
    /// Regular `4g`-gon with side `side` and identifications
    /// `a1 b1 a1⁻¹ b1⁻¹ ... ag bg ag⁻¹ bg⁻¹`.
    GenusGPolygon { genus: usize, side: f64 },
    /// Boundary of the octahedron with edge `side`.
    Sphere { side: f64 },
    /// Cycle graph on `n` vertices with total length `length`.
    Circle { n: usize, length: f64 },
    /// Vertex 0 of `right` glued to vertex 0 of `left`.
    Wedge { left: Box<GeneratorSpec>, right: Box<GeneratorSpec> },
    DisjointUnion { left: Box<GeneratorSpec>, right: Box<GeneratorSpec> },
}

pub fn generate(spec: &GeneratorSpec) -> Result<MetricComplex, GenerateError> {
    match *spec {
        GeneratorSpec::TorusGrid { m, n, lx, ly } => torus_grid(m, n, lx, ly),
        GeneratorSpec::HexTorus { m, n, side } => hex_torus(m, n, side),
        GeneratorSpec::KleinGrid { m, n, lx, ly } => klein_grid(m, n, lx, ly),
        GeneratorSpec::Rp2Minimal => rp2_minimal(),
        GeneratorSpec::TorusMinimal { side } => torus_minimal(side),
        GeneratorSpec::GenusGPolygon { genus, side } => genus_g_polygon(genus, side),
        GeneratorSpec::Sphere { side } => sphere(side),
        GeneratorSpec::Circle { n, length } => circle(n, length),
        GeneratorSpec::Wedge { ref left, ref right } => wedge(&generate(left)?, &generate(right)?),
        GeneratorSpec::DisjointUnion { ref left, ref right } => {
            disjoint_union(&generate(left)?, &generate(right)?)
        }
    }
}

fn check_grid(m: usize, n: usize) -> Result<(), GenerateError> {
    for (name, v) in [("m", m), ("n", n)] {
        if v < 3 {
            return Err(GenerateError::InvalidParameter {
                name,
                value: v.to_string(),
                rule: "grid dimensions must be at least 3",
            });
        }
    }
    Ok(())
}

fn check_positive(name: &'static str, v: f64) -> Result<(), GenerateError> {
    if !(v.is_finite() && v > 0.0) {
        return Err(GenerateError::InvalidParameter { name, value: v.to_string(), rule: "must be positive and finite" });
    }
    Ok(())
}

/// Collects triangles and edge lengths, then builds the metric complex.
#[derive(Default)]
struct Builder {
    triangles: Vec<[usize; 3]>,
    lengths: HashMap<[usize; 2], f64>,
}

impl Builder {
    fn edge(&mut self, u: usize, v: usize, len: f64) {
        let key = if u < v { [u, v] } else { [v, u] };
        let prev = *self.lengths.entry(key).or_insert(len);
        debug_assert!((prev - len).abs() <= 1e-9 * len.max(1.0), "inconsistent length on {key:?}");
    }

    /// Triangle with planar corner positions; edge lengths from the chart.
    fn planar(&mut self, vs: [usize; 3], ps: [[f64; 2]; 3]) {
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            self.edge(vs[i], vs[j], dist(ps[i], ps[j]));
        }
        self.triangles.push(vs);
    }

    fn finish(self, vertex_count: usize) -> Result<MetricComplex, GenerateError> {
        let edges: Vec<[usize; 2]> = self.lengths.keys().copied().collect();
        let complex = Complex2::new(vertex_count, edges, self.triangles)?;
        let metric = PLMetric::from_fn(&complex, |u, v| self.lengths[&[u, v]]);
        Ok(MetricComplex::new(complex, metric)?)
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub fn torus_grid(m: usize, n: usize, lx: f64, ly: f64) -> Result<MetricComplex, GenerateError> {
    check_grid(m, n)?;
    check_positive("lx", lx)?;
    check_positive("ly", ly)?;
    let (dx, dy) = (lx / m as f64, ly / n as f64);
    let idx = |i: usize, j: usize| (i % m) + m * (j % n);
    let mut b = Builder::default();
    for j in 0..n {
        for i in 0..m {
            let (p00, p10, p01, p11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            b.planar([p00, p10, p11], [[0.0, 0.0], [dx, 0.0], [dx, dy]]);
            b.planar([p00, p01, p11], [[0.0, 0.0], [0.0, dy], [dx, dy]]);
        }
    }
    b.finish(m * n)
}

pub fn hex_torus(m: usize, n: usize, side: f64) -> Result<MetricComplex, GenerateError> {
    check_grid(m, n)?;
    check_positive("side", side)?;
    let a = [side / m as f64, 0.0];
    let c = [0.5 * side / n as f64, 0.5 * 3f64.sqrt() * side / n as f64];
    let ac = [a[0] + c[0], a[1] + c[1]];
    let idx = |i: usize, j: usize| (i % m) + m * (j % n);
    let mut b = Builder::default();
    for j in 0..n {
        for i in 0..m {
            let (p00, p10, p01, p11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            b.planar([p00, p10, p01], [[0.0, 0.0], a, c]);
            b.planar([p10, p11, p01], [a, ac, c]);
        }
    }
    b.finish(m * n)
}

pub fn klein_grid(m: usize, n: usize, lx: f64, ly: f64) -> Result<MetricComplex, GenerateError> {
    check_grid(m, n)?;
    check_positive("lx", lx)?;
    check_positive("ly", ly)?;
    let (dx, dy) = (lx / m as f64, ly / n as f64);
    // Row n is row 0 with the horizontal index reflected.
    let idx = |i: usize, j: usize| {
        if j == n {
            (m - i % m) % m
        } else {
            (i % m) + m * j
        }
    };
    let mut b = Builder::default();
    for j in 0..n {
        for i in 0..m {
            let (p00, p10, p01, p11) = (idx(i, j), idx(i + 1, j), idx(i, j + 1), idx(i + 1, j + 1));
            b.planar([p00, p10, p11], [[0.0, 0.0], [dx, 0.0], [dx, dy]]);
            b.planar([p00, p01, p11], [[0.0, 0.0], [0.0, dy], [dx, dy]]);
        }
    }
    b.finish(m * n)
}

pub const RP2_TRIANGLES: [[usize; 3]; 10] = [
    [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
    [1, 2, 4], [2, 3, 5], [1, 3, 4], [2, 4, 5], [1, 3, 5],
];

pub fn rp2_minimal() -> Result<MetricComplex, GenerateError> {
    let complex = Complex2::from_triangles(6, RP2_TRIANGLES.to_vec(), vec![])?;
    let metric = PLMetric::uniform(&complex, 1.0);
    Ok(MetricComplex::new(complex, metric)?)
}

pub fn torus_minimal(side: f64) -> Result<MetricComplex, GenerateError> {
    check_positive("side", side)?;
    let triangles = (0..7)
        .flat_map(|i| [sorted3([i, (i + 1) % 7, (i + 3) % 7]), sorted3([i, (i + 2) % 7, (i + 3) % 7])])
        .collect();
    let complex = Complex2::from_triangles(7, triangles, vec![])?;
    let metric = PLMetric::uniform(&complex, side);
    Ok(MetricComplex::new(complex, metric)?)
}

pub fn sphere(side: f64) -> Result<MetricComplex, GenerateError> {
    check_positive("side", side)?;
    // Octahedron: 0/1 = ±x, 2/3 = ±y, 4/5 = ±z.
    let mut triangles = Vec::new();
    for x in [0, 1] {
        for y in [2, 3] {
            for z in [4, 5] {
                triangles.push([x, y, z]);
            }
        }
    }
    let complex = Complex2::from_triangles(6, triangles, vec![])?;
    let metric = PLMetric::uniform(&complex, side);
    Ok(MetricComplex::new(complex, metric)?)
}

pub fn circle(n: usize, length: f64) -> Result<MetricComplex, GenerateError> {
    if n < 3 {
        return Err(GenerateError::InvalidParameter {
            name: "n",
            value: n.to_string(),
            rule: "a simplicial circle needs at least 3 vertices",
        });
    }
    check_positive("length", length)?;
    let mut b = Builder::default();
    for i in 0..n {
        b.edge(i, (i + 1) % n, length / n as f64);
    }
    b.finish(n)
}

/// Each polygon side is cut in three so the quotient is simplicial; a ring
/// of interior vertices and a central cone vertex fill the disk.
pub fn genus_g_polygon(genus: usize, side: f64) -> Result<MetricComplex, GenerateError> {
    if genus < 1 {
        return Err(GenerateError::InvalidParameter { name: "genus", value: genus.to_string(), rule: "genus must be at least 1" });
    }
    check_positive("side", side)?;
    let sides = 4 * genus;
    let ring_len = 3 * sides;
    let radius = side / (2.0 * (PI / sides as f64).sin());
    let corner = |s: usize| {
        let th = 2.0 * PI * s as f64 / sides as f64;
        [radius * th.cos(), radius * th.sin()]
    };
    let lerp = |p: [f64; 2], q: [f64; 2], t: f64| [p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t];

    // Boundary labels and positions, three per side starting at the corner.
    let mut labels = Vec::with_capacity(ring_len);
    let mut pos = Vec::with_capacity(ring_len);
    for s in 0..sides {
        let (i, r) = (s / 4, s % 4);
        let letter = 2 * i + (r % 2);
        let (first, second) = (1 + 2 * letter, 2 + 2 * letter);
        let (q1, q2) = if r < 2 { (first, second) } else { (second, first) };
        let (p, q) = (corner(s), corner(s + 1));
        labels.extend([0, q1, q2]);
        pos.extend([p, lerp(p, q, 1.0 / 3.0), lerp(p, q, 2.0 / 3.0)]);
    }
    let ring0 = 1 + 2 * (2 * genus);
    let center = ring0 + ring_len;
    let shrink = 0.7;
    let ring_pos: Vec<[f64; 2]> = pos.iter().map(|p| [shrink * p[0], shrink * p[1]]).collect();

    let mut b = Builder::default();
    for k in 0..ring_len {
        let k1 = (k + 1) % ring_len;
        let (rk, rk1) = (ring0 + k, ring0 + k1);
        b.planar([labels[k], labels[k1], rk1], [pos[k], pos[k1], ring_pos[k1]]);
        b.planar([labels[k], rk1, rk], [pos[k], ring_pos[k1], ring_pos[k]]);
        b.planar([center, rk, rk1], [[0.0, 0.0], ring_pos[k], ring_pos[k1]]);
    }
    b.finish(center + 1)
}

fn relabel(
    b: &mut Builder,
    mc: &MetricComplex,
    map: impl Fn(usize) -> usize,
) {
    let c = mc.complex();
    for (e, &[u, v]) in c.edges().iter().enumerate() {
        b.edge(map(u), map(v), mc.length(e));
    }
    for &[x, y, z] in c.triangles() {
        b.triangles.push([map(x), map(y), map(z)]);
    }
}

/// Identifies vertex 0 of `right` with vertex 0 of `left`.
pub fn wedge(left: &MetricComplex, right: &MetricComplex) -> Result<MetricComplex, GenerateError> {
    let nl = left.complex().vertex_count();
    let nr = right.complex().vertex_count();
    if nl == 0 || nr == 0 {
        return Err(GenerateError::InvalidParameter { name: "operand", value: "empty".into(), rule: "wedge operands need a vertex" });
    }
    let mut b = Builder::default();
    relabel(&mut b, left, |v| v);
    relabel(&mut b, right, |v| if v == 0 { 0 } else { v + nl - 1 });
    b.finish(nl + nr - 1)
}

pub fn disjoint_union(left: &MetricComplex, right: &MetricComplex) -> Result<MetricComplex, GenerateError> {
    let nl = left.complex().vertex_count();
    let mut b = Builder::default();
    relabel(&mut b, left, |v| v);
    relabel(&mut b, right, |v| v + nl);
    b.finish(nl + right.complex().vertex_count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::z2::betti_numbers;

    #[test]
    fn rp2_f_vector() {
        let mc = rp2_minimal().unwrap();
        let c = mc.complex();
        assert_eq!((c.vertex_count(), c.edge_count(), c.triangle_count()), (6, 15, 10));
        assert_eq!(c.euler_characteristic(), 1);
        assert!((mc.total_area() - 10.0 * 3f64.sqrt() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn torus_grid_invariants() {
        let mc = torus_grid(4, 4, 1.0, 1.0).unwrap();
        assert_eq!(mc.complex().euler_characteristic(), 0);
        assert_eq!(betti_numbers(mc.complex()), [0, 2, 1]);
        assert!((mc.total_area() - 1.0).abs() < 1e-12);
        let rect = torus_grid(3, 5, 1.0, 2.0).unwrap();
        assert!((rect.total_area() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hex_torus_is_equilateral_for_square_grids() {
        let mc = hex_torus(4, 4, 1.0).unwrap();
        assert!(mc.metric().lengths().iter().all(|l| (l - 0.25).abs() < 1e-12));
        assert!((mc.total_area() - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(betti_numbers(mc.complex()), [0, 2, 1]);
    }

    #[test]
    fn klein_grid_homology() {
        let mc = klein_grid(4, 3, 1.0, 1.0).unwrap();
        assert_eq!(mc.complex().euler_characteristic(), 0);
        assert_eq!(betti_numbers(mc.complex()), [0, 2, 1]);
        assert!((mc.total_area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn genus_polygons() {
        for g in 1..=3 {
            let mc = genus_g_polygon(g, 1.0).unwrap();
            let c = mc.complex();
            assert_eq!(c.euler_characteristic(), 2 - 2 * g as i64, "genus {g}");
            assert_eq!(betti_numbers(c), [0, 2 * g, 1]);
            assert_eq!(c.vertex_count(), 16 * g + 2);
        }
    }

    #[test]
    fn small_grids_are_rejected() {
        let err = torus_grid(2, 4, 1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("at least 3"));
        assert!(genus_g_polygon(0, 1.0).is_err());
        assert!(circle(2, 1.0).is_err());
        assert!(torus_grid(3, 3, -1.0, 1.0).is_err());
    }

    #[test]
    fn combinators() {
        let t = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let s = sphere(1.0).unwrap();
        let w = wedge(&t, &circle(3, 1.0).unwrap()).unwrap();
        assert_eq!(betti_numbers(w.complex()), [0, 3, 1]);
        let u = disjoint_union(&s, &s).unwrap();
        assert_eq!(betti_numbers(u.complex()), [1, 0, 2]);
        let ts = wedge(&t, &s).unwrap();
        assert!((ts.total_area() - t.total_area() - s.total_area()).abs() < 1e-12);
    }

    #[test]
    fn spec_round_trips_through_serde() {
        let spec = GeneratorSpec::Wedge {
            left: Box::new(GeneratorSpec::TorusGrid { m: 3, n: 3, lx: 1.0, ly: 1.0 }),
            right: Box::new(GeneratorSpec::Circle { n: 3, length: 1.0 }),
        };
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<GeneratorSpec>(&s).unwrap(), spec);
    }
}
