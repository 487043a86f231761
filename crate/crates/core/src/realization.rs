//! Closed surfaces realizing Z₂ 2-cycles.
//!
//! One triangle copy per supported triangle; boundary edge copies over the
//! same target edge are paired and glued; surface vertices are the classes
//! of triangle corners connected through glued edges, so every link is a
//! single cycle. The quotient is a closed surface but, as a complex, may
//! have two edges with the same endpoints, so it is stored with explicit
//! edge ids.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{sorted3, Complex2, UnionFind};
use crate::metric::{MetricComplex, PLMetric};
use crate::z2::{is_cycle, AlgebraError, Z2Vector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizationError {
    #[error("not a cycle")]
    NotACycle,
    #[error("trivial class")]
    TrivialClass,
    #[error("not a closed surface: {0}")]
    NotASurface(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A triangulated closed surface with explicit edge identities. Corners of
/// each triangle are distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceComplex {
    pub vertex_count: usize,
    /// Endpoints, smaller index first.
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
    /// Edge ids of the sides `c0c1`, `c1c2`, `c0c2` of each triangle.
    pub triangle_edges: Vec<[usize; 3]>,
}

impl SurfaceComplex {
    pub fn from_complex2(c: &Complex2) -> Self {
        Self {
            vertex_count: c.vertex_count(),
            edges: c.edges().to_vec(),
            triangles: c.triangles().to_vec(),
            triangle_edges: (0..c.triangle_count()).map(|t| c.triangle_edges(t)).collect(),
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// True when no two edges share endpoints and no two triangles share
    /// corners.
    pub fn is_simplicial(&self) -> bool {
        let mut e = self.edges.clone();
        e.sort();
        let mut t: Vec<[usize; 3]> = self.triangles.iter().map(|&x| sorted3(x)).collect();
        t.sort();
        e.windows(2).all(|w| w[0] != w[1]) && t.windows(2).all(|w| w[0] != w[1])
    }

    pub fn to_complex2(&self) -> Option<Complex2> {
        if !self.is_simplicial() {
            return None;
        }
        let tris = self.triangles.iter().map(|&t| sorted3(t)).collect();
        Complex2::new(self.vertex_count, self.edges.clone(), tris).ok()
    }

    /// Side `s` of triangle `t` as a pair of corner positions.
    fn side_corners(s: usize) -> (usize, usize) {
        [(0, 1), (1, 2), (0, 2)][s]
    }

    /// Checks edge degree two and single-cycle vertex links.
    pub fn check_closed_surface(&self) -> Result<(), RealizationError> {
        let bad = |m: String| Err(RealizationError::NotASurface(m));
        let mut degree = vec![0usize; self.edges.len()];
        for (t, sides) in self.triangle_edges.iter().enumerate() {
            let tri = self.triangles[t];
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return bad(format!("triangle {t} has repeated corners"));
            }
            for (s, &e) in sides.iter().enumerate() {
                let (i, j) = Self::side_corners(s);
                let mut ends = [tri[i], tri[j]];
                ends.sort();
                if self.edges.get(e) != Some(&ends) {
                    return bad(format!("side {s} of triangle {t} does not match edge {e}"));
                }
                degree[e] += 1;
            }
        }
        if let Some(e) = degree.iter().position(|&d| d != 2) {
            return bad(format!("edge {e} lies in {} triangles", degree[e]));
        }
        // Link of p: nodes are edges at p, each corner at p joins two of them.
        let mut link: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.vertex_count];
        for (t, sides) in self.triangle_edges.iter().enumerate() {
            let tri = self.triangles[t];
            for c in 0..3 {
                let at: Vec<usize> = (0..3)
                    .filter(|&s| {
                        let (i, j) = Self::side_corners(s);
                        i == c || j == c
                    })
                    .map(|s| sides[s])
                    .collect();
                link[tri[c]].push((at[0], at[1]));
            }
        }
        for (p, arcs) in link.iter().enumerate() {
            if arcs.is_empty() {
                return bad(format!("vertex {p} is isolated"));
            }
            // Every arc contributes to two edge degrees; a single cycle
            // visits all arcs by walking from one.
            let mut adj: std::collections::HashMap<usize, Vec<usize>> = Default::default();
            for (k, &(a, b)) in arcs.iter().enumerate() {
                adj.entry(a).or_default().push(k);
                adj.entry(b).or_default().push(k);
            }
            if adj.values().any(|v| v.len() != 2) {
                return bad(format!("link of vertex {p} is not a union of cycles"));
            }
            let mut seen = vec![false; arcs.len()];
            let (mut k, mut node) = (0, arcs[0].1);
            let mut walked = 0;
            while !seen[k] {
                seen[k] = true;
                walked += 1;
                let next = adj[&node].iter().copied().find(|&x| x != k).unwrap_or(k);
                let (a, b) = arcs[next];
                node = if a == node { b } else { a };
                k = next;
            }
            if walked != arcs.len() {
                return bad(format!("link of vertex {p} has several cycles"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum SurfaceKind {
    Orientable { genus: u64 },
    NonOrientable { crosscaps: u64 },
}

impl SurfaceKind {
    pub fn name(&self) -> String {
        match *self {
            SurfaceKind::Orientable { genus: 0 } => "sphere".into(),
            SurfaceKind::Orientable { genus: 1 } => "torus".into(),
            SurfaceKind::Orientable { genus } => format!("orientable genus {genus}"),
            SurfaceKind::NonOrientable { crosscaps: 1 } => "projective plane".into(),
            SurfaceKind::NonOrientable { crosscaps: 2 } => "Klein bottle".into(),
            SurfaceKind::NonOrientable { crosscaps } => format!("non-orientable, {crosscaps} crosscaps"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceComponent {
    pub triangles: Vec<usize>,
    pub vertices: usize,
    pub edges: usize,
    pub euler_characteristic: i64,
    pub orientable: bool,
    pub kind: SurfaceKind,
}

/// Splits a closed surface into components and classifies each.
pub fn classify_surface(s: &SurfaceComplex) -> Result<Vec<SurfaceComponent>, RealizationError> {
    s.check_closed_surface()?;
    let m = s.triangles.len();
    let mut edge_sides: Vec<Vec<(usize, i8)>> = vec![Vec::new(); s.edges.len()];
    for (t, sides) in s.triangle_edges.iter().enumerate() {
        let tri = s.triangles[t];
        for (k, &e) in sides.iter().enumerate() {
            let (i, j) = SurfaceComplex::side_corners(k);
            // Boundary runs c0→c1, c1→c2, c2→c0.
            let (from, to) = if k == 2 { (tri[j], tri[i]) } else { (tri[i], tri[j]) };
            let along = if [from, to] == s.edges[e] { 1 } else { -1 };
            edge_sides[e].push((t, along));
        }
    }
    let mut comp = vec![usize::MAX; m];
    let mut sign = vec![0i8; m];
    let mut out = Vec::new();
    for start in 0..m {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut orientable = true;
        let mut stack = vec![start];
        comp[start] = id;
        sign[start] = 1;
        let mut members = Vec::new();
        while let Some(t) = stack.pop() {
            members.push(t);
            for &e in &s.triangle_edges[t] {
                let [(t1, a1), (t2, a2)] = [edge_sides[e][0], edge_sides[e][1]];
                let (me, other, other_along, my_along) = if t1 == t { (t1, t2, a2, a1) } else { (t2, t1, a1, a2) };
                // Neighbouring sides must induce opposite directions.
                let want = -sign[me] * my_along * other_along;
                if comp[other] == usize::MAX {
                    comp[other] = id;
                    sign[other] = want;
                    stack.push(other);
                } else if sign[other] != want {
                    orientable = false;
                }
            }
        }
        members.sort_unstable();
        let mut verts: Vec<usize> = members.iter().flat_map(|&t| s.triangles[t]).collect();
        verts.sort_unstable();
        verts.dedup();
        let mut edges: Vec<usize> = members.iter().flat_map(|&t| s.triangle_edges[t]).collect();
        edges.sort_unstable();
        edges.dedup();
        let chi = verts.len() as i64 - edges.len() as i64 + members.len() as i64;
        let kind = if orientable {
            SurfaceKind::Orientable { genus: ((2 - chi) / 2) as u64 }
        } else {
            SurfaceKind::NonOrientable { crosscaps: (2 - chi) as u64 }
        };
        out.push(SurfaceComponent {
            triangles: members,
            vertices: verts.len(),
            edges: edges.len(),
            euler_characteristic: chi,
            orientable,
            kind,
        });
    }
    Ok(out)
}

/// How boundary edge copies over the same target edge are paired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// Consecutive copies in construction order.
    #[default]
    Sequential,
    /// A uniformly shuffled order, reproducible from the seed.
    Seeded(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceRealization {
    pub surface: SurfaceComplex,
    pub vertex_map: Vec<usize>,
    pub edge_map: Vec<usize>,
    pub triangle_map: Vec<usize>,
    pub components: Vec<SurfaceComponent>,
}

pub fn realize_cycle(complex: &Complex2, z: &Z2Vector, pairing: Pairing) -> Result<SurfaceRealization, RealizationError> {
    if z.degree() != 2 {
        return Err(AlgebraError::DegreeMismatch { expected: 2, got: z.degree() }.into());
    }
    z.check_on(complex)?;
    if z.is_zero() {
        return Err(RealizationError::TrivialClass);
    }
    if !is_cycle(complex, z)? {
        return Err(RealizationError::NotACycle);
    }
    let support = z.support();
    let m = support.len();

    // Side copies grouped by target edge, in construction order.
    let mut by_edge: Vec<Vec<(usize, usize)>> = vec![Vec::new(); complex.edge_count()];
    for (k, &t) in support.iter().enumerate() {
        for (s, &e) in complex.triangle_edges(t).iter().enumerate() {
            by_edge[e].push((k, s));
        }
    }
    let mut rng = match pairing {
        Pairing::Sequential => None,
        Pairing::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let mut corners = UnionFind::new(3 * m);
    let mut side_edge = vec![[usize::MAX; 3]; m];
    let mut edge_map = Vec::new();
    for (e, copies) in by_edge.iter_mut().enumerate() {
        debug_assert!(copies.len() % 2 == 0);
        if let Some(rng) = rng.as_mut() {
            copies.shuffle(rng);
        }
        for pair in copies.chunks(2) {
            let id = edge_map.len();
            edge_map.push(e);
            for &(k, s) in pair {
                side_edge[k][s] = id;
            }
            let (i, j) = SurfaceComplex::side_corners(pair[0].1);
            let (i2, j2) = SurfaceComplex::side_corners(pair[1].1);
            corners.union(3 * pair[0].0 + i, 3 * pair[1].0 + i2);
            corners.union(3 * pair[0].0 + j, 3 * pair[1].0 + j2);
        }
    }
    // Number corner classes by first appearance.
    let mut class_of_root = std::collections::HashMap::new();
    let mut vertex_map = Vec::new();
    let mut triangles = Vec::with_capacity(m);
    for (k, &t) in support.iter().enumerate() {
        let img = complex.triangle(t);
        let mut tri = [0; 3];
        for i in 0..3 {
            let root = corners.find(3 * k + i);
            tri[i] = *class_of_root.entry(root).or_insert_with(|| {
                vertex_map.push(img[i]);
                vertex_map.len() - 1
            });
        }
        triangles.push(tri);
    }
    let mut edges = vec![[0usize; 2]; edge_map.len()];
    for (k, tri) in triangles.iter().enumerate() {
        for s in 0..3 {
            let (i, j) = SurfaceComplex::side_corners(s);
            let mut ends = [tri[i], tri[j]];
            ends.sort();
            edges[side_edge[k][s]] = ends;
        }
    }
    let surface = SurfaceComplex { vertex_count: vertex_map.len(), edges, triangles, triangle_edges: side_edge };
    let components = classify_surface(&surface)?;
    Ok(SurfaceRealization { surface, vertex_map, edge_map, triangle_map: support, components })
}

impl SurfaceRealization {
    /// Each surface edge gets the length of its image.
    pub fn pullback_metric(&self, metric: &PLMetric) -> PLMetric {
        PLMetric::new(self.edge_map.iter().map(|&e| metric.length(e)).collect())
    }

    /// Area of the surface under the pulled-back metric.
    pub fn surface_area(&self, mc: &MetricComplex) -> f64 {
        self.triangle_map.iter().map(|&t| mc.triangle_area(t)).sum()
    }

    /// Image of the fundamental class.
    pub fn pushforward_fundamental_class(&self, complex: &Complex2) -> Z2Vector {
        Z2Vector::from_support(complex, 2, self.triangle_map.iter().copied()).expect("indices in range")
    }

    /// `h*α` as one bit per surface edge.
    pub fn pullback_cochain(&self, alpha: &Z2Vector) -> Vec<bool> {
        self.edge_map.iter().map(|&e| alpha.get(e)).collect()
    }

    /// `⟨a ∪ b, [S]⟩` computed on the surface with its own vertex order.
    pub fn surface_cup_pairing(&self, a: &[bool], b: &[bool]) -> bool {
        let s = &self.surface;
        let mut acc = false;
        for (t, tri) in s.triangles.iter().enumerate() {
            let mut order = [0usize, 1, 2];
            order.sort_by_key(|&i| tri[i]);
            let side = |i: usize, j: usize| {
                let (i, j) = (i.min(j), i.max(j));
                let k = match (i, j) {
                    (0, 1) => 0,
                    (1, 2) => 1,
                    _ => 2,
                };
                s.triangle_edges[t][k]
            };
            acc ^= a[side(order[0], order[1])] && b[side(order[1], order[2])];
        }
        acc
    }

    /// Surface edge chain pushed forward to the target.
    pub fn pushforward_chain(&self, complex: &Complex2, edges: &[bool]) -> Z2Vector {
        let support = edges.iter().enumerate().filter(|(_, &b)| b).map(|(e, _)| self.edge_map[e]);
        Z2Vector::from_support(complex, 1, support).expect("indices in range")
    }

    /// Whether the map is injective on triangles and dimension-preserving.
    pub fn is_nondegenerate(&self, complex: &Complex2) -> bool {
        let mut seen = vec![false; complex.triangle_count()];
        for &t in &self.triangle_map {
            if std::mem::replace(&mut seen[t], true) {
                return false;
            }
        }
        let s = &self.surface;
        s.edges.iter().enumerate().all(|(e, &[p, q])| {
            let [u, v] = complex.edge(self.edge_map[e]);
            let (a, b) = (self.vertex_map[p], self.vertex_map[q]);
            (a, b) == (u, v) || (a, b) == (v, u)
        }) && s.triangles.iter().enumerate().all(|(k, tri)| {
            sorted3(tri.map(|p| self.vertex_map[p])) == complex.triangle(self.triangle_map[k])
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{disjoint_union, rp2_minimal, sphere, torus_grid, wedge};
    use crate::z2::{cohomology_basis, cup_product, evaluate};

    fn fundamental(c: &Complex2) -> Z2Vector {
        Z2Vector::from_support(c, 2, 0..c.triangle_count()).unwrap()
    }

    #[test]
    fn torus_realizes_itself() {
        let mc = torus_grid(4, 4, 1.0, 1.0).unwrap();
        let c = mc.complex();
        let r = realize_cycle(c, &fundamental(c), Pairing::Sequential).unwrap();
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.components[0].kind, SurfaceKind::Orientable { genus: 1 });
        assert_eq!(r.surface.triangles.len(), c.triangle_count());
        assert!((r.surface_area(&mc) - mc.total_area()).abs() < 1e-12);
        assert!(r.is_nondegenerate(c));
        assert_eq!(r.pushforward_fundamental_class(c), fundamental(c));
    }

    #[test]
    fn rp2_is_non_orientable() {
        let c = rp2_minimal().unwrap().complex().clone();
        let r = realize_cycle(&c, &fundamental(&c), Pairing::Sequential).unwrap();
        assert_eq!(r.components[0].kind, SurfaceKind::NonOrientable { crosscaps: 1 });
        assert_eq!(r.components[0].euler_characteristic, 1);
        assert!(r.surface.to_complex2().is_some());
    }

    #[test]
    fn two_spheres() {
        let s = sphere(1.0).unwrap();
        let u = disjoint_union(&s, &s).unwrap();
        let c = u.complex();
        let r = realize_cycle(c, &fundamental(c), Pairing::Sequential).unwrap();
        assert_eq!(r.components.len(), 2);
        assert!(r.components.iter().all(|k| k.euler_characteristic == 2 && k.kind.name() == "sphere"));
    }

    #[test]
    fn wedge_area_counts_only_the_torus() {
        let t = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let w = wedge(&t, &sphere(1.0).unwrap()).unwrap();
        let c = w.complex();
        // The torus triangles keep vertices 0..9.
        let z = Z2Vector::from_support(c, 2, (0..c.triangle_count()).filter(|&k| c.triangle(k).iter().all(|&v| v < 9))).unwrap();
        let r = realize_cycle(c, &z, Pairing::Sequential).unwrap();
        assert!((r.surface_area(&w) - 1.0).abs() < 1e-12);
        assert!(r.surface_area(&w) < w.total_area());
    }

    #[test]
    fn errors() {
        let c = torus_grid(3, 3, 1.0, 1.0).unwrap().complex().clone();
        assert_eq!(realize_cycle(&c, &Z2Vector::zero(&c, 2), Pairing::Sequential), Err(RealizationError::TrivialClass));
        let one = Z2Vector::from_support(&c, 2, [0]).unwrap();
        let err = realize_cycle(&c, &one, Pairing::Sequential).unwrap_err();
        assert_eq!(err.to_string(), "not a cycle");
    }

    #[test]
    fn naturality_on_torus() {
        let c = torus_grid(3, 4, 1.0, 1.0).unwrap().complex().clone();
        let z = fundamental(&c);
        let r = realize_cycle(&c, &z, Pairing::Seeded(7)).unwrap();
        let h1 = cohomology_basis(&c, 1).unwrap();
        for a in &h1.representatives {
            for b in &h1.representatives {
                let down = evaluate(&cup_product(&c, a, b).unwrap(), &z).unwrap();
                let up = r.surface_cup_pairing(&r.pullback_cochain(a), &r.pullback_cochain(b));
                assert_eq!(up, down);
            }
        }
    }

    #[test]
    fn classification_table() {
        let chi = |k: &SurfaceKind| match *k {
            SurfaceKind::Orientable { genus } => 2 - 2 * genus as i64,
            SurfaceKind::NonOrientable { crosscaps } => 2 - crosscaps as i64,
        };
        assert_eq!(SurfaceKind::NonOrientable { crosscaps: 2 }.name(), "Klein bottle");
        assert_eq!(chi(&SurfaceKind::Orientable { genus: 2 }), -2);
        assert_eq!(SurfaceKind::Orientable { genus: 0 }.name(), "sphere");
        let k = crate::generators::klein_grid(3, 3, 1.0, 1.0).unwrap();
        let comps = classify_surface(&SurfaceComplex::from_complex2(k.complex())).unwrap();
        assert_eq!(comps[0].kind, SurfaceKind::NonOrientable { crosscaps: 2 });
        let g2 = crate::generators::genus_g_polygon(2, 1.0).unwrap();
        let comps = classify_surface(&SurfaceComplex::from_complex2(g2.complex())).unwrap();
        assert_eq!(comps[0].kind, SurfaceKind::Orientable { genus: 2 });
    }
}
