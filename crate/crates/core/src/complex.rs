//! Finite simplicial 2-complexes with a fixed global vertex order.
//!
//! Edges and triangles are stored with their vertices in increasing order and
//! the simplex lists themselves are kept sorted lexicographically, so simplex
//! lookups are binary searches and serialization is canonical.

use thiserror::Error;

/// Structural problems found while building a [`Complex2`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("vertex index {vertex} out of range (vertex count {count}) in simplex {simplex:?}")]
    VertexOutOfRange { simplex: Vec<usize>, vertex: usize, count: usize },
    #[error("degenerate simplex {0:?}: repeated vertex")]
    RepeatedVertex(Vec<usize>),
    #[error("duplicate simplex {0:?}")]
    DuplicateSimplex(Vec<usize>),
    #[error("missing face: triangle {triangle:?} needs edge {edge:?}")]
    MissingFace { triangle: [usize; 3], edge: [usize; 2] },
}

/// A finite simplicial complex of dimension at most two.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Complex2 {
    vertex_count: usize,
    edges: Vec<[usize; 2]>,
    triangles: Vec<[usize; 3]>,
    /// For triangle `[a, b, c]`: indices of edges `ab`, `bc`, `ac`.
    triangle_edges: Vec<[usize; 3]>,
}

/// Outcome of a successful [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationSummary {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub components: usize,
}

impl ValidationSummary {
    pub fn connected(&self) -> bool {
        self.components <= 1
    }
}

/// Checks every structural invariant and reports the first violation.
pub fn validate(
    vertex_count: usize,
    edges: &[[usize; 2]],
    triangles: &[[usize; 3]],
) -> Result<ValidationSummary, ComplexError> {
    let complex = Complex2::new(vertex_count, edges.to_vec(), triangles.to_vec())?;
    Ok(ValidationSummary {
        vertices: complex.vertex_count(),
        edges: complex.edge_count(),
        triangles: complex.triangle_count(),
        components: complex.component_count(),
    })
}

impl Complex2 {
    /// Builds a complex, normalizing the vertex order inside each simplex and
    /// sorting both simplex lists. Edge and triangle indices of the result
    /// refer to the sorted lists.
    pub fn new(
        vertex_count: usize,
        edges: Vec<[usize; 2]>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self, ComplexError> {
        let mut edges = edges
            .into_iter()
            .map(|e| check_simplex(e, vertex_count))
            .collect::<Result<Vec<_>, _>>()?;
        let mut triangles = triangles
            .into_iter()
            .map(|t| check_simplex(t, vertex_count))
            .collect::<Result<Vec<_>, _>>()?;

        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(ComplexError::DuplicateSimplex(w[0].to_vec()));
        }
        triangles.sort_unstable();
        if let Some(w) = triangles.windows(2).find(|w| w[0] == w[1]) {
            return Err(ComplexError::DuplicateSimplex(w[0].to_vec()));
        }

        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for &t @ [a, b, c] in &triangles {
            let mut ids = [0; 3];
            for (slot, e) in [[a, b], [b, c], [a, c]].into_iter().enumerate() {
                ids[slot] = edges
                    .binary_search(&e)
                    .map_err(|_| ComplexError::MissingFace { triangle: t, edge: e })?;
            }
            triangle_edges.push(ids);
        }

        Ok(Self { vertex_count, edges, triangles, triangle_edges })
    }

    /// Builds the complex spanned by `triangles` plus any extra edges
    /// (all faces of the triangles are added automatically).
    pub fn from_triangles(
        vertex_count: usize,
        triangles: Vec<[usize; 3]>,
        extra_edges: Vec<[usize; 2]>,
    ) -> Result<Self, ComplexError> {
        let mut edges = extra_edges;
        for t in &triangles {
            let [a, b, c] = sorted3(*t);
            edges.extend([[a, b], [b, c], [a, c]]);
        }
        for e in &mut edges {
            e.sort_unstable();
        }
        edges.sort_unstable();
        edges.dedup();
        Self::new(vertex_count, edges, triangles)
    }

    pub fn empty(vertex_count: usize) -> Self {
        Self { vertex_count, edges: vec![], triangles: vec![], triangle_edges: vec![] }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Number of simplices of dimension `k`.
    pub fn simplex_count(&self, k: usize) -> usize {
        match k {
            0 => self.vertex_count,
            1 => self.edges.len(),
            2 => self.triangles.len(),
            _ => 0,
        }
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edge(&self, e: usize) -> [usize; 2] {
        self.edges[e]
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    /// Edge indices of triangle `t` in the order `v0v1`, `v1v2`, `v0v2`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = if u < v { [u, v] } else { [v, u] };
        self.edges.binary_search(&key).ok()
    }

    pub fn triangle_index(&self, t: [usize; 3]) -> Option<usize> {
        self.triangles.binary_search(&sorted3(t)).ok()
    }

    /// V − E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Triangles incident to each edge.
    pub fn edge_triangles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.edges.len()];
        for (t, ids) in self.triangle_edges.iter().enumerate() {
            for &e in ids {
                out[e].push(t);
            }
        }
        out
    }

    /// Incident edges of each vertex as `(neighbor, edge)` pairs.
    pub fn vertex_edges(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.vertex_count];
        for (e, &[u, v]) in self.edges.iter().enumerate() {
            out[u].push((v, e));
            out[v].push((u, e));
        }
        out
    }

    /// Component label of every vertex (components of the 1-skeleton,
    /// numbered by smallest vertex).
    pub fn component_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertex_count);
        for &[u, v] in &self.edges {
            uf.union(u, v);
        }
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut next = 0;
        let mut out = vec![0; self.vertex_count];
        for v in 0..self.vertex_count {
            let r = uf.find(v);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out[v] = label[r];
        }
        out
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }
}

fn check_simplex<const N: usize>(s: [usize; N], count: usize) -> Result<[usize; N], ComplexError> {
    if let Some(&v) = s.iter().find(|&&v| v >= count) {
        return Err(ComplexError::VertexOutOfRange { simplex: s.to_vec(), vertex: v, count });
    }
    let mut sorted = s;
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(ComplexError::RepeatedVertex(s.to_vec()));
    }
    Ok(sorted)
}

pub(crate) fn sorted3(mut t: [usize; 3]) -> [usize; 3] {
    t.sort_unstable();
    t
}

/// Disjoint-set forest with path halving.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp2_triangles() -> Vec<[usize; 3]> {
        vec![
            [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
            [1, 2, 4], [2, 3, 5], [1, 3, 4], [2, 4, 5], [1, 3, 5],
        ]
    }

    #[test]
    fn rp2_is_valid_and_connected() {
        let c = Complex2::from_triangles(6, rp2_triangles(), vec![]).unwrap();
        let s = validate(6, c.edges(), c.triangles()).unwrap();
        assert_eq!((s.vertices, s.edges, s.triangles), (6, 15, 10));
        assert!(s.connected());
        // Hand count: every pair of the 6 vertices is an edge (K6).
        for u in 0..6 {
            for v in u + 1..6 {
                assert!(c.edge_index(u, v).is_some());
            }
        }
        assert_eq!(c.euler_characteristic(), 1);
    }

    #[test]
    fn missing_face_is_reported() {
        let err = validate(3, &[[0, 1], [1, 2]], &[[0, 1, 2]]).unwrap_err();
        assert_eq!(err, ComplexError::MissingFace { triangle: [0, 1, 2], edge: [0, 2] });
        assert!(err.to_string().contains("missing face"));
    }

    #[test]
    fn duplicate_triangle_is_reported() {
        let err = validate(3, &[[0, 1], [1, 2], [0, 2]], &[[0, 1, 2], [2, 1, 0]]).unwrap_err();
        assert_eq!(err, ComplexError::DuplicateSimplex(vec![0, 1, 2]));
        assert!(err.to_string().contains("duplicate simplex"));
    }

    #[test]
    fn out_of_range_and_repeated_vertices() {
        assert!(matches!(
            validate(2, &[[0, 2]], &[]),
            Err(ComplexError::VertexOutOfRange { vertex: 2, .. })
        ));
        assert!(matches!(validate(2, &[[1, 1]], &[]), Err(ComplexError::RepeatedVertex(_))));
    }

    #[test]
    fn euler_characteristic_examples() {
        let tri = Complex2::from_triangles(3, vec![[0, 1, 2]], vec![]).unwrap();
        assert_eq!(tri.euler_characteristic(), 1);
        assert_eq!(tri.triangle_edges(0), [0, 2, 1]);
        let empty = Complex2::empty(0);
        assert_eq!(empty.euler_characteristic(), 0);
    }

    #[test]
    fn components_of_disjoint_pieces() {
        let c = Complex2::new(5, vec![[0, 1], [3, 4]], vec![]).unwrap();
        assert_eq!(c.component_labels(), vec![0, 0, 1, 2, 2]);
        assert!(!c.is_connected());
    }
}
