//! Shortest paths on the weighted 1-skeleton.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::metric::MetricComplex;

use super::GeometryError;

/// Dijkstra from `source`; vertices in other components get `f64::INFINITY`.
pub fn shortest_distances(mc: &MetricComplex, source: usize) -> Result<Vec<f64>, GeometryError> {
    let c = mc.complex();
    let n = c.vertex_count();
    if source >= n {
        return Err(GeometryError::VertexOutOfRange { vertex: source, count: n });
    }
    let adj = c.vertex_edges();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    // Lengths are positive, so their bit patterns order like the values.
    heap.push(Reverse((0f64.to_bits(), source)));
    while let Some(Reverse((bits, u))) = heap.pop() {
        let d = f64::from_bits(bits);
        if d > dist[u] {
            continue;
        }
        for &(w, e) in &adj[u] {
            let nd = d + mc.length(e);
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Reverse((nd.to_bits(), w)));
            }
        }
    }
    Ok(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex2;
    use crate::metric::PLMetric;

    #[test]
    fn path_graph() {
        let c = Complex2::new(4, vec![[0, 1], [1, 2], [2, 3]], vec![]).unwrap();
        let mc = MetricComplex::new(c.clone(), PLMetric::uniform(&c, 1.0)).unwrap();
        assert_eq!(shortest_distances(&mc, 0).unwrap(), vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn direct_edge_wins() {
        let c = Complex2::from_triangles(3, vec![[0, 1, 2]], vec![]).unwrap();
        // Edges (0,1), (0,2), (1,2) with lengths 3, 5, 4.
        let mc = MetricComplex::new(c.clone(), PLMetric::new(vec![3.0, 5.0, 4.0])).unwrap();
        assert_eq!(shortest_distances(&mc, 0).unwrap()[2], 5.0);
    }

    #[test]
    fn unreachable_is_infinite() {
        let c = Complex2::new(3, vec![[0, 1]], vec![]).unwrap();
        let mc = MetricComplex::new(c.clone(), PLMetric::uniform(&c, 2.0)).unwrap();
        let d = shortest_distances(&mc, 0).unwrap();
        assert_eq!(d[1], 2.0);
        assert!(d[2].is_infinite());
        assert!(shortest_distances(&mc, 7).is_err());
    }
}
