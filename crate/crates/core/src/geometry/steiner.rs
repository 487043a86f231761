//! Path graph used for lengths and distances at refinement level `k`.
//!
//! Every root edge carries `2^k - 1` interior points (exactly the refined
//! vertices lying on it). Points on the boundary of a root triangle that do
//! not share a root edge are joined by straight chords through the flat
//! triangle. Every path in this graph is a rectifiable path in the complex,
//! so graph distances are upper bounds for true distances, they decrease
//! with `k`, and at `k = 0` the graph is the weighted 1-skeleton.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use crate::complex::Complex2;
use crate::exec;
use crate::metric::MetricComplex;
use crate::z2::Z2Vector;

use super::subdivide::RootPoint;

#[derive(Debug, Clone, Copy, PartialEq)]
enum LinkKind {
    /// Piece `index` (counted from the lower endpoint) of a root edge.
    Segment { edge: u32, index: u32 },
    /// Chord through a root triangle. Slots name the triangle corner whose
    /// sheet offset applies to each end.
    Chord { triangle: u32, slots: [u8; 2] },
}

#[derive(Debug, Clone, Copy)]
struct Link {
    length: f64,
    kind: LinkKind,
}

#[derive(Debug, Clone)]
pub struct SteinerGraph {
    level: u32,
    segments: usize,
    vertex_count: usize,
    links: Vec<Link>,
    offsets: Vec<usize>,
    adjacency: Vec<(u32, u32)>,
}

/// A closed walk in the complex that pairs oddly with a cocycle.
#[derive(Debug, Clone, PartialEq)]
pub struct OddCycle {
    pub length: f64,
    /// Graph nodes along the walk; first and last coincide.
    pub nodes: Vec<usize>,
}

impl SteinerGraph {
    pub fn new(mc: &MetricComplex, level: u32) -> Self {
        let c = mc.complex();
        let n = 1usize << level;
        let nv = c.vertex_count();
        let inner = n - 1;
        let node_count = nv + c.edge_count() * inner;
        let edge_node = |e: usize, j: usize| -> usize {
            if j == 0 {
                c.edge(e)[0]
            } else if j == n {
                c.edge(e)[1]
            } else {
                nv + e * inner + (j - 1)
            }
        };

        let mut ends: Vec<(u32, u32)> = Vec::new();
        let mut links: Vec<Link> = Vec::new();
        for e in 0..c.edge_count() {
            let l = mc.length(e) / n as f64;
            for j in 0..n {
                ends.push((edge_node(e, j) as u32, edge_node(e, j + 1) as u32));
                links.push(Link { length: l, kind: LinkKind::Segment { edge: e as u32, index: j as u32 } });
            }
        }
        if n > 1 {
            // (node, chart position, bitmask of root sides, sheet slot)
            let mut pts: Vec<(usize, [f64; 2], u8, u8)> = Vec::with_capacity(3 * n);
            for t in 0..c.triangle_count() {
                let chart = mc.triangle_chart(t);
                let tri_edges = c.triangle_edges(t);
                pts.clear();
                pts.push((c.triangle(t)[0], chart[0], 0b101, 0));
                pts.push((c.triangle(t)[1], chart[1], 0b011, 1));
                pts.push((c.triangle(t)[2], chart[2], 0b110, 2));
                // Sides in triangle_edges order: v0v1, v1v2, v0v2.
                for (side, (from, to)) in [(0usize, 1usize), (1, 2), (0, 2)].into_iter().enumerate() {
                    let (p, q) = (chart[from], chart[to]);
                    for j in 1..n {
                        let s = j as f64 / n as f64;
                        let pos = [p[0] + (q[0] - p[0]) * s, p[1] + (q[1] - p[1]) * s];
                        pts.push((edge_node(tri_edges[side], j), pos, 1 << side, to as u8));
                    }
                }
                for i in 0..pts.len() {
                    for k in i + 1..pts.len() {
                        let (a, pa, ma, sa) = pts[i];
                        let (b, pb, mb, sb) = pts[k];
                        if ma & mb != 0 {
                            continue;
                        }
                        ends.push((a as u32, b as u32));
                        links.push(Link {
                            length: (pa[0] - pb[0]).hypot(pa[1] - pb[1]),
                            kind: LinkKind::Chord { triangle: t as u32, slots: [sa, sb] },
                        });
                    }
                }
            }
        }

        let mut degree = vec![0usize; node_count + 1];
        for &(a, b) in &ends {
            degree[a as usize + 1] += 1;
            degree[b as usize + 1] += 1;
        }
        for i in 0..node_count {
            degree[i + 1] += degree[i];
        }
        let offsets = degree;
        let mut fill = offsets.clone();
        let mut adjacency = vec![(0u32, 0u32); 2 * ends.len()];
        for (l, &(a, b)) in ends.iter().enumerate() {
            adjacency[fill[a as usize]] = (b, l as u32);
            fill[a as usize] += 1;
            adjacency[fill[b as usize]] = (a, l as u32);
            fill[b as usize] += 1;
        }
        Self { level, segments: n, vertex_count: nv, links, offsets, adjacency }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of pieces each root edge is cut into.
    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    fn neighbors(&self, node: usize) -> &[(u32, u32)] {
        &self.adjacency[self.offsets[node]..self.offsets[node + 1]]
    }

    /// Where a node sits in the root complex.
    pub fn location(&self, node: usize) -> RootPoint {
        if node < self.vertex_count {
            return RootPoint::Vertex(node);
        }
        let inner = self.segments - 1;
        let k = node - self.vertex_count;
        RootPoint::Edge { edge: k / inner, t: (k % inner + 1) as f64 / self.segments as f64 }
    }

    /// Node at a root vertex or a dyadic edge point of this level.
    pub fn node_at(&self, root: &Complex2, p: RootPoint) -> Option<usize> {
        match p {
            RootPoint::Vertex(v) => (v < self.vertex_count).then_some(v),
            RootPoint::Edge { edge, t } => {
                let j = t * self.segments as f64;
                if j.fract() != 0.0 || j <= 0.0 || j >= self.segments as f64 || edge >= root.edge_count() {
                    return None;
                }
                Some(self.vertex_count + edge * (self.segments - 1) + (j as usize - 1))
            }
            RootPoint::Triangle { .. } => None,
        }
    }

    /// Single-source shortest path distances; unreachable nodes are
    /// infinite.
    pub fn distances(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.node_count()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Item(0.0, source));
        while let Some(Item(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(w, l) in self.neighbors(u) {
                let nd = d + self.links[l as usize].length;
                if nd < dist[w as usize] {
                    dist[w as usize] = nd;
                    heap.push(Item(nd, w as usize));
                }
            }
        }
        dist
    }

    /// Sheet change of every link in the double cover defined by the root
    /// 1-cocycle `alpha`.
    pub fn parities(&self, root: &Complex2, alpha: &Z2Vector) -> Vec<bool> {
        self.links
            .iter()
            .map(|link| match link.kind {
                LinkKind::Segment { edge, index } => index == 0 && alpha.get(edge as usize),
                LinkKind::Chord { triangle, slots } => {
                    let [e01, _, e02] = root.triangle_edges(triangle as usize);
                    let phi = [false, alpha.get(e01), alpha.get(e02)];
                    phi[slots[0] as usize] ^ phi[slots[1] as usize]
                }
            })
            .collect()
    }

    /// Sum of link lengths along a node walk.
    pub fn walk_length(&self, nodes: &[usize]) -> Option<f64> {
        let mut total = 0.0;
        for w in nodes.windows(2) {
            let best = self
                .neighbors(w[0])
                .iter()
                .filter(|(x, _)| *x as usize == w[1])
                .map(|&(_, l)| self.links[l as usize].length)
                .fold(f64::INFINITY, f64::min);
            if !best.is_finite() {
                return None;
            }
            total += best;
        }
        Some(total)
    }

    /// Shortest closed walk with odd total parity, if one of length at most
    /// `bound` exists.
    pub fn shortest_odd_cycle(&self, parity: &[bool], bound: f64) -> Option<OddCycle> {
        assert_eq!(parity.len(), self.links.len(), "parity length mismatch");
        let sources = self.odd_cover(parity);
        let shared = SharedBound::new(bound);
        let found = exec::map_slice(&sources, |&s| self.search_from(parity, s, &shared));
        let mut best: Option<OddCycle> = None;
        for cyc in found.into_iter().flatten() {
            if best.as_ref().is_none_or(|b| cyc.length < b.length) {
                best = Some(cyc);
            }
        }
        best
    }

    /// Greedy vertex cover of the odd links. Every odd closed walk passes
    /// through one of these nodes.
    fn odd_cover(&self, parity: &[bool]) -> Vec<usize> {
        let n = self.node_count();
        let mut odd_degree = vec![0usize; n];
        for u in 0..n {
            odd_degree[u] = self.neighbors(u).iter().filter(|(_, l)| parity[*l as usize]).count();
        }
        let mut chosen = vec![false; n];
        for u in 0..n {
            for &(w, l) in self.neighbors(u) {
                let w = w as usize;
                if w < u || !parity[l as usize] || chosen[u] || chosen[w] {
                    continue;
                }
                let pick = if odd_degree[w] > odd_degree[u] { w } else { u };
                chosen[pick] = true;
            }
        }
        (0..n).filter(|&u| chosen[u]).collect()
    }

    /// Bidirectional search on the implicit double cover: states are
    /// `2 * node + sheet`. A candidate closes when a settled state has a
    /// neighbour whose deck twin is settled too.
    fn search_from(&self, parity: &[bool], src: usize, bound: &SharedBound) -> Option<OddCycle> {
        let states = 2 * self.node_count();
        let mut dist = vec![f64::INFINITY; states];
        let mut pred = vec![(u32::MAX, u32::MAX); states];
        let mut done = vec![false; states];
        let mut heap = BinaryHeap::new();
        let s0 = 2 * src;
        dist[s0] = 0.0;
        heap.push(Item(0.0, s0));
        // (length, state, link, twin)
        let mut best: Option<(f64, usize, u32, usize)> = None;
        while let Some(Item(d, s)) = heap.pop() {
            if done[s] || d > dist[s] {
                continue;
            }
            let limit = best.map_or(f64::INFINITY, |b| b.0).min(bound.get());
            if d > 0.5 * limit {
                break;
            }
            done[s] = true;
            let (node, sheet) = (s / 2, s % 2);
            for &(w, l) in self.neighbors(node) {
                let st = 2 * w as usize + (sheet ^ parity[l as usize] as usize);
                let nd = d + self.links[l as usize].length;
                let tw = st ^ 1;
                if done[tw] {
                    let cand = nd + dist[tw];
                    if cand <= bound.get() && best.is_none_or(|b| cand < b.0) {
                        best = Some((cand, s, l, tw));
                    }
                }
                if nd < dist[st] {
                    dist[st] = nd;
                    pred[st] = (s as u32, l);
                    heap.push(Item(nd, st));
                }
            }
        }
        let (length, s, _, tw) = best?;
        bound.lower(length);
        let trace = |mut x: usize| {
            let mut out = vec![x / 2];
            while x != s0 {
                x = pred[x].0 as usize;
                out.push(x / 2);
            }
            out.reverse();
            out
        };
        let mut nodes = trace(s);
        let mut back = trace(tw);
        back.reverse();
        nodes.extend(back);
        Some(OddCycle { length, nodes })
    }
}

/// Upper bound shared between concurrent searches. Bit patterns of
/// non-negative floats order like the floats themselves.
struct SharedBound(AtomicU64);

impl SharedBound {
    fn new(v: f64) -> Self {
        Self(AtomicU64::new(v.to_bits()))
    }

    fn get(&self) -> f64 {
        f64::from_bits(self.0.load(AtomicOrdering::Relaxed))
    }

    fn lower(&self, v: f64) {
        self.0.fetch_min(v.to_bits(), AtomicOrdering::Relaxed);
    }
}

/// Min-heap entry ordered by distance, then index.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circle, rp2_minimal, torus_grid};
    use crate::z2::cohomology_basis;

    #[test]
    fn level_zero_is_the_one_skeleton() {
        let mc = rp2_minimal().unwrap();
        let g = SteinerGraph::new(&mc, 0);
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.link_count(), 15);
    }

    #[test]
    fn chord_counts() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let g = SteinerGraph::new(&mc, 1);
        // Per triangle: three midpoints pairwise (3) plus each midpoint to
        // the opposite corner (3).
        assert_eq!(g.link_count(), 2 * 27 + 6 * 18);
        assert_eq!(g.node_count(), 9 + 27);
    }

    #[test]
    fn circle_cycle() {
        let mc = circle(5, 2.0).unwrap();
        let g = SteinerGraph::new(&mc, 0);
        let a = &cohomology_basis(mc.complex(), 1).unwrap().representatives[0];
        let cyc = g.shortest_odd_cycle(&g.parities(mc.complex(), a), f64::INFINITY).unwrap();
        assert!((cyc.length - 2.0).abs() < 1e-12);
        assert_eq!(cyc.nodes.len(), 6);
        assert_eq!(cyc.nodes.first(), cyc.nodes.last());
        assert!((g.walk_length(&cyc.nodes).unwrap() - cyc.length).abs() < 1e-12);
    }

    #[test]
    fn bound_prunes() {
        let mc = circle(4, 1.0).unwrap();
        let g = SteinerGraph::new(&mc, 0);
        let a = &cohomology_basis(mc.complex(), 1).unwrap().representatives[0];
        assert!(g.shortest_odd_cycle(&g.parities(mc.complex(), a), 0.5).is_none());
    }

    #[test]
    fn locations_round_trip() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let g = SteinerGraph::new(&mc, 2);
        for node in 0..g.node_count() {
            assert_eq!(g.node_at(mc.complex(), g.location(node)), Some(node));
        }
    }
}
