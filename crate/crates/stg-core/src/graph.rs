//! Static graphs and weighted shortest paths.
//!
//! The static graph is the footprint every snapshot is drawn from: dense
//! vertex ids `0..n`, edge ids `0..m` in insertion order, no self-loops,
//! no duplicate edges. Weights enter only through `WeightedGraph`, where
//! an edge of appearance probability `p` costs `1/p` (its expected wait).

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use crate::error::{Error, Result};
use crate::prob::Prob;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Orientation {
    Undirected,
    Directed,
}

#[derive(Clone, Debug)]
pub struct StaticGraph {
    n: usize,
    orientation: Orientation,
    edges: Vec<(VertexId, VertexId)>,
    // Out-neighbors; for undirected graphs each edge appears in both lists.
    adj: Vec<Vec<(VertexId, EdgeId)>>,
    seen: HashSet<(VertexId, VertexId)>,
}

impl StaticGraph {
    pub fn new(n: usize, orientation: Orientation) -> StaticGraph {
        StaticGraph {
            n,
            orientation,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            seen: HashSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_directed(&self) -> bool {
        self.orientation == Orientation::Directed
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// Out-neighbors of `u` as `(vertex, edge id)` pairs.
    pub fn neighbors(&self, u: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[u]
    }

    fn key(&self, u: VertexId, v: VertexId) -> (VertexId, VertexId) {
        match self.orientation {
            Orientation::Undirected => (u.min(v), u.max(v)),
            Orientation::Directed => (u, v),
        }
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.seen.contains(&self.key(u, v))
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId> {
        if u >= self.n {
            return Err(Error::VertexOutOfRange(u, self.n));
        }
        if v >= self.n {
            return Err(Error::VertexOutOfRange(v, self.n));
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if !self.seen.insert(self.key(u, v)) {
            return Err(Error::DuplicateEdge(u, v));
        }
        let id = self.edges.len();
        self.edges.push((u, v));
        self.adj[u].push((v, id));
        if self.orientation == Orientation::Undirected {
            self.adj[v].push((u, id));
        }
        Ok(id)
    }
}

impl PartialEq for StaticGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.orientation == other.orientation && self.edges == other.edges
    }
}

/// Same footprint with expected-wait weights. Edges with `p = 0` can never
/// be crossed and are dropped here entirely.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    n: usize,
    adj: Vec<Vec<(VertexId, f64)>>,
}

impl WeightedGraph {
    pub fn from_probs(graph: &StaticGraph, probs: &[Prob]) -> WeightedGraph {
        assert_eq!(graph.m(), probs.len(), "one probability per edge");
        let mut adj = vec![Vec::new(); graph.n()];
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            if probs[e].is_zero() {
                continue;
            }
            let w = 1.0 / probs[e].to_f64();
            adj[u].push((v, w));
            if !graph.is_directed() {
                adj[v].push((u, w));
            }
        }
        WeightedGraph { n: graph.n(), adj }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapState {
    cost: f64,
    node: VertexId,
}

impl Eq for HeapState {}

impl Ord for HeapState {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reverse ordering for a min-heap; ties broken toward the lower id
        // so the scan order is deterministic.
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `s`; `dist[v]` is infinite when `v` is unreachable.
pub fn min_weight_dists(g: &WeightedGraph, s: VertexId) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(HeapState { cost: 0.0, node: s });
    while let Some(HeapState { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        for &(v, w) in &g.adj[node] {
            let next = cost + w;
            if next < dist[v] {
                dist[v] = next;
                heap.push(HeapState { cost: next, node: v });
            }
        }
    }
    dist
}

/// Minimum total expected-wait weight of an `s`-`y` path.
pub fn min_weight_path(g: &WeightedGraph, s: VertexId, y: VertexId) -> Result<f64> {
    if s >= g.n {
        return Err(Error::VertexOutOfRange(s, g.n));
    }
    if y >= g.n {
        return Err(Error::VertexOutOfRange(y, g.n));
    }
    let d = min_weight_dists(g, s)[y];
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::NoPath { from: s, to: y })
    }
}

/// Vertices reachable from `s` along (forward) edges.
pub fn reachable_from(g: &StaticGraph, s: VertexId) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    seen[s] = true;
    let mut queue = vec![s];
    while let Some(u) = queue.pop() {
        for &(v, _) in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push(v);
            }
        }
    }
    seen
}

/// Lowest-id vertex with no path to `y` (edges traversed backwards for
/// directed graphs), or `None` when every vertex reaches `y`.
pub fn unreachable_to(g: &StaticGraph, y: VertexId) -> Option<VertexId> {
    let mut seen = vec![false; g.n()];
    seen[y] = true;
    let mut queue = vec![y];
    while let Some(v) = queue.pop() {
        for &(a, b) in g.edges() {
            let from = if b == v {
                Some(a)
            } else if a == v && !g.is_directed() {
                Some(b)
            } else {
                None
            };
            if let Some(u) = from {
                if !seen[u] {
                    seen[u] = true;
                    queue.push(u);
                }
            }
        }
    }
    seen.iter().position(|s| !s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Prob {
        Prob::parse(s).unwrap()
    }

    #[test]
    fn rejects_self_loops_duplicates_and_range() {
        let mut g = StaticGraph::new(3, Orientation::Undirected);
        g.add_edge(0, 1).unwrap();
        assert!(matches!(g.add_edge(0, 0), Err(Error::SelfLoop(0))));
        assert!(matches!(g.add_edge(1, 0), Err(Error::DuplicateEdge(1, 0))));
        assert!(matches!(g.add_edge(0, 3), Err(Error::VertexOutOfRange(3, 3))));

        // Directed graphs treat (u, v) and (v, u) as distinct.
        let mut d = StaticGraph::new(2, Orientation::Directed);
        d.add_edge(0, 1).unwrap();
        d.add_edge(1, 0).unwrap();
        assert!(d.add_edge(0, 1).is_err());
    }

    #[test]
    fn path_weight_is_sum_of_expected_waits() {
        // Two-edge path with p = 1/2, 1/3: weight 2 + 3 = 5.
        let mut g = StaticGraph::new(3, Orientation::Undirected);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        let wg = WeightedGraph::from_probs(&g, &[p("1/2"), p("1/3")]);
        assert_eq!(min_weight_path(&wg, 0, 2).unwrap(), 5.0);
    }

    #[test]
    fn source_equals_target_costs_nothing() {
        let mut g = StaticGraph::new(2, Orientation::Undirected);
        g.add_edge(0, 1).unwrap();
        let wg = WeightedGraph::from_probs(&g, &[p("1/2")]);
        assert_eq!(min_weight_path(&wg, 1, 1).unwrap(), 0.0);
    }

    #[test]
    fn four_cycle_opposite_corners() {
        // C4 a-b-c-d, all p = 1/2: a to c costs two hops of weight 2.
        let mut g = StaticGraph::new(4, Orientation::Undirected);
        g.add_edge(0, 1).unwrap();
        g.add_edge(1, 2).unwrap();
        g.add_edge(2, 3).unwrap();
        g.add_edge(3, 0).unwrap();
        let wg = WeightedGraph::from_probs(&g, &[p("1/2"); 4]);
        assert_eq!(min_weight_path(&wg, 0, 2).unwrap(), 4.0);
    }

    #[test]
    fn zero_probability_edges_are_excluded() {
        let mut g = StaticGraph::new(2, Orientation::Undirected);
        g.add_edge(0, 1).unwrap();
        let wg = WeightedGraph::from_probs(&g, &[Prob::zero()]);
        assert!(matches!(min_weight_path(&wg, 0, 1), Err(Error::NoPath { .. })));
    }

    #[test]
    fn directed_edges_only_go_one_way() {
        let mut g = StaticGraph::new(2, Orientation::Directed);
        g.add_edge(0, 1).unwrap();
        let wg = WeightedGraph::from_probs(&g, &[p("1/2")]);
        assert_eq!(min_weight_path(&wg, 0, 1).unwrap(), 2.0);
        assert!(min_weight_path(&wg, 1, 0).is_err());
    }

    #[test]
    fn dijkstra_matches_exhaustive_path_enumeration() {
        // Random small graphs; compare against brute-force over all simple paths.
        use crate::rng::CounterRng;
        let mut rng = CounterRng::new(31);
        for _ in 0..40 {
            let n = 2 + rng.next_below(5) as usize;
            let mut g = StaticGraph::new(n, Orientation::Undirected);
            let mut probs = Vec::new();
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.bernoulli(0.6) {
                        g.add_edge(u, v).unwrap();
                        probs.push(Prob::new(1 + rng.next_below(4) as i64, 4).unwrap());
                    }
                }
            }
            let wg = WeightedGraph::from_probs(&g, &probs);
            let s = rng.next_below(n as u64) as usize;
            let y = rng.next_below(n as u64) as usize;

            // DFS over simple paths.
            fn best(g: &StaticGraph, probs: &[Prob], cur: usize, y: usize, seen: &mut Vec<bool>) -> f64 {
                if cur == y {
                    return 0.0;
                }
                let mut b = f64::INFINITY;
                for &(v, e) in g.neighbors(cur) {
                    if !seen[v] && !probs[e].is_zero() {
                        seen[v] = true;
                        b = b.min(1.0 / probs[e].to_f64() + best(g, probs, v, y, seen));
                        seen[v] = false;
                    }
                }
                b
            }
            let mut seen = vec![false; n];
            seen[s] = true;
            let brute = best(&g, &probs, s, y, &mut seen);
            match min_weight_path(&wg, s, y) {
                Ok(d) => assert!((d - brute).abs() < 1e-9, "{d} vs {brute}"),
                Err(_) => assert!(brute.is_infinite()),
            }
        }
    }
}
