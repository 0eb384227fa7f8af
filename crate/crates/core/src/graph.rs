//! Shortest-path machinery over the branch graph.
//!
//! Topology metrics treat the network as a simple graph: parallel branches
//! collapse into one edge that keeps the smallest weight, and out-of-service
//! branches are ignored.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::grid::GridCase;

/// Relative tolerance used to decide that two path lengths are equal.
const PATH_TIE_TOLERANCE: f64 = 1e-12;

/// Undirected simple graph with positive edge weights.
#[derive(Debug, Clone)]
pub struct SimpleGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    edge_count: usize,
}

impl SimpleGraph {
    /// Builds a graph from `(u, v, weight)` triples. Self loops are dropped
    /// and parallel edges keep the minimum weight.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); node_count];
        let mut edge_count = 0;
        for (u, v, w) in edges {
            if u == v {
                continue;
            }
            match adjacency[u].iter_mut().find(|(n, _)| *n == v) {
                Some(entry) => {
                    if w < entry.1 {
                        entry.1 = w;
                        if let Some(back) = adjacency[v].iter_mut().find(|(n, _)| *n == u) {
                            back.1 = w;
                        }
                    }
                }
                None => {
                    adjacency[u].push((v, w));
                    adjacency[v].push((u, w));
                    edge_count += 1;
                }
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|(n, _)| *n);
        }
        Self {
            adjacency,
            edge_count,
        }
    }

    /// In-service branch graph of a case with unit weights.
    pub fn unweighted(case: &GridCase) -> Self {
        Self::from_edges(
            case.bus_count(),
            case.in_service_branches().map(|(_, b)| (b.from, b.to, 1.0)),
        )
    }

    /// In-service branch graph of a case weighted by reactance divided by
    /// `scale`.
    pub fn reactance_weighted(case: &GridCase, scale: f64) -> Self {
        Self::from_edges(
            case.bus_count(),
            case.in_service_branches()
                .map(|(_, b)| (b.from, b.to, b.reactance / scale)),
        )
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.adjacency[node]
    }

    /// Single-source shortest paths with path counting (Dijkstra variant
    /// used by Brandes' algorithm).
    pub fn shortest_paths(&self, source: usize) -> ShortestPaths {
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut sigma = vec![0.0; n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut settled = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut heap = BinaryHeap::new();

        dist[source] = 0.0;
        sigma[source] = 1.0;
        heap.push(HeapEntry {
            dist: 0.0,
            node: source,
        });

        while let Some(HeapEntry { dist: d, node: v }) = heap.pop() {
            if settled[v] || d > dist[v] {
                continue;
            }
            settled[v] = true;
            order.push(v);
            for &(w, weight) in &self.adjacency[v] {
                if settled[w] {
                    continue;
                }
                let alt = dist[v] + weight;
                let tol = PATH_TIE_TOLERANCE * alt.max(1.0);
                if alt < dist[w] - tol {
                    dist[w] = alt;
                    sigma[w] = sigma[v];
                    preds[w].clear();
                    preds[w].push(v);
                    heap.push(HeapEntry { dist: alt, node: w });
                } else if (alt - dist[w]).abs() <= tol {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }

        ShortestPaths {
            dist,
            sigma,
            preds,
            order,
        }
    }

    /// Per-node betweenness over unordered node pairs, endpoints excluded,
    /// with fractional credit when several shortest paths exist.
    pub fn betweenness(&self) -> Vec<f64> {
        let n = self.node_count();
        let mut centrality = vec![0.0; n];
        for s in 0..n {
            let sp = self.shortest_paths(s);
            let mut delta = vec![0.0; n];
            for &w in sp.order.iter().rev() {
                for &v in &sp.preds[w] {
                    delta[v] += sp.sigma[v] / sp.sigma[w] * (1.0 + delta[w]);
                }
                if w != s {
                    centrality[w] += delta[w];
                }
            }
        }
        // each unordered pair was visited from both ends
        centrality.iter_mut().for_each(|c| *c /= 2.0);
        centrality
    }

    /// Shortest-path distances between every ordered pair; unreachable pairs
    /// are `INFINITY`.
    pub fn all_pairs_distances(&self) -> Vec<Vec<f64>> {
        (0..self.node_count())
            .map(|s| self.shortest_paths(s).dist)
            .collect()
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        components(
            self.node_count(),
            self.adjacency
                .iter()
                .enumerate()
                .flat_map(|(u, list)| list.iter().map(move |&(v, _)| (u, v))),
        )
    }
}

#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    /// Number of shortest paths from the source.
    pub sigma: Vec<f64>,
    pub preds: Vec<Vec<usize>>,
    /// Nodes in the order they were settled (non-decreasing distance).
    pub order: Vec<usize>,
}

#[derive(Debug, PartialEq)]
struct HeapEntry {
    dist: f64,
    node: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Connected components of an undirected graph given as an edge list.
/// Components are sorted internally and ordered by their smallest node.
pub fn components<I>(node_count: usize, edges: I) -> Vec<Vec<usize>>
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut dsu = DisjointSet::new(node_count);
    for (u, v) in edges {
        dsu.union(u, v);
    }
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); node_count];
    for v in 0..node_count {
        let r = dsu.find(v);
        by_root[r].push(v);
    }
    let mut out: Vec<Vec<usize>> = by_root.into_iter().filter(|c| !c.is_empty()).collect();
    out.sort_by_key(|c| c[0]);
    out
}

#[derive(Debug, Clone)]
pub(crate) struct DisjointSet {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSet {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns `true` when the two nodes were in different sets.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}
