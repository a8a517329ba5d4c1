//! Dijkstra shortest paths over a [`LengthGraph`] with per-edge weights.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::table::DistanceTable;
use super::LengthGraph;

const NO_PRED: usize = usize::MAX;

#[derive(Clone, Copy)]
struct Entry {
    dist: f64,
    vertex: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    // min-heap on (dist, vertex)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// A single-source (or multi-seed) shortest-path tree.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    pred: Vec<usize>,
}

impl ShortestPaths {
    /// Vertex sequence from the seed that reaches `target`, ending at `target`.
    pub fn path_to(&self, target: usize) -> Vec<usize> {
        let mut path = vec![target];
        let mut v = target;
        while self.pred[v] != NO_PRED {
            v = self.pred[v];
            path.push(v);
        }
        path.reverse();
        path
    }

    pub fn predecessor(&self, v: usize) -> Option<usize> {
        (self.pred[v] != NO_PRED).then_some(self.pred[v])
    }
}

/// Dijkstra from weighted seeds. `weights` is indexed like the graph's CSR slots.
///
/// Ties between equal-length paths go to the lowest predecessor index.
pub fn dijkstra(graph: &LengthGraph, weights: &[f64], seeds: &[(usize, f64)]) -> ShortestPaths {
    let n = graph.num_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NO_PRED; n];
    let mut heap = BinaryHeap::with_capacity(n);
    for &(s, d0) in seeds {
        if d0 < dist[s] {
            dist[s] = d0;
            heap.push(Entry { dist: d0, vertex: s });
        }
    }
    let mut done = vec![false; n];
    while let Some(Entry { dist: d, vertex: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        for slot in graph.slots(u) {
            let v = graph.target(slot);
            if done[v] {
                continue;
            }
            let nd = d + weights[slot];
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = u;
                heap.push(Entry { dist: nd, vertex: v });
            } else if nd == dist[v] && u < pred[v] {
                pred[v] = u;
            }
        }
    }
    ShortestPaths { dist, pred }
}

/// Settle vertices in order of distance from `source` until `stop(v, d)` holds
/// for a settled `v` or the graph is exhausted. Returns settled `(vertex, distance)`.
fn settle_until(
    graph: &LengthGraph,
    weights: &[f64],
    source: usize,
    mut stop: impl FnMut(usize, f64) -> bool,
) -> Vec<(usize, f64)> {
    let n = graph.num_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut settled = Vec::new();
    dist[source] = 0.0;
    heap.push(Entry { dist: 0.0, vertex: source });
    while let Some(Entry { dist: d, vertex: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        settled.push((u, d));
        if stop(u, d) {
            break;
        }
        for slot in graph.slots(u) {
            let v = graph.target(slot);
            let nd = d + weights[slot];
            if !done[v] && nd < dist[v] {
                dist[v] = nd;
                heap.push(Entry { dist: nd, vertex: v });
            }
        }
    }
    settled
}

struct CacheInner {
    map: HashMap<usize, Arc<ShortestPaths>>,
    order: VecDeque<usize>,
}

/// Bounded FIFO cache of shortest-path trees keyed by source vertex.
struct SourceCache {
    inner: Mutex<CacheInner>,
    capacity: usize,
}

impl SourceCache {
    fn new(capacity: usize) -> Self {
        Self {
            inner: Mutex::new(CacheInner {
                map: HashMap::new(),
                order: VecDeque::new(),
            }),
            capacity,
        }
    }

    fn get_or_insert_with(&self, key: usize, f: impl FnOnce() -> ShortestPaths) -> Arc<ShortestPaths> {
        if let Some(hit) = self.inner.lock().unwrap().map.get(&key) {
            return hit.clone();
        }
        let value = Arc::new(f());
        let mut inner = self.inner.lock().unwrap();
        if !inner.map.contains_key(&key) {
            if inner.order.len() >= self.capacity {
                if let Some(old) = inner.order.pop_front() {
                    inner.map.remove(&old);
                }
            }
            inner.order.push_back(key);
            inner.map.insert(key, value.clone());
        }
        value
    }
}

/// Shortest-path metric of a graph under a fixed edge weighting.
///
/// Distances are always evaluated from the lower-indexed endpoint so that
/// `distance(x, y) == distance(y, x)` bit for bit.
pub struct GraphMetric {
    graph: Arc<LengthGraph>,
    weights: Vec<f64>,
    cache: SourceCache,
}

impl std::fmt::Debug for GraphMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GraphMetric")
            .field("vertices", &self.graph.num_vertices())
            .finish()
    }
}

impl GraphMetric {
    pub fn new(graph: Arc<LengthGraph>, weights: Vec<f64>) -> Self {
        assert_eq!(weights.len(), graph.num_slots());
        Self {
            graph,
            weights,
            cache: SourceCache::new(32),
        }
    }

    pub fn from_lengths(graph: Arc<LengthGraph>) -> Self {
        let w = graph.lengths().to_vec();
        Self::new(graph, w)
    }

    pub fn graph(&self) -> &Arc<LengthGraph> {
        &self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    /// Cached tree rooted at `source`.
    pub fn tree(&self, source: usize) -> Arc<ShortestPaths> {
        self.cache
            .get_or_insert_with(source, || dijkstra(&self.graph, &self.weights, &[(source, 0.0)]))
    }

    /// Uncached tree from several weighted seeds.
    pub fn multi_source(&self, seeds: &[(usize, f64)]) -> ShortestPaths {
        dijkstra(&self.graph, &self.weights, seeds)
    }

    pub fn distance(&self, x: usize, y: usize) -> f64 {
        if x == y {
            return 0.0;
        }
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        let d = self.tree(a).dist[b];
        assert!(d.is_finite(), "vertex {b} unreachable from {a}: graph must be connected");
        d
    }

    /// Vertex path from `x` to `y` realizing `distance(x, y)`.
    pub fn path(&self, x: usize, y: usize) -> Vec<usize> {
        if x == y {
            return vec![x];
        }
        if x < y {
            self.tree(x).path_to(y)
        } else {
            let mut p = self.tree(y).path_to(x);
            p.reverse();
            p
        }
    }

    /// Length of an explicit vertex path under this metric's weights.
    pub fn path_length(&self, path: &[usize]) -> f64 {
        path.windows(2)
            .map(|w| {
                self.graph
                    .slot_between(w[0], w[1])
                    .map(|s| self.weights[s])
                    .expect("path must follow graph edges")
            })
            .sum()
    }

    /// Distances for many pairs, grouped by canonical source and computed in parallel.
    pub fn pair_distances(&self, pairs: &[(usize, usize)]) -> Vec<f64> {
        let mut by_source: HashMap<usize, Vec<usize>> = HashMap::new();
        for (i, &(x, y)) in pairs.iter().enumerate() {
            by_source.entry(x.min(y)).or_default().push(i);
        }
        let mut groups: Vec<(usize, Vec<usize>)> = by_source.into_iter().collect();
        groups.sort_by_key(|g| g.0);
        let results: Vec<Vec<(usize, f64)>> = groups
            .par_iter()
            .map(|(s, idx)| {
                let tree = dijkstra(&self.graph, &self.weights, &[(*s, 0.0)]);
                idx.iter()
                    .map(|&i| {
                        let (x, y) = pairs[i];
                        let d = if x == y { 0.0 } else { tree.dist[x.max(y)] };
                        (i, d)
                    })
                    .collect()
            })
            .collect();
        let mut out = vec![0.0; pairs.len()];
        for group in results {
            for (i, d) in group {
                out[i] = d;
            }
        }
        out
    }

    /// Vertices within `radius` of `source`, with their distances, nearest first.
    pub fn ball(&self, source: usize, radius: f64) -> Vec<(usize, f64)> {
        let mut out = settle_until(&self.graph, &self.weights, source, |_, d| d > radius);
        if out.last().is_some_and(|&(_, d)| d > radius) {
            out.pop();
        }
        out
    }

    /// Distances from `source` to each of `targets`, searching only as far as
    /// the farthest target.
    pub fn distances_to(&self, source: usize, targets: &[usize]) -> Vec<f64> {
        let mut pending: HashSet<usize> = targets.iter().copied().collect();
        let settled = settle_until(&self.graph, &self.weights, source, |v, _| {
            pending.remove(&v);
            pending.is_empty()
        });
        let found: HashMap<usize, f64> = settled.into_iter().collect();
        targets.iter().map(|t| found.get(t).copied().unwrap_or(f64::INFINITY)).collect()
    }

    /// Dense distance table over the given vertices.
    pub fn table(&self, points: &[usize]) -> DistanceTable {
        let rows: Vec<Vec<f64>> = points
            .par_iter()
            .map(|&s| {
                let tree = dijkstra(&self.graph, &self.weights, &[(s, 0.0)]);
                points.iter().map(|&t| tree.dist[t]).collect()
            })
            .collect();
        DistanceTable::from_fn(points.to_vec(), |i, j| {
            if points[i] == points[j] {
                0.0
            } else if points[i] < points[j] {
                rows[i][j]
            } else {
                rows[j][i]
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use crate::metric_core::{build_grid_domain, Shape, ShapeSpec};

    #[test]
    fn truncated_searches_agree_with_full_tree() {
        let spec = ShapeSpec::new(Shape::Square { side: 1.0 }, 0.1);
        let d = build_grid_domain(&spec).unwrap();
        let m = d.length_metric();
        let full = m.multi_source(&[(7, 0.0)]);
        let ball = m.ball(7, 0.35);
        let inside = full.dist.iter().filter(|&&x| x <= 0.35).count();
        assert_eq!(ball.len(), inside);
        for &(v, dv) in &ball {
            assert_eq!(dv, full.dist[v]);
        }
        let targets = [3, 30, 7, 12];
        let got = m.distances_to(7, &targets);
        for (t, g) in targets.iter().zip(got) {
            assert_eq!(g, full.dist[*t]);
        }
    }
}
