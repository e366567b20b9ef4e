//! Exact metric primitives on finite unit-edge graphs.
//!
//! Every point is a vertex and every edge has length one, so distances are
//! plain BFS depths. Balls are open (`d < r`) and neighbourhoods are closed
//! (`d <= r`); callers rely on that distinction.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pairs::PairSelection;

pub type VertexId = usize;

/// Marker for unreachable vertices in distance vectors.
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {index} references vertex {vertex} outside 0..{n}")]
    VertexOutOfRange { index: usize, vertex: VertexId, n: usize },
    #[error("edge {index} is a self-loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: VertexId },
    #[error("edge {index} duplicates edge ({u}, {v})")]
    DuplicateEdge { index: usize, u: VertexId, v: VertexId },
    #[error("graph is disconnected: vertex {unreachable} is not reachable from vertex 0")]
    Disconnected { unreachable: VertexId },
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {vertex} outside 0..{n}")]
    InvalidVertex { vertex: VertexId, n: usize },
}

/// A sorted, deduplicated set of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointSet(Vec<VertexId>);

impl PointSet {
    pub fn new() -> Self {
        PointSet(Vec::new())
    }

    pub fn singleton(v: VertexId) -> Self {
        PointSet(vec![v])
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        PointSet(
            mask.iter()
                .enumerate()
                .filter_map(|(v, &m)| m.then_some(v))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.0
    }

    pub fn first(&self) -> Option<VertexId> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<VertexId> {
        self.0.last().copied()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for v in self.iter() {
            mask[v] = true;
        }
        mask
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().any(|v| large.contains(v))
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn into_vec(self) -> Vec<VertexId> {
        self.0
    }
}

impl FromIterator<VertexId> for PointSet {
    fn from_iter<T: IntoIterator<Item = VertexId>>(iter: T) -> Self {
        let mut v: Vec<VertexId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        PointSet(v)
    }
}

impl From<Vec<VertexId>> for PointSet {
    fn from(v: Vec<VertexId>) -> Self {
        v.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = VertexId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, VertexId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

/// An ordered vertex sequence in which consecutive vertices are adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathWitness(Vec<VertexId>);

impl PathWitness {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        assert!(!vertices.is_empty(), "path witness must be nonempty");
        PathWitness(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn start(&self) -> VertexId {
        self.0[0]
    }

    pub fn end(&self) -> VertexId {
        *self.0.last().unwrap()
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 1
    }

    pub fn reversed(&self) -> PathWitness {
        let mut v = self.0.clone();
        v.reverse();
        PathWitness(v)
    }

    /// Appends `other`, whose first vertex must equal this path's last.
    pub fn concat(&self, other: &PathWitness) -> PathWitness {
        assert_eq!(self.end(), other.start(), "paths do not meet");
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0[1..]);
        PathWitness(v)
    }

    pub fn is_walk_in(&self, g: &MetricGraph) -> bool {
        self.0.iter().all(|&v| v < g.vertex_count())
            && self.0.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }

    pub fn into_vec(self) -> Vec<VertexId> {
        self.0
    }
}

/// Connected undirected simple graph with unit edge lengths, stored as CSR
/// with sorted neighbour lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricGraph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
}

impl MetricGraph {
    /// Builds a graph and checks it is connected, loop-free and simple.
    pub fn new(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let g = Self::build(n, edges)?;
        if let Some(v) = g.first_unreachable() {
            return Err(GraphError::Disconnected { unreachable: v });
        }
        Ok(g)
    }

    /// Like [`MetricGraph::new`] but does not require connectivity. Only
    /// used for intermediate subgraphs whose connectivity is checked by the
    /// caller.
    pub(crate) fn build(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut normalized = Vec::with_capacity(edges.len());
        for (index, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { index, vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { index, vertex: u });
            }
            normalized.push((u.min(v), u.max(v), index));
        }
        normalized.sort_unstable();
        for w in normalized.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(GraphError::DuplicateEdge { index: w[1].2.max(w[0].2), u: w[0].0, v: w[0].1 });
            }
        }
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0; offsets[n]];
        for &(u, v) in edges {
            targets[fill[u]] = v;
            fill[u] += 1;
            targets[fill[v]] = u;
            fill[v] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let edges = normalized.into_iter().map(|(u, v, _)| (u, v)).collect();
        Ok(MetricGraph { offsets, targets, edges })
    }

    fn first_unreachable(&self) -> Option<VertexId> {
        let d = self.distances_from(0);
        d.iter().position(|&x| x == UNREACHABLE)
    }

    pub fn is_connected(&self) -> bool {
        self.first_unreachable().is_none()
    }

    /// Path graph 0 - 1 - ... - (n-1).
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::new(n, &edges).expect("path graph")
    }

    /// Cycle graph on `n >= 3` vertices.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle graph")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::new(n, &edges).expect("complete graph")
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.vertex_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn all_vertices(&self) -> PointSet {
        PointSet((0..self.vertex_count()).collect())
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { vertex: v, n: self.vertex_count() })
        }
    }

    /// Single-source shortest-path distances.
    pub fn distances_from(&self, src: VertexId) -> Vec<u32> {
        self.distances_from_sources(std::iter::once(src), None)
    }

    /// Distance to the nearest vertex of `set`.
    pub fn distances_from_set(&self, set: &PointSet) -> Vec<u32> {
        self.distances_from_sources(set.iter(), None)
    }

    /// Multi-source BFS restricted to vertices where `allowed` is true (when
    /// given). Sources outside the allowed region are ignored.
    pub fn distances_from_sources(
        &self,
        sources: impl IntoIterator<Item = VertexId>,
        allowed: Option<&[bool]>,
    ) -> Vec<u32> {
        let n = self.vertex_count();
        let mut dist = vec![UNREACHABLE; n];
        let mut queue = VecDeque::new();
        for s in sources {
            if allowed.map_or(true, |a| a[s]) && dist[s] == UNREACHABLE {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            for &v in self.neighbors(u) {
                if dist[v] == UNREACHABLE && allowed.map_or(true, |a| a[v]) {
                    dist[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, x: VertexId, y: VertexId) -> u32 {
        if x == y {
            return 0;
        }
        self.distances_from(x)[y]
    }

    /// All-pairs distance matrix, row per source.
    pub fn all_pairs(&self) -> Vec<Vec<u32>> {
        use rayon::prelude::*;
        (0..self.vertex_count())
            .into_par_iter()
            .map(|v| self.distances_from(v))
            .collect()
    }

    /// Vertices at distance strictly less than `r` from `w`.
    pub fn open_ball(&self, w: VertexId, r: f64) -> PointSet {
        let d = self.distances_from(w);
        ball_from_distances(&d, r)
    }

    /// `{x : d(x, A) <= r}`.
    pub fn closed_neighborhood(&self, set: &PointSet, r: u32) -> PointSet {
        if r == 0 {
            return set.clone();
        }
        let d = self.distances_from_set(set);
        PointSet(
            d.iter()
                .enumerate()
                .filter_map(|(v, &dv)| (dv <= r).then_some(v))
                .collect(),
        )
    }

    /// The union of all geodesics from `x` to `y`.
    pub fn geodesic_vertices(&self, x: VertexId, y: VertexId) -> PointSet {
        let dx = self.distances_from(x);
        self.geodesic_vertices_with(&dx, y)
    }

    /// Geodesic interval given precomputed distances from `x`: a backward
    /// sweep from `y` keeping vertices one step closer to `x`.
    pub fn geodesic_vertices_with(&self, dist_from_x: &[u32], y: VertexId) -> PointSet {
        let mut seen = vec![y];
        let mut mark = std::collections::HashSet::from([y]);
        let mut frontier = vec![y];
        while let Some(u) = frontier.pop() {
            let du = dist_from_x[u];
            if du == 0 {
                continue;
            }
            for &v in self.neighbors(u) {
                if dist_from_x[v] != UNREACHABLE && dist_from_x[v] + 1 == du && mark.insert(v) {
                    seen.push(v);
                    frontier.push(v);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// One deterministic geodesic from `x` to `y`: the shortest-path tree
    /// rooted at `y` with smallest-id parents, walked from `x`.
    pub fn canonical_geodesic(&self, x: VertexId, y: VertexId) -> PathWitness {
        let dy = self.distances_from(y);
        self.walk_down(&dy, x)
    }

    /// Walks from `x` down a distance field to its zero set, always taking the
    /// smallest-id neighbour that is one step closer.
    pub fn walk_down(&self, dist: &[u32], x: VertexId) -> PathWitness {
        assert_ne!(dist[x], UNREACHABLE, "start vertex unreachable");
        let mut path = vec![x];
        let mut cur = x;
        while dist[cur] > 0 {
            let next = self
                .neighbors(cur)
                .iter()
                .copied()
                .find(|&v| dist[v] != UNREACHABLE && dist[v] + 1 == dist[cur])
                .expect("distance field is consistent");
            path.push(next);
            cur = next;
        }
        PathWitness(path)
    }

    /// Connected-component labels of the subgraph induced on `allowed`;
    /// vertices outside get `None`.
    pub fn component_labels(&self, allowed: &[bool]) -> Vec<Option<u32>> {
        let n = self.vertex_count();
        let mut label = vec![None; n];
        let mut next = 0u32;
        let mut stack = Vec::new();
        for s in 0..n {
            if !allowed[s] || label[s].is_some() {
                continue;
            }
            label[s] = Some(next);
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &v in self.neighbors(u) {
                    if allowed[v] && label[v].is_none() {
                        label[v] = Some(next);
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// A path from `a` to `b` that avoids `ball` entirely, or `None` when every
    /// `a`-to-`b` path meets the ball.
    pub fn find_avoiding_path(&self, a: &PointSet, b: &PointSet, ball: &PointSet) -> Option<PathWitness> {
        let n = self.vertex_count();
        let mut allowed = vec![true; n];
        for v in ball.iter() {
            allowed[v] = false;
        }
        self.find_path_within(a, b, &allowed)
    }

    /// Shortest path from `a` to `b` using only `allowed` vertices.
    pub fn find_path_within(&self, a: &PointSet, b: &PointSet, allowed: &[bool]) -> Option<PathWitness> {
        let n = self.vertex_count();
        let target = b.mask(n);
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for s in a.iter().filter(|&s| allowed[s]) {
            if parent[s] == usize::MAX {
                parent[s] = s;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            if target[u] {
                let mut path = vec![u];
                let mut cur = u;
                while parent[cur] != cur {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(PathWitness(path));
            }
            for &v in self.neighbors(u) {
                if allowed[v] && parent[v] == usize::MAX {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// True iff every path from `a` to `b` meets `ball`.
    pub fn blocks_all_paths(&self, a: &PointSet, b: &PointSet, ball: &PointSet) -> bool {
        self.find_avoiding_path(a, b, ball).is_none()
    }

    /// Induced subgraph on `set`, with the map from new ids to old ids.
    /// Connectivity is not required.
    pub fn induced_subgraph(&self, set: &PointSet) -> (MetricGraph, Vec<VertexId>) {
        let old: Vec<VertexId> = set.iter().collect();
        let mut new_id = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in old.iter().enumerate() {
            new_id[v] = i;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(u, v)| new_id[u] != usize::MAX && new_id[v] != usize::MAX)
            .map(|&(u, v)| (new_id[u], new_id[v]))
            .collect();
        let g = MetricGraph::build(old.len().max(1), &edges).expect("induced subgraph of a simple graph");
        (g, old)
    }

    /// Diameter of a vertex set in this graph's metric.
    pub fn set_diameter(&self, set: &PointSet) -> u32 {
        let mut best = 0;
        for v in set.iter() {
            let d = self.distances_from(v);
            for u in set.iter() {
                best = best.max(d[u]);
            }
        }
        best
    }

    /// Manning bottleneck check: for each selected pair, the open ball of
    /// radius `delta` around the geodesic midpoint must meet every path.
    pub fn check_manning_bp(&self, delta: f64, pairs: &PairSelection) -> ManningReport {
        use rayon::prelude::*;
        let n = self.vertex_count();
        let selected = pairs.select(n);
        let outcomes: Vec<ManningPair> = selected
            .par_iter()
            .map(|&(x, y)| {
                let geo = self.canonical_geodesic(x, y);
                let midpoint = geo.vertices()[geo.len() / 2];
                let ball = self.open_ball(midpoint, delta);
                let witness = self.find_avoiding_path(&PointSet::singleton(x), &PointSet::singleton(y), &ball);
                ManningPair { x, y, midpoint, passed: witness.is_none(), witness }
            })
            .collect();
        let failures = outcomes.iter().filter(|p| !p.passed).count();
        ManningReport {
            delta,
            pairs_checked: outcomes.len(),
            failures,
            passed: failures == 0,
            failing_pairs: outcomes.into_iter().filter(|p| !p.passed).collect(),
        }
    }
}

/// Open ball from a distance vector.
pub fn ball_from_distances(dist: &[u32], r: f64) -> PointSet {
    PointSet(
        dist.iter()
            .enumerate()
            .filter_map(|(v, &d)| (d != UNREACHABLE && (d as f64) < r).then_some(v))
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManningPair {
    pub x: VertexId,
    pub y: VertexId,
    pub midpoint: VertexId,
    pub passed: bool,
    pub witness: Option<PathWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManningReport {
    pub delta: f64,
    pub pairs_checked: usize,
    pub failures: usize,
    pub passed: bool,
    pub failing_pairs: Vec<ManningPair>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> PointSet {
        v.iter().copied().collect()
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(matches!(MetricGraph::new(3, &[(0, 0)]), Err(GraphError::SelfLoop { .. })));
        assert!(matches!(MetricGraph::new(3, &[(0, 1), (1, 0), (1, 2)]), Err(GraphError::DuplicateEdge { .. })));
        assert!(matches!(MetricGraph::new(3, &[(0, 1)]), Err(GraphError::Disconnected { unreachable: 2 })));
        assert!(matches!(MetricGraph::new(2, &[(0, 5)]), Err(GraphError::VertexOutOfRange { .. })));
    }

    #[test]
    fn path_and_cycle_distances() {
        let p = MetricGraph::path(9);
        assert_eq!(p.distances_from(0), (0..9).collect::<Vec<u32>>());
        let c = MetricGraph::cycle(8);
        let d = c.distances_from(0);
        assert_eq!(d[4], 4);
        assert_eq!(d[7], 1);
    }

    #[test]
    fn open_balls_are_strict() {
        let p = MetricGraph::path(9);
        assert_eq!(p.open_ball(4, 1.0), set(&[4]));
        assert_eq!(p.open_ball(4, 2.5), set(&[2, 3, 4, 5, 6]));
        assert!(p.open_ball(4, 0.0).is_empty());
    }

    #[test]
    fn closed_neighborhoods() {
        let p = MetricGraph::path(9);
        assert_eq!(p.closed_neighborhood(&set(&[4]), 2), set(&[2, 3, 4, 5, 6]));
        assert_eq!(p.closed_neighborhood(&p.all_vertices(), 3), p.all_vertices());
        let c = MetricGraph::cycle(8);
        assert_eq!(c.closed_neighborhood(&set(&[0]), 3), set(&[0, 1, 2, 3, 5, 6, 7]));
        assert_eq!(c.closed_neighborhood(&set(&[0, 4]), 0), set(&[0, 4]));
    }

    #[test]
    fn geodesic_intervals() {
        let p = MetricGraph::path(9);
        assert_eq!(p.geodesic_vertices(0, 8), p.all_vertices());
        let c = MetricGraph::cycle(8);
        assert_eq!(c.geodesic_vertices(0, 4), c.all_vertices());
        assert_eq!(c.geodesic_vertices(0, 2), set(&[0, 1, 2]));
        assert_eq!(c.geodesic_vertices(3, 3), set(&[3]));
    }

    #[test]
    fn canonical_geodesic_tie_break() {
        let p = MetricGraph::path(9);
        assert_eq!(p.canonical_geodesic(0, 8).vertices(), &[0, 1, 2, 3, 4, 5, 6, 7, 8]);
        let c = MetricGraph::cycle(8);
        assert_eq!(c.canonical_geodesic(0, 4).vertices(), &[0, 1, 2, 3, 4]);
        assert_eq!(c.canonical_geodesic(5, 5).vertices(), &[5]);
    }

    #[test]
    fn blocking_and_witnesses() {
        let p = MetricGraph::path(9);
        assert!(p.blocks_all_paths(&set(&[0, 1, 2, 3, 4]), &set(&[4, 5, 6, 7, 8]), &set(&[4])));
        let c = MetricGraph::cycle(8);
        let w = c.find_avoiding_path(&set(&[0]), &set(&[4]), &set(&[2])).unwrap();
        assert_eq!(w.vertices(), &[0, 7, 6, 5, 4]);
        assert!(w.is_walk_in(&c));
        // source swallowed by the ball
        assert!(c.blocks_all_paths(&set(&[0, 1]), &set(&[4]), &set(&[0, 1, 2])));
    }

    #[test]
    fn manning_checks() {
        let tree = MetricGraph::new(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
        assert!(tree.check_manning_bp(1.0, &PairSelection::All).passed);
        let edge = MetricGraph::path(2);
        assert!(edge.check_manning_bp(1.0, &PairSelection::All).passed);
        let big = MetricGraph::cycle(100);
        let report = big.check_manning_bp(2.0, &PairSelection::Sample { k: 50, seed: 1 });
        assert!(!report.passed);
        let f = &report.failing_pairs[0];
        let w = f.witness.as_ref().unwrap();
        assert!(w.is_walk_in(&big));
        assert_eq!((w.start(), w.end()), (f.x, f.y));
    }

    #[test]
    fn induced_subgraph_maps_ids() {
        let c = MetricGraph::cycle(8);
        let (sub, old) = c.induced_subgraph(&set(&[1, 2, 3, 6]));
        assert_eq!(old, vec![1, 2, 3, 6]);
        assert_eq!(sub.edge_count(), 2);
        assert!(!sub.is_connected());
    }
}
