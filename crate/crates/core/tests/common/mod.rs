#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treegrade::{MetricGraph, PointSet, VertexId};

/// Random connected sparse graph: a random spanning tree plus `extra` chords.
pub fn random_sparse_graph(n: usize, extra: usize, rng: &mut ChaCha8Rng) -> MetricGraph {
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for t in 1..n {
        let p = order[rng.gen_range(0..t)];
        edges.push((order[t].min(p), order[t].max(p)));
    }
    for _ in 0..extra * 4 {
        if edges.len() >= n - 1 + extra {
            break;
        }
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let e = (a.min(b), a.max(b));
        if a != b && !edges.contains(&e) {
            edges.push(e);
        }
    }
    MetricGraph::new(n, &edges).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_subset(n: usize, p: f64, rng: &mut ChaCha8Rng) -> PointSet {
    (0..n).filter(|_| rng.gen_bool(p)).collect()
}

/// Calls `visit` on every simple path starting in `a` (including the
/// one-vertex paths). Stops early when `visit` returns true.
pub fn any_simple_path(g: &MetricGraph, a: &PointSet, visit: &mut dyn FnMut(&[VertexId]) -> bool) -> bool {
    fn dfs(g: &MetricGraph, path: &mut Vec<VertexId>, on: &mut [bool], visit: &mut dyn FnMut(&[VertexId]) -> bool) -> bool {
        if visit(path) {
            return true;
        }
        let last = *path.last().unwrap();
        for &w in g.neighbors(last) {
            if !on[w] {
                on[w] = true;
                path.push(w);
                if dfs(g, path, on, visit) {
                    return true;
                }
                path.pop();
                on[w] = false;
            }
        }
        false
    }
    let mut on = vec![false; g.vertex_count()];
    for s in a.iter() {
        on[s] = true;
        let mut path = vec![s];
        if dfs(g, &mut path, &mut on, visit) {
            return true;
        }
        on[s] = false;
    }
    false
}

/// Brute force: does some simple path from `a` to `b` avoid `ball`?
pub fn oracle_avoiding_path(g: &MetricGraph, a: &PointSet, b: &PointSet, ball: &PointSet) -> bool {
    any_simple_path(g, a, &mut |p: &[VertexId]| {
        let last = *p.last().unwrap();
        b.contains(last) && p.iter().all(|&v| !ball.contains(v))
    })
}

/// Brute force: does some simple path from `a` to `b` stay in `allowed`?
pub fn oracle_path_within(g: &MetricGraph, a: &PointSet, b: &PointSet, allowed: &[bool]) -> bool {
    any_simple_path(g, a, &mut |p: &[VertexId]| {
        let last = *p.last().unwrap();
        b.contains(last) && p.iter().all(|&v| allowed[v])
    })
}

/// Open ball by direct BFS distances.
pub fn ball(g: &MetricGraph, w: VertexId, r: u32) -> PointSet {
    let d = g.distances_from(w);
    (0..g.vertex_count()).filter(|&v| d[v] < r).collect()
}
