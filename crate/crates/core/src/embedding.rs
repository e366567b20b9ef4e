//! Replacing the pieces of a tree-graded space by products of trees, and
//! the coordinate trees obtained by collapsing each product onto one factor.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, MetricGraph, VertexId};
use crate::pairs::PairSelection;
use crate::rbp::PieceId;
use crate::treegraded::{ArcSpec, TreeGradedError, TreeGradedSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    TreeGraded(#[from] TreeGradedError),
    #[error("coordinate {0} of the embedding is not a tree")]
    NotATree(usize),
    #[error("embedding of piece {piece} maps {vertices} vertices, the piece has {expected}")]
    MapShape { piece: PieceId, vertices: usize, expected: usize },
    #[error("vertex {vertex} maps outside coordinate tree {coordinate}")]
    MapOutOfRange { vertex: VertexId, coordinate: usize },
    #[error("piece embeddings use {found} coordinates, expected {expected}")]
    CoordinateMismatch { expected: usize, found: usize },
    #[error("no embedding supplied for piece {0}")]
    MissingEmbedding(PieceId),
    #[error("attach point {vertex} of piece {piece} has no image")]
    AttachPointUnmapped { piece: PieceId, vertex: VertexId },
    #[error("pair ({x}, {y}) breaks the declared ({k}, {c}) bounds: piece distance {d}, product distance {p}")]
    BoundFailed { x: VertexId, y: VertexId, d: u32, p: u32, k: u32, c: u32 },
    #[error("piece is not a cycle")]
    NotACycle,
    #[error("piece is not a tree")]
    PieceNotATree,
    #[error("coordinate tree {0} contains a cycle")]
    CycleInCoordinateTree(usize),
    #[error("pair ({x}, {y}) at distance {d} has coordinate distances {coords:?}")]
    NonDecreasingViolated { x: VertexId, y: VertexId, d: u32, coords: Vec<u32> },
    #[error("a coordinate collapse stretches {0} pairs or edges")]
    LipschitzViolated(usize),
}

pub fn is_tree(g: &MetricGraph) -> bool {
    g.edge_count() + 1 == g.vertex_count() && g.is_connected()
}

/// A piece mapped into a product of `l` trees with the sup metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceTreeEmbedding {
    pub piece: PieceId,
    pub trees: Vec<MetricGraph>,
    /// `map[v][j]` is the vertex of tree `j` that local vertex `v` goes to.
    pub map: Vec<Vec<VertexId>>,
    pub k: u32,
    pub c: u32,
}

impl PieceTreeEmbedding {
    /// Checks the trees, the map, and `d/K - C <= max_j d_j <= K d + C` on
    /// every pair of piece vertices.
    pub fn new(
        piece: PieceId,
        piece_graph: &MetricGraph,
        trees: Vec<MetricGraph>,
        map: Vec<Vec<VertexId>>,
        k: u32,
        c: u32,
    ) -> Result<Self, EmbeddingError> {
        if let Some(j) = trees.iter().position(|t| !is_tree(t)) {
            return Err(EmbeddingError::NotATree(j));
        }
        if map.len() != piece_graph.vertex_count() {
            return Err(EmbeddingError::MapShape { piece, vertices: map.len(), expected: piece_graph.vertex_count() });
        }
        for (v, row) in map.iter().enumerate() {
            if row.len() != trees.len() {
                return Err(EmbeddingError::CoordinateMismatch { expected: trees.len(), found: row.len() });
            }
            if let Some(j) = (0..trees.len()).find(|&j| row[j] >= trees[j].vertex_count()) {
                return Err(EmbeddingError::MapOutOfRange { vertex: v, coordinate: j });
            }
        }
        let e = PieceTreeEmbedding { piece, trees, map, k, c };
        if let Some((x, y, d, p)) = e.first_violation(piece_graph) {
            return Err(EmbeddingError::BoundFailed { x, y, d, p, k, c });
        }
        Ok(e)
    }

    pub fn coordinates(&self) -> usize {
        self.trees.len()
    }

    fn first_violation(&self, g: &MetricGraph) -> Option<(VertexId, VertexId, u32, u32)> {
        let tree_dist: Vec<Vec<Vec<u32>>> = self.trees.iter().map(MetricGraph::all_pairs).collect();
        let (k, c) = (self.k as f64, self.c as f64);
        (0..g.vertex_count()).into_par_iter().find_map_first(|x| {
            let d = g.distances_from(x);
            (x + 1..g.vertex_count()).find_map(|y| {
                let p = (0..self.trees.len())
                    .map(|j| tree_dist[j][self.map[x][j]][self.map[y][j]])
                    .max()
                    .unwrap_or(0);
                let dd = d[y] as f64;
                let pf = p as f64;
                (pf < dd / k - c || pf > k * dd + c).then_some((x, y, d[y], p))
            })
        })
    }

    /// Worst `d / max_j d_j` and `max_j d_j / d` over all pairs.
    pub fn measured_distortion(&self, g: &MetricGraph) -> (f64, f64) {
        let tree_dist: Vec<Vec<Vec<u32>>> = self.trees.iter().map(MetricGraph::all_pairs).collect();
        let mut lower: f64 = 1.0;
        let mut upper: f64 = 1.0;
        for x in 0..g.vertex_count() {
            let d = g.distances_from(x);
            for y in x + 1..g.vertex_count() {
                let p = (0..self.trees.len()).map(|j| tree_dist[j][self.map[x][j]][self.map[y][j]]).max().unwrap_or(0);
                if p > 0 {
                    lower = lower.max(d[y] as f64 / p as f64);
                } else {
                    lower = f64::INFINITY;
                }
                upper = upper.max(p as f64 / d[y] as f64);
            }
        }
        (lower, upper)
    }

    /// Adds single-vertex trees until there are `l` coordinates.
    pub fn padded(mut self, l: usize) -> Self {
        while self.trees.len() < l {
            self.trees.push(MetricGraph::path(1));
            for row in &mut self.map {
                row.push(0);
            }
        }
        self
    }
}

/// A tree piece mapped identically to itself.
pub fn identity_embedding(piece: PieceId, g: &MetricGraph) -> Result<PieceTreeEmbedding, EmbeddingError> {
    if !is_tree(g) {
        return Err(EmbeddingError::PieceNotATree);
    }
    let map = (0..g.vertex_count()).map(|v| vec![v]).collect();
    PieceTreeEmbedding::new(piece, g, vec![g.clone()], map, 1, 0)
}

/// Vertices of a cycle graph in cyclic order, from vertex 0 towards its
/// smaller neighbour.
pub fn cyclic_order(g: &MetricGraph) -> Option<Vec<VertexId>> {
    let n = g.vertex_count();
    if n < 3 || g.edge_count() != n || (0..n).any(|v| g.degree(v) != 2) || !g.is_connected() {
        return None;
    }
    let mut order = vec![0];
    let mut prev = usize::MAX;
    let mut cur = 0;
    while order.len() < n {
        let next = *g.neighbors(cur).iter().find(|&&v| v != prev).unwrap();
        order.push(next);
        prev = cur;
        cur = next;
    }
    Some(order)
}

/// Points of the boundary of a `W x W` square with `W = ⌈n/4⌉`, walked
/// counterclockwise from the origin, with `4W - n` corners cut by diagonal
/// steps (opposite corners first).
pub fn square_boundary(n: usize) -> (usize, Vec<(usize, usize)>) {
    assert!(n >= 3, "cycles have at least three vertices");
    let w = n.div_ceil(4);
    let mut pts = Vec::with_capacity(4 * w);
    pts.extend((0..w).map(|x| (x, 0)));
    pts.extend((0..w).map(|y| (w, y)));
    pts.extend((0..w).map(|x| (w - x, w)));
    pts.extend((0..w).map(|y| (0, w - y)));
    let corners = [(w, 0), (0, w), (w, w), (0, 0)];
    for corner in corners.iter().take(4 * w - n) {
        pts.retain(|p| p != corner);
    }
    (w, pts)
}

/// A cycle piece embedded into two paths via the boundary of a square in
/// the sup metric. Both coordinates are 1-Lipschitz and the embedding is a
/// `(2, 0)` quasi-isometric embedding.
pub fn cycle_embedding(piece: PieceId, g: &MetricGraph) -> Result<PieceTreeEmbedding, EmbeddingError> {
    let order = cyclic_order(g).ok_or(EmbeddingError::NotACycle)?;
    let (w, pts) = square_boundary(order.len());
    let mut map = vec![Vec::new(); order.len()];
    for (p, &v) in order.iter().enumerate() {
        map[v] = vec![pts[p].0, pts[p].1];
    }
    let side = MetricGraph::path(w + 1);
    PieceTreeEmbedding::new(piece, g, vec![side.clone(), side], map, 2, 0)
}

/// Picks the bundled embedding for each piece (identity for trees, the
/// square for cycles) and pads to a common number of coordinates.
pub fn default_embeddings(t: &TreeGradedSpace) -> Result<Vec<PieceTreeEmbedding>, EmbeddingError> {
    let raw: Vec<PieceTreeEmbedding> = t
        .pieces
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let g = t.realized.induced_subgraph(p).0;
            if is_tree(&g) {
                identity_embedding(i, &g)
            } else {
                cycle_embedding(i, &g)
            }
        })
        .collect::<Result<_, _>>()?;
    let l = raw.iter().map(PieceTreeEmbedding::coordinates).max().unwrap_or(1);
    Ok(raw.into_iter().map(|e| e.padded(l)).collect())
}

/// Strong product of graphs, with the mixed-radix tuple of every vertex
/// (first coordinate varies slowest).
pub fn strong_product(factors: &[MetricGraph]) -> (MetricGraph, Vec<Vec<VertexId>>) {
    let sizes: Vec<usize> = factors.iter().map(MetricGraph::vertex_count).collect();
    let total: usize = sizes.iter().product();
    let encode = |t: &[VertexId]| t.iter().zip(&sizes).fold(0, |acc, (&x, &s)| acc * s + x);
    let tuples: Vec<Vec<VertexId>> = (0..total)
        .map(|mut id| {
            let mut t = vec![0; sizes.len()];
            for j in (0..sizes.len()).rev() {
                t[j] = id % sizes[j];
                id /= sizes[j];
            }
            t
        })
        .collect();
    let mut edges = Vec::new();
    for (u, t) in tuples.iter().enumerate() {
        // each coordinate stays or moves to a neighbour
        let options: Vec<Vec<VertexId>> = t
            .iter()
            .enumerate()
            .map(|(j, &x)| std::iter::once(x).chain(factors[j].neighbors(x).iter().copied()).collect())
            .collect();
        let mut idx = vec![0usize; options.len()];
        loop {
            let cand: Vec<VertexId> = idx.iter().enumerate().map(|(j, &i)| options[j][i]).collect();
            let v = encode(&cand);
            if v > u {
                edges.push((u, v));
            }
            let mut j = 0;
            while j < idx.len() {
                idx[j] += 1;
                if idx[j] < options[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
        }
    }
    (MetricGraph::new(total, &edges).expect("products of connected graphs are connected"), tuples)
}

/// `T(X)'`: the space with every piece replaced by its product of trees.
#[derive(Clone, Debug)]
pub struct ProductSpace {
    pub space: TreeGradedSpace,
    pub l: usize,
    pub embeddings: Vec<PieceTreeEmbedding>,
    /// Per piece, the tuple of each local product vertex.
    pub tuples: Vec<Vec<Vec<VertexId>>>,
    /// Vertex map from the source space into this one.
    pub inclusion: Vec<VertexId>,
}

/// Replaces each piece by the product of its coordinate trees and
/// reattaches the arcs at the images of their attach points.
pub fn replace_pieces(t: &TreeGradedSpace, embeds: &[PieceTreeEmbedding]) -> Result<ProductSpace, EmbeddingError> {
    let k = t.piece_count();
    let l = embeds.first().map_or(1, PieceTreeEmbedding::coordinates);
    let mut by_piece: Vec<Option<&PieceTreeEmbedding>> = vec![None; k];
    for e in embeds {
        if e.coordinates() != l {
            return Err(EmbeddingError::CoordinateMismatch { expected: l, found: e.coordinates() });
        }
        if e.piece < k {
            by_piece[e.piece] = Some(e);
        }
    }
    let by_piece: Vec<&PieceTreeEmbedding> = by_piece
        .into_iter()
        .enumerate()
        .map(|(i, e)| e.ok_or(EmbeddingError::MissingEmbedding(i)))
        .collect::<Result<_, _>>()?;
    for (i, e) in by_piece.iter().enumerate() {
        if e.map.len() != t.pieces[i].len() {
            return Err(EmbeddingError::MapShape { piece: i, vertices: e.map.len(), expected: t.pieces[i].len() });
        }
    }

    let products: Vec<(MetricGraph, Vec<Vec<VertexId>>)> = by_piece.par_iter().map(|e| strong_product(&e.trees)).collect();
    let image = |i: PieceId, realized: VertexId| -> Result<VertexId, EmbeddingError> {
        let local = t.pieces[i]
            .as_slice()
            .binary_search(&realized)
            .map_err(|_| EmbeddingError::AttachPointUnmapped { piece: i, vertex: realized })?;
        let tuple = &by_piece[i].map[local];
        Ok(products[i].1.iter().position(|tp| tp == tuple).expect("tuples cover the product"))
    };
    let arcs: Vec<ArcSpec> = t
        .arcs
        .iter()
        .map(|a| {
            Ok(ArcSpec {
                child: a.child,
                child_vertex: image(a.child, a.child_end())?,
                parent: a.parent,
                parent_vertex: image(a.parent, a.parent_end())?,
                length: a.len(),
            })
        })
        .collect::<Result<_, EmbeddingError>>()?;
    let graphs: Vec<MetricGraph> = products.iter().map(|p| p.0.clone()).collect();
    let space = TreeGradedSpace::assemble(&graphs, None, &arcs, t.root)?;

    let mut inclusion = vec![usize::MAX; t.vertex_count()];
    for (i, p) in t.pieces.iter().enumerate() {
        for v in p.iter() {
            inclusion[v] = space.pieces[i].as_slice()[image(i, v)?];
        }
    }
    for (a, arc) in t.arcs.iter().enumerate() {
        for (o, &v) in arc.path.iter().enumerate() {
            inclusion[v] = space.arcs[a].path[o];
        }
    }
    Ok(ProductSpace {
        space,
        l,
        embeddings: by_piece.into_iter().cloned().collect(),
        tuples: products.into_iter().map(|p| p.1).collect(),
        inclusion,
    })
}

/// One coordinate tree `T_j` with the collapse `ψ_j` from `T(X)'`.
#[derive(Clone, Debug)]
pub struct CoordinateTree {
    pub tree: TreeGradedSpace,
    pub psi: Vec<VertexId>,
}

/// Glues the `j`-th trees of all pieces along the underlying tree, with
/// every arc at full length, for each coordinate `j`.
pub fn coordinate_trees(ps: &ProductSpace) -> Result<Vec<CoordinateTree>, EmbeddingError> {
    let sp = &ps.space;
    (0..ps.l)
        .map(|j| {
            let graphs: Vec<MetricGraph> = ps.embeddings.iter().map(|e| e.trees[j].clone()).collect();
            let local_tuple = |i: PieceId, realized: VertexId| {
                let local = sp.pieces[i].as_slice().binary_search(&realized).expect("attach points lie in pieces");
                ps.tuples[i][local][j]
            };
            let arcs: Vec<ArcSpec> = sp
                .arcs
                .iter()
                .map(|a| ArcSpec {
                    child: a.child,
                    child_vertex: local_tuple(a.child, a.child_end()),
                    parent: a.parent,
                    parent_vertex: local_tuple(a.parent, a.parent_end()),
                    length: a.len(),
                })
                .collect();
            let tree = TreeGradedSpace::assemble(&graphs, None, &arcs, sp.root)?;
            if !is_tree(&tree.realized) {
                return Err(EmbeddingError::CycleInCoordinateTree(j));
            }
            let mut psi = vec![usize::MAX; sp.vertex_count()];
            for (i, p) in sp.pieces.iter().enumerate() {
                for (local, v) in p.iter().enumerate() {
                    psi[v] = tree.pieces[i].as_slice()[ps.tuples[i][local][j]];
                }
            }
            for (a, arc) in sp.arcs.iter().enumerate() {
                for (o, &v) in arc.path.iter().enumerate().skip(1).take(arc.path.len() - 2) {
                    psi[v] = tree.arcs[a].path[o];
                }
            }
            Ok(CoordinateTree { tree, psi })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub coordinates: usize,
    pub pairs_examined: usize,
    pub trees_ok: Vec<bool>,
    /// Per coordinate, edges of `T(X)'` that `ψ_j` stretches.
    pub psi_edge_violations: Vec<usize>,
    /// Pairs with `d_{T_j} > d'` for some `j`.
    pub lipschitz_violations: usize,
    /// Pairs with `max_j d_{T_j} < d'`.
    pub max_violations: usize,
    pub first_max_violation: Option<(VertexId, VertexId, u32, Vec<u32>)>,
    /// Smallest `max_j d_{T_j} / d'` over pairs.
    pub min_max_ratio: f64,
    /// Pairs with `Σ_j d_{T_j} < d'`.
    pub sum_violations: usize,
    /// Worst `d_T / max_j d_{T_j}` and `max_j d_{T_j} / d_T` for the
    /// composite map from the source space.
    pub composite_lower: f64,
    pub composite_upper: f64,
    pub composite_pairs: usize,
    /// Measured `(lower, upper)` distortion of each piece embedding.
    pub piece_distortion: Vec<(f64, f64)>,
}

impl EmbeddingReport {
    pub fn passed(&self) -> bool {
        self.trees_ok.iter().all(|&b| b)
            && self.psi_edge_violations.iter().all(|&v| v == 0)
            && self.lipschitz_violations == 0
            && self.max_violations == 0
    }

    /// Turns the first recorded violation into an error.
    pub fn ensure(&self) -> Result<(), EmbeddingError> {
        if let Some(j) = self.trees_ok.iter().position(|&b| !b) {
            return Err(EmbeddingError::CycleInCoordinateTree(j));
        }
        let stretched = self.lipschitz_violations + self.psi_edge_violations.iter().sum::<usize>();
        if stretched > 0 {
            return Err(EmbeddingError::LipschitzViolated(stretched));
        }
        if let Some((x, y, d, coords)) = self.first_max_violation.clone() {
            return Err(EmbeddingError::NonDecreasingViolated { x, y, d, coords });
        }
        Ok(())
    }
}

/// Compares `d'` on `T(X)'` with the coordinate distances on the selected
/// pairs, and the composite map from `source` on `composite_pairs`.
pub fn measure_embedding(
    source: &TreeGradedSpace,
    ps: &ProductSpace,
    coords: &[CoordinateTree],
    pairs: &PairSelection,
    composite_pairs: &PairSelection,
) -> EmbeddingReport {
    let sp = &ps.space;
    let trees_ok = coords.iter().map(|c| is_tree(&c.tree.realized)).collect();
    let psi_edge_violations = coords
        .iter()
        .map(|c| {
            sp.realized
                .edges()
                .iter()
                .filter(|&&(u, v)| c.psi[u] != c.psi[v] && !c.tree.realized.has_edge(c.psi[u], c.psi[v]))
                .count()
        })
        .collect();

    let selected = pairs.select(sp.vertex_count());
    let grouped = group(&selected);
    type Row = (usize, usize, usize, Option<(VertexId, VertexId, u32, Vec<u32>)>, f64);
    let rows: Vec<Row> = grouped
        .par_iter()
        .map(|(&x, ys)| {
            let d = sp.realized.distances_from(x);
            let dj: Vec<Vec<u32>> = coords.iter().map(|c| c.tree.realized.distances_from(c.psi[x])).collect();
            let mut row = (0, 0, 0, None, f64::INFINITY);
            for &y in ys {
                let per: Vec<u32> = coords.iter().zip(&dj).map(|(c, dv)| dv[c.psi[y]]).collect();
                let max = per.iter().copied().max().unwrap_or(0);
                let sum: u32 = per.iter().sum();
                if per.iter().any(|&p| p > d[y]) {
                    row.0 += 1;
                }
                if max < d[y] {
                    row.1 += 1;
                    row.3.get_or_insert((x, y, d[y], per.clone()));
                }
                if sum < d[y] {
                    row.2 += 1;
                }
                if d[y] > 0 {
                    row.4 = row.4.min(max as f64 / d[y] as f64);
                }
            }
            row
        })
        .collect();

    let comp = group(&composite_pairs.select(source.vertex_count()));
    let (composite_lower, composite_upper) = comp
        .par_iter()
        .map(|(&x, ys)| {
            let d = source.realized.distances_from(x);
            let ix = ps.inclusion[x];
            let dj: Vec<Vec<u32>> = coords.iter().map(|c| c.tree.realized.distances_from(c.psi[ix])).collect();
            let mut lo: f64 = 1.0;
            let mut hi: f64 = 1.0;
            for &y in ys {
                let iy = ps.inclusion[y];
                let max = coords.iter().zip(&dj).map(|(c, dv)| dv[c.psi[iy]]).max().unwrap_or(0);
                lo = lo.max(if max == 0 { f64::INFINITY } else { d[y] as f64 / max as f64 });
                hi = hi.max(max as f64 / d[y] as f64);
            }
            (lo, hi)
        })
        .reduce(|| (1.0, 1.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));

    let piece_distortion = ps
        .embeddings
        .iter()
        .map(|e| e.measured_distortion(&source.realized.induced_subgraph(&source.pieces[e.piece]).0))
        .collect();

    EmbeddingReport {
        coordinates: ps.l,
        pairs_examined: selected.len(),
        trees_ok,
        psi_edge_violations,
        lipschitz_violations: rows.iter().map(|r| r.0).sum(),
        max_violations: rows.iter().map(|r| r.1).sum(),
        first_max_violation: rows.iter().find_map(|r| r.3.clone()),
        min_max_ratio: rows.iter().map(|r| r.4).fold(f64::INFINITY, f64::min),
        sum_violations: rows.iter().map(|r| r.2).sum(),
        composite_lower,
        composite_upper,
        composite_pairs: comp.values().map(Vec::len).sum(),
        piece_distortion,
    }
}

fn group(pairs: &[(VertexId, VertexId)]) -> BTreeMap<VertexId, Vec<VertexId>> {
    let mut m: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(a, b) in pairs {
        m.entry(a).or_default().push(b);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_random_tree_graded;

    #[test]
    fn square_boundary_steps() {
        for n in 3..=64 {
            let (w, pts) = square_boundary(n);
            assert_eq!(pts.len(), n);
            for i in 0..n {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                assert!(a.0.abs_diff(b.0) <= 1 && a.1.abs_diff(b.1) <= 1 && a != b);
                assert!(a.0 <= w && a.1 <= w);
            }
        }
    }

    #[test]
    fn cycle_embeddings_have_distortion_two() {
        for n in 3..=64 {
            let e = cycle_embedding(0, &MetricGraph::cycle(n)).unwrap();
            let (lo, hi) = e.measured_distortion(&MetricGraph::cycle(n));
            assert!(lo <= 2.0 && hi <= 1.0, "n={n}: {lo} {hi}");
        }
    }

    #[test]
    fn strong_product_of_paths_is_king_graph() {
        let (g, tuples) = strong_product(&[MetricGraph::path(3), MetricGraph::path(3)]);
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 20);
        assert_eq!(tuples[4], vec![1, 1]);
        assert_eq!(g.degree(4), 8);
    }

    #[test]
    fn identity_on_tree_pieces_is_isometry() {
        // two paths joined by an arc
        let graphs = vec![MetricGraph::path(4), MetricGraph::path(3)];
        let arcs = [ArcSpec { child: 1, child_vertex: 1, parent: 0, parent_vertex: 2, length: 3 }];
        let t = TreeGradedSpace::assemble(&graphs, None, &arcs, 0).unwrap();
        let embeds = default_embeddings(&t).unwrap();
        assert_eq!(embeds[0].coordinates(), 1);
        let ps = replace_pieces(&t, &embeds).unwrap();
        assert_eq!(ps.space.vertex_count(), t.vertex_count());
        let coords = coordinate_trees(&ps).unwrap();
        let r = measure_embedding(&t, &ps, &coords, &PairSelection::All, &PairSelection::All);
        assert!(r.passed());
        assert_eq!((r.composite_lower, r.composite_upper), (1.0, 1.0));
    }

    #[test]
    fn single_cycle_piece() {
        let t = TreeGradedSpace::assemble(&[MetricGraph::cycle(8)], None, &[], 0).unwrap();
        let ps = replace_pieces(&t, &default_embeddings(&t).unwrap()).unwrap();
        let coords = coordinate_trees(&ps).unwrap();
        assert_eq!(coords.len(), 2);
        assert_eq!(coords[0].tree.vertex_count(), 3);
        let r = measure_embedding(&t, &ps, &coords, &PairSelection::All, &PairSelection::All);
        assert!(r.passed());
        assert!(r.composite_lower <= 2.0);
    }

    #[test]
    fn coordinate_trees_of_random_space() {
        let t = gen_random_tree_graded(5, 4, 9, 3, 9);
        let ps = replace_pieces(&t, &default_embeddings(&t).unwrap()).unwrap();
        let coords = coordinate_trees(&ps).unwrap();
        let r = measure_embedding(&t, &ps, &coords, &PairSelection::All, &PairSelection::All);
        assert!(r.trees_ok.iter().all(|&b| b));
        assert_eq!(r.lipschitz_violations, 0);
        assert!(r.psi_edge_violations.iter().all(|&v| v == 0));
        assert_eq!(r.sum_violations, 0);
    }

    #[test]
    fn declared_bounds_are_enforced() {
        let g = MetricGraph::cycle(6);
        let map = (0..6).map(|v| vec![v]).collect();
        let err = PieceTreeEmbedding::new(0, &g, vec![MetricGraph::path(6)], map, 1, 0).unwrap_err();
        assert!(matches!(err, EmbeddingError::BoundFailed { .. }));
    }
}
