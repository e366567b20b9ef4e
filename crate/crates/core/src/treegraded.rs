//! Tree-graded spaces realized as graphs: disjoint piece copies joined by
//! subdivided arcs along an underlying tree.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construction::ConstructionState;
use crate::graph::{GraphError, MetricGraph, PointSet, VertexId};
use crate::pairs::PairSelection;
use crate::rbp::PieceId;

/// Additive constant in the distortion bound, per unit of `M`.
pub const DISTORTION_ADDITIVE: u32 = 3552;

/// Environment variable capping the size of exhaustive pair scans.
pub const EXHAUSTIVE_LIMIT_VAR: &str = "TREEGRADE_EXHAUSTIVE_LIMIT";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeGradedError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("piece {0} does not induce a connected subgraph")]
    PieceDisconnected(PieceId),
    #[error("parent links do not form a tree rooted at piece {root}")]
    ParentCycle { root: PieceId },
    #[error("arc {0} is malformed: {1}")]
    BadArc(usize, String),
    #[error("attach point {vertex} is missing from piece {piece}")]
    AttachPointMissing { piece: PieceId, vertex: VertexId },
    #[error("piece index {0} out of range")]
    BadPiece(PieceId),
    #[error("realized edge ({0}, {1}) is stretched by the collapse map")]
    LipschitzViolation(VertexId, VertexId),
    #[error("pair ({x}, {y}): tree distance {d_t}, collapsed distance {d_x}, bound violated")]
    BoundViolated { x: VertexId, y: VertexId, d_t: u32, d_x: u32 },
}

/// One arc of the underlying tree, as realized vertices from the attach
/// point in `child` to the attach point in `parent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TgArc {
    pub child: PieceId,
    pub parent: PieceId,
    pub path: Vec<VertexId>,
}

impl TgArc {
    pub fn len(&self) -> u32 {
        (self.path.len() - 1) as u32
    }

    pub fn is_empty(&self) -> bool {
        self.path.len() <= 1
    }

    pub fn child_end(&self) -> VertexId {
        self.path[0]
    }

    pub fn parent_end(&self) -> VertexId {
        *self.path.last().unwrap()
    }
}

/// Arc request for [`TreeGradedSpace::assemble`], in piece-local vertex ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcSpec {
    pub child: PieceId,
    pub child_vertex: VertexId,
    pub parent: PieceId,
    pub parent_vertex: VertexId,
    pub length: u32,
}

/// A point of the realized space, located structurally.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TgPoint {
    /// Realized vertex `vertex` of piece copy `piece`.
    Piece { piece: PieceId, vertex: VertexId },
    /// Point at `offset` along the arc hanging `piece` from its parent;
    /// offset 0 is the child's attach point.
    Arc { piece: PieceId, offset: u32 },
}

#[derive(Debug)]
pub struct TreeGradedSpace {
    pub realized: MetricGraph,
    pub pieces: Vec<PointSet>,
    pub arcs: Vec<TgArc>,
    pub root: PieceId,
    /// For piece vertices, the vertex of the source piece it copies.
    pub source_of: Vec<Option<VertexId>>,
    arc_of_child: Vec<Option<usize>>,
    oracle: OnceLock<TgOracle>,
}

impl Clone for TreeGradedSpace {
    fn clone(&self) -> Self {
        TreeGradedSpace {
            realized: self.realized.clone(),
            pieces: self.pieces.clone(),
            arcs: self.arcs.clone(),
            root: self.root,
            source_of: self.source_of.clone(),
            arc_of_child: self.arc_of_child.clone(),
            oracle: OnceLock::new(),
        }
    }
}

impl TreeGradedSpace {
    /// Wraps hand-built data. Only index ranges and arc walks are checked,
    /// so the result may violate the tree-graded axioms; see
    /// [`verify_tree_graded`].
    pub fn from_parts(
        realized: MetricGraph,
        pieces: Vec<PointSet>,
        arcs: Vec<TgArc>,
        root: PieceId,
    ) -> Result<Self, TreeGradedError> {
        let n = realized.vertex_count();
        if root >= pieces.len() {
            return Err(TreeGradedError::BadPiece(root));
        }
        for p in &pieces {
            if let Some(v) = p.max() {
                realized.check_vertex(v)?;
            }
        }
        let mut arc_of_child = vec![None; pieces.len()];
        for (a, arc) in arcs.iter().enumerate() {
            if arc.child >= pieces.len() || arc.parent >= pieces.len() {
                return Err(TreeGradedError::BadArc(a, "piece index out of range".into()));
            }
            if arc.path.len() < 2 {
                return Err(TreeGradedError::BadArc(a, "arcs need at least one edge".into()));
            }
            if arc.path.iter().any(|&v| v >= n) || !crate::graph::PathWitness::new(arc.path.clone()).is_walk_in(&realized) {
                return Err(TreeGradedError::BadArc(a, "path is not a walk in the realized graph".into()));
            }
            if !pieces[arc.child].contains(arc.child_end()) || !pieces[arc.parent].contains(arc.parent_end()) {
                return Err(TreeGradedError::BadArc(a, "endpoints are not in their pieces".into()));
            }
            if arc_of_child[arc.child].replace(a).is_some() {
                return Err(TreeGradedError::BadArc(a, "piece hangs from two arcs".into()));
            }
        }
        let mut source_of = vec![None; n];
        for p in &pieces {
            for (local, v) in p.iter().enumerate() {
                source_of[v].get_or_insert(local);
            }
        }
        Ok(TreeGradedSpace { realized, pieces, arcs, root, source_of, arc_of_child, oracle: OnceLock::new() })
    }

    /// Lays out disjoint copies of the piece graphs, in order, then the
    /// interiors of the arcs. `sources[i][local]` labels each copied vertex.
    pub fn assemble(
        piece_graphs: &[MetricGraph],
        sources: Option<&[Vec<VertexId>]>,
        arcs: &[ArcSpec],
        root: PieceId,
    ) -> Result<Self, TreeGradedError> {
        let k = piece_graphs.len();
        if root >= k {
            return Err(TreeGradedError::BadPiece(root));
        }
        for (i, pg) in piece_graphs.iter().enumerate() {
            if !pg.is_connected() {
                return Err(TreeGradedError::PieceDisconnected(i));
            }
        }
        check_parent_tree(k, arcs, root)?;
        let mut offset = Vec::with_capacity(k);
        let mut total = 0;
        for pg in piece_graphs {
            offset.push(total);
            total += pg.vertex_count();
        }
        let mut edges = Vec::new();
        let mut pieces = Vec::with_capacity(k);
        let mut source_of = vec![None; total];
        for (i, pg) in piece_graphs.iter().enumerate() {
            edges.extend(pg.edges().iter().map(|&(u, v)| (u + offset[i], v + offset[i])));
            pieces.push((offset[i]..offset[i] + pg.vertex_count()).collect::<PointSet>());
            for local in 0..pg.vertex_count() {
                source_of[offset[i] + local] = Some(sources.map_or(local, |s| s[i][local]));
            }
        }
        let mut tg_arcs = Vec::with_capacity(arcs.len());
        for (a, spec) in arcs.iter().enumerate() {
            for (p, v) in [(spec.child, spec.child_vertex), (spec.parent, spec.parent_vertex)] {
                if v >= piece_graphs[p].vertex_count() {
                    return Err(TreeGradedError::AttachPointMissing { piece: p, vertex: v });
                }
            }
            if spec.length == 0 {
                return Err(TreeGradedError::BadArc(a, "arcs need at least one edge".into()));
            }
            let mut path = vec![offset[spec.child] + spec.child_vertex];
            for _ in 1..spec.length {
                path.push(total);
                source_of.push(None);
                total += 1;
            }
            path.push(offset[spec.parent] + spec.parent_vertex);
            edges.extend(path.windows(2).map(|w| (w[0], w[1])));
            tg_arcs.push(TgArc { child: spec.child, parent: spec.parent, path });
        }
        let realized = MetricGraph::new(total, &edges)?;
        let mut arc_of_child = vec![None; k];
        for (a, arc) in tg_arcs.iter().enumerate() {
            arc_of_child[arc.child] = Some(a);
        }
        Ok(TreeGradedSpace {
            realized,
            pieces,
            arcs: tg_arcs,
            root,
            source_of,
            arc_of_child,
            oracle: OnceLock::new(),
        })
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.realized.vertex_count()
    }

    /// Parent piece of `i` in the underlying tree.
    pub fn parent(&self, i: PieceId) -> Option<PieceId> {
        self.arc_of_child[i].map(|a| self.arcs[a].parent)
    }

    /// The arc hanging piece `i` from its parent.
    pub fn arc_of(&self, i: PieceId) -> Option<&TgArc> {
        self.arc_of_child[i].map(|a| &self.arcs[a])
    }

    /// Edges `{i, c(i)}` of the underlying tree.
    pub fn underlying_tree(&self) -> Vec<(PieceId, PieceId)> {
        self.arcs.iter().map(|a| (a.child, a.parent)).collect()
    }

    /// Piece copies followed by arcs; the family is tree-graded exactly
    /// when [`verify_tree_graded`] passes.
    pub fn tree_graded_pieces(&self) -> Vec<PointSet> {
        let mut out = self.pieces.clone();
        out.extend(self.arcs.iter().map(|a| a.path.iter().copied().collect::<PointSet>()));
        out
    }

    pub fn point_of(&self, v: VertexId) -> TgPoint {
        let o = self.oracle();
        match o.location[v] {
            Location::Piece(piece, _) => TgPoint::Piece { piece, vertex: v },
            Location::Arc(a, offset) => TgPoint::Arc { piece: self.arcs[a].child, offset },
        }
    }

    pub fn vertex_of(&self, p: TgPoint) -> Option<VertexId> {
        match p {
            TgPoint::Piece { piece, vertex } => self.pieces.get(piece)?.contains(vertex).then_some(vertex),
            TgPoint::Arc { piece, offset } => {
                let a = (*self.arc_of_child.get(piece)?)?;
                self.arcs[a].path.get(offset as usize).copied()
            }
        }
    }

    fn oracle(&self) -> &TgOracle {
        self.oracle.get_or_init(|| TgOracle::new(self))
    }

    /// Distance computed from the underlying tree: piece-internal distances
    /// between consecutive attach points plus arc lengths.
    pub fn tg_distance(&self, x: TgPoint, y: TgPoint) -> u32 {
        self.oracle().distance(self, x, y)
    }

    /// [`Self::tg_distance`] on realized vertex ids.
    pub fn tg_distance_vertices(&self, u: VertexId, v: VertexId) -> u32 {
        self.tg_distance(self.point_of(u), self.point_of(v))
    }
}

fn check_parent_tree(k: usize, arcs: &[ArcSpec], root: PieceId) -> Result<(), TreeGradedError> {
    let mut parent = vec![None; k];
    for (a, s) in arcs.iter().enumerate() {
        if s.child >= k || s.parent >= k {
            return Err(TreeGradedError::BadArc(a, "piece index out of range".into()));
        }
        if s.child == root || parent[s.child].replace(s.parent).is_some() {
            return Err(TreeGradedError::ParentCycle { root });
        }
    }
    for start in 0..k {
        let mut cur = start;
        let mut steps = 0;
        while cur != root {
            cur = parent[cur].ok_or(TreeGradedError::ParentCycle { root })?;
            steps += 1;
            if steps > k {
                return Err(TreeGradedError::ParentCycle { root });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
enum Location {
    /// Piece and local index.
    Piece(PieceId, usize),
    /// Arc index and offset from the child end (interior points only).
    Arc(usize, u32),
}

#[derive(Debug)]
struct TgOracle {
    location: Vec<Location>,
    /// Per piece, all-pairs distances of the induced copy in local indices.
    within: Vec<Vec<Vec<u32>>>,
    depth: Vec<u32>,
}

impl TgOracle {
    fn new(t: &TreeGradedSpace) -> Self {
        let n = t.vertex_count();
        let mut location = vec![Location::Piece(usize::MAX, 0); n];
        for (i, p) in t.pieces.iter().enumerate() {
            for (local, v) in p.iter().enumerate() {
                location[v] = Location::Piece(i, local);
            }
        }
        for (a, arc) in t.arcs.iter().enumerate() {
            for (o, &v) in arc.path.iter().enumerate().take(arc.path.len() - 1).skip(1) {
                location[v] = Location::Arc(a, o as u32);
            }
        }
        let within = t
            .pieces
            .par_iter()
            .map(|p| t.realized.induced_subgraph(p).0.all_pairs())
            .collect();
        let mut depth = vec![u32::MAX; t.piece_count()];
        depth[t.root] = 0;
        fn fill(t: &TreeGradedSpace, depth: &mut [u32], i: PieceId) -> u32 {
            if depth[i] == u32::MAX {
                let p = t.parent(i).expect("non-root pieces have parents");
                depth[i] = fill(t, depth, p) + 1;
            }
            depth[i]
        }
        for i in 0..t.piece_count() {
            fill(t, &mut depth, i);
        }
        TgOracle { location, within, depth }
    }

    fn local(&self, v: VertexId) -> usize {
        match self.location[v] {
            Location::Piece(_, l) => l,
            Location::Arc(..) => unreachable!("attach points lie in pieces"),
        }
    }

    /// Distance between realized vertex `u` of piece `a` and `v` of piece `b`.
    fn piece_distance(&self, t: &TreeGradedSpace, mut a: PieceId, mut u: VertexId, mut b: PieceId, mut v: VertexId) -> u32 {
        let mut total = 0;
        while a != b {
            let climb_a = self.depth[a] >= self.depth[b];
            let (piece, cur) = if climb_a { (a, u) } else { (b, v) };
            let arc = t.arc_of(piece).expect("non-root pieces have arcs");
            total += self.within[piece][self.local(cur)][self.local(arc.child_end())] + arc.len();
            if climb_a {
                a = arc.parent;
                u = arc.parent_end();
            } else {
                b = arc.parent;
                v = arc.parent_end();
            }
        }
        total + self.within[a][self.local(u)][self.local(v)]
    }

    fn anchors(&self, t: &TreeGradedSpace, p: TgPoint) -> Vec<(PieceId, VertexId, u32)> {
        match p {
            TgPoint::Piece { piece, vertex } => vec![(piece, vertex, 0)],
            TgPoint::Arc { piece, offset } => {
                let arc = t.arc_of(piece).expect("arc points name a non-root piece");
                vec![(arc.child, arc.child_end(), offset), (arc.parent, arc.parent_end(), arc.len() - offset)]
            }
        }
    }

    fn distance(&self, t: &TreeGradedSpace, x: TgPoint, y: TgPoint) -> u32 {
        if let (TgPoint::Arc { piece: p, offset: o1 }, TgPoint::Arc { piece: q, offset: o2 }) = (x, y) {
            if p == q {
                return o1.abs_diff(o2);
            }
        }
        let ax = self.anchors(t, x);
        let ay = self.anchors(t, y);
        let mut best = u32::MAX;
        for &(pa, va, ea) in &ax {
            for &(pb, vb, eb) in &ay {
                best = best.min(ea + self.piece_distance(t, pa, va, pb, vb) + eb);
            }
        }
        best
    }
}

/// Builds `T(X)`: copies of `N_{4M}(X_i)` and, for each non-base piece, an
/// arc of length `d(e_i, c_i)` from the copy of `e_i` to the copy of `c_i` in
/// the parent's copy.
pub fn build_tree_graded(state: &ConstructionState) -> Result<TreeGradedSpace, TreeGradedError> {
    let g = state.graph();
    let m = state.m();
    let parts: Vec<(MetricGraph, Vec<VertexId>)> = state
        .structure
        .decomposition
        .pieces()
        .par_iter()
        .map(|p| g.induced_subgraph(&g.closed_neighborhood(p, 4 * m)))
        .collect();
    let local_of = |i: PieceId, v: VertexId| parts[i].1.binary_search(&v).ok();
    let mut arcs = Vec::new();
    for i in 0..state.piece_count() {
        let Some(parent) = state.parent[i] else { continue };
        let ei = state.anchor(i);
        let ci = state.c_points[i];
        let length = state.dist_e[ei] - state.dist_e[ci];
        arcs.push(ArcSpec {
            child: i,
            child_vertex: local_of(i, ei).ok_or(TreeGradedError::AttachPointMissing { piece: i, vertex: ei })?,
            parent,
            parent_vertex: local_of(parent, ci).ok_or(TreeGradedError::AttachPointMissing { piece: parent, vertex: ci })?,
            length,
        });
    }
    let (graphs, sources): (Vec<MetricGraph>, Vec<Vec<VertexId>>) = parts.into_iter().unzip();
    TreeGradedSpace::assemble(&graphs, Some(&sources), &arcs, state.e_piece)
}

/// Vertex map from the realized `T(X)` back to `X`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseMap {
    pub phi: Vec<VertexId>,
}

impl CollapseMap {
    pub fn apply(&self, v: VertexId) -> VertexId {
        self.phi[v]
    }

    /// True when every vertex of `x` is hit.
    pub fn is_surjective(&self, x: &MetricGraph) -> bool {
        let mut hit = vec![false; x.vertex_count()];
        for &v in &self.phi {
            hit[v] = true;
        }
        hit.into_iter().all(|h| h)
    }
}

/// Piece copies go to their originals; arc vertices go along `g_i`. Checks
/// that every realized edge maps to an edge or a vertex.
pub fn collapse(t: &TreeGradedSpace, state: &ConstructionState) -> Result<CollapseMap, TreeGradedError> {
    let mut phi: Vec<VertexId> = t.source_of.iter().map(|s| s.unwrap_or(usize::MAX)).collect();
    for arc in &t.arcs {
        let gi = state.geodesics[arc.child].as_ref().expect("arcs hang non-base pieces");
        for (o, &v) in arc.path.iter().enumerate().take(arc.path.len() - 1).skip(1) {
            phi[v] = gi.vertices()[o];
        }
    }
    let x = state.graph();
    for &(u, v) in t.realized.edges() {
        let (a, b) = (phi[u], phi[v]);
        if a != b && !x.has_edge(a, b) {
            return Err(TreeGradedError::LipschitzViolation(u, v));
        }
    }
    Ok(CollapseMap { phi })
}

/// Largest vertex count scanned exhaustively, from the environment when set.
pub fn exhaustive_limit(default: usize) -> usize {
    std::env::var(EXHAUSTIVE_LIMIT_VAR).ok().and_then(|v| v.parse().ok()).unwrap_or(default)
}

/// All pairs up to the exhaustive limit (800 unless overridden), else a
/// seeded sample of `sample` pairs.
pub fn auto_selection(n: usize, sample: usize, seed: u64) -> PairSelection {
    if n <= exhaustive_limit(800) {
        PairSelection::All
    } else {
        PairSelection::Sample { k: sample, seed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub m: u32,
    pub additive_bound: u32,
    pub pairs_examined: usize,
    pub exhaustive: bool,
    /// Largest `d_T(x, y) - d_X(φx, φy)`.
    pub max_excess: i64,
    pub max_excess_pair: Option<(VertexId, VertexId)>,
    pub lipschitz_violations: usize,
    pub bound_violations: usize,
    pub first_lipschitz_violation: Option<(VertexId, VertexId, u32, u32)>,
    pub first_bound_violation: Option<(VertexId, VertexId, u32, u32)>,
    pub bound_satisfied: bool,
    /// Excess value to number of pairs.
    pub histogram: BTreeMap<i64, usize>,
}

impl DistortionReport {
    pub fn ensure(&self) -> Result<(), TreeGradedError> {
        let first = self.first_lipschitz_violation.or(self.first_bound_violation);
        match first {
            Some((x, y, d_t, d_x)) => Err(TreeGradedError::BoundViolated { x, y, d_t, d_x }),
            None => Ok(()),
        }
    }
}

/// Compares `d_T` with `d_X ∘ φ` on the selected pairs of realized vertices:
/// `d_X(φx, φy) <= d_T(x, y) <= 2 d_X(φx, φy) + 3552 M`.
pub fn measure_distortion(
    t: &TreeGradedSpace,
    phi: &CollapseMap,
    x: &MetricGraph,
    m: u32,
    pairs: &PairSelection,
) -> DistortionReport {
    let n = t.vertex_count();
    let additive = DISTORTION_ADDITIVE * m;
    let selected = pairs.select(n);
    let mut by_source: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &(a, b) in &selected {
        by_source.entry(a).or_default().push(b);
    }
    type Row = (i64, Option<(usize, usize)>, Vec<(usize, usize, u32, u32)>, Vec<(usize, usize, u32, u32)>, BTreeMap<i64, usize>);
    let rows: Vec<Row> = by_source
        .par_iter()
        .map(|(&a, bs)| {
            let dt = t.realized.distances_from(a);
            let dx = x.distances_from(phi.phi[a]);
            let mut best = (i64::MIN, None);
            let mut lip = Vec::new();
            let mut bnd = Vec::new();
            let mut hist = BTreeMap::new();
            for &b in bs {
                let (d_t, d_x) = (dt[b], dx[phi.phi[b]]);
                let excess = d_t as i64 - d_x as i64;
                if excess > best.0 {
                    best = (excess, Some((a, b)));
                }
                *hist.entry(excess).or_insert(0) += 1;
                if d_x > d_t {
                    lip.push((a, b, d_t, d_x));
                }
                if d_t > 2 * d_x + additive {
                    bnd.push((a, b, d_t, d_x));
                }
            }
            (best.0, best.1, lip, bnd, hist)
        })
        .collect();
    let mut report = DistortionReport {
        m,
        additive_bound: additive,
        pairs_examined: selected.len(),
        exhaustive: pairs.is_exhaustive_for(n),
        max_excess: 0,
        max_excess_pair: None,
        lipschitz_violations: 0,
        bound_violations: 0,
        first_lipschitz_violation: None,
        first_bound_violation: None,
        bound_satisfied: true,
        histogram: BTreeMap::new(),
    };
    for (best, pair, lip, bnd, hist) in rows {
        if pair.is_some() && (report.max_excess_pair.is_none() || best > report.max_excess) {
            report.max_excess = best;
            report.max_excess_pair = pair;
        }
        report.lipschitz_violations += lip.len();
        report.bound_violations += bnd.len();
        if report.first_lipschitz_violation.is_none() {
            report.first_lipschitz_violation = lip.first().copied();
        }
        if report.first_bound_violation.is_none() {
            report.first_bound_violation = bnd.first().copied();
        }
        for (k, c) in hist {
            *report.histogram.entry(k).or_insert(0) += c;
        }
    }
    report.bound_satisfied = report.lipschitz_violations == 0 && report.bound_violations == 0;
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeGradedReport {
    /// Piece copies and arcs pairwise share at most one vertex.
    pub intersections_ok: bool,
    /// Two parts sharing too much, with the number of shared vertices.
    pub worst_intersection: Option<(usize, usize, usize)>,
    /// Arcs form a tree on the pieces.
    pub tree_ok: bool,
    /// Every biconnected block with a cycle lies inside one piece copy.
    pub blocks_ok: bool,
    pub bad_block: Option<Vec<VertexId>>,
    /// Every realized edge lies in a piece copy or an arc.
    pub edges_covered: bool,
    pub pieces_connected: bool,
    pub passed: bool,
}

/// Structural tree-graded test: intersections, the underlying tree, and
/// cycles confined to single pieces.
pub fn verify_tree_graded(t: &TreeGradedSpace) -> TreeGradedReport {
    let n = t.vertex_count();
    let parts = t.tree_graded_pieces();
    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (p, set) in parts.iter().enumerate() {
        for v in set.iter() {
            membership[v].push(p);
        }
    }

    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    for m in &membership {
        for (a, &p) in m.iter().enumerate() {
            for &q in &m[a + 1..] {
                *shared.entry((p, q)).or_insert(0) += 1;
            }
        }
    }
    let worst_intersection = shared
        .iter()
        .filter(|(_, &c)| c > 1)
        .map(|(&(p, q), &c)| (p, q, c))
        .min();

    let k = t.piece_count();
    let tree_ok = t.arcs.len() + 1 == k && {
        let mut uf: Vec<usize> = (0..k).collect();
        fn find(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        t.arcs.iter().all(|a| {
            let (x, y) = (find(&mut uf, a.child), find(&mut uf, a.parent));
            uf[x] = y;
            x != y
        })
    };

    let edges_covered = t.realized.edges().iter().all(|&(u, v)| {
        membership[u].iter().any(|&p| {
            if p < k {
                parts[p].contains(v)
            } else {
                t.arcs[p - k].path.windows(2).any(|w| (w[0] == u && w[1] == v) || (w[0] == v && w[1] == u))
            }
        })
    });

    let bad_block = biconnected_blocks(&t.realized)
        .into_iter()
        .filter(|b| b.len() >= 3)
        .find(|b| !t.pieces.iter().any(|p| b.iter().all(|&v| p.contains(v))));

    let pieces_connected = t.pieces.iter().all(|p| t.realized.induced_subgraph(p).0.is_connected());
    let intersections_ok = worst_intersection.is_none();
    let blocks_ok = bad_block.is_none();
    TreeGradedReport {
        intersections_ok,
        worst_intersection,
        tree_ok,
        blocks_ok,
        bad_block,
        edges_covered,
        pieces_connected,
        passed: intersections_ok && tree_ok && blocks_ok && edges_covered && pieces_connected,
    }
}

/// Vertex sets of the biconnected blocks, by an iterative edge-stack DFS.
pub fn biconnected_blocks(g: &MetricGraph) -> Vec<Vec<VertexId>> {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut blocks = Vec::new();
    let mut edge_stack: Vec<(VertexId, VertexId)> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        // (vertex, parent, next neighbour index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        while let Some(&mut (u, parent, ref mut idx)) = stack.last_mut() {
            let nbrs = g.neighbors(u);
            if *idx < nbrs.len() {
                let v = nbrs[*idx];
                *idx += 1;
                if v == parent {
                    continue;
                }
                if disc[v] == usize::MAX {
                    edge_stack.push((u, v));
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    stack.push((v, u, 0));
                } else if disc[v] < disc[u] {
                    edge_stack.push((u, v));
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] >= disc[parent] {
                        let mut block = Vec::new();
                        while let Some((a, b)) = edge_stack.pop() {
                            block.push(a);
                            block.push(b);
                            if (a, b) == (parent, u) {
                                break;
                            }
                        }
                        block.sort_unstable();
                        block.dedup();
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}
