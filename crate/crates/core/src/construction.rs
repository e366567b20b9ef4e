//! Stratified construction on a verified structure: basepoints `e_i`,
//! geodesics `g_i` to the global basepoint, levels of width `R`, the points
//! `c_i`, the level relation `∼` and the parent map `c`.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{MetricGraph, PathWitness, PointSet, VertexId, UNREACHABLE};
use crate::rbp::{
    find_small_cut, search_with, verify_bottleneck_chain, BottleneckChain, CuttingBall, PieceId, RbpError,
    RbpStructure, SeparationOracle,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error(transparent)]
    Rbp(#[from] RbpError),
    #[error("no vertex of the base piece lies in a unique piece")]
    NoPrivateBasepoint,
    #[error("declared basepoint {0} is not private to the base piece")]
    BasepointNotPrivate(VertexId),
    #[error("no certificate from piece {0} to the base piece")]
    MissingCertificate(PieceId),
    #[error("certificate from piece {0} to the base piece does not verify")]
    InvalidCertificate(PieceId),
    #[error("basepoint of piece {i} lies at distance {distance} from e, above the bound {bound}")]
    BasepointBoundViolated { i: PieceId, distance: u32, bound: u32 },
    #[error("piece {0} has its basepoint at e")]
    BaseStratumNotSingleton(PieceId),
    #[error("stratum width must be positive")]
    ZeroWidth,
    #[error("piece {} is cut by the ball B({}; {}) whose trace has diameter {}", .0.piece, .0.center, .0.radius, .0.diameter)]
    SmallCut(CuttingBall),
    #[error("level relation is not transitive: {i} ~ {j} and {j} ~ {l} but not {i} ~ {l}")]
    NotTransitive { i: PieceId, j: PieceId, l: PieceId, first: PathWitness, second: PathWitness },
    #[error("c-point of piece {j} is farther than 4M from the parent piece {k}")]
    GlueViolated { j: PieceId, k: PieceId },
    #[error("vertex {x} is farther than 4M from piece {i}")]
    OutOfReach { x: VertexId, i: PieceId },
    #[error("path from {x} through piece {i} has length {length}, above {bound}")]
    SlackExceeded { x: VertexId, i: PieceId, length: u32, bound: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionConfig {
    /// Stratum width; `None` means `160 M`.
    pub r: Option<u32>,
    /// When set, refuse inputs where a ball of radius at most `b` with small
    /// trace disconnects a piece.
    pub cut_check: Option<u32>,
    /// Run the consequence checks recorded in the trace.
    pub checks: bool,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        ConstructionConfig { r: None, cut_check: None, checks: true }
    }
}

/// Counters for the runtime checks of the construction.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub checked: usize,
    pub failures: usize,
    pub first_failure: Option<(usize, usize)>,
}

impl CheckSummary {
    fn record(&mut self, ok: bool, at: (usize, usize)) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            self.first_failure.get_or_insert(at);
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackSummary {
    pub checked: usize,
    pub max_slack: u32,
    pub bound: u32,
    pub violations: usize,
    pub outside_region: usize,
}

/// Everything decided along the way, in a form that can be exported.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub m: u32,
    pub r: u32,
    pub e_piece: PieceId,
    pub e_vertex: VertexId,
    pub basepoints: Vec<Option<VertexId>>,
    pub basepoint_distances: Vec<u32>,
    pub levels: Vec<u32>,
    pub c_points: Vec<VertexId>,
    pub classes: Vec<Vec<Vec<PieceId>>>,
    pub parents: Vec<Option<PieceId>>,
    /// Pieces whose certificate had to be searched again for a closer first witness.
    pub researched: Vec<PieceId>,
    /// Classes (by smallest member) that fell back to the base piece as parent.
    pub parent_fallbacks: Vec<PieceId>,
    pub small_cut_checked: bool,
    pub transitivity: CheckSummary,
    pub glue_containment: CheckSummary,
    pub basepoint_blocking: CheckSummary,
    pub slack: SlackSummary,
}

#[derive(Clone, Debug)]
pub struct ConstructionState {
    pub structure: RbpStructure,
    pub r: u32,
    pub e_piece: PieceId,
    pub e_vertex: VertexId,
    /// `e_i`; `None` for the base piece.
    pub basepoints: Vec<Option<VertexId>>,
    /// `g_i` from `e_i` to `e`; `None` for the base piece.
    pub geodesics: Vec<Option<PathWitness>>,
    pub levels: Vec<u32>,
    pub c_points: Vec<VertexId>,
    /// `classes[n]` partitions the pieces of level `n`.
    pub classes: Vec<Vec<Vec<PieceId>>>,
    pub parent: Vec<Option<PieceId>>,
    /// The chains to the base piece the basepoints were read from.
    pub chains: Vec<Option<BottleneckChain>>,
    pub dist_e: Vec<u32>,
    pub trace: ConstructionTrace,
}

impl ConstructionState {
    pub fn m(&self) -> u32 {
        self.structure.m()
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.structure.graph
    }

    pub fn piece_count(&self) -> usize {
        self.structure.piece_count()
    }

    /// `e_i`, with `e` standing in for the base piece.
    pub fn anchor(&self, i: PieceId) -> VertexId {
        self.basepoints[i].unwrap_or(self.e_vertex)
    }

    pub fn max_level(&self) -> u32 {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    /// Pieces with level at most `n`.
    pub fn up_to_level(&self, n: u32) -> Vec<PieceId> {
        (0..self.piece_count()).filter(|&i| self.levels[i] <= n).collect()
    }

    pub fn at_level(&self, n: u32) -> Vec<PieceId> {
        (0..self.piece_count()).filter(|&i| self.levels[i] == n).collect()
    }

    /// A path from `x` to `e` through `X_i`, `e_i` and `g_i` whose length
    /// exceeds `d(x, e)` by at most `10 M`.
    pub fn slack_geodesic(&self, x: VertexId, i: PieceId) -> Result<SlackGeodesic, ConstructionError> {
        let g = self.graph();
        g.check_vertex(x).map_err(RbpError::from)?;
        let m = self.m();
        let piece = self.structure.piece(i);
        let (to_piece, nearest) = nearest_in_set(g, piece);
        if to_piece[x] > 4 * m {
            return Err(ConstructionError::OutOfReach { x, i });
        }
        let x1 = nearest[x];
        let ei = self.anchor(i);
        let mut path = g.canonical_geodesic(x, x1).concat(&g.canonical_geodesic(x1, ei));
        if let Some(gi) = &self.geodesics[i] {
            path = path.concat(gi);
        }
        let bound = self.dist_e[x] + 10 * m;
        if path.len() as u32 > bound {
            return Err(ConstructionError::SlackExceeded { x, i, length: path.len() as u32, bound });
        }
        let reach = self.levels[i] * self.r;
        let contained = path.vertices().iter().all(|&v| self.dist_e[v] <= reach || to_piece[v] <= 4 * m);
        Ok(SlackGeodesic { slack: path.len() as u32 - self.dist_e[x], path, bound: 10 * m, contained })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlackGeodesic {
    pub path: PathWitness,
    pub slack: u32,
    pub bound: u32,
    /// Every vertex lies in `N_{4M}(X_i)` or in the closed ball of radius
    /// `lv(i) R` about `e`.
    pub contained: bool,
}

/// Distances to a set and, for each vertex, its smallest-id nearest member.
pub fn nearest_in_set(g: &MetricGraph, set: &PointSet) -> (Vec<u32>, Vec<VertexId>) {
    let n = g.vertex_count();
    let mut dist = vec![UNREACHABLE; n];
    let mut near = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    for s in set.iter() {
        dist[s] = 0;
        near[s] = s;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in g.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    for &v in &order {
        if dist[v] == 0 {
            continue;
        }
        near[v] = g
            .neighbors(v)
            .iter()
            .filter(|&&u| dist[u] != UNREACHABLE && dist[u] + 1 == dist[v])
            .map(|&u| near[u])
            .min()
            .expect("BFS order settles predecessors first");
    }
    (dist, near)
}

/// Picks the private basepoint `e` of the base piece.
fn choose_basepoint(s: &RbpStructure) -> Result<VertexId, ConstructionError> {
    match s.basepoint {
        Some(e) => {
            let membership = s.decomposition.membership(s.graph.vertex_count());
            if e < membership.len() && membership[e] == [s.decomposition.base()] {
                Ok(e)
            } else {
                Err(ConstructionError::BasepointNotPrivate(e))
            }
        }
        None => s.private_base_vertex().ok_or(ConstructionError::NoPrivateBasepoint),
    }
}

/// Reads `e_i` off the chain to the base piece and fixes `g_i`.
pub fn compute_basepoints(
    s: &RbpStructure,
    e_vertex: VertexId,
    dist_e: &[u32],
    trace: &mut ConstructionTrace,
) -> Result<(Vec<Option<VertexId>>, Vec<Option<PathWitness>>, Vec<Option<BottleneckChain>>), ConstructionError> {
    let k = s.piece_count();
    let e_piece = s.decomposition.base();
    let m = s.m();
    let g = &s.graph;
    let n = g.vertex_count();
    let candidates = s.decomposition.intersection_vertices(n);
    let membership = s.decomposition.membership(n);
    let oracle = SeparationOracle::new(g, &s.decomposition, m, &candidates);

    let per_piece: Vec<Result<Option<(VertexId, BottleneckChain, bool)>, ConstructionError>> = (0..k)
        .into_par_iter()
        .map(|i| {
            if i == e_piece {
                return Ok(None);
            }
            let chain = s.certificate(i, e_piece).ok_or(ConstructionError::MissingCertificate(i))?;
            if !verify_bottleneck_chain(s, &chain)?.holds() {
                return Err(ConstructionError::InvalidCertificate(i));
            }
            let bound = s.piece(i).iter().map(|v| dist_e[v]).min().unwrap() + m;
            let w0 = chain.witnesses[0];
            if dist_e[w0] <= bound {
                return Ok(Some((w0, chain, false)));
            }
            let ok = |w: VertexId| dist_e[w] <= bound;
            match search_with(&oracle, &candidates, &membership, i, e_piece, &ok) {
                Some(c) => Ok(Some((c.witnesses[0], c, true))),
                None => Err(ConstructionError::BasepointBoundViolated { i, distance: dist_e[w0], bound }),
            }
        })
        .collect();

    let mut basepoints = vec![None; k];
    let mut geodesics = vec![None; k];
    let mut chains = vec![None; k];
    for (i, r) in per_piece.into_iter().enumerate() {
        if let Some((ei, chain, researched)) = r? {
            if researched {
                trace.researched.push(i);
            }
            basepoints[i] = Some(ei);
            geodesics[i] = Some(g.canonical_geodesic(ei, e_vertex));
            chains[i] = Some(chain);
        }
    }
    Ok((basepoints, geodesics, chains))
}

/// `lv(i) = ⌈d(e, e_i) / R⌉`, and `0` for the base piece.
pub fn compute_strata(
    basepoints: &[Option<VertexId>],
    dist_e: &[u32],
    r: u32,
) -> Result<Vec<u32>, ConstructionError> {
    if r == 0 {
        return Err(ConstructionError::ZeroWidth);
    }
    basepoints
        .iter()
        .enumerate()
        .map(|(i, b)| match *b {
            None => Ok(0),
            Some(ei) if dist_e[ei] == 0 => Err(ConstructionError::BaseStratumNotSingleton(i)),
            Some(ei) => Ok(dist_e[ei].div_ceil(r)),
        })
        .collect()
}

/// The vertex of `g_i` at distance `(lv(i) - 1) R` from `e`.
pub fn compute_c_points(
    geodesics: &[Option<PathWitness>],
    levels: &[u32],
    r: u32,
    e_vertex: VertexId,
) -> Vec<VertexId> {
    geodesics
        .iter()
        .zip(levels)
        .map(|(g, &lv)| match g {
            None => e_vertex,
            Some(g) => {
                let back = ((lv - 1) * r) as usize;
                g.vertices()[g.len() - back]
            }
        })
        .collect()
}

/// The vertex set through which `∼` looks for paths when `k` is the
/// witnessing piece: everything outside `B(e; radius)` plus the part of
/// `N_{4M}(X_k)` inside it.
pub fn relation_region(dist_e: &[u32], radius: u32, near_k: &[u32], m: u32) -> Vec<bool> {
    dist_e
        .iter()
        .zip(near_k)
        .map(|(&de, &dk)| de >= radius || dk <= 4 * m)
        .collect()
}

/// The relation `∼` on one level and the partition it induces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelRelation {
    pub level: u32,
    pub members: Vec<PieceId>,
    /// `related[a][b]` for members `a`, `b`.
    pub related: Vec<Vec<bool>>,
    /// For each related pair, one witnessing piece `k`.
    pub via: Vec<Vec<Option<PieceId>>>,
    pub classes: Vec<Vec<PieceId>>,
}

/// Computes `∼` on the pieces of `level` (at least 1): `i ∼ j` when some path
/// from `X_i` to `X_j` meets `B(e; (level-1) R + 11 M)` only inside one
/// `N_{4M}(X_k)` with `lv(k) < level`. Fails if the relation is not transitive.
pub fn level_equivalence(state: &ConstructionState, level: u32) -> Result<LevelRelation, ConstructionError> {
    let near: Vec<Vec<u32>> = state
        .up_to_level(level.saturating_sub(1))
        .into_iter()
        .map(|k| state.graph().distances_from_set(state.structure.piece(k)))
        .collect();
    level_relation(
        state.graph(),
        state.structure.decomposition.pieces(),
        &state.levels,
        &state.dist_e,
        state.r,
        state.m(),
        level,
        &near,
    )
}

#[allow(clippy::too_many_arguments)]
fn level_relation(
    g: &MetricGraph,
    pieces: &[PointSet],
    levels: &[u32],
    dist_e: &[u32],
    r: u32,
    m: u32,
    level: u32,
    near_lower: &[Vec<u32>],
) -> Result<LevelRelation, ConstructionError> {
    assert!(level >= 1, "the base level has a single piece");
    let members: Vec<PieceId> = (0..pieces.len()).filter(|&i| levels[i] == level).collect();
    let lower: Vec<PieceId> = (0..pieces.len()).filter(|&i| levels[i] < level).collect();
    debug_assert_eq!(lower.len(), near_lower.len());
    let radius = (level - 1) * r + 11 * m;
    let size = members.len();

    let per_k: Vec<Vec<Vec<bool>>> = near_lower
        .par_iter()
        .map(|near_k| {
            let region = relation_region(dist_e, radius, near_k, m);
            let labels = g.component_labels(&region);
            let comps: Vec<Vec<u32>> = members
                .iter()
                .map(|&i| {
                    let mut c: Vec<u32> = pieces[i].iter().filter_map(|v| labels[v]).collect();
                    c.sort_unstable();
                    c.dedup();
                    c
                })
                .collect();
            (0..size)
                .map(|a| (0..size).map(|b| a == b || shares(&comps[a], &comps[b])).collect())
                .collect()
        })
        .collect();

    let mut related = vec![vec![false; size]; size];
    let mut via = vec![vec![None; size]; size];
    for a in 0..size {
        related[a][a] = true;
        for b in 0..size {
            if a == b {
                continue;
            }
            if let Some(t) = per_k.iter().position(|rel| rel[a][b]) {
                related[a][b] = true;
                via[a][b] = Some(lower[t]);
            }
        }
    }

    for a in 0..size {
        for b in 0..size {
            if a == b || !related[a][b] {
                continue;
            }
            for c in 0..size {
                if c != a && c != b && related[b][c] && !related[a][c] {
                    let path = |x: usize, y: usize| {
                        let k = via[x][y].unwrap();
                        let t = lower.iter().position(|&q| q == k).unwrap();
                        let region = relation_region(dist_e, radius, &near_lower[t], m);
                        g.find_path_within(&pieces[members[x]], &pieces[members[y]], &region)
                            .expect("related pieces are joined inside the region")
                    };
                    return Err(ConstructionError::NotTransitive {
                        i: members[a],
                        j: members[b],
                        l: members[c],
                        first: path(a, b),
                        second: path(b, c),
                    });
                }
            }
        }
    }

    let mut classes: Vec<Vec<PieceId>> = Vec::new();
    let mut assigned = vec![false; size];
    for a in 0..size {
        if assigned[a] {
            continue;
        }
        let class: Vec<PieceId> = (a..size).filter(|&b| related[a][b]).collect();
        for &b in &class {
            assigned[b] = true;
        }
        classes.push(class.into_iter().map(|b| members[b]).collect());
    }
    Ok(LevelRelation { level, members, related, via, classes })
}

fn shares(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// A parent for one class, with the witness that selected it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParentChoice {
    pub parent: PieceId,
    pub witness: Option<VertexId>,
    pub fallback: bool,
}

/// Chooses the parent of a class at `level`: among witnesses `w` of the
/// chains from class members `i'` to the base piece, lying in a chain piece
/// `k` with `lv(k) < lv(i')` and `d(e, w) >= (level-1) R - M`, the one
/// farthest from `e`; ties go to the smallest `k`, then the smallest
/// `d(e, e_k)`.
pub fn choose_parent(state: &ConstructionState, class: &[PieceId], level: u32) -> ParentChoice {
    if level <= 1 {
        return ParentChoice { parent: state.e_piece, witness: None, fallback: false };
    }
    let floor = ((level - 1) * state.r).saturating_sub(state.m());
    let mut best: Option<(u32, PieceId, u32, VertexId)> = None;
    for &i in class {
        let chain = state.chains[i].as_ref().expect("non-base pieces carry a chain");
        for (r, &w) in chain.witnesses.iter().enumerate() {
            let dw = state.dist_e[w];
            if dw < floor {
                continue;
            }
            for k in [chain.pieces[r], chain.pieces[r + 1]] {
                if state.levels[k] >= state.levels[i] {
                    continue;
                }
                let cand = (dw, k, state.dist_e[state.anchor(k)], w);
                let better = match best {
                    None => true,
                    Some(b) => cand.0 > b.0 || (cand.0 == b.0 && (cand.1, cand.2) < (b.1, b.2)),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
    }
    match best {
        Some((_, k, _, w)) => ParentChoice { parent: k, witness: Some(w), fallback: false },
        None => ParentChoice { parent: state.e_piece, witness: None, fallback: true },
    }
}

/// Runs the whole construction.
pub fn construct(s: &RbpStructure, config: &ConstructionConfig) -> Result<ConstructionState, ConstructionError> {
    let m = s.m();
    let r = config.r.unwrap_or(160 * m);
    if r == 0 {
        return Err(ConstructionError::ZeroWidth);
    }
    let e_vertex = choose_basepoint(s)?;
    if let Some(b) = config.cut_check {
        if let Some(cut) = find_small_cut(s, b) {
            return Err(ConstructionError::SmallCut(cut));
        }
    }
    let g = &s.graph;
    let k = s.piece_count();
    let e_piece = s.decomposition.base();
    let dist_e = g.distances_from(e_vertex);
    let mut trace = ConstructionTrace {
        m,
        r,
        e_piece,
        e_vertex,
        small_cut_checked: config.cut_check.is_some(),
        ..ConstructionTrace::default()
    };

    let (basepoints, geodesics, chains) = compute_basepoints(s, e_vertex, &dist_e, &mut trace)?;
    let levels = compute_strata(&basepoints, &dist_e, r)?;
    let c_points = compute_c_points(&geodesics, &levels, r, e_vertex);
    let max_level = levels.iter().copied().max().unwrap_or(0);

    let mut state = ConstructionState {
        structure: s.clone(),
        r,
        e_piece,
        e_vertex,
        basepoints,
        geodesics,
        levels,
        c_points,
        classes: vec![vec![vec![e_piece]]],
        parent: vec![None; k],
        chains,
        dist_e,
        trace,
    };

    let near: Vec<Vec<u32>> = s.decomposition.pieces().par_iter().map(|p| g.distances_from_set(p)).collect();
    for level in 1..=max_level {
        let lower: Vec<Vec<u32>> = (0..k).filter(|&q| state.levels[q] < level).map(|q| near[q].clone()).collect();
        let rel = level_relation(
            g,
            s.decomposition.pieces(),
            &state.levels,
            &state.dist_e,
            r,
            m,
            level,
            &lower,
        )?;
        let size = rel.members.len();
        state.trace.transitivity.checked += size * size.saturating_sub(1) * size.saturating_sub(2);
        for class in &rel.classes {
            let choice = choose_parent(&state, class, level);
            if choice.fallback {
                state.trace.parent_fallbacks.push(class[0]);
            }
            for &j in class {
                state.parent[j] = Some(choice.parent);
                let ok = near[choice.parent][state.c_points[j]] <= 4 * m;
                state.trace.glue_containment.record(ok, (j, choice.parent));
                if !ok {
                    return Err(ConstructionError::GlueViolated { j, k: choice.parent });
                }
            }
        }
        state.classes.push(rel.classes);
    }

    if config.checks {
        state.trace.basepoint_blocking = basepoint_blocking(&state);
        state.trace.slack = slack_summary(&state, &near);
    }
    state.trace.basepoints = state.basepoints.clone();
    state.trace.basepoint_distances = (0..k).map(|i| state.dist_e[state.anchor(i)]).collect();
    state.trace.levels = state.levels.clone();
    state.trace.c_points = state.c_points.clone();
    state.trace.classes = state.classes.clone();
    state.trace.parents = state.parent.clone();
    Ok(state)
}

/// For `i != j` with `d(e_i, e) >= d(e_j, e)`, the ball `B(e_i; 4M)` must meet
/// every path from `X_i` to `X_j`.
fn basepoint_blocking(state: &ConstructionState) -> CheckSummary {
    let g = state.graph();
    let m = state.m();
    let k = state.piece_count();
    let rows: Vec<Vec<(usize, bool)>> = (0..k)
        .into_par_iter()
        .filter(|&i| i != state.e_piece)
        .map(|i| {
            let ei = state.anchor(i);
            let d = g.distances_from(ei);
            let allowed: Vec<bool> = d.iter().map(|&x| x >= 4 * m).collect();
            let labels = g.component_labels(&allowed);
            let mine: Vec<u32> = {
                let mut c: Vec<u32> = state.structure.piece(i).iter().filter_map(|v| labels[v]).collect();
                c.sort_unstable();
                c.dedup();
                c
            };
            (0..k)
                .filter(|&j| j != i && state.dist_e[state.anchor(j)] <= state.dist_e[ei])
                .map(|j| {
                    let joined = state.structure.piece(j).iter().any(|v| labels[v].is_some_and(|l| mine.binary_search(&l).is_ok()));
                    (j, !joined)
                })
                .collect()
        })
        .collect();
    let mut summary = CheckSummary::default();
    let non_base: Vec<PieceId> = (0..k).filter(|&i| i != state.e_piece).collect();
    for (i, row) in non_base.into_iter().zip(rows) {
        for (j, ok) in row {
            summary.record(ok, (i, j));
        }
    }
    summary
}

/// Slack of the path `x -> x' -> e_i -> e` over every `x` within `4M` of every piece.
fn slack_summary(state: &ConstructionState, near: &[Vec<u32>]) -> SlackSummary {
    let g = state.graph();
    let m = state.m();
    let parts: Vec<(usize, u32, usize, usize)> = (0..state.piece_count())
        .into_par_iter()
        .map(|i| {
            let (to_piece, nearest) = nearest_in_set(g, state.structure.piece(i));
            let ei = state.anchor(i);
            let from_ei = g.distances_from(ei);
            let reach = state.levels[i] * state.r;
            let mut checked = 0;
            let mut worst = 0;
            let mut bad = 0;
            let mut outside = 0;
            for x in 0..g.vertex_count() {
                if to_piece[x] > 4 * m {
                    continue;
                }
                checked += 1;
                let len = to_piece[x] + from_ei[nearest[x]] + state.dist_e[ei];
                let slack = len - state.dist_e[x];
                worst = worst.max(slack);
                if slack > 10 * m {
                    bad += 1;
                }
                // the tail g_i stays in the ball; the head stays near X_i when
                // geodesics between points of X_i do
                let geo = g.geodesic_vertices_with(&from_ei, nearest[x]);
                if geo.iter().any(|v| near[i][v] > 4 * m && state.dist_e[v] > reach) {
                    outside += 1;
                }
            }
            (checked, worst, bad, outside)
        })
        .collect();
    SlackSummary {
        checked: parts.iter().map(|p| p.0).sum(),
        max_slack: parts.iter().map(|p| p.1).max().unwrap_or(0),
        bound: 10 * m,
        violations: parts.iter().map(|p| p.2).sum(),
        outside_region: parts.iter().map(|p| p.3).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rbp::{PieceDecomposition, BottleneckChain};

    fn set(v: &[usize]) -> PointSet {
        v.iter().copied().collect()
    }

    /// Path 0..8 with pieces {0..4} and {4..8}; base is the second piece.
    fn path_example() -> RbpStructure {
        let g = MetricGraph::path(9);
        let d = PieceDecomposition::new(vec![set(&[0, 1, 2, 3, 4]), set(&[4, 5, 6, 7, 8])], 1).unwrap();
        let mut s = RbpStructure::new(g, d, 1).unwrap();
        s.insert_certificate(BottleneckChain::new(vec![0, 1], vec![4])).unwrap();
        s
    }

    #[test]
    fn path_example_basepoints() {
        let s = path_example();
        let st = construct(&s, &ConstructionConfig::default()).unwrap();
        assert_eq!(st.e_vertex, 5);
        assert_eq!(st.basepoints, vec![Some(4), None]);
        assert_eq!(st.geodesics[0].as_ref().unwrap().vertices(), &[4, 5]);
        assert_eq!(st.levels, vec![1, 0]);
        assert_eq!(st.c_points, vec![5, 5]);
        assert_eq!(st.parent, vec![Some(1), None]);
        assert!(st.trace.slack.violations == 0 && st.trace.basepoint_blocking.passed());
    }

    #[test]
    fn path_example_with_far_basepoint() {
        let mut s = path_example();
        s.basepoint = Some(8);
        let st = construct(&s, &ConstructionConfig::default()).unwrap();
        assert_eq!(st.geodesics[0].as_ref().unwrap().vertices(), &[4, 5, 6, 7, 8]);
        let sg = st.slack_geodesic(4, 0).unwrap();
        assert_eq!(sg.slack, 0);
        assert!(sg.contained);
        let sg = st.slack_geodesic(0, 0).unwrap();
        assert_eq!(sg.path.vertices(), &[0, 1, 2, 3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn strata_boundaries() {
        let mut d = vec![0u32; 200];
        d[1] = 1;
        d[2] = 160;
        d[3] = 161;
        let lv = compute_strata(&[None, Some(1), Some(2), Some(3)], &d, 160).unwrap();
        assert_eq!(lv, vec![0, 1, 1, 2]);
        assert!(matches!(compute_strata(&[Some(0)], &d, 160), Err(ConstructionError::BaseStratumNotSingleton(0))));
    }

    #[test]
    fn c_point_read_off() {
        let g = PathWitness::new((0..=170).rev().collect());
        let c = compute_c_points(&[Some(g)], &[2], 160, 0);
        assert_eq!(c, vec![160]);
    }

    #[test]
    fn missing_certificate_is_reported() {
        let g = MetricGraph::path(9);
        let d = PieceDecomposition::new(vec![set(&[0, 1, 2, 3, 4]), set(&[4, 5, 6, 7, 8])], 1).unwrap();
        let s = RbpStructure::new(g, d, 1).unwrap();
        assert_eq!(construct(&s, &ConstructionConfig::default()).unwrap_err(), ConstructionError::MissingCertificate(0));
    }

    #[test]
    fn small_cut_precondition() {
        let s = path_example();
        let cfg = ConstructionConfig { cut_check: Some(2), ..ConstructionConfig::default() };
        assert!(matches!(construct(&s, &cfg), Err(ConstructionError::SmallCut(_))));
    }

    #[test]
    fn nearest_prefers_smallest_id() {
        let g = MetricGraph::cycle(6);
        let (d, near) = nearest_in_set(&g, &set(&[1, 5]));
        assert_eq!(d[3], 2);
        assert_eq!(near[3], 1);
        assert_eq!(near[0], 1);
    }
}
