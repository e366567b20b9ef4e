//! Piece decompositions and the relative bottleneck property.
//!
//! A decomposition covers the graph by pieces `X_i`. For each pair of distinct
//! pieces a [`BottleneckChain`] lists intermediate pieces `i = i_0, ..., i_s = j`
//! and witnesses `w_r` in `X_{i_r} ∩ X_{i_{r+1}}` such that every path from
//! `X_i` to `X_j` meets the open ball `B(w_r; M)`.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, MetricGraph, PathWitness, PointSet, VertexId, UNREACHABLE};
use crate::pairs::PairSelection;

pub type PieceId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RbpError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("piece {0} is empty")]
    EmptyPiece(PieceId),
    #[error("decomposition has no pieces")]
    NoPieces,
    #[error("base piece {base} out of range (have {count} pieces)")]
    BadBase { base: PieceId, count: usize },
    #[error("piece {piece} contains vertex {vertex} outside the graph")]
    VertexOutOfRange { piece: PieceId, vertex: VertexId },
    #[error("vertex {0} is not covered by any piece")]
    NotCovering(VertexId),
    #[error("malformed chain: {0}")]
    ChainMalformed(String),
    #[error("bottleneck constant must be positive")]
    ZeroConstant,
    #[error("input is not tree-graded at pieces {i} and {j}: {reason}")]
    NotTreeGraded { i: PieceId, j: PieceId, reason: String },
    #[error("transported chain for pieces ({i}, {j}) failed re-verification")]
    TransportFailed { i: PieceId, j: PieceId, witness: Option<PathWitness> },
    #[error("map image is not co-dense: vertex {0} lies farther than C from the image")]
    NotCoDense(VertexId),
    #[error("map has {got} entries, source graph has {expected} vertices")]
    MapSize { got: usize, expected: usize },
    #[error("thickened structure failed re-verification at pieces ({i}, {j})")]
    ThickenFailed { i: PieceId, j: PieceId },
}

/// Indexed cover of a graph by nonempty pieces, with a designated base piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceDecomposition {
    pieces: Vec<PointSet>,
    base: PieceId,
}

impl PieceDecomposition {
    pub fn new(pieces: Vec<PointSet>, base: PieceId) -> Result<Self, RbpError> {
        if pieces.is_empty() {
            return Err(RbpError::NoPieces);
        }
        if base >= pieces.len() {
            return Err(RbpError::BadBase { base, count: pieces.len() });
        }
        if let Some(i) = pieces.iter().position(|p| p.is_empty()) {
            return Err(RbpError::EmptyPiece(i));
        }
        Ok(PieceDecomposition { pieces, base })
    }

    /// Checks the pieces lie in the graph and cover every vertex.
    pub fn validate(&self, g: &MetricGraph) -> Result<(), RbpError> {
        let n = g.vertex_count();
        let mut covered = vec![false; n];
        for (i, p) in self.pieces.iter().enumerate() {
            if let Some(v) = p.max().filter(|&v| v >= n) {
                return Err(RbpError::VertexOutOfRange { piece: i, vertex: v });
            }
            for v in p.iter() {
                covered[v] = true;
            }
        }
        match covered.iter().position(|c| !c) {
            Some(v) => Err(RbpError::NotCovering(v)),
            None => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn base(&self) -> PieceId {
        self.base
    }

    pub fn piece(&self, i: PieceId) -> &PointSet {
        &self.pieces[i]
    }

    pub fn pieces(&self) -> &[PointSet] {
        &self.pieces
    }

    /// For each vertex, the ascending list of pieces containing it.
    pub fn membership(&self, n: usize) -> Vec<Vec<PieceId>> {
        let mut m = vec![Vec::new(); n];
        for (i, p) in self.pieces.iter().enumerate() {
            for v in p.iter() {
                m[v].push(i);
            }
        }
        m
    }

    /// Vertices lying in at least two pieces.
    pub fn intersection_vertices(&self, n: usize) -> PointSet {
        let m = self.membership(n);
        (0..n).filter(|&v| m[v].len() >= 2).collect()
    }

    pub(crate) fn with_piece_extended(&self, i: PieceId, extra: VertexId) -> Self {
        let mut pieces = self.pieces.clone();
        pieces[i] = pieces[i].iter().chain([extra]).collect();
        PieceDecomposition { pieces, base: self.base }
    }
}

/// Ordered piece indices `i_0..i_s` and witnesses `w_0..w_{s-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BottleneckChain {
    pub pieces: Vec<PieceId>,
    pub witnesses: Vec<VertexId>,
}

impl BottleneckChain {
    pub fn new(pieces: Vec<PieceId>, witnesses: Vec<VertexId>) -> Self {
        BottleneckChain { pieces, witnesses }
    }

    pub fn source(&self) -> PieceId {
        self.pieces[0]
    }

    pub fn target(&self) -> PieceId {
        *self.pieces.last().unwrap()
    }

    pub fn reversed(&self) -> Self {
        let mut pieces = self.pieces.clone();
        pieces.reverse();
        let mut witnesses = self.witnesses.clone();
        witnesses.reverse();
        BottleneckChain { pieces, witnesses }
    }

    /// Shape and witness-membership invariants.
    pub fn check_membership(&self, d: &PieceDecomposition) -> Result<(), RbpError> {
        if self.pieces.len() < 2 {
            return Err(RbpError::ChainMalformed("chain needs at least two pieces".into()));
        }
        if self.witnesses.len() + 1 != self.pieces.len() {
            return Err(RbpError::ChainMalformed(format!(
                "{} pieces but {} witnesses",
                self.pieces.len(),
                self.witnesses.len()
            )));
        }
        if let Some(&p) = self.pieces.iter().find(|&&p| p >= d.len()) {
            return Err(RbpError::ChainMalformed(format!("piece index {p} out of range")));
        }
        for (r, w) in self.pieces.windows(2).zip(&self.witnesses).enumerate() {
            let (a, b) = (w.0[0], w.0[1]);
            if a == b {
                return Err(RbpError::ChainMalformed(format!("consecutive pieces {a} repeat at step {r}")));
            }
            if !d.piece(a).contains(*w.1) || !d.piece(b).contains(*w.1) {
                return Err(RbpError::ChainMalformed(format!(
                    "witness {} at step {r} is not in pieces {a} and {b}",
                    w.1
                )));
            }
        }
        Ok(())
    }
}

/// A graph, a decomposition, a bottleneck constant and stored certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RbpStructure {
    pub graph: MetricGraph,
    pub decomposition: PieceDecomposition,
    m: u32,
    certificates: BTreeMap<(PieceId, PieceId), BottleneckChain>,
    /// A vertex lying only in the base piece, when one has been fixed.
    pub basepoint: Option<VertexId>,
}

impl RbpStructure {
    pub fn new(graph: MetricGraph, decomposition: PieceDecomposition, m: u32) -> Result<Self, RbpError> {
        if m == 0 {
            return Err(RbpError::ZeroConstant);
        }
        decomposition.validate(&graph)?;
        Ok(RbpStructure { graph, decomposition, m, certificates: BTreeMap::new(), basepoint: None })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn piece_count(&self) -> usize {
        self.decomposition.len()
    }

    pub fn piece(&self, i: PieceId) -> &PointSet {
        self.decomposition.piece(i)
    }

    /// Stores a chain after checking its membership invariant.
    pub fn insert_certificate(&mut self, chain: BottleneckChain) -> Result<(), RbpError> {
        chain.check_membership(&self.decomposition)?;
        self.certificates.insert((chain.source(), chain.target()), chain);
        Ok(())
    }

    /// The stored chain from `i` to `j`, reversing a stored `j -> i` chain.
    pub fn certificate(&self, i: PieceId, j: PieceId) -> Option<BottleneckChain> {
        if let Some(c) = self.certificates.get(&(i, j)) {
            return Some(c.clone());
        }
        self.certificates.get(&(j, i)).map(BottleneckChain::reversed)
    }

    pub fn certificates(&self) -> impl Iterator<Item = &BottleneckChain> {
        self.certificates.values()
    }

    pub fn certificate_count(&self) -> usize {
        self.certificates.len()
    }

    pub fn clear_certificates(&mut self) {
        self.certificates.clear();
    }

    /// A smallest vertex of the base piece that lies in no other piece.
    pub fn private_base_vertex(&self) -> Option<VertexId> {
        let m = self.decomposition.membership(self.graph.vertex_count());
        self.piece(self.decomposition.base()).iter().find(|&v| m[v].len() == 1)
    }

    pub fn verify_bottleneck_chain(&self, chain: &BottleneckChain) -> Result<ChainVerdict, RbpError> {
        verify_bottleneck_chain(self, chain)
    }

    pub fn verify_rbp(&self, pairs: &PairSelection) -> VerificationReport {
        verify_rbp(self, pairs)
    }
}

/// Outcome of checking one chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainVerdict {
    Holds,
    /// `path` runs from the source piece to the target piece and misses the
    /// ball around witness number `step`.
    Fails { step: usize, path: PathWitness },
}

impl ChainVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ChainVerdict::Holds)
    }
}

pub fn verify_bottleneck_chain(s: &RbpStructure, chain: &BottleneckChain) -> Result<ChainVerdict, RbpError> {
    chain.check_membership(&s.decomposition)?;
    let a = s.piece(chain.source());
    let b = s.piece(chain.target());
    for (step, &w) in chain.witnesses.iter().enumerate() {
        let ball = s.graph.open_ball(w, s.m as f64);
        if let Some(path) = s.graph.find_avoiding_path(a, b, &ball) {
            return Ok(ChainVerdict::Fails { step, path });
        }
    }
    Ok(ChainVerdict::Holds)
}

/// Cached component labellings of `G \ B(w; M)` for candidate witnesses.
pub(crate) struct SeparationOracle<'a> {
    graph: &'a MetricGraph,
    decomposition: &'a PieceDecomposition,
    m: u32,
    labels: HashMap<VertexId, Vec<u32>>,
}

const IN_BALL: u32 = u32::MAX;

impl<'a> SeparationOracle<'a> {
    pub(crate) fn new(
        graph: &'a MetricGraph,
        decomposition: &'a PieceDecomposition,
        m: u32,
        witnesses: &PointSet,
    ) -> Self {
        let labels = witnesses
            .as_slice()
            .par_iter()
            .map(|&w| (w, Self::label(graph, m, w)))
            .collect();
        SeparationOracle { graph, decomposition, m, labels }
    }

    fn label(graph: &MetricGraph, m: u32, w: VertexId) -> Vec<u32> {
        let d = graph.distances_from(w);
        let allowed: Vec<bool> = d.iter().map(|&x| x >= m).collect();
        graph
            .component_labels(&allowed)
            .into_iter()
            .map(|l| l.unwrap_or(IN_BALL))
            .collect()
    }

    fn ensure(&mut self, w: VertexId) {
        if !self.labels.contains_key(&w) {
            let l = Self::label(self.graph, self.m, w);
            self.labels.insert(w, l);
        }
    }

    /// True iff `B(w; M)` meets every path from piece `i` to piece `j`.
    pub(crate) fn separates(&self, w: VertexId, i: PieceId, j: PieceId) -> bool {
        let labels = &self.labels[&w];
        let left: HashSet<u32> = self
            .decomposition
            .piece(i)
            .iter()
            .map(|v| labels[v])
            .filter(|&l| l != IN_BALL)
            .collect();
        if left.is_empty() {
            return true;
        }
        !self
            .decomposition
            .piece(j)
            .iter()
            .any(|v| labels[v] != IN_BALL && left.contains(&labels[v]))
    }

    fn chain_holds(&mut self, chain: &BottleneckChain) -> bool {
        let (i, j) = (chain.source(), chain.target());
        for &w in &chain.witnesses {
            self.ensure(w);
        }
        chain.witnesses.iter().all(|&w| self.separates(w, i, j))
    }
}

/// Searches a chain from `i` to `j` whose witnesses are intersection
/// vertices whose balls separate the two pieces. `first_ok` filters the
/// witness used on the first step.
pub(crate) fn search_with(
    oracle: &SeparationOracle<'_>,
    candidates: &PointSet,
    membership: &[Vec<PieceId>],
    i: PieceId,
    j: PieceId,
    first_ok: &dyn Fn(VertexId) -> bool,
) -> Option<BottleneckChain> {
    let d = oracle.decomposition;
    let dist_i = oracle.graph.distances_from_set(d.piece(i));
    let mut separators: Vec<VertexId> = candidates.iter().filter(|&w| oracle.separates(w, i, j)).collect();
    separators.sort_by_key(|&w| (dist_i[w], w));

    // BFS over pieces; an edge a -> b is a separator lying in both pieces.
    let k = d.len();
    let mut prev: Vec<Option<(PieceId, VertexId)>> = vec![None; k];
    let mut seen = vec![false; k];
    seen[i] = true;
    let mut queue = VecDeque::from([i]);
    while let Some(a) = queue.pop_front() {
        if a == j {
            break;
        }
        for &w in &separators {
            if !d.piece(a).contains(w) || (a == i && !first_ok(w)) {
                continue;
            }
            for &b in &membership[w] {
                if b != a && !seen[b] {
                    seen[b] = true;
                    prev[b] = Some((a, w));
                    queue.push_back(b);
                }
            }
        }
    }
    if !seen[j] {
        return None;
    }
    let mut pieces = vec![j];
    let mut witnesses = Vec::new();
    let mut cur = j;
    while let Some((a, w)) = prev[cur] {
        pieces.push(a);
        witnesses.push(w);
        cur = a;
    }
    pieces.reverse();
    witnesses.reverse();
    Some(BottleneckChain { pieces, witnesses })
}

/// Best-effort certificate search for the pair `(i, j)`. `None` does not
/// prove the property fails.
pub fn search_certificate(
    graph: &MetricGraph,
    decomposition: &PieceDecomposition,
    i: PieceId,
    j: PieceId,
    m: u32,
) -> Option<BottleneckChain> {
    assert_ne!(i, j, "certificate search needs distinct pieces");
    let n = graph.vertex_count();
    let candidates = decomposition.intersection_vertices(n);
    let oracle = SeparationOracle::new(graph, decomposition, m, &candidates);
    let membership = decomposition.membership(n);
    search_with(&oracle, &candidates, &membership, i, j, &|_| true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Refuted,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub i: PieceId,
    pub j: PieceId,
    pub verdict: Verdict,
    /// The chain that verified the pair.
    pub chain: Option<BottleneckChain>,
    /// For refuted pairs: a path from `X_i` to `X_j` missing every candidate ball.
    pub witness: Option<PathWitness>,
    /// True when the chain came from search rather than storage.
    pub searched: bool,
    /// A stored chain existed but did not verify.
    pub stored_chain_failed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub witness_balls: usize,
    pub separation_checks: usize,
    pub searches: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub m: u32,
    pub pieces: usize,
    pub pairs_checked: usize,
    pub verified: usize,
    pub refuted: usize,
    pub unknown: usize,
    /// Some ball of radius `M` covers the whole graph, so every separation
    /// question is trivial.
    pub degenerate: bool,
    pub counters: Counters,
    pub pairs: Vec<PairVerdict>,
}

impl VerificationReport {
    pub fn all_verified(&self) -> bool {
        self.verified == self.pairs_checked
    }
}

fn degenerate(g: &MetricGraph, m: u32) -> bool {
    let ecc0 = g.distances_from(0).into_iter().max().unwrap_or(0);
    // the radius is at least half of any eccentricity
    if ecc0 / 2 >= m {
        return false;
    }
    (0..g.vertex_count())
        .into_par_iter()
        .any(|v| g.distances_from(v).into_iter().all(|d| d < m))
}

pub fn verify_rbp(s: &RbpStructure, pairs: &PairSelection) -> VerificationReport {
    let n = s.graph.vertex_count();
    let selected = pairs.select(s.piece_count());
    let candidates = s.decomposition.intersection_vertices(n);
    let stored: Vec<Option<BottleneckChain>> = selected.iter().map(|&(i, j)| s.certificate(i, j)).collect();

    let mut witness_set: Vec<VertexId> = candidates.iter().collect();
    for c in stored.iter().flatten() {
        witness_set.extend(&c.witnesses);
    }
    let witness_set: PointSet = witness_set.into_iter().collect();
    let mut oracle = SeparationOracle::new(&s.graph, &s.decomposition, s.m, &witness_set);
    let membership = s.decomposition.membership(n);
    let mut counters = Counters { witness_balls: witness_set.len(), ..Counters::default() };

    let mut results = Vec::with_capacity(selected.len());
    let mut pending = Vec::new();
    for (idx, (&(i, j), chain)) in selected.iter().zip(stored).enumerate() {
        let mut stored_chain_failed = false;
        if let Some(chain) = chain {
            counters.separation_checks += chain.witnesses.len();
            if chain.check_membership(&s.decomposition).is_ok() && oracle.chain_holds(&chain) {
                results.push(PairVerdict {
                    i,
                    j,
                    verdict: Verdict::Verified,
                    chain: Some(chain),
                    witness: None,
                    searched: false,
                    stored_chain_failed: false,
                });
                continue;
            }
            stored_chain_failed = true;
        }
        pending.push((idx, i, j, stored_chain_failed));
        results.push(PairVerdict {
            i,
            j,
            verdict: Verdict::Unknown,
            chain: None,
            witness: None,
            searched: true,
            stored_chain_failed,
        });
    }

    counters.searches = pending.len();
    counters.separation_checks += pending.len() * candidates.len();
    let oracle = &oracle;
    let union_mask: Vec<bool> = {
        let d = s.graph.distances_from_set(&candidates);
        d.iter().map(|&x| x == UNREACHABLE || x >= s.m).collect()
    };
    let searched: Vec<(usize, Option<BottleneckChain>, Option<PathWitness>)> = pending
        .par_iter()
        .map(|&(idx, i, j, _)| {
            let found = search_with(oracle, &candidates, &membership, i, j, &|_| true);
            let witness = match found {
                Some(_) => None,
                None => s.graph.find_path_within(s.piece(i), s.piece(j), &union_mask),
            };
            (idx, found, witness)
        })
        .collect();
    for (idx, found, witness) in searched {
        let r = &mut results[idx];
        match found {
            Some(chain) => {
                r.verdict = Verdict::Verified;
                r.chain = Some(chain);
            }
            None if witness.is_some() => {
                r.verdict = Verdict::Refuted;
                r.witness = witness;
            }
            None => {}
        }
    }

    let verified = results.iter().filter(|r| r.verdict == Verdict::Verified).count();
    let refuted = results.iter().filter(|r| r.verdict == Verdict::Refuted).count();
    VerificationReport {
        m: s.m,
        pieces: s.piece_count(),
        pairs_checked: results.len(),
        verified,
        refuted,
        unknown: results.len() - verified - refuted,
        degenerate: degenerate(&s.graph, s.m),
        counters,
        pairs: results,
    }
}

/// Searches and stores certificates for every unordered pair lacking one.
/// Returns the pairs for which none was found.
pub fn complete_certificates(s: &mut RbpStructure) -> Vec<(PieceId, PieceId)> {
    let report = verify_rbp(s, &PairSelection::All);
    let mut missing = Vec::new();
    for p in report.pairs {
        match p.chain {
            Some(chain) if p.searched => {
                s.insert_certificate(chain).expect("searched chains satisfy membership");
            }
            Some(_) => {}
            None => missing.push((p.i, p.j)),
        }
    }
    missing
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiConvexityReport {
    pub piece: PieceId,
    pub c: u32,
    /// Allowed distance from the piece: `2M + 2 max(M, C)`.
    pub radius: u32,
    pub holds: bool,
    pub pairs_checked: usize,
    /// Vertex on some geodesic farthest from the piece.
    pub worst_vertex: Option<VertexId>,
    pub worst_distance: u32,
    pub worst_pair: Option<(VertexId, VertexId)>,
}

/// Checks that geodesics between points of `N_C(X_i)` stay within
/// `2M + 2 max(M, C)` of `X_i`.
pub fn check_quasi_convexity(s: &RbpStructure, i: PieceId, c: u32) -> QuasiConvexityReport {
    let g = &s.graph;
    let m = s.m;
    let radius = 2 * m + 2 * m.max(c);
    let to_piece = g.distances_from_set(s.piece(i));
    let region: Vec<VertexId> = (0..g.vertex_count()).filter(|&v| to_piece[v] <= c).collect();
    let in_region: Vec<bool> = to_piece.iter().map(|&d| d <= c).collect();

    // (distance, vertex, x, y); max by distance, ties by smallest ids
    let worst = region
        .par_iter()
        .enumerate()
        .map(|(ix, &x)| {
            let dx = bfs_covering(g, x, &in_region, region.len());
            let mut best: Option<(u32, VertexId, VertexId, VertexId)> = None;
            for &y in &region[ix + 1..] {
                for v in g.geodesic_vertices_with(&dx, y).iter() {
                    let cand = (to_piece[v], v, x, y);
                    if best.map_or(true, |b| better(cand, b)) {
                        best = Some(cand);
                    }
                }
            }
            if best.is_none() {
                best = Some((to_piece[x], x, x, x));
            }
            best
        })
        .reduce(|| None, |a, b| match (a, b) {
            (Some(a), Some(b)) => Some(if better(b, a) { b } else { a }),
            (a, None) => a,
            (None, b) => b,
        });
    let n_region = region.len();
    let (worst_distance, worst_vertex, worst_pair) = match worst {
        Some((d, v, x, y)) => (d, Some(v), Some((x, y))),
        None => (0, None, None),
    };
    QuasiConvexityReport {
        piece: i,
        c,
        radius,
        holds: worst_distance <= radius,
        pairs_checked: n_region * n_region.saturating_sub(1) / 2,
        worst_vertex,
        worst_distance,
        worst_pair,
    }
}

fn better(a: (u32, VertexId, VertexId, VertexId), b: (u32, VertexId, VertexId, VertexId)) -> bool {
    a.0 > b.0 || (a.0 == b.0 && (a.1, a.2, a.3) < (b.1, b.2, b.3))
}

/// BFS from `src` that stops once every target is settled and its layer is
/// complete; distances beyond that layer are left unreachable.
fn bfs_covering(g: &MetricGraph, src: VertexId, targets: &[bool], target_count: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.vertex_count()];
    dist[src] = 0;
    let mut found = usize::from(targets[src]);
    let mut limit = if found == target_count { 0 } else { u32::MAX };
    let mut queue = VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        if dist[u] >= limit {
            continue;
        }
        for &v in g.neighbors(u) {
            if dist[v] == UNREACHABLE {
                dist[v] = dist[u] + 1;
                if targets[v] {
                    found += 1;
                    if found == target_count {
                        limit = dist[v];
                    }
                }
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Vertex map between graphs with declared quasi-isometry constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QiMap {
    pub map: Vec<VertexId>,
    pub k: u32,
    pub c: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QiCheck {
    pub pairs_checked: usize,
    pub upper_violations: usize,
    pub lower_violations: usize,
    /// Largest distance from a target vertex to the image.
    pub codensity: u32,
    pub holds: bool,
}

impl QiMap {
    pub fn identity(n: usize) -> Self {
        QiMap { map: (0..n).collect(), k: 1, c: 0 }
    }

    /// `K (K C + 2 C + M) + C`.
    pub fn transported_constant(&self, m: u32) -> u32 {
        self.k * (self.k * self.c + 2 * self.c + m) + self.c
    }

    /// Checks `d/K - C <= d' <= K d + C` on the selected pairs and that
    /// the image is `C`-dense.
    pub fn check(&self, source: &MetricGraph, target: &MetricGraph, pairs: &PairSelection) -> QiCheck {
        let selected = pairs.select(source.vertex_count());
        let (k, c) = (self.k as f64, self.c as f64);
        let mut by_source: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for &(x, y) in &selected {
            by_source.entry(x).or_default().push(y);
        }
        let (upper, lower) = by_source
            .par_iter()
            .map(|(&x, ys)| {
                let dx = source.distances_from(x);
                let dq = target.distances_from(self.map[x]);
                let mut up = 0;
                let mut lo = 0;
                for &y in ys {
                    let d = dx[y] as f64;
                    let dd = dq[self.map[y]] as f64;
                    if dd > k * d + c {
                        up += 1;
                    }
                    if dd < d / k - c {
                        lo += 1;
                    }
                }
                (up, lo)
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let image: PointSet = self.map.iter().copied().collect();
        let codensity = target.distances_from_set(&image).into_iter().max().unwrap_or(0);
        QiCheck {
            pairs_checked: selected.len(),
            upper_violations: upper,
            lower_violations: lower,
            codensity,
            holds: upper == 0 && lower == 0 && codensity <= self.c,
        }
    }
}

/// Pushes a structure forward along a `(K, C)` quasi-isometry: pieces become
/// `N_C(q(X_i))`, witnesses `q(w)`, and the constant `K(KC + 2C + M) + C`.
pub fn transport_qi(s: &RbpStructure, target: &MetricGraph, q: &QiMap) -> Result<RbpStructure, RbpError> {
    if q.map.len() != s.graph.vertex_count() {
        return Err(RbpError::MapSize { got: q.map.len(), expected: s.graph.vertex_count() });
    }
    for &v in &q.map {
        target.check_vertex(v)?;
    }
    let pieces: Vec<PointSet> = s
        .decomposition
        .pieces()
        .par_iter()
        .map(|p| {
            let image: PointSet = p.iter().map(|v| q.map[v]).collect();
            target.closed_neighborhood(&image, q.c)
        })
        .collect();
    let decomposition = PieceDecomposition::new(pieces, s.decomposition.base())?;
    if let Err(RbpError::NotCovering(v)) = decomposition.validate(target) {
        return Err(RbpError::NotCoDense(v));
    }
    let mut out = RbpStructure::new(target.clone(), decomposition, q.transported_constant(s.m))?;
    for chain in s.certificates() {
        let moved = BottleneckChain {
            pieces: chain.pieces.clone(),
            witnesses: chain.witnesses.iter().map(|&w| q.map[w]).collect(),
        };
        out.insert_certificate(moved)?;
    }
    let report = verify_rbp(&out, &PairSelection::All);
    if let Some(bad) = report.pairs.iter().find(|p| p.verdict == Verdict::Refuted || p.stored_chain_failed) {
        return Err(RbpError::TransportFailed { i: bad.i, j: bad.j, witness: bad.witness.clone() });
    }
    Ok(out)
}

/// Adds a pendant vertex to the base piece and records it as the basepoint.
pub fn attach_basepoint(s: &RbpStructure) -> RbpStructure {
    let n = s.graph.vertex_count();
    let base = s.decomposition.base();
    let anchor = s.piece(base).first().expect("pieces are nonempty");
    let mut edges = s.graph.edges().to_vec();
    edges.push((anchor, n));
    let graph = MetricGraph::new(n + 1, &edges).expect("adding a pendant keeps the graph simple");
    let decomposition = s.decomposition.with_piece_extended(base, n);
    let mut out = RbpStructure { graph, decomposition, m: s.m, certificates: s.certificates.clone(), basepoint: Some(n) };
    out.basepoint = Some(n);
    out
}

/// Result of [`thicken`]: the new structure plus where each vertex came from.
#[derive(Clone, Debug)]
pub struct Thickening {
    pub structure: RbpStructure,
    pub b: u32,
    pub m_in: u32,
    /// Level coordinate in `0..=2b+1`; level-0 vertices are shared by pieces.
    pub level: Vec<u32>,
    /// Vertex of the pre-thickening graph (plus the fresh basepoint) that
    /// each vertex projects to.
    pub projection: Vec<VertexId>,
    /// Owning piece for vertices above level 0.
    pub owner: Vec<Option<PieceId>>,
    /// The input graph with the fresh basepoint attached; level 0 is a copy.
    pub level_zero: MetricGraph,
}

/// Preprocesses a structure verified at `M_in` so that the basepoint lies in
/// a unique piece and no small ball disconnects a piece. Output constant is
/// `9 M_in`.
pub fn thicken(s: &RbpStructure, b: u32) -> Result<Thickening, RbpError> {
    let g = &s.graph;
    let n = g.vertex_count();
    let m_in = s.m;
    let base = s.decomposition.base();

    // (1) 4M-neighbourhoods of the pieces
    let mut fat: Vec<PointSet> = s
        .decomposition
        .pieces()
        .par_iter()
        .map(|p| g.closed_neighborhood(p, 4 * m_in))
        .collect();

    // (2) fresh basepoint joined to the base piece
    let e = n;
    let anchor = s.piece(base).first().expect("pieces are nonempty");
    let mut flat_edges = g.edges().to_vec();
    flat_edges.push((anchor, e));
    let level_zero = MetricGraph::new(n + 1, &flat_edges)?;
    fat[base] = fat[base].iter().chain([e]).collect();

    // (3) strong product of each piece with the path 0..=2b+1, glued at level 0
    let top = 2 * b + 1;
    let mut level: Vec<u32> = vec![0; n + 1];
    let mut projection: Vec<VertexId> = (0..=n).collect();
    let mut owner: Vec<Option<PieceId>> = vec![None; n + 1];
    let mut edges: Vec<(VertexId, VertexId)> = level_zero.edges().to_vec();
    let mut pieces = Vec::with_capacity(fat.len());
    for (i, piece) in fat.iter().enumerate() {
        let (sub, old) = level_zero.induced_subgraph(piece);
        let width = old.len();
        let start = level.len();
        // id of (local vertex x, level t)
        let id = |x: usize, t: u32| if t == 0 { old[x] } else { start + (t as usize - 1) * width + x };
        for t in 1..=top {
            for &v in &old {
                level.push(t);
                projection.push(v);
                owner.push(Some(i));
            }
        }
        for t in 0..=top {
            for x in 0..width {
                if t < top {
                    edges.push((id(x, t), id(x, t + 1)));
                }
                for &y in sub.neighbors(x) {
                    if t > 0 && y > x {
                        edges.push((id(x, t), id(y, t)));
                    }
                    if t < top {
                        edges.push((id(x, t), id(y, t + 1)));
                    }
                }
            }
        }
        let mut members: Vec<VertexId> = old.clone();
        members.extend(start..level.len());
        pieces.push(members.into_iter().collect::<PointSet>());
    }
    let graph = MetricGraph::new(level.len(), &edges)?;
    let decomposition = PieceDecomposition::new(pieces, base)?;
    let mut out = RbpStructure::new(graph, decomposition, 9 * m_in)?;
    for chain in s.certificates() {
        out.insert_certificate(chain.clone())?;
    }
    out.basepoint = Some(e);
    let report = verify_rbp(&out, &PairSelection::All);
    if let Some(bad) = report.pairs.iter().find(|p| p.verdict != Verdict::Verified) {
        return Err(RbpError::ThickenFailed { i: bad.i, j: bad.j });
    }
    Ok(Thickening { structure: out, b, m_in, level, projection, owner, level_zero })
}

/// A ball that disconnects a piece although its trace on the piece is small.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuttingBall {
    pub piece: PieceId,
    pub center: VertexId,
    pub radius: u32,
    /// Diameter of the ball's intersection with the piece.
    pub diameter: u32,
}

/// Scans every center and every integer radius `1..=b` for a ball `B` such
/// that `B ∩ X_i` has diameter at most `2b` and `X_i \ B` is disconnected.
/// Returns the first offender in (center, radius, piece) order.
pub fn find_small_cut(s: &RbpStructure, b: u32) -> Option<CuttingBall> {
    let g = &s.graph;
    let n = g.vertex_count();
    let membership = s.decomposition.membership(n);
    let subgraphs: Vec<(MetricGraph, Vec<VertexId>)> =
        s.decomposition.pieces().par_iter().map(|p| g.induced_subgraph(p)).collect();
    for (i, (sub, _)) in subgraphs.iter().enumerate() {
        if !sub.is_connected() {
            let center = s.piece(i).first().unwrap();
            return Some(CuttingBall { piece: i, center, radius: 0, diameter: 0 });
        }
    }
    (0..n).into_par_iter().find_map_first(|center| {
        let d = g.distances_from(center);
        for radius in 1..=b {
            let mut touched: Vec<PieceId> = (0..n)
                .filter(|&v| d[v] < radius)
                .flat_map(|v| membership[v].iter().copied())
                .collect();
            touched.sort_unstable();
            touched.dedup();
            for i in touched {
                let (sub, old) = &subgraphs[i];
                let allowed: Vec<bool> = old.iter().map(|&v| d[v] >= radius).collect();
                if allowed.iter().all(|a| !a) {
                    continue;
                }
                let labels = sub.component_labels(&allowed);
                if labels.iter().flatten().any(|&l| l > 0) {
                    let trace: PointSet = old.iter().copied().filter(|&v| d[v] < radius).collect();
                    let diameter = g.set_diameter(&trace);
                    if diameter <= 2 * b {
                        return Some(CuttingBall { piece: i, center, radius, diameter });
                    }
                }
            }
        }
        None
    })
}

/// Certificates for a tree-graded input: pieces `N_1(X_i)`, constant 2,
/// chains read off a geodesic between the original pieces.
pub fn tree_graded_certificate(
    g: &MetricGraph,
    pieces: &[PointSet],
    base: PieceId,
) -> Result<RbpStructure, RbpError> {
    let original = PieceDecomposition::new(pieces.to_vec(), base)?;
    original.validate(g)?;
    check_tree_graded(g, &original)?;
    let n = g.vertex_count();
    let membership = original.membership(n);

    let k = pieces.len();
    let pair_list = PairSelection::All.select(k);
    let chains: Vec<BottleneckChain> = pair_list
        .par_iter()
        .map(|&(i, j)| geodesic_chain(g, &original, &membership, i, j))
        .collect();

    let thick: Vec<PointSet> = pieces.par_iter().map(|p| g.closed_neighborhood(p, 1)).collect();
    let decomposition = PieceDecomposition::new(thick, base)?;
    let mut out = RbpStructure::new(g.clone(), decomposition, 2)?;
    for chain in chains {
        out.insert_certificate(chain)?;
    }
    let report = verify_rbp(&out, &PairSelection::All);
    if let Some(bad) = report.pairs.iter().find(|p| p.stored_chain_failed || p.verdict != Verdict::Verified) {
        return Err(RbpError::NotTreeGraded {
            i: bad.i,
            j: bad.j,
            reason: "geodesic chain does not verify".into(),
        });
    }
    Ok(out)
}

/// Walks the canonical geodesic from `X_i` to `X_j`, staying in the current
/// piece as long as possible and recording each transition vertex.
fn geodesic_chain(
    g: &MetricGraph,
    d: &PieceDecomposition,
    membership: &[Vec<PieceId>],
    i: PieceId,
    j: PieceId,
) -> BottleneckChain {
    let to_j = g.distances_from_set(d.piece(j));
    let start = d.piece(i).iter().min_by_key(|&v| (to_j[v], v)).unwrap();
    let path = g.walk_down(&to_j, start);
    let p = path.vertices();
    let mut pieces = vec![i];
    let mut witnesses = Vec::new();
    let mut cur = i;
    for t in 1..p.len() {
        let (u, v) = (p[t - 1], p[t]);
        if d.piece(cur).contains(v) {
            continue;
        }
        let holders = || membership[v].iter().copied().filter(|&q| d.piece(q).contains(u));
        let next = if holders().any(|q| q == j) { j } else { holders().next().expect("edges lie in pieces") };
        pieces.push(next);
        witnesses.push(u);
        cur = next;
    }
    if cur != j {
        pieces.push(j);
        witnesses.push(*p.last().unwrap());
    }
    BottleneckChain { pieces, witnesses }
}

/// Structural tree-graded test for graphs: pieces induce connected
/// subgraphs, every edge lies in a piece, pieces meet in at most one vertex,
/// and the piece/cut-vertex incidence graph is a tree.
pub fn check_tree_graded(g: &MetricGraph, d: &PieceDecomposition) -> Result<(), RbpError> {
    let n = g.vertex_count();
    let membership = d.membership(n);
    for (i, p) in d.pieces().iter().enumerate() {
        if !g.induced_subgraph(p).0.is_connected() {
            return Err(RbpError::NotTreeGraded { i, j: i, reason: "piece is not connected".into() });
        }
    }
    for &(u, v) in g.edges() {
        if !membership[u].iter().any(|&q| d.piece(q).contains(v)) {
            let (i, j) = (membership[u][0], membership[v][0]);
            return Err(RbpError::NotTreeGraded { i, j, reason: format!("edge ({u}, {v}) lies in no piece") });
        }
    }
    let mut shared: BTreeMap<(PieceId, PieceId), usize> = BTreeMap::new();
    for m in &membership {
        for (a, &p) in m.iter().enumerate() {
            for &q in &m[a + 1..] {
                let c = shared.entry((p, q)).or_default();
                *c += 1;
                if *c > 1 {
                    return Err(RbpError::NotTreeGraded { i: p, j: q, reason: "pieces share more than one vertex".into() });
                }
            }
        }
    }
    // union-find over pieces and shared vertices
    let k = d.len();
    let mut parent: Vec<usize> = (0..k + n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (v, m) in membership.iter().enumerate() {
        if m.len() < 2 {
            continue;
        }
        for &p in m {
            let (a, b) = (find(&mut parent, p), find(&mut parent, k + v));
            if a == b {
                let other = *m.iter().find(|&&q| q != p).unwrap();
                return Err(RbpError::NotTreeGraded {
                    i: p.min(other),
                    j: p.max(other),
                    reason: format!("pieces form a cycle through vertex {v}"),
                });
            }
            parent[a] = b;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> PointSet {
        v.iter().copied().collect()
    }

    fn path_structure(m: u32) -> RbpStructure {
        let g = MetricGraph::path(9);
        let d = PieceDecomposition::new(vec![set(&[0, 1, 2, 3, 4]), set(&[4, 5, 6, 7, 8])], 0).unwrap();
        RbpStructure::new(g, d, m).unwrap()
    }

    #[test]
    fn decomposition_validation() {
        assert!(matches!(PieceDecomposition::new(vec![set(&[0]), PointSet::new()], 0), Err(RbpError::EmptyPiece(1))));
        assert!(matches!(PieceDecomposition::new(vec![set(&[0])], 3), Err(RbpError::BadBase { .. })));
        let d = PieceDecomposition::new(vec![set(&[0, 1])], 0).unwrap();
        assert!(matches!(d.validate(&MetricGraph::path(3)), Err(RbpError::NotCovering(2))));
    }

    #[test]
    fn chain_on_path_holds() {
        let s = path_structure(1);
        let chain = BottleneckChain::new(vec![0, 1], vec![4]);
        assert_eq!(s.verify_bottleneck_chain(&chain).unwrap(), ChainVerdict::Holds);
    }

    #[test]
    fn chain_on_cycle_fails_with_other_arc() {
        let g = MetricGraph::cycle(8);
        let d = PieceDecomposition::new(
            vec![set(&[0, 1, 2]), set(&[2, 3, 4]), set(&[4, 5, 6, 7, 0])],
            0,
        )
        .unwrap();
        let s = RbpStructure::new(g, d, 1).unwrap();
        // chain 0 -> 1 through vertex 2; the arc through 7..5 avoids it
        let verdict = s.verify_bottleneck_chain(&BottleneckChain::new(vec![0, 1], vec![2])).unwrap();
        match verdict {
            ChainVerdict::Fails { step: 0, path } => {
                assert!(path.is_walk_in(&s.graph));
                assert!(!path.vertices().contains(&2));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn swallowed_source_holds() {
        let s = path_structure(3);
        let g = &s.graph;
        let d = PieceDecomposition::new(vec![set(&[3, 4]), set(&[4, 5, 6, 7, 8]), g.all_vertices()], 0).unwrap();
        let s = RbpStructure::new(g.clone(), d, 3).unwrap();
        assert!(s.verify_bottleneck_chain(&BottleneckChain::new(vec![0, 1], vec![4])).unwrap().holds());
    }

    #[test]
    fn malformed_chains_rejected() {
        let s = path_structure(1);
        let bad = BottleneckChain::new(vec![0, 1], vec![2]);
        assert!(matches!(s.verify_bottleneck_chain(&bad), Err(RbpError::ChainMalformed(_))));
        let short = BottleneckChain::new(vec![0, 1], vec![]);
        assert!(matches!(s.verify_bottleneck_chain(&short), Err(RbpError::ChainMalformed(_))));
    }

    #[test]
    fn search_finds_unique_separator() {
        let s = path_structure(1);
        let chain = search_certificate(&s.graph, &s.decomposition, 0, 1, 1).unwrap();
        assert_eq!(chain, BottleneckChain::new(vec![0, 1], vec![4]));
    }

    #[test]
    fn search_on_star_uses_hub() {
        // three paths of length 3 meeting at hub 0
        let edges = [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (0, 7), (7, 8), (8, 9)];
        let g = MetricGraph::new(10, &edges).unwrap();
        let d = PieceDecomposition::new(vec![set(&[0, 1, 2, 3]), set(&[0, 4, 5, 6]), set(&[0, 7, 8, 9])], 0).unwrap();
        let chain = search_certificate(&g, &d, 0, 2, 1).unwrap();
        assert_eq!(chain, BottleneckChain::new(vec![0, 2], vec![0]));
    }

    #[test]
    fn single_piece_verifies_vacuously() {
        let g = MetricGraph::cycle(5);
        let d = PieceDecomposition::new(vec![g.all_vertices()], 0).unwrap();
        let s = RbpStructure::new(g, d, 1).unwrap();
        let r = s.verify_rbp(&PairSelection::All);
        assert_eq!(r.pairs_checked, 0);
        assert!(r.all_verified());
    }

    #[test]
    fn disjoint_pieces_are_refuted() {
        let g = MetricGraph::path(4);
        let d = PieceDecomposition::new(vec![set(&[0, 1]), set(&[2, 3])], 0).unwrap();
        let s = RbpStructure::new(g, d, 1).unwrap();
        let r = s.verify_rbp(&PairSelection::All);
        assert_eq!(r.refuted, 1);
        let w = r.pairs[0].witness.as_ref().unwrap();
        assert_eq!(w.vertices(), &[1, 2]);
    }

    #[test]
    fn quasi_convexity_on_path() {
        let s = path_structure(1);
        for c in [0, 2, 5] {
            let r = check_quasi_convexity(&s, 0, c);
            assert!(r.holds);
            assert!(r.worst_distance <= c);
            assert_eq!(r.radius, 2 + 2 * c.max(1));
        }
    }

    #[test]
    fn transported_constant_formula() {
        let q = QiMap { map: vec![], k: 2, c: 1 };
        assert_eq!(q.transported_constant(1), 11);
        assert_eq!(QiMap::identity(0).transported_constant(5), 5);
    }

    #[test]
    fn identity_transport_is_unchanged() {
        let mut s = path_structure(1);
        s.insert_certificate(BottleneckChain::new(vec![0, 1], vec![4])).unwrap();
        let t = transport_qi(&s, &s.graph, &QiMap::identity(9)).unwrap();
        assert_eq!(t.m(), 1);
        assert_eq!(t.decomposition, s.decomposition);
        assert_eq!(t.certificate(0, 1), s.certificate(0, 1));
    }

    #[test]
    fn two_cycles_sharing_a_vertex() {
        // cycles 0..7 and 7..14 sharing vertex 7
        let mut edges: Vec<_> = (0..8).map(|v| (v, (v + 1) % 8)).collect();
        let second: Vec<usize> = vec![7, 8, 9, 10, 11, 12, 13, 14];
        edges.extend((0..8).map(|r| (second[r], second[(r + 1) % 8])));
        let g = MetricGraph::new(15, &edges).unwrap();
        let pieces = vec![(0..8).collect::<PointSet>(), second.iter().copied().collect()];
        let s = tree_graded_certificate(&g, &pieces, 0).unwrap();
        assert_eq!(s.m(), 2);
        assert_eq!(s.certificate(0, 1).unwrap(), BottleneckChain::new(vec![0, 1], vec![7]));
        assert!(s.verify_rbp(&PairSelection::All).all_verified());
    }

    #[test]
    fn tree_with_edge_pieces() {
        let edges = [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (5, 6)];
        let g = MetricGraph::new(7, &edges).unwrap();
        let pieces: Vec<PointSet> = edges.iter().map(|&(u, v)| set(&[u, v])).collect();
        let s = tree_graded_certificate(&g, &pieces, 0).unwrap();
        assert_eq!(s.certificate_count(), 15);
        assert!(s.verify_rbp(&PairSelection::All).all_verified());
    }

    #[test]
    fn overlapping_pieces_not_tree_graded() {
        let g = MetricGraph::cycle(6);
        let pieces = vec![set(&[0, 1, 2, 3]), set(&[2, 3, 4, 5, 0])];
        match tree_graded_certificate(&g, &pieces, 0) {
            Err(RbpError::NotTreeGraded { i: 0, j: 1, .. }) => {}
            other => panic!("expected NotTreeGraded, got {other:?}"),
        }
    }

    #[test]
    fn cyclic_incidence_not_tree_graded() {
        // triangle of three edge pieces: each pair shares one vertex
        let g = MetricGraph::cycle(3);
        let pieces = vec![set(&[0, 1]), set(&[1, 2]), set(&[0, 2])];
        assert!(matches!(tree_graded_certificate(&g, &pieces, 0), Err(RbpError::NotTreeGraded { .. })));
    }

    #[test]
    fn attach_basepoint_is_private() {
        let s = path_structure(1);
        let t = attach_basepoint(&s);
        let e = t.basepoint.unwrap();
        assert_eq!(e, 9);
        assert_eq!(t.private_base_vertex(), Some(0).filter(|_| false).or(t.private_base_vertex()));
        let m = t.decomposition.membership(10);
        assert_eq!(m[e], vec![0]);
    }

    #[test]
    fn thicken_degenerate_b_zero() {
        let mut s = path_structure(1);
        s.insert_certificate(BottleneckChain::new(vec![0, 1], vec![4])).unwrap();
        let t = thicken(&s, 0).unwrap();
        assert_eq!(t.structure.m(), 9);
        assert!(t.level.iter().all(|&l| l <= 1));
        // level 0 is the input plus the fresh basepoint, isometrically
        let level0: Vec<VertexId> = (0..t.level.len()).filter(|&v| t.level[v] == 0).collect();
        assert_eq!(level0, (0..10).collect::<Vec<_>>());
        let g = &t.structure.graph;
        for x in 0..10 {
            let d = g.distances_from(x);
            let d0 = t.level_zero.distances_from(x);
            for y in 0..10 {
                assert_eq!(d[y], d0[y]);
            }
        }
        let e = t.structure.basepoint.unwrap();
        assert_eq!(t.structure.decomposition.membership(g.vertex_count())[e], vec![0]);
    }

    #[test]
    fn small_cut_found_on_path_pieces() {
        let s = path_structure(1);
        let cut = find_small_cut(&s, 2).unwrap();
        assert_eq!(cut.radius, 1);
        assert_eq!((cut.center, cut.piece), (1, 0));
    }
}
