//! Seeded generators of test families with known structure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{MetricGraph, PointSet, VertexId};
use crate::pairs::PairSelection;
use crate::rbp::{PieceDecomposition, PieceId, QiMap};
use crate::treegraded::{ArcSpec, TreeGradedSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Template {
    Cycle,
    Path,
    Complete,
    /// Uniform choice among the other three, per piece.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    TreeOfPieces {
        pieces: usize,
        template: Template,
        min_size: usize,
        max_size: usize,
        depth: Option<usize>,
        seed: u64,
    },
    CycleChain {
        count: usize,
        length: usize,
    },
    Grid {
        n: usize,
    },
    RandomTreeGraded {
        pieces: usize,
        min_size: usize,
        max_size: usize,
        max_arc: u32,
        seed: u64,
    },
    /// Another family with every edge subdivided `k` times.
    Subdivision {
        k: u32,
        base: Box<GeneratorSpec>,
    },
}

/// Where a piece was glued: `vertex` is shared between `piece` and `parent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Glue {
    pub piece: PieceId,
    pub parent: PieceId,
    pub vertex: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedInstance {
    pub graph: MetricGraph,
    pub decomposition: PieceDecomposition,
    pub glue: Vec<Glue>,
}

/// Edges of the labelled tree on `0..n` encoded by a uniform Prüfer sequence.
pub fn prufer_tree(n: usize, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in &seq {
        let leaf = *leaves.iter().next().unwrap();
        leaves.remove(&leaf);
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.insert(s);
        }
    }
    let mut rest = leaves.into_iter();
    edges.push((rest.next().unwrap(), rest.next().unwrap()));
    edges
}

/// Parent of every node of a random tree on `0..n` rooted at 0, listed in
/// an order where parents come first. With a depth cap, each node attaches
/// to a uniform earlier node of depth below the cap instead.
fn random_rooted_tree(n: usize, depth: Option<usize>, rng: &mut impl Rng) -> Vec<(usize, usize)> {
    match depth {
        Some(cap) => {
            let cap = cap.max(1);
            let mut d = vec![0usize; n];
            let mut out = Vec::new();
            for t in 1..n {
                let eligible: Vec<usize> = (0..t).filter(|&q| d[q] < cap).collect();
                let p = eligible[rng.gen_range(0..eligible.len())];
                d[t] = d[p] + 1;
                out.push((t, p));
            }
            out
        }
        None => {
            let edges = prufer_tree(n, rng);
            let mut adj = vec![Vec::new(); n];
            for &(a, b) in &edges {
                adj[a].push(b);
                adj[b].push(a);
            }
            for a in &mut adj {
                a.sort_unstable();
            }
            let mut seen = vec![false; n];
            let mut out = Vec::new();
            let mut queue = std::collections::VecDeque::from([0]);
            if n > 0 {
                seen[0] = true;
            }
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        out.push((v, u));
                        queue.push_back(v);
                    }
                }
            }
            out
        }
    }
}

fn template_graph(kind: Template, size: usize) -> MetricGraph {
    match kind {
        Template::Cycle => MetricGraph::cycle(size.max(3)),
        Template::Path => MetricGraph::path(size.max(2)),
        Template::Complete => MetricGraph::complete(size.clamp(2, 6)),
        Template::Mixed => unreachable!("resolved before building"),
    }
}

fn pick_template(kind: Template, rng: &mut impl Rng) -> Template {
    match kind {
        Template::Mixed => [Template::Cycle, Template::Path, Template::Complete][rng.gen_range(0..3)],
        k => k,
    }
}

/// Template pieces glued at single vertices along a random tree. Piece 0 is
/// the base piece.
pub fn gen_tree_of_pieces(
    pieces: usize,
    template: Template,
    min_size: usize,
    max_size: usize,
    depth: Option<usize>,
    seed: u64,
) -> GeneratedInstance {
    assert!(pieces >= 1 && min_size >= 1 && min_size <= max_size, "invalid generator parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let templates: Vec<MetricGraph> = (0..pieces)
        .map(|_| {
            let kind = pick_template(template, &mut rng);
            template_graph(kind, rng.gen_range(min_size..=max_size))
        })
        .collect();
    let tree = random_rooted_tree(pieces, depth, &mut rng);

    let mut ids: Vec<Vec<VertexId>> = vec![Vec::new(); pieces];
    ids[0] = (0..templates[0].vertex_count()).collect();
    let mut next = templates[0].vertex_count();
    let mut glue = Vec::with_capacity(pieces - 1);
    for &(child, parent) in &tree {
        let at = ids[parent][rng.gen_range(0..ids[parent].len())];
        let size = templates[child].vertex_count();
        let local = rng.gen_range(0..size);
        ids[child] = (0..size)
            .map(|l| {
                if l == local {
                    at
                } else {
                    next += 1;
                    next - 1
                }
            })
            .collect();
        glue.push(Glue { piece: child, parent, vertex: at });
    }
    let mut edges = Vec::new();
    for (t, g) in templates.iter().enumerate() {
        edges.extend(g.edges().iter().map(|&(u, v)| (ids[t][u], ids[t][v])));
    }
    let graph = MetricGraph::new(next, &edges).expect("glued connected templates");
    let sets = ids.into_iter().map(PointSet::from).collect();
    let decomposition = PieceDecomposition::new(sets, 0).expect("templates are nonempty");
    GeneratedInstance { graph, decomposition, glue }
}

/// `count` cycles of the given length, each glued to the previous one at
/// the vertex opposite to where that one was entered.
pub fn gen_cycle_chain(count: usize, length: usize) -> GeneratedInstance {
    assert!(count >= 1 && length >= 3, "invalid generator parameters");
    let mut edges = Vec::new();
    let mut pieces = Vec::new();
    let mut glue = Vec::new();
    let mut entry = 0;
    let mut next = 0;
    for t in 0..count {
        let ids: Vec<VertexId> = (0..length)
            .map(|l| {
                if l == 0 && t > 0 {
                    entry
                } else {
                    next += 1;
                    next - 1
                }
            })
            .collect();
        edges.extend((0..length).map(|l| (ids[l], ids[(l + 1) % length])));
        if t > 0 {
            glue.push(Glue { piece: t, parent: t - 1, vertex: entry });
        }
        entry = ids[length / 2];
        pieces.push(PointSet::from(ids));
    }
    let graph = MetricGraph::new(next, &edges).expect("chained cycles are connected");
    GeneratedInstance { graph, decomposition: PieceDecomposition::new(pieces, 0).unwrap(), glue }
}

/// The `n x n` grid with its rows as pieces.
pub fn gen_grid(n: usize) -> GeneratedInstance {
    assert!(n >= 1, "invalid generator parameters");
    let mut edges = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let v = r * n + c;
            if c + 1 < n {
                edges.push((v, v + 1));
            }
            if r + 1 < n {
                edges.push((v, v + n));
            }
        }
    }
    let graph = MetricGraph::new(n * n, &edges).unwrap();
    let rows = (0..n).map(|r| (r * n..(r + 1) * n).collect::<PointSet>()).collect();
    GeneratedInstance { graph, decomposition: PieceDecomposition::new(rows, 0).unwrap(), glue: Vec::new() }
}

/// Cycle pieces joined by arcs of random length along a random tree, built
/// directly as a tree-graded space rooted at piece 0.
pub fn gen_random_tree_graded(pieces: usize, min_size: usize, max_size: usize, max_arc: u32, seed: u64) -> TreeGradedSpace {
    assert!(pieces >= 1 && min_size >= 3 && min_size <= max_size && max_arc >= 1, "invalid generator parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graphs: Vec<MetricGraph> = (0..pieces).map(|_| MetricGraph::cycle(rng.gen_range(min_size..=max_size))).collect();
    let arcs: Vec<ArcSpec> = random_rooted_tree(pieces, None, &mut rng)
        .into_iter()
        .map(|(child, parent)| ArcSpec {
            child,
            child_vertex: rng.gen_range(0..graphs[child].vertex_count()),
            parent,
            parent_vertex: rng.gen_range(0..graphs[parent].vertex_count()),
            length: rng.gen_range(1..=max_arc),
        })
        .collect();
    TreeGradedSpace::assemble(&graphs, None, &arcs, 0).expect("generated arcs form a tree")
}

/// Runs a generator spec that produces a graph and decomposition.
pub fn generate(spec: &GeneratorSpec) -> Option<GeneratedInstance> {
    match *spec {
        GeneratorSpec::TreeOfPieces { pieces, template, min_size, max_size, depth, seed } => {
            Some(gen_tree_of_pieces(pieces, template, min_size, max_size, depth, seed))
        }
        GeneratorSpec::CycleChain { count, length } => Some(gen_cycle_chain(count, length)),
        GeneratorSpec::Grid { n } => Some(gen_grid(n)),
        GeneratorSpec::RandomTreeGraded { .. } => None,
        GeneratorSpec::Subdivision { k, ref base } => generate(base).map(|inst| subdivide_instance(&inst, k)),
    }
}

/// Subdivides an instance. Interior vertices of an edge join every piece
/// containing both ends, or the piece(s) of the nearer end otherwise.
pub fn subdivide_instance(inst: &GeneratedInstance, k: u32) -> GeneratedInstance {
    let (graph, _) = subdivide(&inst.graph, k);
    let back = subdivision_inverse(&inst.graph, k);
    let n = inst.graph.vertex_count();
    let inner = (k - 1) as usize;
    let membership = inst.decomposition.membership(n);
    let mut pieces: Vec<Vec<VertexId>> = inst.decomposition.pieces().iter().map(|p| p.iter().collect()).collect();
    for (t, &(u, v)) in inst.graph.edges().iter().enumerate() {
        let shared: Vec<PieceId> = membership[u].iter().copied().filter(|i| membership[v].contains(i)).collect();
        for s in 0..inner {
            let w = n + t * inner + s;
            let owners = if shared.is_empty() { &membership[back.map[w]] } else { &shared };
            for &i in owners {
                pieces[i].push(w);
            }
        }
    }
    let pieces = pieces.into_iter().map(PointSet::from_iter).collect();
    GeneratedInstance {
        graph,
        decomposition: PieceDecomposition::new(pieces, inst.decomposition.base()).expect("subdivided pieces are nonempty"),
        glue: inst.glue.clone(),
    }
}

/// Replaces every edge by a path of `k` edges. Original vertices keep their
/// ids; interior vertices of edge number `t` follow, from the smaller end.
/// The returned map is a `(k, k-1)` quasi-isometry onto the result.
pub fn subdivide(g: &MetricGraph, k: u32) -> (MetricGraph, QiMap) {
    assert!(k >= 1, "subdivision factor must be positive");
    let n = g.vertex_count();
    let inner = (k - 1) as usize;
    let mut edges = Vec::with_capacity(g.edge_count() * k as usize);
    for (t, &(u, v)) in g.edges().iter().enumerate() {
        let mut prev = u;
        for s in 0..inner {
            let w = n + t * inner + s;
            edges.push((prev, w));
            prev = w;
        }
        edges.push((prev, v));
    }
    let sub = MetricGraph::new(n + g.edge_count() * inner, &edges).expect("subdivision of a connected graph");
    let q = QiMap { map: (0..n).collect(), k, c: k - 1 };
    debug_assert!(q.check(g, &sub, &PairSelection::Sample { k: 256, seed: 0 }).holds);
    (sub, q)
}

/// Map from `subdivide(g, k)` back to `g`, sending interior vertices to
/// the nearer end (the smaller one on ties): a `(k, 1)` quasi-isometry, or
/// the identity when `k = 1`.
pub fn subdivision_inverse(g: &MetricGraph, k: u32) -> QiMap {
    let n = g.vertex_count();
    let inner = (k - 1) as usize;
    let mut map: Vec<VertexId> = (0..n).collect();
    for &(u, v) in g.edges() {
        for s in 0..inner {
            let pos = s as u32 + 1;
            map.push(if pos <= k - pos { u } else { v });
        }
    }
    QiMap { map, k, c: u32::from(k > 1) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rbp::check_tree_graded;

    #[test]
    fn subdivided_family_stays_tree_graded() {
        let base = GeneratorSpec::TreeOfPieces { pieces: 4, template: Template::Cycle, min_size: 4, max_size: 6, depth: None, seed: 3 };
        let inst = generate(&GeneratorSpec::Subdivision { k: 3, base: Box::new(base.clone()) }).unwrap();
        let orig = generate(&base).unwrap();
        assert_eq!(inst.graph.vertex_count(), orig.graph.vertex_count() + 2 * orig.graph.edge_count());
        inst.decomposition.validate(&inst.graph).unwrap();
        check_tree_graded(&inst.graph, &inst.decomposition).unwrap();
        let grid = generate(&GeneratorSpec::Subdivision { k: 2, base: Box::new(GeneratorSpec::Grid { n: 3 }) }).unwrap();
        grid.decomposition.validate(&grid.graph).unwrap();
    }

    #[test]
    fn prufer_gives_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..30 {
            let e = prufer_tree(n, &mut rng);
            assert_eq!(e.len(), n - 1);
            assert!(MetricGraph::new(n, &e).is_ok());
        }
    }

    #[test]
    fn single_piece_is_template() {
        let inst = gen_tree_of_pieces(1, Template::Cycle, 7, 7, None, 1);
        assert_eq!(inst.graph, MetricGraph::cycle(7));
    }

    #[test]
    fn two_cycles_share_one_vertex() {
        let inst = gen_tree_of_pieces(2, Template::Cycle, 8, 8, None, 5);
        assert_eq!(inst.graph.vertex_count(), 15);
        assert!(check_tree_graded(&inst.graph, &inst.decomposition).is_ok());
        let shared = inst.decomposition.piece(0).intersection(inst.decomposition.piece(1));
        assert_eq!(shared.as_slice(), &[inst.glue[0].vertex]);
    }

    #[test]
    fn reproducible() {
        let a = gen_tree_of_pieces(10, Template::Mixed, 3, 9, Some(3), 7);
        let b = gen_tree_of_pieces(10, Template::Mixed, 3, 9, Some(3), 7);
        assert_eq!(a, b);
        let c = gen_tree_of_pieces(10, Template::Mixed, 3, 9, Some(3), 8);
        assert_ne!(a, c);
    }

    #[test]
    fn depth_cap_respected() {
        let inst = gen_tree_of_pieces(30, Template::Path, 2, 4, Some(2), 11);
        let mut depth = vec![0; 30];
        for g in &inst.glue {
            depth[g.piece] = depth[g.parent] + 1;
            assert!(depth[g.piece] <= 2);
        }
    }

    #[test]
    fn grid_shape() {
        let inst = gen_grid(3);
        assert_eq!(inst.graph.vertex_count(), 9);
        assert_eq!(inst.decomposition.len(), 3);
        let g = gen_grid(6).graph;
        assert_eq!(g.distances_from(0).into_iter().max(), Some(10));
    }

    #[test]
    fn cycle_chain_distances() {
        let inst = gen_cycle_chain(3, 8);
        assert_eq!(inst.graph.vertex_count(), 22);
        let last = inst.glue[1].vertex;
        assert_eq!(inst.graph.distance(0, last), 8);
    }

    #[test]
    fn subdivision_scales_distances() {
        let (sub, q) = subdivide(&MetricGraph::path(9), 2);
        assert_eq!(sub.vertex_count(), 17);
        assert_eq!(sub.distance(q.map[0], q.map[8]), 16);
        let (same, id) = subdivide(&MetricGraph::cycle(5), 1);
        assert_eq!(same, MetricGraph::cycle(5));
        assert_eq!((id.k, id.c), (1, 0));
        let g = MetricGraph::cycle(7);
        let (sub, q) = subdivide(&g, 3);
        assert!(q.check(&g, &sub, &PairSelection::All).holds);
        assert!(subdivision_inverse(&g, 3).check(&sub, &g, &PairSelection::All).holds);
    }

    #[test]
    fn random_tree_graded_is_valid() {
        let t = gen_random_tree_graded(6, 3, 8, 4, 2);
        assert!(crate::treegraded::verify_tree_graded(&t).passed);
        assert_eq!(t.arcs.len(), 5);
    }
}
