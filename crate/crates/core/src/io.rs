//! JSON documents for graphs, decompositions, piece embeddings and
//! tree-graded spaces, plus DOT export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::{EmbeddingError, PieceTreeEmbedding};
use crate::graph::{GraphError, MetricGraph, PointSet, VertexId};
use crate::rbp::{BottleneckChain, PieceDecomposition, PieceId, RbpStructure};
use crate::treegraded::{TgArc, TreeGradedError, TreeGradedSpace};

pub const GRAPH_FORMAT: &str = "treegrade-graph";
pub const PIECES_FORMAT: &str = "treegrade-pieces";
pub const EMBEDDINGS_FORMAT: &str = "treegrade-embeddings";
pub const TREE_GRADED_FORMAT: &str = "treegrade-tree-graded";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("field `format`: expected \"{expected}\", found \"{found}\"")]
    Format { expected: &'static str, found: String },
    #[error("field `version`: unsupported version {0}")]
    Version(u32),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

impl IoError {
    fn field(field: impl Into<String>, message: impl ToString) -> Self {
        IoError::Field { field: field.into(), message: message.to_string() }
    }
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Syntax { line: e.line(), column: e.column(), message: e.to_string() })
}

fn check_header(format: &str, version: u32, expected: &'static str) -> Result<(), IoError> {
    if format != expected {
        return Err(IoError::Format { expected, found: format.to_string() });
    }
    if version != VERSION {
        return Err(IoError::Version(version));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub format: String,
    pub version: u32,
    pub vertex_count: usize,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl GraphDoc {
    pub fn from_graph(g: &MetricGraph) -> Self {
        GraphDoc { format: GRAPH_FORMAT.into(), version: VERSION, vertex_count: g.vertex_count(), edges: g.edges().to_vec() }
    }

    fn to_graph(&self, prefix: &str) -> Result<MetricGraph, IoError> {
        MetricGraph::new(self.vertex_count, &self.edges).map_err(|e| {
            let field = match e {
                GraphError::VertexOutOfRange { index, .. }
                | GraphError::SelfLoop { index, .. }
                | GraphError::DuplicateEdge { index, .. } => format!("{prefix}edges[{index}]"),
                _ => format!("{prefix}vertex_count"),
            };
            IoError::field(field, e)
        })
    }
}

pub fn read_graph(text: &str) -> Result<MetricGraph, IoError> {
    let doc: GraphDoc = parse(text)?;
    check_header(&doc.format, doc.version, GRAPH_FORMAT)?;
    doc.to_graph("")
}

pub fn write_graph(g: &MetricGraph) -> String {
    to_json(&GraphDoc::from_graph(g))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub source: PieceId,
    pub target: PieceId,
    pub pieces: Vec<PieceId>,
    pub witnesses: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecesDoc {
    pub format: String,
    pub version: u32,
    pub base_piece: PieceId,
    pub pieces: Vec<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<CertificateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basepoint: Option<VertexId>,
}

/// A decomposition document after validation against its graph.
#[derive(Clone, Debug)]
pub struct LoadedPieces {
    pub decomposition: PieceDecomposition,
    pub constant: Option<u32>,
    pub certificates: Vec<BottleneckChain>,
    pub basepoint: Option<VertexId>,
}

impl LoadedPieces {
    /// Builds the structure at constant `m`, storing the inlined chains.
    pub fn into_structure(self, graph: MetricGraph, m: u32) -> Result<RbpStructure, IoError> {
        let mut s = RbpStructure::new(graph, self.decomposition, m).map_err(|e| IoError::field("pieces", e))?;
        for (k, chain) in self.certificates.into_iter().enumerate() {
            s.insert_certificate(chain).map_err(|e| IoError::field(format!("certificates[{k}]"), e))?;
        }
        s.basepoint = self.basepoint;
        Ok(s)
    }
}

pub fn read_pieces(text: &str, g: &MetricGraph) -> Result<LoadedPieces, IoError> {
    let doc: PiecesDoc = parse(text)?;
    check_header(&doc.format, doc.version, PIECES_FORMAT)?;
    let n = g.vertex_count();
    if doc.pieces.is_empty() {
        return Err(IoError::field("pieces", "no pieces"));
    }
    let mut pieces = Vec::with_capacity(doc.pieces.len());
    for (i, p) in doc.pieces.iter().enumerate() {
        if p.is_empty() {
            return Err(IoError::field(format!("pieces[{i}]"), "empty piece"));
        }
        if let Some(k) = p.iter().position(|&v| v >= n) {
            return Err(IoError::field(format!("pieces[{i}][{k}]"), format!("vertex {} outside 0..{n}", p[k])));
        }
        pieces.push(p.iter().copied().collect::<PointSet>());
    }
    if doc.base_piece >= pieces.len() {
        return Err(IoError::field("base_piece", format!("{} is not a piece index", doc.base_piece)));
    }
    if doc.constant == Some(0) {
        return Err(IoError::field("constant", "must be positive"));
    }
    if let Some(b) = doc.basepoint {
        if b >= n {
            return Err(IoError::field("basepoint", format!("vertex {b} outside 0..{n}")));
        }
    }
    let decomposition = PieceDecomposition::new(pieces, doc.base_piece).map_err(|e| IoError::field("pieces", e))?;
    decomposition.validate(g).map_err(|e| IoError::field("pieces", e))?;
    let certificates = doc
        .certificates
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let field = format!("certificates[{k}]");
            if c.pieces.first() != Some(&c.source) || c.pieces.last() != Some(&c.target) {
                return Err(IoError::field(field, "piece list must run from source to target"));
            }
            let chain = BottleneckChain::new(c.pieces.clone(), c.witnesses.clone());
            chain.check_membership(&decomposition).map_err(|e| IoError::field(field, e))?;
            Ok(chain)
        })
        .collect::<Result<_, _>>()?;
    Ok(LoadedPieces { decomposition, constant: doc.constant, certificates, basepoint: doc.basepoint })
}

pub fn pieces_doc(d: &PieceDecomposition) -> PiecesDoc {
    PiecesDoc {
        format: PIECES_FORMAT.into(),
        version: VERSION,
        base_piece: d.base(),
        pieces: d.pieces().iter().map(|p| p.iter().collect()).collect(),
        constant: None,
        certificates: Vec::new(),
        basepoint: None,
    }
}

/// The decomposition of `s` with its constant and stored chains.
pub fn write_structure(s: &RbpStructure) -> String {
    let mut doc = pieces_doc(&s.decomposition);
    doc.constant = Some(s.m());
    doc.basepoint = s.basepoint;
    doc.certificates = s
        .certificates()
        .map(|c| CertificateDoc {
            source: c.source(),
            target: c.target(),
            pieces: c.pieces.clone(),
            witnesses: c.witnesses.clone(),
        })
        .collect();
    to_json(&doc)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub vertex_count: usize,
    pub edges: Vec<(VertexId, VertexId)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceEmbeddingDoc {
    pub piece: PieceId,
    pub trees: Vec<TreeDoc>,
    pub map: Vec<Vec<VertexId>>,
    pub k: u32,
    pub c: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingsDoc {
    pub format: String,
    pub version: u32,
    pub embeddings: Vec<PieceEmbeddingDoc>,
}

/// Reads tabulated piece embeddings, checking each one exhaustively
/// against its piece (given as the induced subgraph in local ids).
pub fn read_embeddings(text: &str, piece_graph: impl Fn(PieceId) -> Option<MetricGraph>) -> Result<Vec<PieceTreeEmbedding>, IoError> {
    let doc: EmbeddingsDoc = parse(text)?;
    check_header(&doc.format, doc.version, EMBEDDINGS_FORMAT)?;
    doc.embeddings
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let prefix = format!("embeddings[{k}]");
            let g = piece_graph(e.piece).ok_or_else(|| IoError::field(format!("{prefix}.piece"), "no such piece"))?;
            let trees = e
                .trees
                .iter()
                .enumerate()
                .map(|(j, t)| {
                    MetricGraph::new(t.vertex_count, &t.edges).map_err(|err| IoError::field(format!("{prefix}.trees[{j}]"), err))
                })
                .collect::<Result<Vec<_>, _>>()?;
            PieceTreeEmbedding::new(e.piece, &g, trees, e.map.clone(), e.k, e.c).map_err(|err| {
                let field = match err {
                    EmbeddingError::NotATree(j) => format!("{prefix}.trees[{j}]"),
                    EmbeddingError::MapOutOfRange { vertex, .. } => format!("{prefix}.map[{vertex}]"),
                    EmbeddingError::MapShape { .. } | EmbeddingError::CoordinateMismatch { .. } => format!("{prefix}.map"),
                    _ => prefix.clone(),
                };
                IoError::field(field, err)
            })
        })
        .collect()
}

pub fn write_embeddings(embeds: &[PieceTreeEmbedding]) -> String {
    to_json(&EmbeddingsDoc {
        format: EMBEDDINGS_FORMAT.into(),
        version: VERSION,
        embeddings: embeds
            .iter()
            .map(|e| PieceEmbeddingDoc {
                piece: e.piece,
                trees: e.trees.iter().map(|t| TreeDoc { vertex_count: t.vertex_count(), edges: t.edges().to_vec() }).collect(),
                map: e.map.clone(),
                k: e.k,
                c: e.c,
            })
            .collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDoc {
    pub child: PieceId,
    pub parent: PieceId,
    pub path: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeGradedDoc {
    pub format: String,
    pub version: u32,
    pub vertex_count: usize,
    pub edges: Vec<(VertexId, VertexId)>,
    pub root: PieceId,
    pub pieces: Vec<Vec<VertexId>>,
    pub arcs: Vec<ArcDoc>,
    /// Underlying tree edges as `(child, parent)`.
    pub underlying_tree: Vec<(PieceId, PieceId)>,
}

pub fn write_tree_graded(t: &TreeGradedSpace) -> String {
    to_json(&tree_graded_doc(t))
}

pub fn tree_graded_doc(t: &TreeGradedSpace) -> TreeGradedDoc {
    TreeGradedDoc {
        format: TREE_GRADED_FORMAT.into(),
        version: VERSION,
        vertex_count: t.vertex_count(),
        edges: t.realized.edges().to_vec(),
        root: t.root,
        pieces: t.pieces.iter().map(|p| p.iter().collect()).collect(),
        arcs: t.arcs.iter().map(|a| ArcDoc { child: a.child, parent: a.parent, path: a.path.clone() }).collect(),
        underlying_tree: t.arcs.iter().map(|a| (a.child, a.parent)).collect(),
    }
}

pub fn read_tree_graded(text: &str) -> Result<TreeGradedSpace, IoError> {
    let doc: TreeGradedDoc = parse(text)?;
    check_header(&doc.format, doc.version, TREE_GRADED_FORMAT)?;
    let g = MetricGraph::new(doc.vertex_count, &doc.edges).map_err(|e| IoError::field("edges", e))?;
    let pieces = doc.pieces.iter().map(|p| p.iter().copied().collect()).collect();
    let arcs = doc.arcs.iter().map(|a| TgArc { child: a.child, parent: a.parent, path: a.path.clone() }).collect();
    TreeGradedSpace::from_parts(g, pieces, arcs, doc.root).map_err(|e| {
        let field = match e {
            TreeGradedError::BadArc(k, _) => format!("arcs[{k}]"),
            TreeGradedError::BadPiece(_) => "root".into(),
            _ => "pieces".into(),
        };
        IoError::field(field, e)
    })
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("documents serialize");
    s.push('\n');
    s
}

/// DOT rendering; vertices carry the index of their first group, if any.
pub fn to_dot(g: &MetricGraph, name: &str, groups: Option<&[PointSet]>) -> String {
    let mut label: Vec<Option<usize>> = vec![None; g.vertex_count()];
    if let Some(groups) = groups {
        for (i, p) in groups.iter().enumerate() {
            for v in p.iter() {
                label[v].get_or_insert(i);
            }
        }
    }
    let mut out = String::new();
    writeln!(out, "graph {name} {{").unwrap();
    for (v, l) in label.iter().enumerate() {
        match l {
            Some(i) => writeln!(out, "  {v} [group={i}];").unwrap(),
            None => writeln!(out, "  {v};").unwrap(),
        }
    }
    for &(u, v) in g.edges() {
        writeln!(out, "  {u} -- {v};").unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_random_tree_graded, gen_tree_of_pieces, Template};
    use crate::rbp::tree_graded_certificate;

    #[test]
    fn graph_round_trip() {
        let g = MetricGraph::cycle(5);
        assert_eq!(read_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = read_graph("{\n  \"format\": \"treegrade-graph\",\n  \"version\": 1,\n  \"vertex_count\": x\n}").unwrap_err();
        assert!(matches!(err, IoError::Syntax { line: 4, .. }), "{err}");
    }

    #[test]
    fn schema_errors_name_fields() {
        let bad = r#"{"format":"treegrade-graph","version":1,"vertex_count":3,"edges":[[0,1],[1,7]]}"#;
        assert!(matches!(read_graph(bad).unwrap_err(), IoError::Field { field, .. } if field == "edges[1]"));
        let wrong = r#"{"format":"other","version":1,"vertex_count":1,"edges":[]}"#;
        assert!(matches!(read_graph(wrong).unwrap_err(), IoError::Format { .. }));
        let g = MetricGraph::path(3);
        let empty = r#"{"format":"treegrade-pieces","version":1,"base_piece":0,"pieces":[[0,1,2],[]]}"#;
        assert!(matches!(read_pieces(empty, &g).unwrap_err(), IoError::Field { field, .. } if field == "pieces[1]"));
        let extra = r#"{"format":"treegrade-pieces","version":1,"base_piece":0,"pieces":[[0,1,2]],"bogus":1}"#;
        assert!(matches!(read_pieces(extra, &g).unwrap_err(), IoError::Syntax { .. }));
    }

    #[test]
    fn structure_round_trip() {
        let inst = gen_tree_of_pieces(4, Template::Mixed, 3, 6, None, 2);
        let s = tree_graded_certificate(&inst.graph, inst.decomposition.pieces(), 0).unwrap();
        let text = write_structure(&s);
        let loaded = read_pieces(&text, &s.graph).unwrap();
        assert_eq!(loaded.constant, Some(2));
        let back = loaded.into_structure(s.graph.clone(), 2).unwrap();
        assert_eq!(back, s);
        assert_eq!(write_structure(&back), text);
    }

    #[test]
    fn tree_graded_round_trip() {
        let t = gen_random_tree_graded(4, 3, 6, 3, 1);
        let back = read_tree_graded(&write_tree_graded(&t)).unwrap();
        assert_eq!(back.realized, t.realized);
        assert_eq!(back.tg_distance_vertices(0, t.vertex_count() - 1), t.tg_distance_vertices(0, t.vertex_count() - 1));
    }

    #[test]
    fn embeddings_round_trip() {
        let c = MetricGraph::cycle(7);
        let e = crate::embedding::cycle_embedding(0, &c).unwrap();
        let text = write_embeddings(std::slice::from_ref(&e));
        let back = read_embeddings(&text, |i| (i == 0).then(|| c.clone())).unwrap();
        assert_eq!(back, vec![e]);
        let bad = text.replace("\"k\": 2", "\"k\": 1");
        assert!(read_embeddings(&bad, |i| (i == 0).then(|| c.clone())).is_err());
    }

    #[test]
    fn dot_lists_every_edge() {
        let dot = to_dot(&MetricGraph::path(3), "x", Some(&[PointSet::from(vec![0, 1])]));
        assert!(dot.contains("0 -- 1;") && dot.contains("1 -- 2;") && dot.contains("0 [group=0];"));
    }
}
