//! Relative bottleneck property verification, tree-graded constructions and
//! product-of-trees embeddings on finite metric graphs.

pub mod construction;
pub mod embedding;
pub mod generators;
pub mod graph;
pub mod io;
pub mod pairs;
pub mod rbp;
pub mod treegraded;

pub use graph::{GraphError, MetricGraph, PathWitness, PointSet, VertexId};
pub use pairs::PairSelection;
pub use rbp::{BottleneckChain, PieceDecomposition, PieceId, RbpError, RbpStructure, Verdict, VerificationReport};
