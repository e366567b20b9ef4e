//! Human-readable renderings of the JSON reports. Never parsed back.

use std::fmt::Write;

use treegrade::construction::ConstructionState;
use treegrade::embedding::EmbeddingReport;
use treegrade::graph::ManningReport;
use treegrade::rbp::Verdict;
use treegrade::treegraded::{DistortionReport, TreeGradedSpace};
use treegrade::{MetricGraph, VerificationReport};

macro_rules! line {
    ($out:expr, $($arg:tt)*) => { writeln!($out, $($arg)*).unwrap() };
}

pub fn verification(r: &VerificationReport) -> String {
    let mut s = String::new();
    line!(s, "M = {}, {} pieces, {} pairs checked", r.m, r.pieces, r.pairs_checked);
    line!(s, "verified {}  refuted {}  unknown {}", r.verified, r.refuted, r.unknown);
    if r.degenerate {
        line!(s, "degenerate: a single ball of radius M covers the graph");
    }
    for p in &r.pairs {
        match p.verdict {
            Verdict::Verified => {
                let chain = p.chain.as_ref().expect("verified pairs carry a chain");
                line!(s, "({}, {}) verified via pieces {:?} witnesses {:?}", p.i, p.j, chain.pieces, chain.witnesses);
            }
            Verdict::Refuted => {
                let w = p.witness.as_ref().expect("refuted pairs carry a witness");
                line!(s, "({}, {}) refuted, avoiding path {:?}", p.i, p.j, w.vertices());
            }
            Verdict::Unknown => line!(s, "({}, {}) unknown", p.i, p.j),
        }
    }
    s
}

pub fn build(state: &ConstructionState, t: &TreeGradedSpace, attached: bool) -> String {
    let mut s = String::new();
    let tr = &state.trace;
    line!(s, "M = {}, R = {}, base piece {}, basepoint e = {}", tr.m, tr.r, tr.e_piece, tr.e_vertex);
    if attached {
        line!(s, "basepoint attached as a pendant vertex");
    }
    line!(s, "T(X): {} vertices, {} pieces, {} arcs", t.vertex_count(), t.piece_count(), t.arcs.len());
    for i in 0..t.piece_count() {
        let parent = t.parent(i).map_or("-".to_string(), |p| p.to_string());
        line!(
            s,
            "piece {i}: level {}, e_i {:?}, c_i {}, parent {parent}, copy of {} vertices",
            tr.levels[i],
            tr.basepoints[i],
            tr.c_points[i],
            t.pieces[i].len()
        );
    }
    line!(s, "transitivity checks {} ({} failures)", tr.transitivity.checked, tr.transitivity.failures);
    line!(s, "basepoint blocking checks {} ({} failures)", tr.basepoint_blocking.checked, tr.basepoint_blocking.failures);
    line!(s, "slack: max {} of {} over {} points", tr.slack.max_slack, tr.slack.bound, tr.slack.checked);
    s
}

pub fn distortion(r: &DistortionReport) -> String {
    let mut s = String::new();
    let mode = if r.exhaustive { "all" } else { "sampled" };
    line!(s, "{} pairs ({mode}), additive bound {}", r.pairs_examined, r.additive_bound);
    line!(s, "1-Lipschitz violations {}, bound violations {}", r.lipschitz_violations, r.bound_violations);
    line!(s, "max excess d_T - d_X = {} at {:?}", r.max_excess, r.max_excess_pair);
    line!(s, "bound satisfied: {}", r.bound_satisfied);
    for (excess, count) in &r.histogram {
        line!(s, "  excess {excess:>6}: {count}");
    }
    s
}

pub fn embedding(r: &EmbeddingReport) -> String {
    let mut s = String::new();
    line!(s, "{} coordinate trees, {} pairs", r.coordinates, r.pairs_examined);
    line!(s, "trees ok {:?}, collapse edge stretches {:?}", r.trees_ok, r.psi_edge_violations);
    line!(s, "coordinate Lipschitz violations {}", r.lipschitz_violations);
    line!(s, "max_j d_j < d' on {} pairs (first {:?}), worst ratio {:.3}", r.max_violations, r.first_max_violation, r.min_max_ratio);
    line!(s, "sum_j d_j < d' on {} pairs", r.sum_violations);
    line!(s, "composite constants: lower {:.3}, upper {:.3} over {} pairs", r.composite_lower, r.composite_upper, r.composite_pairs);
    for (i, (lo, hi)) in r.piece_distortion.iter().enumerate() {
        line!(s, "  piece {i}: lower {lo:.3}, upper {hi:.3}");
    }
    s
}

pub fn manning(r: &ManningReport) -> String {
    let mut s = String::new();
    line!(s, "delta {}, {} pairs, {} failures", r.delta, r.pairs_checked, r.failures);
    for f in r.failing_pairs.iter().filter(|f| !f.passed).take(20) {
        let w = f.witness.as_ref().map(|w| w.vertices().to_vec()).unwrap_or_default();
        line!(s, "({}, {}) midpoint {}: avoiding path {:?}", f.x, f.y, f.midpoint, w);
    }
    s
}

pub fn graph(g: &MetricGraph) -> String {
    let mut s = String::new();
    line!(s, "{} vertices, {} edges", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        line!(s, "{u} {v}");
    }
    s
}

pub fn tree_graded(t: &TreeGradedSpace) -> String {
    let mut s = String::new();
    line!(s, "{} vertices, {} pieces, root {}", t.vertex_count(), t.piece_count(), t.root);
    for a in &t.arcs {
        line!(s, "arc {} -> {}: {:?}", a.child, a.parent, a.path);
    }
    s
}
