mod common;

use proptest::prelude::*;
use treegrade::construction::{construct, ConstructionConfig};
use treegrade::embedding::{coordinate_trees, cycle_embedding, default_embeddings, measure_embedding, replace_pieces};
use treegrade::generators::{
    gen_grid, gen_random_tree_graded, gen_tree_of_pieces, subdivide, subdivision_inverse, Template,
};
use treegrade::rbp::{
    attach_basepoint, check_quasi_convexity, transport_qi, tree_graded_certificate, verify_rbp,
};
use treegrade::treegraded::{build_tree_graded, collapse, measure_distortion, verify_tree_graded};
use treegrade::{MetricGraph, PairSelection, PointSet};

use common::*;

fn template() -> impl Strategy<Value = Template> {
    prop_oneof![Just(Template::Cycle), Just(Template::Path), Just(Template::Complete), Just(Template::Mixed)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn separation_matches_path_enumeration(seed in any::<u64>(), n in 3usize..13, extra in 0usize..5, r in 1u32..3) {
        let mut rng = rng(seed);
        let g = random_sparse_graph(n, extra, &mut rng);
        let a = random_subset(n, 0.3, &mut rng);
        let b = random_subset(n, 0.3, &mut rng);
        let w = (seed % n as u64) as usize;
        let bl = g.open_ball(w, r as f64);
        prop_assert_eq!(g.blocks_all_paths(&a, &b, &bl), !oracle_avoiding_path(&g, &a, &b, &bl));
    }

    #[test]
    fn balls_and_neighbourhoods(seed in any::<u64>(), n in 2usize..30, r in 0u32..5) {
        let mut rng = rng(seed);
        let g = random_sparse_graph(n, 3, &mut rng);
        let w = (seed % n as u64) as usize;
        let d = g.distances_from(w);
        let open = g.open_ball(w, r as f64);
        let closed = g.closed_neighborhood(&PointSet::singleton(w), r);
        prop_assert_eq!(open.len(), d.iter().filter(|&&x| x < r).count());
        prop_assert_eq!(closed.len(), d.iter().filter(|&&x| x <= r).count());
        prop_assert!(open.is_subset(&closed));
        // a half-integer radius rounds up
        prop_assert_eq!(g.open_ball(w, r as f64 + 0.5), closed);
    }

    #[test]
    fn geodesic_sets_and_canonical_geodesics(seed in any::<u64>(), n in 2usize..30) {
        let mut rng = rng(seed);
        let g = random_sparse_graph(n, 4, &mut rng);
        let (x, y) = ((seed % n as u64) as usize, ((seed / 7) % n as u64) as usize);
        let dx = g.distances_from(x);
        let dy = g.distances_from(y);
        let set = g.geodesic_vertices(x, y);
        let expected: PointSet = (0..n).filter(|&v| dx[v] + dy[v] == dx[y]).collect();
        prop_assert_eq!(&set, &expected);
        let p = g.canonical_geodesic(x, y);
        prop_assert_eq!(p.len() as u32, dx[y]);
        prop_assert!(p.is_walk_in(&g));
        prop_assert!(p.vertices().iter().all(|&v| set.contains(v)));
        prop_assert_eq!(g.canonical_geodesic(x, y), g.canonical_geodesic(x, y));
    }

    #[test]
    fn tree_of_pieces_certificates_verify(seed in any::<u64>(), k in 1usize..9, t in template(), depth in proptest::option::of(1usize..4)) {
        let inst = gen_tree_of_pieces(k, t, 3, 8, depth, seed);
        let s = tree_graded_certificate(&inst.graph, inst.decomposition.pieces(), 0).unwrap();
        prop_assert_eq!(s.m(), 2);
        let r = verify_rbp(&s, &PairSelection::All);
        prop_assert!(r.all_verified());
        for i in 0..s.piece_count() {
            prop_assert!(check_quasi_convexity(&s, i, 0).holds);
        }
    }

    #[test]
    fn generators_are_reproducible(seed in any::<u64>(), k in 1usize..8) {
        prop_assert_eq!(
            gen_tree_of_pieces(k, Template::Mixed, 3, 9, None, seed),
            gen_tree_of_pieces(k, Template::Mixed, 3, 9, None, seed)
        );
        let a = gen_random_tree_graded(k, 3, 7, 3, seed);
        let b = gen_random_tree_graded(k, 3, 7, 3, seed);
        prop_assert_eq!(&a.realized, &b.realized);
        prop_assert_eq!(&a.pieces, &b.pieces);
    }

    #[test]
    fn grid_diameter(n in 3usize..12) {
        let g = gen_grid(n).graph;
        prop_assert!(g.is_connected());
        prop_assert_eq!(g.set_diameter(&g.all_vertices()), 2 * (n as u32 - 1));
    }

    #[test]
    fn subdivision_scales_and_inverts(seed in any::<u64>(), n in 2usize..15, k in 1u32..4) {
        let mut rng = rng(seed);
        let g = random_sparse_graph(n, 2, &mut rng);
        let (sub, q) = subdivide(&g, k);
        for x in 0..n {
            let d = g.distances_from(x);
            let ds = sub.distances_from(x);
            for y in 0..n {
                prop_assert_eq!(ds[y], k * d[y]);
            }
        }
        prop_assert!(q.check(&g, &sub, &PairSelection::All).holds);
        let back = subdivision_inverse(&g, k);
        prop_assert!(back.check(&sub, &g, &PairSelection::All).holds);
    }

    #[test]
    fn transport_there_and_back_still_verifies(seed in any::<u64>(), k in 1usize..5, f in 2u32..4) {
        let inst = gen_tree_of_pieces(k, Template::Mixed, 3, 6, None, seed);
        let s = tree_graded_certificate(&inst.graph, inst.decomposition.pieces(), 0).unwrap();
        let (sub, q) = subdivide(&s.graph, f);
        let there = transport_qi(&s, &sub, &q).unwrap();
        prop_assert!(verify_rbp(&there, &PairSelection::All).all_verified());
        let back = transport_qi(&there, &s.graph, &subdivision_inverse(&s.graph, f)).unwrap();
        prop_assert!(back.m() > there.m());
        prop_assert!(verify_rbp(&back, &PairSelection::All).all_verified());
    }

    #[test]
    fn selection_is_sorted_and_in_range(n in 0usize..60, k in 0usize..100, seed in any::<u64>()) {
        let pairs = PairSelection::Sample { k, seed }.select(n);
        prop_assert!(pairs.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(pairs.iter().all(|&(a, b)| a < b && b < n));
        prop_assert_eq!(pairs.len(), k.min(n * n.saturating_sub(1) / 2));
        prop_assert_eq!(pairs, PairSelection::Sample { k, seed }.select(n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pipeline_round_trip(seed in any::<u64>(), k in 1usize..5, r in proptest::option::of(2u32..8)) {
        let inst = gen_tree_of_pieces(k, Template::Mixed, 3, 6, None, seed);
        let s = tree_graded_certificate(&inst.graph, inst.decomposition.pieces(), 0).unwrap();
        let s = if s.private_base_vertex().is_some() { s } else { attach_basepoint(&s) };
        let state = construct(&s, &ConstructionConfig { r, cut_check: None, checks: true }).unwrap();
        let t = build_tree_graded(&state).unwrap();
        prop_assert!(verify_tree_graded(&t).passed);
        for x in (0..t.vertex_count()).step_by(5) {
            let d = t.realized.distances_from(x);
            for y in 0..t.vertex_count() {
                prop_assert_eq!(t.tg_distance_vertices(x, y), d[y]);
            }
        }
        let phi = collapse(&t, &state).unwrap();
        prop_assert!(phi.is_surjective(state.graph()));
        let rep = measure_distortion(&t, &phi, state.graph(), state.m(), &PairSelection::All);
        prop_assert_eq!(rep.lipschitz_violations, 0);
        prop_assert_eq!(rep.bound_violations, 0);
    }

    #[test]
    fn coordinate_collapses_are_lipschitz(seed in any::<u64>(), k in 1usize..7) {
        let t = gen_random_tree_graded(k, 3, 9, 4, seed);
        let ps = replace_pieces(&t, &default_embeddings(&t).unwrap()).unwrap();
        let coords = coordinate_trees(&ps).unwrap();
        let rep = measure_embedding(&t, &ps, &coords, &PairSelection::All, &PairSelection::All);
        prop_assert!(rep.trees_ok.iter().all(|&b| b));
        prop_assert!(rep.psi_edge_violations.iter().all(|&v| v == 0));
        prop_assert_eq!(rep.lipschitz_violations, 0);
        prop_assert_eq!(rep.sum_violations, 0);
        for c in &coords {
            prop_assert_eq!(c.tree.realized.edge_count() + 1, c.tree.realized.vertex_count());
        }
    }

    #[test]
    fn cycle_pieces_embed_with_distortion_two(n in 3usize..80) {
        let g = MetricGraph::cycle(n);
        let e = cycle_embedding(0, &g).unwrap();
        let (lo, hi) = e.measured_distortion(&g);
        prop_assert!(lo <= 2.0);
        prop_assert!(hi <= 1.0);
    }
}
