use approx::assert_relative_eq;
use proptest::prelude::*;

use lipgraph::coupling::maximal_uniform_coupling;
use lipgraph::graph::io::{parse_edge_list, write_edge_list};
use lipgraph::graph::{
    contract_edge, exact_max_weight_matching, hungarian_bipartite, kruskal_mst, BipartiteWeights, WeightVector,
    WeightedMultigraph,
};
use lipgraph::metrics::{d_u, emd_empirical, tv_empirical, EdgeMultiset, EdgeSetDistribution};
use lipgraph::mst::{lip_mst, lip_mst_coupled};
use lipgraph::rng::Stream;
use lipgraph::sp::{rec, validate_walk, RecParams};

fn multiset() -> impl Strategy<Value = EdgeMultiset> {
    prop::collection::vec((0usize..6, 1u32..3), 0..5).prop_map(EdgeMultiset::from_counts)
}

/// Random spanning tree plus extra edges, so the graph is connected.
fn connected_graph() -> impl Strategy<Value = (WeightedMultigraph, Vec<f64>)> {
    (2usize..9)
        .prop_flat_map(|n| {
            let tree = prop::collection::vec(any::<prop::sample::Index>(), n - 1);
            let extra = prop::collection::vec((0..n, 0..n), 0..8);
            (Just(n), tree, extra)
        })
        .prop_flat_map(|(n, tree, extra)| {
            let mut edges: Vec<(usize, usize)> = tree.iter().enumerate().map(|(i, p)| (p.index(i + 1), i + 1)).collect();
            edges.extend(extra.into_iter().filter(|(u, v)| u != v));
            let m = edges.len();
            (Just(n), Just(edges), prop::collection::vec(0.0f64..10.0, m))
        })
        .prop_map(|(n, edges, w)| (WeightedMultigraph::new(n, &edges).unwrap(), w))
}

proptest! {
    #[test]
    fn unweighted_distance_is_a_metric(a in multiset(), b in multiset(), c in multiset()) {
        prop_assert_eq!(d_u(&a, &a), 0.0);
        prop_assert_eq!(d_u(&a, &b), d_u(&b, &a));
        prop_assert!(d_u(&a, &c) <= d_u(&a, &b) + d_u(&b, &c));
    }

    #[test]
    fn emd_between_point_masses_is_the_distance(a in multiset(), b in multiset()) {
        let p = EdgeSetDistribution::point_mass(a.clone());
        let q = EdgeSetDistribution::point_mass(b.clone());
        assert_relative_eq!(emd_empirical(&p, &q, d_u).unwrap(), d_u(&a, &b), epsilon = 1e-12);
    }

    #[test]
    fn emd_is_symmetric_and_below_diameter_times_tv(
        xs in prop::collection::vec(multiset(), 1..12),
        ys in prop::collection::vec(multiset(), 1..12),
    ) {
        let p = EdgeSetDistribution::from_samples(xs.clone());
        let q = EdgeSetDistribution::from_samples(ys.clone());
        let pq = emd_empirical(&p, &q, d_u).unwrap();
        let qp = emd_empirical(&q, &p, d_u).unwrap();
        assert_relative_eq!(pq, qp, epsilon = 1e-9);
        let diam = xs.iter().flat_map(|a| ys.iter().map(move |b| d_u(a, b))).fold(0.0, f64::max);
        prop_assert!(pq <= diam * tv_empirical(&p, &q) + 1e-9);
    }

    #[test]
    fn coupled_uniforms_keep_their_intervals(
        a1 in 0.0f64..5.0, l1 in 0.0f64..3.0, a2 in 0.0f64..5.0, l2 in 0.0f64..3.0,
        u1 in 0.0f64..1.0, u2 in 0.0f64..1.0, u3 in 0.0f64..1.0,
    ) {
        let d = maximal_uniform_coupling((a1, a1 + l1), (a2, a2 + l2), u1, u2, u3);
        assert_relative_eq!(d.first, a1 + u1 * l1);
        prop_assert!(d.second >= a2 && d.second <= a2 + l2);
    }

    #[test]
    fn edge_list_round_trips((g, w) in connected_graph()) {
        let w = WeightVector::new(w).unwrap();
        let (g2, w2) = parse_edge_list(&write_edge_list(&g, &w)).unwrap();
        prop_assert_eq!(g2.endpoints(), g.endpoints());
        prop_assert_eq!(w2, w);
    }

    #[test]
    fn coupled_base_run_is_the_plain_run((g, w) in connected_graph(), f in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let w = WeightVector::new(w).unwrap();
        let f = f.index(g.edge_count());
        let c = lip_mst_coupled(&g, &w, f, 0.7, 0.5, Stream::new(seed)).unwrap();
        prop_assert_eq!(&c.base, &lip_mst(&g, &w, 0.5, Stream::new(seed)).unwrap());
        prop_assert!(c.perturbed.tree.is_valid_for(&g));
        let opt = kruskal_mst(&g, &w).unwrap().weight(&w);
        prop_assert!(c.base.tree.weight(&w) <= 1.5 * opt + 1e-9);
    }

    #[test]
    fn contraction_keeps_connectivity_and_edge_count((g, _) in connected_graph(), e in any::<prop::sample::Index>()) {
        let e = e.index(g.edge_count());
        prop_assume!(!g.edge(e).is_self_loop());
        let c = contract_edge(&g, e).unwrap();
        prop_assert_eq!(c.graph.vertex_count() + 1, g.vertex_count());
        prop_assert_eq!(c.graph.edge_count() + 1, g.edge_count());
        prop_assert!(c.graph.is_connected());
        prop_assert_eq!(c.map_vertex(g.edge(e).u), c.map_vertex(g.edge(e).v));
    }

    #[test]
    fn rec_returns_valid_walks((g, _) in connected_graph(), s in any::<prop::sample::Index>(), t in any::<prop::sample::Index>(), seed in any::<u64>()) {
        let n = g.vertex_count();
        let (s, t) = (s.index(n), t.index(n));
        let walk = rec(&g, s, t, &RecParams::test_override(0.1).unwrap(), Stream::new(seed)).unwrap();
        prop_assert!(validate_walk(&g, &walk).is_ok());
        prop_assert_eq!((walk.source, walk.target), (s, t));
    }

    #[test]
    fn hungarian_matches_brute_force(rows in 1usize..4, cols in 1usize..4, seed in any::<u64>()) {
        let s = Stream::new(seed);
        let w = BipartiteWeights::new(rows, cols, (0..rows * cols).map(|k| s.uniform(k as u64)).collect()).unwrap();
        let (_, value) = hungarian_bipartite(&w);
        let (g, wv) = w.to_multigraph();
        let exact = exact_max_weight_matching(&g, &wv).unwrap().weight(&wv);
        assert_relative_eq!(value, exact, epsilon = 1e-9);
    }
}
