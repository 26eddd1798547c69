mod common;

use std::collections::BTreeSet;

use hs2_core::{Hypergraph, LabelFunction};
use proptest::prelude::*;

proptest! {
    #[test]
    fn bfs_matches_exhaustive_search(g in common::hypergraph(8, 8)) {
        let n = g.num_nodes();
        for u in 0..n {
            let dist = g.distance_map(&[u]).unwrap();
            for v in 0..n {
                let brute = common::brute_distance(&g, u, v);
                prop_assert_eq!(dist[v].map(|d| d as usize), brute);
                let path = g.shortest_path(u, v).unwrap();
                prop_assert_eq!(path.as_ref().map(|p| p.len()), brute);
                if let Some(p) = path {
                    prop_assert!(p.is_valid_in(&g));
                }
            }
        }
    }

    #[test]
    fn shortest_path_is_deterministic(g in common::hypergraph(8, 10)) {
        for u in 0..g.num_nodes() {
            for v in 0..g.num_nodes() {
                prop_assert_eq!(g.shortest_path(u, v).unwrap(), g.shortest_path(u, v).unwrap());
            }
        }
    }

    #[test]
    fn clique_expansion_preserves_distances(g in common::hypergraph(9, 8)) {
        let ce = g.clique_expansion();
        prop_assert!(ce.is_two_uniform());
        for u in 0..g.num_nodes() {
            prop_assert_eq!(g.distance_map(&[u]).unwrap(), ce.distance_map(&[u]).unwrap());
        }
    }

    #[test]
    fn removal_refines_components(g in common::hypergraph(9, 10), mask in proptest::collection::vec(any::<bool>(), 10)) {
        let drop: BTreeSet<usize> = (0..g.num_edges()).filter(|&e| mask[e]).collect();
        let (rest, map) = g.remove_edges(&drop).unwrap();
        prop_assert_eq!(rest.num_edges(), g.num_edges() - drop.len());
        for (old, new) in map.iter().enumerate() {
            match new {
                Some(id) => prop_assert_eq!(rest.edge(*id), g.edge(old)),
                None => prop_assert!(drop.contains(&old)),
            }
        }
        let before = g.connected_components();
        for block in rest.connected_components() {
            prop_assert!(before.iter().any(|b| block.iter().all(|v| b.contains(v))));
        }
        prop_assert!(rest.incidence_is_consistent());
    }

    #[test]
    fn text_round_trip(g in common::hypergraph(10, 10)) {
        prop_assert_eq!(Hypergraph::from_text(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn label_text_round_trip((g, f) in common::labeled(10, 3, 4)) {
        prop_assert_eq!(f.n(), g.num_nodes());
        prop_assert_eq!(LabelFunction::from_text(&f.to_text()).unwrap(), f);
    }
}
