mod common;

use std::collections::BTreeSet;

use hs2_core::cut::cut_profile;
use hs2_core::engine::{classify_by_vote, hs2_pair, hs2_point, mssp, remove_inconsistent, LabelList};
use hs2_core::oracle::{PairwiseOracle, PointwiseOracle};
use hs2_core::Hypergraph;
use proptest::prelude::*;

/// Smallest distance between two differently labeled nodes.
fn min_gap(g: &Hypergraph, l: &LabelList) -> Option<u32> {
    let labeled = l.labeled();
    let mut best = None;
    for &u in labeled {
        let d = g.distance_map(&[u]).unwrap();
        for &v in labeled {
            if l.get(u) != l.get(v) {
                if let Some(x) = d[v] {
                    best = Some(best.map_or(x, |b: u32| b.min(x)));
                }
            }
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn noiseless_removals_are_cut_edges((g, f) in common::labeled(12, 14, 3), budget in 1u64..20, seed in any::<u64>()) {
        let cut = cut_profile(&g, &f).unwrap().cut_edges;
        let mut o = PointwiseOracle::new(f.clone());
        let r = hs2_point(&g, &mut o, budget, seed).unwrap().evaluate(&cut);
        prop_assert!(r.removed_edges.is_subset(&cut));
        prop_assert!(r.queries_used <= budget);
        if let Some(q) = r.queries_until_recovery {
            prop_assert!(q <= r.queries_used);
        }
        let mut o = PairwiseOracle::noiseless(f.clone());
        let r = hs2_pair(&g, &mut o, budget, seed).unwrap().evaluate(&cut);
        prop_assert!(r.removed_edges.is_subset(&cut));
        prop_assert!(r.queries_used <= budget);
    }

    #[test]
    fn full_budget_recovers_the_cut((g, f) in common::labeled(12, 14, 3), seed in any::<u64>()) {
        let cut = cut_profile(&g, &f).unwrap().cut_edges;
        let n = g.num_nodes() as u64;
        let mut o = PointwiseOracle::new(f.clone());
        let r = hs2_point(&g, &mut o, n, seed).unwrap().evaluate(&cut);
        prop_assert!(r.success);
        let residual: Vec<Vec<usize>> = g.remove_edges(&cut).unwrap().0.connected_components();
        prop_assert_eq!(&r.partition, &residual);
        let mut o = PairwiseOracle::noiseless(f.clone());
        let r = hs2_pair(&g, &mut o, n * f.k() as u64, seed).unwrap().evaluate(&cut);
        prop_assert!(r.success);
        prop_assert_eq!(r.label_accuracy(&f), 1.0);
    }

    #[test]
    fn pair_queries_bounded_by_k_per_label((g, f) in common::labeled(12, 14, 4), budget in 1u64..60, seed in any::<u64>()) {
        let mut o = PairwiseOracle::noiseless(f.clone());
        let out = hs2_pair(&g, &mut o, budget, seed).unwrap();
        prop_assert!(o.ledger().pair_count() <= f.k() as u64 * out.label_list.len() as u64);
        prop_assert!(out.label_list.class_count() <= f.k());
        let seeds: usize = out.label_list.seeds().iter().map(Vec::len).sum();
        prop_assert_eq!(seeds, out.label_list.len());
    }

    #[test]
    fn bisection_shrinks_the_gap((g, f) in common::labeled(12, 16, 3), a in 0usize..12, b in 0usize..12) {
        let n = g.num_nodes();
        let mut l = LabelList::new(n);
        l.insert(a % n, f.label(a % n));
        if b % n != a % n {
            l.insert(b % n, f.label(b % n));
        }
        let (mut cur, mut removed) = remove_inconsistent(&g, &l);
        while let Some(t) = mssp(&cur, &l) {
            prop_assert!(!l.is_labeled(t));
            let before = min_gap(&cur, &l).unwrap();
            prop_assert!(before >= 2);
            l.insert(t, f.label(t));
            let (next, now_removed) = remove_inconsistent(&g, &l);
            if now_removed.len() == removed.len() {
                prop_assert!(min_gap(&next, &l).unwrap() < before);
            }
            cur = next;
            removed = now_removed;
        }
        let gap = min_gap(&cur, &l);
        prop_assert!(gap.is_none() || gap == Some(1));
        let cut: BTreeSet<usize> = cut_profile(&g, &f).unwrap().cut_edges;
        prop_assert!(removed.iter().all(|e| cut.contains(e)));
    }

    #[test]
    fn noiseless_vote_is_truth(f in common::labels_for(20, 4), v in 0usize..20) {
        let k = f.k();
        let seeds: Vec<Vec<usize>> = (0..k).map(|c| f.members(c).into_iter().filter(|&x| x != v).collect()).collect();
        prop_assume!(seeds.iter().all(|s| !s.is_empty()));
        let mut o = PairwiseOracle::noiseless(f.clone());
        prop_assert_eq!(classify_by_vote(v, &seeds, &mut o).unwrap(), f.label(v));
        prop_assert_eq!(o.ledger().pair_count() as usize, seeds.iter().map(Vec::len).sum::<usize>());
    }
}
