#![allow(dead_code)]

use std::collections::BTreeSet;

use hs2_core::{Hypergraph, LabelFunction};
use proptest::prelude::*;

/// Hypergraph on `2..=max_n` nodes with up to `max_m` distinct edges of size
/// 2..=4.
pub fn hypergraph(max_n: usize, max_m: usize) -> impl Strategy<Value = Hypergraph> {
    (2..=max_n).prop_flat_map(move |n| {
        let edge = proptest::collection::btree_set(0..n, 2..=n.min(4));
        proptest::collection::vec(edge, 0..=max_m).prop_map(move |es| {
            let uniq: BTreeSet<BTreeSet<usize>> = es.into_iter().collect();
            Hypergraph::new(n, uniq.into_iter().map(|e| e.into_iter().collect::<Vec<_>>())).unwrap()
        })
    })
}

/// 2-uniform graph on `2..=max_n` nodes.
pub fn graph(max_n: usize, max_m: usize) -> impl Strategy<Value = Hypergraph> {
    (2..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec((0..n, 0..n), 0..=max_m).prop_map(move |ps| {
            let uniq: BTreeSet<(usize, usize)> =
                ps.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect();
            Hypergraph::new(n, uniq.into_iter().map(|(a, b)| vec![a, b])).unwrap()
        })
    })
}

/// Labels `0..k` with every class used, for a hypergraph on `n` nodes.
pub fn labels_for(n: usize, max_k: usize) -> impl Strategy<Value = LabelFunction> {
    (1..=max_k.min(n)).prop_flat_map(move |k| {
        proptest::collection::vec(0..k, n).prop_map(move |mut a| {
            for c in 0..k {
                a[c] = c;
            }
            LabelFunction::with_classes(a, k).unwrap()
        })
    })
}

pub fn labeled(max_n: usize, max_m: usize, max_k: usize) -> impl Strategy<Value = (Hypergraph, LabelFunction)> {
    hypergraph(max_n, max_m).prop_flat_map(move |g| {
        let n = g.num_nodes();
        (Just(g), labels_for(n, max_k))
    })
}

/// Shortest hyperedge-path length by exhaustive search over simple edge
/// sequences.
pub fn brute_distance(g: &Hypergraph, u: usize, v: usize) -> Option<usize> {
    if u == v {
        return Some(0);
    }
    fn extend(g: &Hypergraph, seq: &mut Vec<usize>, v: usize, best: &mut Option<usize>) {
        let last = *seq.last().unwrap();
        if g.edge(last).contains(&v) {
            let l = seq.len();
            if best.map_or(true, |b| l < b) {
                *best = Some(l);
            }
            return;
        }
        if best.is_some_and(|b| seq.len() + 1 >= b) {
            return;
        }
        for e in 0..g.num_edges() {
            if seq.contains(&e) {
                continue;
            }
            if g.edge(e).iter().any(|x| g.edge(last).contains(x)) {
                seq.push(e);
                extend(g, seq, v, best);
                seq.pop();
            }
        }
    }
    let mut best = None;
    for e in 0..g.num_edges() {
        if g.edge(e).contains(&u) {
            extend(g, &mut vec![e], v, &mut best);
        }
    }
    best
}
