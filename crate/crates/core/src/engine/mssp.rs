use std::collections::{BTreeMap, BTreeSet};

use crate::hypergraph::{EdgeId, EdgeMask, HyperPath, Hypergraph, NodeId, UNREACHED};

use super::LabelList;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct MsspTarget {
    pub node: NodeId,
    pub length: u32,
    pub pair: (NodeId, NodeId),
}

/// Midpoint of the shortest path among all paths joining differently
/// labeled nodes, or `None` if no such path of length ≥ 2 exists.
///
/// Among pairs at minimum distance the lexicographically smallest `(u, v)`
/// wins; the path is the deterministic BFS path from `u` to `v`.
pub fn mssp(g: &Hypergraph, labels: &LabelList) -> Option<NodeId> {
    mssp_masked(&g.view(), labels).map(|t| t.node)
}

pub(crate) fn mssp_masked(view: &EdgeMask<'_>, labels: &LabelList) -> Option<MsspTarget> {
    let classes = labels.by_class();
    if classes.len() < 2 {
        return None;
    }
    // Multi-source BFS per class; `endpoints` collects every labeled node at
    // the minimum distance from some differently labeled node.
    let mut best = UNREACHED;
    let mut endpoints: BTreeSet<NodeId> = BTreeSet::new();
    for (&class, sources) in &classes {
        let dist = view.levels(sources, best);
        let others = classes.iter().filter(|(&c, _)| c != class).flat_map(|(_, vs)| vs.iter().copied());
        let hits: Vec<(u32, NodeId)> =
            others.filter(|&x| dist[x] != UNREACHED).map(|x| (dist[x], x)).collect();
        let Some(local) = hits.iter().map(|h| h.0).min() else {
            continue;
        };
        if local < best {
            best = local;
            endpoints.clear();
        }
        if local == best {
            endpoints.extend(hits.iter().filter(|h| h.0 == best).map(|h| h.1));
        }
    }
    if best == UNREACHED || best < 2 {
        return None;
    }
    for &u in &endpoints {
        let cu = labels.get(u);
        let dist = view.levels(&[u], best);
        for &v in endpoints.range(u + 1..) {
            if labels.get(v) == cu || dist[v] != best {
                continue;
            }
            let path = view.shortest_path(u, v).expect("distance is finite");
            if let Some(node) = midpoint(&path, labels) {
                return Some(MsspTarget { node, length: best, pair: (u, v) });
            }
        }
    }
    None
}

/// Junction `w_⌈(l−1)/2⌉` (1-based); if labeled, the nearest unlabeled
/// junction with the smaller index preferred.
fn midpoint(path: &HyperPath, labels: &LabelList) -> Option<NodeId> {
    let js = &path.junctions;
    if js.is_empty() {
        return None;
    }
    let centre = js.len().div_ceil(2) - 1;
    for offset in 0..js.len() {
        if offset <= centre && !labels.is_labeled(js[centre - offset]) {
            return Some(js[centre - offset]);
        }
        if centre + offset < js.len() && !labels.is_labeled(js[centre + offset]) {
            return Some(js[centre + offset]);
        }
    }
    None
}

/// Deletes every hyperedge holding two labeled nodes with different
/// observed labels. Returns the new hypergraph and the removed ids.
pub fn remove_inconsistent(g: &Hypergraph, labels: &LabelList) -> (Hypergraph, Vec<EdgeId>) {
    let removed: BTreeSet<EdgeId> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| {
            let seen: BTreeMap<_, ()> = e.iter().filter_map(|&v| labels.get(v)).map(|c| (c, ())).collect();
            seen.len() >= 2
        })
        .map(|(id, _)| id)
        .collect();
    let (rest, _) = g.remove_edges(&removed).expect("ids come from g");
    (rest, removed.into_iter().collect())
}
