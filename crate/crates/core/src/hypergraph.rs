//! Hypergraphs, hyperedge paths and BFS distances.
//!
//! A path of length `l` between `u` and `v` is a sequence of hyperedges
//! `(e_1, .., e_l)` with `u ∈ e_1`, `v ∈ e_l` and consecutive hyperedges
//! intersecting. All traversals run over the bipartite node/hyperedge
//! incidence structure, so a node's BFS level is the number of hyperedges
//! used to reach it.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

pub type NodeId = usize;
pub type EdgeId = usize;

/// Sentinel used by the internal distance arrays for unreachable nodes.
pub(crate) const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("hypergraph must have at least one node")]
    NoNodes,
    #[error("hyperedge {edge} has {size} distinct node(s); at least 2 are required")]
    EdgeTooSmall { edge: usize, size: usize },
    #[error("hyperedge {edge} repeats node {node}")]
    RepeatedNode { edge: usize, node: NodeId },
    #[error("hyperedge {edge} references node {node} but n = {n}")]
    NodeOutOfRange { edge: usize, node: NodeId, n: usize },
    #[error("hyperedge {edge} duplicates hyperedge {first}")]
    DuplicateEdge { edge: usize, first: usize },
    #[error("edge id {0} does not exist")]
    UnknownEdge(EdgeId),
    #[error("node id {0} does not exist")]
    UnknownNode(NodeId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Immutable hypergraph with a per-node incidence index.
///
/// Hyperedges are stored as sorted node lists in input order; the edge id is
/// the position in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<NodeId>>,
    incidence: Vec<Vec<EdgeId>>,
}

/// A hyperedge path from `endpoints.0` to `endpoints.1`.
///
/// `junctions[i]` lies in `edge_seq[i] ∩ edge_seq[i + 1]`. The empty path
/// (`u == v`) has length 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperPath {
    pub edge_seq: Vec<EdgeId>,
    pub junctions: Vec<NodeId>,
    pub endpoints: (NodeId, NodeId),
}

impl HyperPath {
    pub fn len(&self) -> usize {
        self.edge_seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_seq.is_empty()
    }

    /// Checks the path against `g`: endpoints, junction membership and
    /// consecutive intersection.
    pub fn is_valid_in(&self, g: &Hypergraph) -> bool {
        let (u, v) = self.endpoints;
        if self.edge_seq.is_empty() {
            return u == v && self.junctions.is_empty();
        }
        if self.junctions.len() + 1 != self.edge_seq.len()
            || self.edge_seq.iter().any(|&e| e >= g.num_edges())
        {
            return false;
        }
        let first = g.edge(self.edge_seq[0]);
        let last = g.edge(*self.edge_seq.last().unwrap());
        if first.binary_search(&u).is_err() || last.binary_search(&v).is_err() {
            return false;
        }
        self.edge_seq.windows(2).zip(&self.junctions).all(|(w, &j)| {
            g.edge(w[0]).binary_search(&j).is_ok() && g.edge(w[1]).binary_search(&j).is_ok()
        })
    }
}

impl Hypergraph {
    /// Builds a hypergraph on nodes `0..n`. Each hyperedge needs at least two
    /// distinct valid ids and no two hyperedges may be equal as sets.
    pub fn new<I, E>(n: usize, edge_lists: I) -> Result<Self, HypergraphError>
    where
        I: IntoIterator<Item = E>,
        E: IntoIterator<Item = NodeId>,
    {
        if n == 0 {
            return Err(HypergraphError::NoNodes);
        }
        let mut edges: Vec<Vec<NodeId>> = Vec::new();
        let mut seen: std::collections::HashMap<Vec<NodeId>, usize> =
            std::collections::HashMap::new();
        for (idx, list) in edge_lists.into_iter().enumerate() {
            let mut e: Vec<NodeId> = list.into_iter().collect();
            e.sort_unstable();
            for w in e.windows(2) {
                if w[0] == w[1] {
                    return Err(HypergraphError::RepeatedNode { edge: idx, node: w[0] });
                }
            }
            if let Some(&bad) = e.iter().find(|&&x| x >= n) {
                return Err(HypergraphError::NodeOutOfRange { edge: idx, node: bad, n });
            }
            if e.len() < 2 {
                return Err(HypergraphError::EdgeTooSmall { edge: idx, size: e.len() });
            }
            if let Some(&first) = seen.get(&e) {
                return Err(HypergraphError::DuplicateEdge { edge: idx, first });
            }
            seen.insert(e.clone(), idx);
            edges.push(e);
        }
        Ok(Self::from_sorted_unchecked(n, edges))
    }

    fn from_sorted_unchecked(n: usize, edges: Vec<Vec<NodeId>>) -> Self {
        let mut incidence = vec![Vec::new(); n];
        for (id, e) in edges.iter().enumerate() {
            for &x in e {
                incidence[x].push(id);
            }
        }
        Hypergraph { n, edges, incidence }
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: EdgeId) -> &[NodeId] {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[Vec<NodeId>] {
        &self.edges
    }

    pub fn incident(&self, v: NodeId) -> &[EdgeId] {
        &self.incidence[v]
    }

    /// True when every hyperedge has exactly two nodes.
    pub fn is_two_uniform(&self) -> bool {
        self.edges.iter().all(|e| e.len() == 2)
    }

    /// Rebuilds the incidence index from the edge list and compares.
    pub fn incidence_is_consistent(&self) -> bool {
        Self::from_sorted_unchecked(self.n, self.edges.clone()).incidence == self.incidence
    }

    fn check_node(&self, v: NodeId) -> Result<(), HypergraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(HypergraphError::UnknownNode(v))
        }
    }

    /// View of this hypergraph with every edge alive.
    pub fn view(&self) -> EdgeMask<'_> {
        EdgeMask::full(self)
    }

    /// Minimum-length hyperedge path from `u` to `v`, or `None` when they are
    /// disconnected. Ties are broken by the lexicographically smallest edge
    /// sequence, then by the smallest junction at each step.
    pub fn shortest_path(&self, u: NodeId, v: NodeId) -> Result<Option<HyperPath>, HypergraphError> {
        self.check_node(u)?;
        self.check_node(v)?;
        Ok(self.view().shortest_path(u, v))
    }

    /// Minimum path length from any of `sources` to every node; `None` for
    /// unreachable nodes. Sources themselves are at distance 0.
    pub fn distance_map(&self, sources: &[NodeId]) -> Result<Vec<Option<u32>>, HypergraphError> {
        for &s in sources {
            self.check_node(s)?;
        }
        Ok(self
            .view()
            .levels(sources, u32::MAX)
            .into_iter()
            .map(|d| (d != UNREACHED).then_some(d))
            .collect())
    }

    /// Connected components under hyperedge paths, each sorted, ordered by
    /// smallest member. Isolated nodes are singleton blocks.
    pub fn connected_components(&self) -> Vec<Vec<NodeId>> {
        self.view().components()
    }

    /// Returns the hypergraph without `edge_ids`, plus the old→new id map
    /// (`None` for deleted edges). Remaining edges keep their relative order.
    pub fn remove_edges(
        &self,
        edge_ids: &BTreeSet<EdgeId>,
    ) -> Result<(Hypergraph, Vec<Option<EdgeId>>), HypergraphError> {
        if let Some(&bad) = edge_ids.iter().find(|&&e| e >= self.edges.len()) {
            return Err(HypergraphError::UnknownEdge(bad));
        }
        let mut map = Vec::with_capacity(self.edges.len());
        let mut kept = Vec::with_capacity(self.edges.len() - edge_ids.len());
        for (id, e) in self.edges.iter().enumerate() {
            if edge_ids.contains(&id) {
                map.push(None);
            } else {
                map.push(Some(kept.len()));
                kept.push(e.clone());
            }
        }
        Ok((Self::from_sorted_unchecked(self.n, kept), map))
    }

    /// Clique expansion: the 2-uniform hypergraph with `{u, v}` present iff
    /// some hyperedge contains both. Pairs appear in order of first
    /// occurrence (edge order, then lexicographic within an edge).
    pub fn clique_expansion(&self) -> Hypergraph {
        let mut seen: HashSet<(NodeId, NodeId)> = HashSet::new();
        let mut pairs = Vec::new();
        for e in &self.edges {
            for (i, &a) in e.iter().enumerate() {
                for &b in &e[i + 1..] {
                    if seen.insert((a, b)) {
                        pairs.push(vec![a, b]);
                    }
                }
            }
        }
        Self::from_sorted_unchecked(self.n, pairs)
    }

    /// Canonical text form: `n m`, then one line of sorted ids per edge.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.edges.len()).unwrap();
        for e in &self.edges {
            let line: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }

    /// Parses the text form. `#` lines and blank lines are skipped.
    pub fn from_text(text: &str) -> Result<Self, HypergraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(HypergraphError::Parse {
            line: 0,
            msg: "missing `n m` header".into(),
        })?;
        let nums = parse_ids(hline, header)?;
        if nums.len() != 2 {
            return Err(HypergraphError::Parse {
                line: hline,
                msg: format!("header must be `n m`, got {header:?}"),
            });
        }
        let (n, m) = (nums[0], nums[1]);
        let mut edges = Vec::with_capacity(m);
        for (lineno, l) in lines {
            if edges.len() == m {
                return Err(HypergraphError::Parse {
                    line: lineno,
                    msg: format!("more than {m} hyperedge lines"),
                });
            }
            edges.push(parse_ids(lineno, l)?);
        }
        if edges.len() != m {
            return Err(HypergraphError::Parse {
                line: text.lines().count(),
                msg: format!("expected {m} hyperedge lines, found {}", edges.len()),
            });
        }
        Hypergraph::new(n, edges)
    }
}

fn parse_ids(line: usize, s: &str) -> Result<Vec<usize>, HypergraphError> {
    s.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|_| HypergraphError::Parse {
                line,
                msg: format!("not a non-negative integer: {tok:?}"),
            })
        })
        .collect()
}

/// A hypergraph together with a set of deleted edges.
///
/// The learners delete hyperedges one at a time; masking avoids rebuilding
/// the incidence index and keeps original edge ids stable.
#[derive(Debug, Clone)]
pub struct EdgeMask<'g> {
    graph: &'g Hypergraph,
    alive: Vec<bool>,
}

impl<'g> EdgeMask<'g> {
    pub fn full(graph: &'g Hypergraph) -> Self {
        EdgeMask { graph, alive: vec![true; graph.num_edges()] }
    }

    pub fn graph(&self) -> &'g Hypergraph {
        self.graph
    }

    pub fn is_alive(&self, e: EdgeId) -> bool {
        self.alive[e]
    }

    /// Deletes `e`; returns false if it was already gone.
    pub fn kill(&mut self, e: EdgeId) -> bool {
        std::mem::replace(&mut self.alive[e], false)
    }

    pub fn alive_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.alive.len()).filter(move |&e| self.alive[e])
    }

    /// Materializes the masked hypergraph (edge ids renumbered).
    pub fn to_hypergraph(&self) -> Hypergraph {
        let edges = self.alive_edges().map(|e| self.graph.edges[e].clone()).collect();
        Hypergraph::from_sorted_unchecked(self.graph.n, edges)
    }

    /// Multi-source BFS levels, stopping after `max_depth`. Unreached nodes
    /// hold `UNREACHED`.
    pub(crate) fn levels(&self, sources: &[NodeId], max_depth: u32) -> Vec<u32> {
        let g = self.graph;
        let mut dist = vec![UNREACHED; g.n];
        let mut edge_seen = vec![false; g.edges.len()];
        let mut frontier: Vec<NodeId> = Vec::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                frontier.push(s);
            }
        }
        let mut level = 0;
        while !frontier.is_empty() && level < max_depth {
            let mut next = Vec::new();
            for &x in &frontier {
                for &e in &g.incidence[x] {
                    if !self.alive[e] || edge_seen[e] {
                        continue;
                    }
                    edge_seen[e] = true;
                    for &y in &g.edges[e] {
                        if dist[y] == UNREACHED {
                            dist[y] = level + 1;
                            next.push(y);
                        }
                    }
                }
            }
            frontier = next;
            level += 1;
        }
        dist
    }

    pub fn shortest_path(&self, u: NodeId, v: NodeId) -> Option<HyperPath> {
        if u == v {
            return Some(HyperPath { edge_seq: vec![], junctions: vec![], endpoints: (u, v) });
        }
        let g = self.graph;
        // BFS from v; edge_dist[e] = fewest edges on a path from e to v,
        // counting e itself.
        let mut node_dist = vec![UNREACHED; g.n];
        let mut edge_dist = vec![UNREACHED; g.edges.len()];
        node_dist[v] = 0;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            if x == u {
                break;
            }
            for &e in &g.incidence[x] {
                if !self.alive[e] || edge_dist[e] != UNREACHED {
                    continue;
                }
                edge_dist[e] = node_dist[x] + 1;
                for &y in &g.edges[e] {
                    if node_dist[y] == UNREACHED {
                        node_dist[y] = node_dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        let len = node_dist[u];
        if len == UNREACHED {
            return None;
        }
        let first = g.incidence[u]
            .iter()
            .copied()
            .filter(|&e| self.alive[e] && edge_dist[e] == len)
            .min()?;
        let mut edge_seq = vec![first];
        let mut junctions = Vec::with_capacity(len as usize - 1);
        let mut cur = first;
        for remaining in (1..len).rev() {
            let mut best: Option<EdgeId> = None;
            for &x in &g.edges[cur] {
                for &e in &g.incidence[x] {
                    if self.alive[e] && edge_dist[e] == remaining && best.map_or(true, |b| e < b) {
                        best = Some(e);
                    }
                }
            }
            let next = best.expect("BFS layering guarantees a continuation");
            let junction = smallest_common(&g.edges[cur], &g.edges[next]);
            junctions.push(junction);
            edge_seq.push(next);
            cur = next;
        }
        Some(HyperPath { edge_seq, junctions, endpoints: (u, v) })
    }

    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let g = self.graph;
        let mut comp = vec![usize::MAX; g.n];
        let mut blocks = Vec::new();
        for start in 0..g.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = blocks.len();
            comp[start] = id;
            let mut block = vec![start];
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &e in &g.incidence[x] {
                    if !self.alive[e] {
                        continue;
                    }
                    for &y in &g.edges[e] {
                        if comp[y] == usize::MAX {
                            comp[y] = id;
                            block.push(y);
                            stack.push(y);
                        }
                    }
                }
            }
            block.sort_unstable();
            blocks.push(block);
        }
        blocks
    }
}

fn smallest_common(a: &[NodeId], b: &[NodeId]) -> NodeId {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return a[i],
        }
    }
    unreachable!("consecutive path edges intersect")
}
