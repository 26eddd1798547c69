//! The learners: MSSP bisection, the pointwise learner, and the noiseless
//! and noisy pairwise learners.
//!
//! Every learner sees labels only through an oracle. Runs return a
//! [`RunOutcome`]; the harness turns it into a [`RunResult`] by comparing
//! the removals against the ground-truth cut set, which the learner never
//! sees.

mod mssp;
mod noisy;
mod pair;
mod point;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hypergraph::{EdgeId, EdgeMask, Hypergraph, NodeId};
use crate::labels::{ClassId, LabelFunction};
use crate::oracle::OracleError;

pub use mssp::{mssp, remove_inconsistent};
pub use noisy::{classify_by_vote, hs2_pair_noisy, seed_cluster, NoisyOptions};
pub use pair::hs2_pair;
pub use point::hs2_point;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("oracle covers {oracle} nodes but the hypergraph has {graph}")]
    DomainMismatch { oracle: usize, graph: usize },
    #[error("the noiseless pairwise learner needs p = 0, got {0}")]
    NoisyOracle(f64),
    #[error("seed sample size {m} exceeds n = {n}")]
    SampleTooLarge { m: usize, n: usize },
    #[error("seed clustering needs at least 2 nodes, got {0}")]
    SampleTooSmall(usize),
    #[error("seed class {0} is empty")]
    EmptySeedClass(ClassId),
    #[error("node {0} is already a seed")]
    NodeIsSeed(NodeId),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// The learner's observed labels, in the order they were acquired.
///
/// In the noiseless pairwise learner the seed sets partition the labeled
/// nodes; the noisy learner keeps only its first-phase clusters as seeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelList {
    entries: Vec<Option<ClassId>>,
    order: Vec<NodeId>,
    seeds: Vec<Vec<NodeId>>,
}

impl LabelList {
    pub fn new(n: usize) -> Self {
        LabelList { entries: vec![None; n], order: Vec::new(), seeds: Vec::new() }
    }

    pub fn get(&self, v: NodeId) -> Option<ClassId> {
        self.entries.get(v).copied().flatten()
    }

    pub fn is_labeled(&self, v: NodeId) -> bool {
        self.get(v).is_some()
    }

    /// Records `v`'s label; a node is labeled at most once.
    pub fn insert(&mut self, v: NodeId, class: ClassId) {
        assert!(self.entries[v].is_none(), "node {v} labeled twice");
        self.entries[v] = Some(class);
        self.order.push(v);
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Labeled nodes in acquisition order.
    pub fn labeled(&self) -> &[NodeId] {
        &self.order
    }

    pub fn seeds(&self) -> &[Vec<NodeId>] {
        &self.seeds
    }

    /// Number of classes discovered so far (`#c`).
    pub fn class_count(&self) -> usize {
        if self.seeds.is_empty() {
            self.order.iter().filter_map(|&v| self.entries[v]).collect::<BTreeSet<_>>().len()
        } else {
            self.seeds.len()
        }
    }

    /// Labeled nodes grouped by observed class.
    pub fn by_class(&self) -> BTreeMap<ClassId, Vec<NodeId>> {
        let mut out: BTreeMap<ClassId, Vec<NodeId>> = BTreeMap::new();
        for &v in &self.order {
            out.entry(self.entries[v].unwrap()).or_default().push(v);
        }
        out
    }

    fn add_seed(&mut self, class: ClassId, v: NodeId) {
        if self.seeds.len() <= class {
            self.seeds.resize(class + 1, Vec::new());
        }
        self.seeds[class].push(v);
    }
}

/// A hyperedge deletion and the number of queries spent when it happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Removal {
    pub edge: EdgeId,
    pub at_query: u64,
}

/// What a learner returns, before comparison with the ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Connected components of the hypergraph left at termination.
    pub partition: Vec<Vec<NodeId>>,
    pub removals: Vec<Removal>,
    pub queries_used: u64,
    pub label_list: LabelList,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub partition: Vec<Vec<NodeId>>,
    pub removed_edges: BTreeSet<EdgeId>,
    pub queries_used: u64,
    /// Queries spent when the removed set first contained the whole cut.
    pub queries_until_recovery: Option<u64>,
    /// Removed set equals the cut set exactly.
    pub success: bool,
    pub label_list: LabelList,
}

impl RunOutcome {
    pub fn removed_edges(&self) -> BTreeSet<EdgeId> {
        self.removals.iter().map(|r| r.edge).collect()
    }

    pub fn evaluate(self, cut: &BTreeSet<EdgeId>) -> RunResult {
        let removed_edges = self.removed_edges();
        let queries_until_recovery = if cut.is_subset(&removed_edges) {
            // Removal ticks are nondecreasing, so the last cut edge to go
            // fixes the recovery time.
            Some(self.removals.iter().filter(|r| cut.contains(&r.edge)).map(|r| r.at_query).max().unwrap_or(0))
        } else {
            None
        };
        RunResult {
            success: &removed_edges == cut,
            partition: self.partition,
            removed_edges,
            queries_used: self.queries_used,
            queries_until_recovery,
            label_list: self.label_list,
        }
    }
}

impl RunResult {
    /// Fraction of nodes whose inferred class matches the truth under the
    /// best one-to-one renaming of observed classes.
    ///
    /// Each block of the partition takes the majority observed label of its
    /// labeled members (smallest id on ties); blocks with no labeled member
    /// count as wrong.
    pub fn label_accuracy(&self, truth: &LabelFunction) -> f64 {
        let n = truth.n();
        let mut inferred: Vec<Option<ClassId>> = vec![None; n];
        for block in &self.partition {
            let mut votes: BTreeMap<ClassId, usize> = BTreeMap::new();
            for &v in block {
                if let Some(c) = self.label_list.get(v) {
                    *votes.entry(c).or_default() += 1;
                }
            }
            let winner = votes.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&c, _)| c);
            for &v in block {
                inferred[v] = winner;
            }
        }
        let observed = inferred.iter().flatten().max().map_or(0, |&c| c + 1);
        let mut confusion = vec![vec![0usize; truth.k()]; observed];
        for v in 0..n {
            if let Some(c) = inferred[v] {
                confusion[c][truth.label(v)] += 1;
            }
        }
        best_matching(&confusion) as f64 / n as f64
    }
}

/// Maximum total weight of a one-to-one assignment of rows to columns.
/// Exact by exhaustive search for up to 8 rows, greedy beyond.
pub(crate) fn best_matching(weights: &[Vec<usize>]) -> usize {
    fn search(w: &[Vec<usize>], row: usize, used: &mut Vec<bool>) -> usize {
        if row == w.len() {
            return 0;
        }
        let mut best = search(w, row + 1, used);
        for col in 0..used.len() {
            if !used[col] {
                used[col] = true;
                best = best.max(w[row][col] + search(w, row + 1, used));
                used[col] = false;
            }
        }
        best
    }
    let cols = weights.first().map_or(0, |r| r.len());
    if weights.len() <= 8 {
        return search(weights, 0, &mut vec![false; cols]);
    }
    let mut cells: Vec<(usize, usize, usize)> = weights
        .iter()
        .enumerate()
        .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &w)| (w, r, c)))
        .collect();
    cells.sort_by(|a, b| b.0.cmp(&a.0));
    let (mut rows_used, mut cols_used) = (vec![false; weights.len()], vec![false; cols]);
    let mut total = 0;
    for (w, r, c) in cells {
        if !rows_used[r] && !cols_used[c] {
            rows_used[r] = true;
            cols_used[c] = true;
            total += w;
        }
    }
    total
}

/// Mutable state shared by the learners: the masked hypergraph, the label
/// list, the pool of unlabeled nodes and the removal log.
pub(crate) struct Session<'g> {
    mask: EdgeMask<'g>,
    labels: LabelList,
    pool: Vec<NodeId>,
    pool_pos: Vec<usize>,
    removals: Vec<Removal>,
    rng: ChaCha8Rng,
}

impl<'g> Session<'g> {
    pub(crate) fn new(g: &'g Hypergraph, seed: u64) -> Self {
        let n = g.num_nodes();
        Session {
            mask: g.view(),
            labels: LabelList::new(n),
            pool: (0..n).collect(),
            pool_pos: (0..n).collect(),
            removals: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub(crate) fn labels(&self) -> &LabelList {
        &self.labels
    }

    pub(crate) fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A uniformly random unlabeled node (not removed from the pool until
    /// it is labeled).
    pub(crate) fn pick_unlabeled(&mut self) -> Option<NodeId> {
        if self.pool.is_empty() {
            None
        } else {
            Some(self.pool[self.rng.gen_range(0..self.pool.len())])
        }
    }

    /// Labels `v` and deletes every live hyperedge through `v` that now holds
    /// two different observed labels.
    pub(crate) fn assign(&mut self, v: NodeId, class: ClassId, at_query: u64) {
        self.labels.insert(v, class);
        let pos = self.pool_pos[v];
        let last = *self.pool.last().unwrap();
        self.pool.swap_remove(pos);
        if last != v {
            self.pool_pos[last] = pos;
        }
        self.pool_pos[v] = usize::MAX;
        let g = self.mask.graph();
        for &e in g.incident(v) {
            if !self.mask.is_alive(e) {
                continue;
            }
            let mixed = g.edge(e).iter().any(|&x| self.labels.get(x).is_some_and(|c| c != class));
            if mixed {
                self.mask.kill(e);
                self.removals.push(Removal { edge: e, at_query });
            }
        }
    }

    pub(crate) fn add_seed(&mut self, class: ClassId, v: NodeId) {
        self.labels.add_seed(class, v);
    }

    pub(crate) fn component_count(&self) -> usize {
        self.mask.components().len()
    }

    pub(crate) fn next_target(&self) -> Option<NodeId> {
        mssp::mssp_masked(&self.mask, &self.labels).map(|t| t.node)
    }

    pub(crate) fn finish(self, queries_used: u64) -> RunOutcome {
        RunOutcome {
            partition: self.mask.components(),
            removals: self.removals,
            queries_used,
            label_list: self.labels,
        }
    }
}
