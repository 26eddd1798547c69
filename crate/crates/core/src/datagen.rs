//! Labeled hypergraph generators and feature/label file loading.

use std::fs;
use std::path::Path;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hypergraph::{Hypergraph, HypergraphError, NodeId};
use crate::labels::{LabelError, LabelFunction};

#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("n = {n} is not divisible by k = {k}")]
    UnevenClasses { n: usize, k: usize },
    #[error("k must be at least 1")]
    NoClasses,
    #[error("edge size must be at least 2, got {0}")]
    EdgeSize(usize),
    #[error("classes of size {class_size} cannot hold edges of size {d}")]
    ClassTooSmall { class_size: usize, d: usize },
    #[error("need 0 <= q_out <= q_in <= 1, got q_in = {q_in}, q_out = {q_out}")]
    Probabilities { q_in: f64, q_out: f64 },
    #[error("{n} points cannot give {r} neighbors each")]
    TooFewPoints { n: usize, r: usize },
    #[error("row {row}: {msg}")]
    Feature { row: usize, msg: String },
    #[error("feature file is empty")]
    NoFeatures,
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Labels(#[from] LabelError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsbmParams {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub q_in: f64,
    pub q_out: f64,
    pub seed: u64,
}

impl HsbmParams {
    pub fn new(n: usize, k: usize, q_in: f64, q_out: f64, seed: u64) -> Self {
        HsbmParams { n, k, d: 3, q_in, q_out, seed }
    }

    fn validate(&self) -> Result<(), DatagenError> {
        if self.k == 0 {
            return Err(DatagenError::NoClasses);
        }
        if self.n % self.k != 0 {
            return Err(DatagenError::UnevenClasses { n: self.n, k: self.k });
        }
        if self.d < 2 {
            return Err(DatagenError::EdgeSize(self.d));
        }
        if self.n / self.k < self.d {
            return Err(DatagenError::ClassTooSmall { class_size: self.n / self.k, d: self.d });
        }
        if !(0.0 <= self.q_out && self.q_out <= self.q_in && self.q_in <= 1.0) {
            return Err(DatagenError::Probabilities { q_in: self.q_in, q_out: self.q_out });
        }
        Ok(())
    }
}

/// Hypergraph stochastic block model over contiguous equal classes.
///
/// Candidates are the size-`d` subsets in lexicographic order, each
/// consuming exactly one draw from a ChaCha8 stream seeded with `seed`.
pub fn hsbm(params: &HsbmParams) -> Result<(Hypergraph, LabelFunction), DatagenError> {
    params.validate()?;
    let labels = LabelFunction::contiguous_blocks(params.n, params.k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut edges = Vec::new();
    for tuple in (0..params.n).combinations(params.d) {
        let c = labels.label(tuple[0]);
        let q = if tuple.iter().all(|&v| labels.label(v) == c) { params.q_in } else { params.q_out };
        let x: f64 = rng.gen();
        if x < q {
            edges.push(tuple);
        }
    }
    Ok((Hypergraph::new(params.n, edges)?, labels))
}

/// Points in Euclidean space, one row per node.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: Vec<Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, DatagenError> {
        let Some(width) = rows.first().map(Vec::len) else {
            return Err(DatagenError::NoFeatures);
        };
        for (i, r) in rows.iter().enumerate() {
            if r.len() != width {
                return Err(DatagenError::Feature {
                    row: i + 1,
                    msg: format!("expected {width} values, found {}", r.len()),
                });
            }
            if r.iter().any(|x| !x.is_finite()) {
                return Err(DatagenError::Feature { row: i + 1, msg: "non-finite value".into() });
            }
        }
        Ok(FeatureMatrix { rows })
    }

    /// Comma-separated rows; blank lines are skipped, row numbers in errors
    /// are file line numbers.
    pub fn from_csv(text: &str) -> Result<Self, DatagenError> {
        let mut rows = Vec::new();
        let mut width = None;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| DatagenError::Feature { row: i + 1, msg: e.to_string() })?;
            let w = *width.get_or_insert(row.len());
            if row.len() != w {
                return Err(DatagenError::Feature {
                    row: i + 1,
                    msg: format!("expected {w} values, found {}", row.len()),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(DatagenError::Feature { row: i + 1, msg: "non-finite value".into() });
            }
            rows.push(row);
        }
        Self::new(rows)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    fn dist2(&self, a: usize, b: usize) -> f64 {
        self.rows[a].iter().zip(&self.rows[b]).map(|(x, y)| (x - y) * (x - y)).sum()
    }
}

/// One hyperedge per node: the node with its `r` nearest neighbors. Ties go
/// to the smaller index; identical edges are kept once, in first-seen order.
pub fn knn_hypergraph(features: &FeatureMatrix, r: usize) -> Result<Hypergraph, DatagenError> {
    let n = features.len();
    if n < r + 1 {
        return Err(DatagenError::TooFewPoints { n, r });
    }
    let mut edges: Vec<Vec<NodeId>> = Vec::with_capacity(n);
    let mut seen = std::collections::HashSet::new();
    for i in 0..n {
        let mut others: Vec<(f64, NodeId)> = (0..n).filter(|&j| j != i).map(|j| (features.dist2(i, j), j)).collect();
        others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut e: Vec<NodeId> = others[..r].iter().map(|o| o.1).collect();
        e.push(i);
        e.sort_unstable();
        if seen.insert(e.clone()) {
            edges.push(e);
        }
    }
    Ok(Hypergraph::new(n, edges)?)
}

fn read(path: &Path) -> Result<String, DatagenError> {
    fs::read_to_string(path).map_err(|source| DatagenError::Io { path: path.display().to_string(), source })
}

pub fn load_labels(path: &Path) -> Result<LabelFunction, DatagenError> {
    Ok(LabelFunction::from_text(&read(path)?)?)
}

pub fn load_features(path: &Path) -> Result<FeatureMatrix, DatagenError> {
    FeatureMatrix::from_csv(&read(path)?)
}

pub fn load_hypergraph(path: &Path) -> Result<Hypergraph, DatagenError> {
    Ok(Hypergraph::from_text(&read(path)?)?)
}
