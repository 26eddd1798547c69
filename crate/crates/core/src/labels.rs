//! Ground-truth label functions and the label file format.

use std::fmt::Write as _;

use thiserror::Error;

use crate::hypergraph::NodeId;

pub type ClassId = usize;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("label function is empty")]
    Empty,
    #[error("class {0} has no members")]
    EmptyClass(ClassId),
    #[error("class {class} is out of range for k = {k}")]
    ClassOutOfRange { class: ClassId, k: usize },
    #[error("label function covers {labels} nodes but the hypergraph has {nodes}")]
    DomainMismatch { labels: usize, nodes: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Total map from nodes `0..n` to classes `0..k`, every class non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelFunction {
    assignment: Vec<ClassId>,
    k: usize,
}

impl LabelFunction {
    /// Infers `k` as `max + 1`; a class id with no members is an error.
    pub fn new(assignment: Vec<ClassId>) -> Result<Self, LabelError> {
        let k = assignment.iter().max().map(|&c| c + 1).ok_or(LabelError::Empty)?;
        Self::with_classes(assignment, k)
    }

    pub fn with_classes(assignment: Vec<ClassId>, k: usize) -> Result<Self, LabelError> {
        if assignment.is_empty() {
            return Err(LabelError::Empty);
        }
        let mut sizes = vec![0usize; k];
        for &c in &assignment {
            if c >= k {
                return Err(LabelError::ClassOutOfRange { class: c, k });
            }
            sizes[c] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(LabelError::EmptyClass(empty));
        }
        Ok(LabelFunction { assignment, k })
    }

    /// `n` nodes split into `k` contiguous blocks of equal size.
    pub fn contiguous_blocks(n: usize, k: usize) -> Result<Self, LabelError> {
        if k == 0 || n % k != 0 {
            return Err(LabelError::ClassOutOfRange { class: k, k });
        }
        let block = n / k;
        Self::with_classes((0..n).map(|v| v / block).collect(), k)
    }

    pub fn label(&self, v: NodeId) -> ClassId {
        self.assignment[v]
    }

    pub fn get(&self, v: NodeId) -> Option<ClassId> {
        self.assignment.get(v).copied()
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[ClassId] {
        &self.assignment
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn members(&self, class: ClassId) -> Vec<NodeId> {
        (0..self.n()).filter(|&v| self.assignment[v] == class).collect()
    }

    pub fn check_domain(&self, nodes: usize) -> Result<(), LabelError> {
        if self.n() == nodes {
            Ok(())
        } else {
            Err(LabelError::DomainMismatch { labels: self.n(), nodes })
        }
    }

    /// One `node class` line per node, in node order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (v, c) in self.assignment.iter().enumerate() {
            writeln!(out, "{v} {c}").unwrap();
        }
        out
    }

    /// Parses `node_id class_id` lines. Every node in `0..n` must appear
    /// exactly once; `k` is inferred and gaps in class ids are rejected.
    pub fn from_text(text: &str) -> Result<Self, LabelError> {
        let mut pairs: Vec<(usize, NodeId, ClassId)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let parse = |t: &str| {
                t.parse::<usize>().map_err(|_| LabelError::Parse {
                    line: i + 1,
                    msg: format!("not a non-negative integer: {t:?}"),
                })
            };
            if toks.len() != 2 {
                return Err(LabelError::Parse {
                    line: i + 1,
                    msg: format!("expected `node_id class_id`, got {line:?}"),
                });
            }
            pairs.push((i + 1, parse(toks[0])?, parse(toks[1])?));
        }
        if pairs.is_empty() {
            return Err(LabelError::Empty);
        }
        let n = pairs.len();
        let mut assignment = vec![None; n];
        for &(line, v, c) in &pairs {
            let slot = assignment.get_mut(v).ok_or_else(|| LabelError::Parse {
                line,
                msg: format!("node {v} out of range for {n} labeled nodes"),
            })?;
            if slot.is_some() {
                return Err(LabelError::Parse { line, msg: format!("node {v} labeled twice") });
            }
            *slot = Some(c);
        }
        // n distinct ids in 0..n means every slot is filled.
        Self::new(assignment.into_iter().map(|c| c.unwrap()).collect())
    }
}
