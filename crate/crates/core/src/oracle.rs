//! Simulated label oracles with exact query accounting.
//!
//! Learners observe labels only through [`PointwiseOracle::query_point`] and
//! [`PairwiseOracle::query_pair`]; the ground truth stays private.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hypergraph::NodeId;
use crate::labels::{ClassId, LabelFunction};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("node {0} is not in the oracle's domain")]
    UnknownNode(NodeId),
    #[error("a node cannot be compared with itself ({0})")]
    SelfComparison(NodeId),
    #[error("flip probability {0} outside [0, 1/2)")]
    BadFlipProbability(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Point,
    Pair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub tick: u64,
    pub kind: QueryKind,
    pub args: Vec<NodeId>,
    pub answer: usize,
}

impl fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            QueryKind::Point => "point",
            QueryKind::Pair => "pair",
        };
        write!(f, "{} {}", self.tick, kind)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, " {}", self.answer)
    }
}

/// Query counters plus an optional append-only trace.
#[derive(Debug, Clone, Default)]
pub struct QueryLedger {
    point_count: u64,
    pair_count: u64,
    trace: Option<Vec<TraceEntry>>,
}

impl QueryLedger {
    pub fn new(tracing: bool) -> Self {
        QueryLedger { point_count: 0, pair_count: 0, trace: tracing.then(Vec::new) }
    }

    pub fn point_count(&self) -> u64 {
        self.point_count
    }

    pub fn pair_count(&self) -> u64 {
        self.pair_count
    }

    pub fn total(&self) -> u64 {
        self.point_count + self.pair_count
    }

    pub fn trace(&self) -> Option<&[TraceEntry]> {
        self.trace.as_deref()
    }

    fn record(&mut self, kind: QueryKind, args: Vec<NodeId>, answer: usize) {
        match kind {
            QueryKind::Point => self.point_count += 1,
            QueryKind::Pair => self.pair_count += 1,
        }
        let tick = self.total();
        if let Some(t) = self.trace.as_mut() {
            t.push(TraceEntry { tick, kind, args, answer });
        }
    }

    /// One `tick kind args answer` line per query.
    pub fn export_trace(&self) -> String {
        let mut out = String::new();
        for e in self.trace.iter().flatten() {
            writeln!(out, "{e}").unwrap();
        }
        out
    }
}

/// Noiseless pointwise oracle: answers a node's class.
#[derive(Debug, Clone)]
pub struct PointwiseOracle {
    truth: LabelFunction,
    ledger: QueryLedger,
}

impl PointwiseOracle {
    pub fn new(truth: LabelFunction) -> Self {
        Self::with_tracing(truth, false)
    }

    pub fn with_tracing(truth: LabelFunction, tracing: bool) -> Self {
        PointwiseOracle { truth, ledger: QueryLedger::new(tracing) }
    }

    pub fn query_point(&mut self, v: NodeId) -> Result<ClassId, OracleError> {
        let c = self.truth.get(v).ok_or(OracleError::UnknownNode(v))?;
        self.ledger.record(QueryKind::Point, vec![v], c);
        Ok(c)
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    /// `(point_count, pair_count)`.
    pub fn ledger_snapshot(&self) -> (u64, u64) {
        (self.ledger.point_count, self.ledger.pair_count)
    }

    pub fn num_nodes(&self) -> usize {
        self.truth.n()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseMode {
    /// Each call flips independently.
    Fresh,
    /// The flip is drawn once per unordered pair and reused.
    #[default]
    Persistent,
}

/// Same-class oracle whose answers are flipped with probability `p`.
#[derive(Debug, Clone)]
pub struct PairwiseOracle {
    truth: LabelFunction,
    p: f64,
    mode: NoiseMode,
    rng: ChaCha8Rng,
    cache: HashMap<(NodeId, NodeId), bool>,
    ledger: QueryLedger,
}

impl PairwiseOracle {
    pub fn noiseless(truth: LabelFunction) -> Self {
        Self::new(truth, 0.0, NoiseMode::Persistent, 0).expect("p = 0 is valid")
    }

    pub fn new(truth: LabelFunction, p: f64, mode: NoiseMode, seed: u64) -> Result<Self, OracleError> {
        if !(0.0..0.5).contains(&p) {
            return Err(OracleError::BadFlipProbability(p));
        }
        Ok(PairwiseOracle {
            truth,
            p,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cache: HashMap::new(),
            ledger: QueryLedger::new(false),
        })
    }

    pub fn with_tracing(mut self, tracing: bool) -> Self {
        self.ledger = QueryLedger::new(tracing);
        self
    }

    pub fn flip_probability(&self) -> f64 {
        self.p
    }

    pub fn mode(&self) -> NoiseMode {
        self.mode
    }

    pub fn num_nodes(&self) -> usize {
        self.truth.n()
    }

    /// `true` when the oracle claims `u` and `v` share a class.
    pub fn query_pair(&mut self, u: NodeId, v: NodeId) -> Result<bool, OracleError> {
        let cu = self.truth.get(u).ok_or(OracleError::UnknownNode(u))?;
        let cv = self.truth.get(v).ok_or(OracleError::UnknownNode(v))?;
        if u == v {
            return Err(OracleError::SelfComparison(u));
        }
        let same = cu == cv;
        let flip = if self.p == 0.0 {
            false
        } else {
            match self.mode {
                NoiseMode::Fresh => self.rng.gen_bool(self.p),
                NoiseMode::Persistent => {
                    let key = (u.min(v), u.max(v));
                    match self.cache.get(&key) {
                        Some(&f) => f,
                        None => {
                            let f = self.rng.gen_bool(self.p);
                            self.cache.insert(key, f);
                            f
                        }
                    }
                }
            }
        };
        let answer = same != flip;
        self.ledger.record(QueryKind::Pair, vec![u, v], answer as usize);
        Ok(answer)
    }

    pub fn cached_pairs(&self) -> usize {
        self.cache.len()
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn ledger_snapshot(&self) -> (u64, u64) {
        (self.ledger.point_count, self.ledger.pair_count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth() -> LabelFunction {
        LabelFunction::new(vec![0, 0, 1, 1]).unwrap()
    }

    #[test]
    fn point_queries_count_and_validate() {
        let mut o = PointwiseOracle::new(LabelFunction::new(vec![0, 0, 1, 1]).unwrap());
        assert_eq!(o.ledger_snapshot(), (0, 0));
        assert_eq!(o.query_point(3), Ok(1));
        assert_eq!(o.query_point(3), Ok(1));
        assert_eq!(o.ledger_snapshot(), (2, 0));
        assert_eq!(o.query_point(9), Err(OracleError::UnknownNode(9)));
        assert_eq!(o.ledger_snapshot(), (2, 0));
        o.query_point(0).unwrap();
        assert_eq!(o.ledger_snapshot(), (3, 0));
    }

    #[test]
    fn noiseless_pairs() {
        let mut o = PairwiseOracle::noiseless(truth());
        assert_eq!(o.query_pair(0, 1), Ok(true));
        assert_eq!(o.query_pair(1, 2), Ok(false));
        assert_eq!(o.ledger_snapshot(), (0, 2));
        assert_eq!(o.query_pair(2, 2), Err(OracleError::SelfComparison(2)));
        assert_eq!(o.ledger_snapshot(), (0, 2));
    }

    #[test]
    fn rejects_bad_p() {
        assert!(PairwiseOracle::new(truth(), 0.5, NoiseMode::Fresh, 0).is_err());
        assert!(PairwiseOracle::new(truth(), -0.1, NoiseMode::Fresh, 0).is_err());
    }

    #[test]
    fn persistent_flip_rate() {
        let n = 20_000;
        let f = LabelFunction::with_classes(vec![0; n], 1).unwrap();
        let mut o = PairwiseOracle::new(f, 0.3, NoiseMode::Persistent, 11).unwrap();
        let wrong = (0..10_000).filter(|&i| !o.query_pair(2 * i, 2 * i + 1).unwrap()).count();
        let rate = wrong as f64 / 10_000.0;
        assert!((rate - 0.3).abs() <= 0.02, "rate {rate}");
    }

    #[test]
    fn persistent_answers_are_symmetric_and_cached_once() {
        let f = LabelFunction::new((0..40).map(|v| v % 2).collect()).unwrap();
        let mut o = PairwiseOracle::new(f, 0.4, NoiseMode::Persistent, 3).unwrap();
        for u in 0..40 {
            for v in 0..40 {
                if u != v {
                    let a = o.query_pair(u, v).unwrap();
                    assert_eq!(a, o.query_pair(v, u).unwrap());
                }
            }
        }
        assert_eq!(o.cached_pairs(), 40 * 39 / 2);
    }

    #[test]
    fn deterministic_under_seed() {
        for mode in [NoiseMode::Fresh, NoiseMode::Persistent] {
            let run = || {
                let mut o = PairwiseOracle::new(truth(), 0.25, mode, 99).unwrap();
                (0..200).map(|i| o.query_pair(i % 4, (i + 1) % 4).unwrap()).collect::<Vec<_>>()
            };
            assert_eq!(run(), run());
        }
    }

    #[test]
    fn trace_lines() {
        let mut o = PairwiseOracle::noiseless(truth()).with_tracing(true);
        o.query_pair(0, 2).unwrap();
        o.query_pair(1, 0).unwrap();
        assert_eq!(o.ledger().export_trace(), "1 pair 0 2 0\n2 pair 1 0 1\n");
        let mut p = PointwiseOracle::with_tracing(truth(), true);
        p.query_point(2).unwrap();
        assert_eq!(p.ledger().export_trace(), "1 point 2 1\n");
        assert_eq!(p.ledger().trace().unwrap().len() as u64, p.ledger().point_count());
    }
}
