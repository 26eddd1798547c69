use crate::hypergraph::Hypergraph;
use crate::oracle::PairwiseOracle;

use super::{EngineError, RunOutcome, Session};

/// Noiseless pairwise learner. A selected node is compared with the first
/// member of each discovered class in discovery order, stopping at the first
/// match; no match opens a new class.
pub fn hs2_pair(
    g: &Hypergraph,
    oracle: &mut PairwiseOracle,
    budget: u64,
    seed: u64,
) -> Result<RunOutcome, EngineError> {
    if budget < 1 {
        return Err(EngineError::ZeroBudget);
    }
    if oracle.flip_probability() != 0.0 {
        return Err(EngineError::NoisyOracle(oracle.flip_probability()));
    }
    if oracle.num_nodes() != g.num_nodes() {
        return Err(EngineError::DomainMismatch { oracle: oracle.num_nodes(), graph: g.num_nodes() });
    }
    let base = oracle.ledger().total();
    let mut s = Session::new(g, seed);
    let first = s.pick_unlabeled().expect("n >= 1");
    s.assign(first, 0, 0);
    s.add_seed(0, first);
    'outer: while let Some(mut v) = s.pick_unlabeled() {
        loop {
            let reps: Vec<_> = s.labels().seeds().iter().map(|c| c[0]).collect();
            let mut class = None;
            for (i, &rep) in reps.iter().enumerate() {
                if oracle.ledger().total() - base >= budget {
                    break 'outer;
                }
                if oracle.query_pair(v, rep)? {
                    class = Some(i);
                    break;
                }
            }
            let class = class.unwrap_or(reps.len());
            let used = oracle.ledger().total() - base;
            s.assign(v, class, used);
            s.add_seed(class, v);
            if used >= budget {
                break 'outer;
            }
            match s.next_target() {
                Some(t) => v = t,
                None => break,
            }
        }
    }
    Ok(s.finish(oracle.ledger().total() - base))
}
