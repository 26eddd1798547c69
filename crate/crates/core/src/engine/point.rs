use crate::hypergraph::Hypergraph;
use crate::oracle::PointwiseOracle;

use super::{EngineError, RunOutcome, Session};

/// Pointwise learner: random sampling until a differently labeled pair is
/// connected, then bisection along shortest-shortest paths. Stops once
/// `budget` queries have been spent or every node is labeled.
pub fn hs2_point(
    g: &Hypergraph,
    oracle: &mut PointwiseOracle,
    budget: u64,
    seed: u64,
) -> Result<RunOutcome, EngineError> {
    if budget < 1 {
        return Err(EngineError::ZeroBudget);
    }
    if oracle.num_nodes() != g.num_nodes() {
        return Err(EngineError::DomainMismatch { oracle: oracle.num_nodes(), graph: g.num_nodes() });
    }
    let base = oracle.ledger().total();
    let mut s = Session::new(g, seed);
    'outer: while let Some(mut x) = s.pick_unlabeled() {
        loop {
            let class = oracle.query_point(x)?;
            let used = oracle.ledger().total() - base;
            s.assign(x, class, used);
            if used >= budget {
                break 'outer;
            }
            match s.next_target() {
                Some(t) => x = t,
                None => break,
            }
        }
    }
    Ok(s.finish(oracle.ledger().total() - base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::cut_profile;
    use crate::labels::LabelFunction;

    #[test]
    fn exhaustive_budget_recovers_the_cut() {
        let g = Hypergraph::new(6, vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5], vec![1, 4]]).unwrap();
        let f = LabelFunction::new(vec![0, 0, 0, 1, 1, 1]).unwrap();
        let cut = cut_profile(&g, &f).unwrap().cut_edges;
        for seed in 0..20 {
            let mut o = PointwiseOracle::new(f.clone());
            let r = hs2_point(&g, &mut o, 6, seed).unwrap().evaluate(&cut);
            assert!(r.success);
            assert!(r.queries_used <= 6);
            assert_eq!(r.partition, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        }
    }

    #[test]
    fn uncut_instance_is_trivially_recovered() {
        let g = Hypergraph::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let f = LabelFunction::with_classes(vec![0; 4], 1).unwrap();
        let mut o = PointwiseOracle::new(f);
        let r = hs2_point(&g, &mut o, 2, 1).unwrap().evaluate(&Default::default());
        assert!(r.success);
        assert!(r.removed_edges.is_empty());
        assert_eq!(r.queries_used, 2);
        assert_eq!(r.queries_until_recovery, Some(0));
        assert_eq!(r.partition, g.connected_components());
    }

    #[test]
    fn zero_budget_and_domain_errors() {
        let g = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let mut o = PointwiseOracle::new(LabelFunction::new(vec![0, 1]).unwrap());
        assert_eq!(hs2_point(&g, &mut o, 0, 0), Err(EngineError::ZeroBudget));
        let mut small = PointwiseOracle::new(LabelFunction::new(vec![0]).unwrap());
        assert!(matches!(hs2_point(&g, &mut small, 1, 0), Err(EngineError::DomainMismatch { .. })));
    }
}
