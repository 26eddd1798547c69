use std::collections::HashMap;

use rand::seq::index;

use crate::hypergraph::{Hypergraph, NodeId};
use crate::labels::ClassId;
use crate::oracle::PairwiseOracle;

use super::{EngineError, RunOutcome, Session};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NoisyOptions {
    /// Stop random sampling once the remaining hypergraph has no more
    /// components than there are seed classes.
    pub skip_random_sampling: bool,
}

/// Pair queries with a local answer cache and an optional query cap. The
/// cache guarantees no pair is asked twice within one learner.
struct Asker<'o> {
    oracle: &'o mut PairwiseOracle,
    base: u64,
    limit: Option<u64>,
    seen: HashMap<(NodeId, NodeId), bool>,
}

impl<'o> Asker<'o> {
    fn new(oracle: &'o mut PairwiseOracle, limit: Option<u64>) -> Self {
        let base = oracle.ledger().total();
        Asker { oracle, base, limit, seen: HashMap::new() }
    }

    fn used(&self) -> u64 {
        self.oracle.ledger().total() - self.base
    }

    /// `Ok(None)` when the cap is reached.
    fn ask(&mut self, u: NodeId, v: NodeId) -> Result<Option<bool>, EngineError> {
        let key = (u.min(v), u.max(v));
        if let Some(&a) = self.seen.get(&key) {
            return Ok(Some(a));
        }
        if self.limit.is_some_and(|l| self.used() >= l) {
            return Ok(None);
        }
        let a = self.oracle.query_pair(u, v)?;
        self.seen.insert(key, a);
        Ok(Some(a))
    }
}

/// Index of the largest `hits/size`, compared exactly; ties go to the
/// smallest index. Entries with size 0 are ignored.
fn best_ratio(scores: &[(u64, u64)]) -> Option<(usize, (u64, u64))> {
    let mut best: Option<(usize, (u64, u64))> = None;
    for (i, &(hits, size)) in scores.iter().enumerate() {
        if size == 0 {
            continue;
        }
        match best {
            Some((_, (bh, bs))) if hits * bs <= bh * size => {}
            _ => best = Some((i, (hits, size))),
        }
    }
    best
}

fn votes(asker: &mut Asker<'_>, v: NodeId, groups: &[Vec<NodeId>]) -> Result<Option<Vec<(u64, u64)>>, EngineError> {
    let mut out = Vec::with_capacity(groups.len());
    for g in groups {
        let mut hits = 0;
        for &s in g {
            match asker.ask(v, s)? {
                Some(true) => hits += 1,
                Some(false) => {}
                None => return Ok(None),
            }
        }
        out.push((hits, g.len() as u64));
    }
    Ok(Some(out))
}

/// Normalized majority vote of `v` against every seed of every class.
pub fn classify_by_vote(v: NodeId, seeds: &[Vec<NodeId>], oracle: &mut PairwiseOracle) -> Result<ClassId, EngineError> {
    check_seeds(v, seeds)?;
    let mut asker = Asker::new(oracle, None);
    let scores = votes(&mut asker, v, seeds)?.expect("no cap");
    Ok(best_ratio(&scores).expect("seeds non-empty").0)
}

fn check_seeds(v: NodeId, seeds: &[Vec<NodeId>]) -> Result<(), EngineError> {
    if let Some(i) = seeds.iter().position(|s| s.is_empty()) {
        return Err(EngineError::EmptySeedClass(i));
    }
    if seeds.iter().flatten().any(|&s| s == v) {
        return Err(EngineError::NodeIsSeed(v));
    }
    Ok(())
}

/// Clusters `sample` using pair queries only. Blocks come back in order of
/// their first member's position in `sample`.
pub fn seed_cluster(sample: &[NodeId], oracle: &mut PairwiseOracle) -> Result<Vec<Vec<NodeId>>, EngineError> {
    let mut asker = Asker::new(oracle, None);
    Ok(cluster(sample, &mut asker)?.expect("no cap"))
}

fn cluster(sample: &[NodeId], asker: &mut Asker<'_>) -> Result<Option<Vec<Vec<NodeId>>>, EngineError> {
    let m = sample.len();
    if m < 2 {
        return Err(EngineError::SampleTooSmall(m));
    }
    let p = asker.oracle.flip_probability();
    if p == 0.0 {
        let mut blocks: Vec<Vec<NodeId>> = Vec::new();
        for &v in sample {
            let mut home = None;
            for (i, b) in blocks.iter().enumerate() {
                match asker.ask(v, b[0])? {
                    Some(true) => {
                        home = Some(i);
                        break;
                    }
                    Some(false) => {}
                    None => return Ok(None),
                }
            }
            match home {
                Some(i) => blocks[i].push(v),
                None => blocks.push(vec![v]),
            }
        }
        return Ok(Some(blocks));
    }

    let t = ((12.0 * (m as f64).ln()) / (1.0 - 2.0 * p).powi(2)).ceil().max(1.0) as usize;

    // Greedy pass against at most t members per cluster.
    let mut blocks: Vec<Vec<NodeId>> = Vec::new();
    for &v in sample {
        let probes: Vec<Vec<NodeId>> = blocks.iter().map(|b| b[..b.len().min(t)].to_vec()).collect();
        let Some(scores) = votes(asker, v, &probes)? else { return Ok(None) };
        match best_ratio(&scores) {
            Some((i, (hits, size))) if 2 * hits > size => blocks[i].push(v),
            _ => blocks.push(vec![v]),
        }
    }

    // Merge pass: early noise can split a class, so fold any cluster whose
    // cross agreement with an earlier one exceeds 1/2 into it.
    let mut i = 0;
    while i < blocks.len() {
        let mut j = i + 1;
        while j < blocks.len() {
            let (a, b) = (&blocks[i], &blocks[j]);
            let (a, b) = (a[..a.len().min(t)].to_vec(), b[..b.len().min(t)].to_vec());
            let mut hits = 0u64;
            for &x in &b {
                let Some(s) = votes(asker, x, std::slice::from_ref(&a))? else { return Ok(None) };
                hits += s[0].0;
            }
            if 2 * hits > (a.len() * b.len()) as u64 {
                let moved = blocks.remove(j);
                blocks[i].extend(moved);
            } else {
                j += 1;
            }
        }
        i += 1;
    }

    // One simultaneous re-assignment sweep.
    let mut next: Vec<Vec<NodeId>> = vec![Vec::new(); blocks.len()];
    for (home, b) in blocks.iter().enumerate() {
        for &v in b {
            let others: Vec<Vec<NodeId>> =
                blocks.iter().map(|c| c.iter().copied().filter(|&x| x != v).collect()).collect();
            let Some(scores) = votes(asker, v, &others)? else { return Ok(None) };
            let target = best_ratio(&scores).map_or(home, |(i, _)| i);
            next[target].push(v);
        }
    }
    let order: HashMap<NodeId, usize> = sample.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut out: Vec<Vec<NodeId>> = next.into_iter().filter(|b| !b.is_empty()).collect();
    for b in &mut out {
        b.sort_by_key(|v| order[v]);
    }
    out.sort_by_key(|b| order[&b[0]]);
    Ok(Some(out))
}

/// Noisy pairwise learner: cluster `m` random seeds, then classify each
/// queried node by majority vote against the seeds.
pub fn hs2_pair_noisy(
    g: &Hypergraph,
    oracle: &mut PairwiseOracle,
    budget: u64,
    m: usize,
    seed: u64,
    opts: NoisyOptions,
) -> Result<RunOutcome, EngineError> {
    if budget < 1 {
        return Err(EngineError::ZeroBudget);
    }
    let n = g.num_nodes();
    if oracle.num_nodes() != n {
        return Err(EngineError::DomainMismatch { oracle: oracle.num_nodes(), graph: n });
    }
    if m > n {
        return Err(EngineError::SampleTooLarge { m, n });
    }
    let mut s = Session::new(g, seed);
    let sample: Vec<NodeId> = index::sample(s.rng(), n, m).into_iter().collect();
    let mut asker = Asker::new(oracle, Some(budget));

    let Some(blocks) = cluster(&sample, &mut asker)? else {
        let used = asker.used();
        return Ok(s.finish(used));
    };
    let used = asker.used();
    for (class, b) in blocks.iter().enumerate() {
        for &v in b {
            s.add_seed(class, v);
            s.assign(v, class, used);
        }
    }
    let seeds = blocks;

    'outer: loop {
        if asker.used() >= budget {
            break;
        }
        if opts.skip_random_sampling && s.component_count() <= seeds.len() {
            break;
        }
        let Some(mut v) = s.pick_unlabeled() else { break };
        loop {
            let Some(scores) = votes(&mut asker, v, &seeds)? else { break 'outer };
            let class = best_ratio(&scores).expect("seeds non-empty").0;
            let used = asker.used();
            s.assign(v, class, used);
            if used >= budget {
                break 'outer;
            }
            match s.next_target() {
                Some(t) => v = t,
                None => break,
            }
        }
    }
    let used = asker.used();
    Ok(s.finish(used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cut::cut_profile;
    use crate::labels::LabelFunction;
    use crate::oracle::NoiseMode;

    fn halves(n: usize) -> LabelFunction {
        LabelFunction::new((0..n).map(|v| usize::from(v >= n / 2)).collect()).unwrap()
    }

    #[test]
    fn vote_examples() {
        // 15 seeds of class 0 of which 10 agree, 20 of class 1 of which 15 agree.
        assert_eq!(best_ratio(&[(10, 15), (15, 20)]).unwrap().0, 1);
        assert_eq!(best_ratio(&[(1, 2), (2, 4)]).unwrap().0, 0);
        assert_eq!(best_ratio(&[(0, 0), (0, 3)]).unwrap().0, 1);

        let f = LabelFunction::new(vec![0, 0, 1, 1, 2]).unwrap();
        let mut o = PairwiseOracle::noiseless(f);
        let seeds = vec![vec![0], vec![2]];
        assert_eq!(classify_by_vote(1, &seeds, &mut o), Ok(0));
        assert_eq!(classify_by_vote(3, &seeds, &mut o), Ok(1));
        assert_eq!(o.ledger().pair_count(), 4);
        assert_eq!(classify_by_vote(4, &seeds, &mut o), Ok(0));
        assert_eq!(classify_by_vote(0, &seeds, &mut o), Err(EngineError::NodeIsSeed(0)));
        assert_eq!(classify_by_vote(1, &[vec![0], vec![]], &mut o), Err(EngineError::EmptySeedClass(1)));
    }

    #[test]
    fn noiseless_cluster_is_exact_and_cheap() {
        let f = LabelFunction::new((0..30).map(|v| v % 3).collect()).unwrap();
        let mut o = PairwiseOracle::noiseless(f);
        let sample: Vec<_> = (0..30).collect();
        let blocks = seed_cluster(&sample, &mut o).unwrap();
        assert_eq!(blocks.len(), 3);
        for (c, b) in blocks.iter().enumerate() {
            assert!(b.iter().all(|&v| v % 3 == c));
        }
        assert!(o.ledger().pair_count() <= 30 * 3);
        assert_eq!(seed_cluster(&[4], &mut o), Err(EngineError::SampleTooSmall(1)));
    }

    #[test]
    fn single_class_sample_is_one_block() {
        let f = LabelFunction::with_classes(vec![0; 40], 1).unwrap();
        let mut o = PairwiseOracle::new(f, 0.1, NoiseMode::Persistent, 5).unwrap();
        let blocks = seed_cluster(&(0..40).collect::<Vec<_>>(), &mut o).unwrap();
        assert_eq!(blocks, vec![(0..40).collect::<Vec<_>>()]);
    }

    #[test]
    fn noisy_cluster_recovers_balanced_classes() {
        let f = halves(200);
        let mut exact = 0;
        for seed in 0..10 {
            let mut o = PairwiseOracle::new(f.clone(), 0.2, NoiseMode::Persistent, seed).unwrap();
            let blocks = seed_cluster(&(0..200).collect::<Vec<_>>(), &mut o).unwrap();
            if blocks == vec![(0..100).collect::<Vec<_>>(), (100..200).collect()] {
                exact += 1;
            }
        }
        assert!(exact >= 9, "exact {exact}/10");
    }

    #[test]
    fn noiseless_seeds_then_like_pair() {
        let g = Hypergraph::new(8, (0..7).map(|i| vec![i, i + 1])).unwrap();
        let f = halves(8);
        let cut = cut_profile(&g, &f).unwrap().cut_edges;
        for seed in 0..10 {
            let mut o = PairwiseOracle::noiseless(f.clone());
            let r = hs2_pair_noisy(&g, &mut o, 1000, 3, seed, NoisyOptions::default()).unwrap().evaluate(&cut);
            assert!(r.success || r.label_list.seeds().len() < 2);
            assert!(r.removed_edges.is_subset(&cut));
        }
    }

    #[test]
    fn budget_below_phase_one() {
        let g = Hypergraph::new(8, (0..7).map(|i| vec![i, i + 1])).unwrap();
        let f = halves(8);
        let cut = cut_profile(&g, &f).unwrap().cut_edges;
        let mut o = PairwiseOracle::new(f, 0.1, NoiseMode::Persistent, 1).unwrap();
        let r = hs2_pair_noisy(&g, &mut o, 2, 8, 0, NoisyOptions::default()).unwrap().evaluate(&cut);
        assert!(!r.success);
        assert_eq!(r.queries_used, 2);
        assert!(r.removed_edges.is_empty());
        assert_eq!(r.partition.len(), 1);
    }

    #[test]
    fn sample_larger_than_n() {
        let g = Hypergraph::new(2, vec![vec![0, 1]]).unwrap();
        let mut o = PairwiseOracle::noiseless(halves(2));
        let err = hs2_pair_noisy(&g, &mut o, 5, 3, 0, NoisyOptions::default());
        assert_eq!(err, Err(EngineError::SampleTooLarge { m: 3, n: 2 }));
    }
}
