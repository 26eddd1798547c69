//! Ground-truth cut structure: cut set, boundary, cut components,
//! balancedness, the directed distance Δ between cut hyperedges, the dual
//! graph `H_r` and the clusteredness radius κ.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::hypergraph::{EdgeId, Hypergraph, NodeId, UNREACHED};
use crate::labels::{ClassId, LabelError, LabelFunction};

/// Infinite Δ / κ value.
pub const INFINITE: u32 = UNREACHED;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CutError {
    #[error(transparent)]
    Labels(#[from] LabelError),
    #[error("hyperedge {0} is not a cut hyperedge")]
    NotCut(EdgeId),
}

/// Cut set `C`, boundary `∂C` and components `C_ij` induced by a labeling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutProfile {
    pub cut_edges: BTreeSet<EdgeId>,
    pub boundary_nodes: BTreeSet<NodeId>,
    /// Keyed by `(i, j)` with `i < j`; only non-empty components are stored.
    pub components: BTreeMap<(ClassId, ClassId), Vec<EdgeId>>,
    pub m: usize,
    labels: LabelFunction,
}

impl CutProfile {
    pub fn labels(&self) -> &LabelFunction {
        &self.labels
    }

    pub fn c_min(&self) -> usize {
        self.cut_edges.len().min(self.boundary_nodes.len())
    }
}

/// Structural parameters governing the query-complexity bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralParams {
    pub n: usize,
    pub k: usize,
    pub beta: f64,
    pub m: usize,
    /// `None` when `C = ∅`; `Some(INFINITE)` when no finite radius works.
    pub kappa: Option<u32>,
    pub c_size: usize,
    pub boundary_size: usize,
    pub c_min: usize,
    /// Connected components of `G − C`.
    pub components_after_cut: usize,
}

pub fn cut_profile(g: &Hypergraph, f: &LabelFunction) -> Result<CutProfile, CutError> {
    f.check_domain(g.num_nodes())?;
    let mut cut_edges = BTreeSet::new();
    let mut boundary_nodes = BTreeSet::new();
    let mut components: BTreeMap<(ClassId, ClassId), Vec<EdgeId>> = BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        let classes: BTreeSet<ClassId> = e.iter().map(|&v| f.label(v)).collect();
        if classes.len() < 2 {
            continue;
        }
        cut_edges.insert(id);
        boundary_nodes.extend(e.iter().copied());
        let classes: Vec<ClassId> = classes.into_iter().collect();
        for (a, &i) in classes.iter().enumerate() {
            for &j in &classes[a + 1..] {
                components.entry((i, j)).or_default().push(id);
            }
        }
    }
    let m = components.len();
    Ok(CutProfile { cut_edges, boundary_nodes, components, m, labels: f.clone() })
}

/// `min_i |V_i| / n`.
pub fn balancedness(f: &LabelFunction, n: usize) -> Result<f64, CutError> {
    f.check_domain(n)?;
    let sizes = f.class_sizes();
    if let Some(empty) = sizes.iter().position(|&s| s == 0) {
        return Err(LabelError::EmptyClass(empty).into());
    }
    Ok(*sizes.iter().min().unwrap() as f64 / n as f64)
}

/// Precomputed state for evaluating Δ on one labeled hypergraph.
///
/// Holds the `G − C` distances between boundary nodes and, per cut hyperedge,
/// its members grouped by class (`Ω_i(e)`).
#[derive(Debug, Clone)]
pub struct DeltaContext<'a> {
    profile: &'a CutProfile,
    cut: Vec<EdgeId>,
    cut_index: BTreeMap<EdgeId, usize>,
    /// Per cut edge: `(class, boundary indices)` sorted by class.
    groups: Vec<Vec<(ClassId, Vec<usize>)>>,
    dist: Vec<u32>,
    width: usize,
    n: usize,
}

impl<'a> DeltaContext<'a> {
    pub fn new(g: &Hypergraph, profile: &'a CutProfile) -> Self {
        let boundary: Vec<NodeId> = profile.boundary_nodes.iter().copied().collect();
        let mut slot = vec![usize::MAX; g.num_nodes()];
        for (i, &v) in boundary.iter().enumerate() {
            slot[v] = i;
        }
        let mut residual = g.view();
        for &e in &profile.cut_edges {
            residual.kill(e);
        }
        let width = boundary.len();
        let mut dist = vec![INFINITE; width * width];
        for (i, &v) in boundary.iter().enumerate() {
            let row = residual.levels(&[v], u32::MAX);
            for (j, &w) in boundary.iter().enumerate() {
                dist[i * width + j] = row[w];
            }
        }
        let f = profile.labels();
        let cut: Vec<EdgeId> = profile.cut_edges.iter().copied().collect();
        let groups = cut
            .iter()
            .map(|&e| {
                let mut by_class: BTreeMap<ClassId, Vec<usize>> = BTreeMap::new();
                for &v in g.edge(e) {
                    by_class.entry(f.label(v)).or_default().push(slot[v]);
                }
                by_class.into_iter().collect()
            })
            .collect();
        let cut_index = cut.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        DeltaContext { profile, cut, cut_index, groups, dist, width, n: g.num_nodes() }
    }

    pub fn profile(&self) -> &CutProfile {
        self.profile
    }

    /// Cut hyperedge ids in ascending order; `index` arguments refer to
    /// positions in this list.
    pub fn cut_edges(&self) -> &[EdgeId] {
        &self.cut
    }

    /// Δ(e1, e2) for two cut hyperedge ids.
    pub fn delta(&self, e1: EdgeId, e2: EdgeId) -> Result<u32, CutError> {
        let a = *self.cut_index.get(&e1).ok_or(CutError::NotCut(e1))?;
        let b = *self.cut_index.get(&e2).ok_or(CutError::NotCut(e2))?;
        Ok(self.delta_at(a, b))
    }

    /// Δ by position in [`cut_edges`](Self::cut_edges).
    pub fn delta_at(&self, a: usize, b: usize) -> u32 {
        let (ga, gb) = (&self.groups[a], &self.groups[b]);
        // Largest two per-class terms over the classes both edges meet; every
        // pair of shared classes is a common cut component.
        let (mut top, mut second) = (None::<u32>, None::<u32>);
        let (mut i, mut j) = (0, 0);
        while i < ga.len() && j < gb.len() {
            match ga[i].0.cmp(&gb[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let h = self.directed_hausdorff(&ga[i].1, &gb[j].1);
                    if top.map_or(true, |t| h > t) {
                        second = top;
                        top = Some(h);
                    } else if second.map_or(true, |s| h > s) {
                        second = Some(h);
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        match (top, second) {
            (Some(t), Some(s)) => t.saturating_add(s).saturating_add(1),
            _ => INFINITE,
        }
    }

    /// `sup_{v ∈ from} inf_{u ∈ to} d(v, u)` in `G − C`.
    fn directed_hausdorff(&self, from: &[usize], to: &[usize]) -> u32 {
        from.iter()
            .map(|&v| to.iter().map(|&u| self.dist[v * self.width + u]).min().unwrap_or(INFINITE))
            .max()
            .unwrap_or(0)
    }

    /// Every vertex of `members` reachable from the first one (forward) and
    /// able to reach it (backward) using arcs with Δ ≤ r inside `members`.
    fn strongly_connected_within(&self, members: &[usize], r: u32) -> bool {
        let Some(&root) = members.first() else {
            return true;
        };
        for forward in [true, false] {
            let mut unvisited: Vec<usize> = members[1..].to_vec();
            let mut stack = vec![root];
            while let Some(x) = stack.pop() {
                unvisited.retain(|&y| {
                    let d = if forward { self.delta_at(x, y) } else { self.delta_at(y, x) };
                    if d <= r {
                        stack.push(y);
                        false
                    } else {
                        true
                    }
                });
                if unvisited.is_empty() {
                    break;
                }
            }
            if !unvisited.is_empty() {
                return false;
            }
        }
        true
    }

    /// Smallest `r` such that every cut component is strongly connected in
    /// `H_r`. `None` when there is no cut; components of one hyperedge count
    /// as connected for every `r`, so the minimum returned is 1.
    pub fn kappa(&self) -> Option<u32> {
        if self.cut.is_empty() {
            return None;
        }
        // Finite Δ never exceeds 2(n - 1) + 1.
        let max_finite = (2 * self.n as u32).saturating_sub(1).max(1);
        let mut kappa = 1u32;
        for edges in self.profile.components.values() {
            let members: Vec<usize> = edges.iter().map(|e| self.cut_index[e]).collect();
            if self.strongly_connected_within(&members, kappa) {
                continue;
            }
            if !self.strongly_connected_within(&members, max_finite) {
                return Some(INFINITE);
            }
            let (mut lo, mut hi) = (kappa + 1, max_finite);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if self.strongly_connected_within(&members, mid) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            kappa = lo;
        }
        Some(kappa)
    }

    /// The dual digraph `H_r` on cut hyperedges (self-loops included).
    pub fn dual_graph(&self, r: u32) -> DualGraph {
        let count = self.cut.len();
        let arcs = (0..count)
            .map(|a| (0..count).filter(|&b| self.delta_at(a, b) <= r).collect())
            .collect();
        DualGraph { vertices: self.cut.clone(), arcs }
    }
}

/// Directed graph whose vertices are cut hyperedges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    pub vertices: Vec<EdgeId>,
    /// Out-neighbours by vertex position.
    pub arcs: Vec<Vec<usize>>,
}

impl DualGraph {
    pub fn has_arc(&self, from: EdgeId, to: EdgeId) -> bool {
        let pos = |e| self.vertices.binary_search(&e).ok();
        match (pos(from), pos(to)) {
            (Some(a), Some(b)) => self.arcs[a].contains(&b),
            _ => false,
        }
    }

    /// Strong connectivity of the subgraph induced by `subset` (edge ids).
    pub fn induces_strongly_connected(&self, subset: &[EdgeId]) -> bool {
        let idx: Vec<usize> =
            subset.iter().filter_map(|e| self.vertices.binary_search(e).ok()).collect();
        let Some(&root) = idx.first() else {
            return true;
        };
        let inside: BTreeSet<usize> = idx.iter().copied().collect();
        let mut reverse: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &a in &idx {
            for &b in &self.arcs[a] {
                if inside.contains(&b) {
                    reverse.entry(b).or_default().push(a);
                }
            }
        }
        let reach = |next: &dyn Fn(usize) -> Vec<usize>| {
            let mut seen = BTreeSet::from([root]);
            let mut stack = vec![root];
            while let Some(x) = stack.pop() {
                for y in next(x) {
                    if inside.contains(&y) && seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            seen.len() == inside.len()
        };
        reach(&|x| self.arcs[x].clone()) && reach(&|x| reverse.get(&x).cloned().unwrap_or_default())
    }
}

/// Δ(e1, e2) computed from scratch; prefer [`DeltaContext`] for repeated use.
pub fn delta(g: &Hypergraph, profile: &CutProfile, e1: EdgeId, e2: EdgeId) -> Result<u32, CutError> {
    DeltaContext::new(g, profile).delta(e1, e2)
}

pub fn dual_graph(g: &Hypergraph, profile: &CutProfile, r: u32) -> DualGraph {
    DeltaContext::new(g, profile).dual_graph(r)
}

pub fn kappa(g: &Hypergraph, profile: &CutProfile) -> Option<u32> {
    DeltaContext::new(g, profile).kappa()
}

/// Analyses `(g, f)` and returns its structural parameters with the profile.
pub fn structural_params(
    g: &Hypergraph,
    f: &LabelFunction,
) -> Result<(StructuralParams, CutProfile), CutError> {
    let profile = cut_profile(g, f)?;
    let beta = balancedness(f, g.num_nodes())?;
    let kappa = DeltaContext::new(g, &profile).kappa();
    let mut residual = g.view();
    for &e in &profile.cut_edges {
        residual.kill(e);
    }
    let params = StructuralParams {
        n: g.num_nodes(),
        k: f.k(),
        beta,
        m: profile.m,
        kappa,
        c_size: profile.cut_edges.len(),
        boundary_size: profile.boundary_nodes.len(),
        c_min: profile.c_min(),
        components_after_cut: residual.components().len(),
    };
    Ok((params, profile))
}

/// Parameters of `G` next to those of its clique expansion under the same
/// labels, with the five comparison outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct CeComparison {
    pub original: StructuralParams,
    pub expanded: StructuralParams,
    pub beta_equal: bool,
    pub m_equal: bool,
    pub kappa_equal: bool,
    pub boundary_equal: bool,
    pub min_not_larger: bool,
}

impl CeComparison {
    pub fn all_hold(&self) -> bool {
        self.beta_equal && self.m_equal && self.kappa_equal && self.boundary_equal && self.min_not_larger
    }
}

pub fn compare_with_ce(g: &Hypergraph, f: &LabelFunction) -> Result<CeComparison, CutError> {
    let (original, _) = structural_params(g, f)?;
    let (expanded, _) = structural_params(&g.clique_expansion(), f)?;
    Ok(CeComparison {
        beta_equal: original.beta == expanded.beta,
        m_equal: original.m == expanded.m,
        kappa_equal: original.kappa == expanded.kappa,
        boundary_equal: original.boundary_size == expanded.boundary_size,
        min_not_larger: original.c_min <= expanded.c_min,
        original,
        expanded,
    })
}
