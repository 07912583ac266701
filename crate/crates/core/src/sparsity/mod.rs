//! Correlative sparsity: the CSP graph of a POP, a chordal extension of it, and the
//! maximal cliques of that extension ordered so that they satisfy the running
//! intersection property.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::poly::PopInstance;

/// Undirected simple graph on `0..nvars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl CspGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                g.add_edge(i, j);
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            g.add_edge(i, j);
        }
        g
    }

    pub fn nvars(&self) -> usize {
        self.adj.len()
    }

    /// Self-loops are ignored.
    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            self.adj[i].insert(j);
            self.adj[j].insert(i);
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(&j)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, nb) in self.adj.iter().enumerate() {
            out.extend(nb.range(i + 1..).map(|&j| (i, j)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Fraction of non-zero off-diagonal adjacency entries.
    pub fn density(&self) -> f64 {
        let n = self.nvars();
        if n < 2 {
            return 0.0;
        }
        2.0 * self.edge_count() as f64 / (n * (n - 1)) as f64
    }

    pub fn contains(&self, other: &CspGraph) -> bool {
        other.nvars() == self.nvars()
            && other
                .adj
                .iter()
                .zip(&self.adj)
                .all(|(small, big)| small.is_subset(big))
    }

    fn add_clique(&mut self, vars: &[usize]) {
        for (a, &i) in vars.iter().enumerate() {
            for &j in &vars[a + 1..] {
                self.add_edge(i, j);
            }
        }
    }
}

/// Variables are adjacent iff they share a constraint or an objective monomial.
/// Variable domains are univariate and add nothing.
pub fn build_csp_graph(pop: &PopInstance) -> CspGraph {
    let mut g = CspGraph::empty(pop.nvars);
    for (m, _) in pop.objective.terms() {
        let vars: Vec<usize> = m.variables().collect();
        g.add_clique(&vars);
    }
    for c in &pop.constraints {
        g.add_clique(&c.poly.variables());
    }
    g
}

/// Greedy minimum-degree elimination (ties to the lowest index). Returns the filled
/// graph and its perfect elimination ordering.
pub fn chordal_extension(g: &CspGraph) -> (CspGraph, Vec<usize>) {
    let n = g.nvars();
    let mut filled = g.clone();
    let mut work = g.clone();
    let mut eliminated = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !eliminated[v])
            .min_by_key(|&v| (work.degree(v), v))
            .expect("vertex left");
        let nb: Vec<usize> = work.neighbors(v).iter().copied().collect();
        for (a, &i) in nb.iter().enumerate() {
            for &j in &nb[a + 1..] {
                work.add_edge(i, j);
                filled.add_edge(i, j);
            }
        }
        for &u in &nb {
            work.adj[u].remove(&v);
        }
        work.adj[v].clear();
        eliminated[v] = true;
        order.push(v);
    }
    (filled, order)
}

/// Ordered maximal cliques `I_1, ..., I_r` of a chordal graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueCover {
    cliques: Vec<Vec<usize>>,
    nvars: usize,
}

impl CliqueCover {
    /// One clique holding every variable.
    pub fn dense(nvars: usize) -> Self {
        Self {
            cliques: vec![(0..nvars).collect()],
            nvars,
        }
    }

    /// Wraps a caller-supplied clique list after sorting members; checks coverage.
    pub fn from_cliques(nvars: usize, cliques: Vec<Vec<usize>>) -> Result<Self> {
        let cliques: Vec<Vec<usize>> = cliques
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        let mut covered = vec![false; nvars];
        for c in &cliques {
            for &v in c {
                if v >= nvars {
                    return Err(Error::Structural(format!("clique member {v} >= {nvars}")));
                }
                covered[v] = true;
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::Structural(format!("variable {v} not covered by any clique")));
        }
        Ok(Self { cliques, nvars })
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn tau(&self, k: usize) -> usize {
        self.cliques[k].len()
    }

    pub fn max_size(&self) -> usize {
        self.cliques.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_size(&self) -> usize {
        self.cliques.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Indices of the cliques containing every variable in `vars` (sorted input).
    pub fn containing(&self, vars: &[usize]) -> Vec<usize> {
        (0..self.cliques.len())
            .filter(|&k| is_subset_sorted(vars, &self.cliques[k]))
            .collect()
    }

    /// Number of cliques that contain `vars` as a subset.
    pub fn containment_count(&self, vars: &[usize]) -> usize {
        self.cliques
            .iter()
            .filter(|c| is_subset_sorted(vars, c))
            .count()
    }

    pub fn satisfies_rip(&self) -> bool {
        check_rip(&self.cliques)
    }
}

pub(crate) fn is_subset_sorted(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|s| it.by_ref().any(|b| b == s))
}

/// Running intersection property: every `I_{k+1} ∩ (I_1 ∪ ... ∪ I_k)` lies inside a
/// single earlier clique.
pub fn check_rip(cliques: &[Vec<usize>]) -> bool {
    let mut union: BTreeSet<usize> = BTreeSet::new();
    for (k, c) in cliques.iter().enumerate() {
        if k > 0 {
            let inter: Vec<usize> = c.iter().copied().filter(|v| union.contains(v)).collect();
            let mut sorted = inter.clone();
            sorted.sort_unstable();
            if !cliques[..k].iter().any(|prev| {
                let mut p = prev.clone();
                p.sort_unstable();
                is_subset_sorted(&sorted, &p)
            }) {
                return false;
            }
        }
        union.extend(c.iter().copied());
    }
    true
}

/// Maximal cliques of a chordal graph from a perfect elimination ordering, returned in
/// an order satisfying the running intersection property.
///
/// Fails with a structural error when some vertex's later neighbours are not pairwise
/// adjacent, i.e. the ordering is not perfect for this graph.
pub fn maximal_cliques(chordal: &CspGraph, order: &[usize]) -> Result<CliqueCover> {
    let n = chordal.nvars();
    if order.len() != n {
        return Err(Error::Structural(format!(
            "elimination order has {} entries for {n} vertices",
            order.len()
        )));
    }
    let mut pos = vec![usize::MAX; n];
    for (p, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return Err(Error::Structural("elimination order is not a permutation".into()));
        }
        pos[v] = p;
    }
    // (representative position, clique)
    let mut candidates: Vec<(usize, Vec<usize>)> = Vec::with_capacity(n);
    for (p, &v) in order.iter().enumerate() {
        let later: Vec<usize> = chordal
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&u| pos[u] > p)
            .collect();
        for (a, &i) in later.iter().enumerate() {
            for &j in &later[a + 1..] {
                if !chordal.has_edge(i, j) {
                    return Err(Error::Structural(format!(
                        "graph is not chordal under the given order: {i} and {j} are both later neighbours of {v} but not adjacent"
                    )));
                }
            }
        }
        let mut clique = later;
        clique.push(v);
        clique.sort_unstable();
        candidates.push((p, clique));
    }
    // A candidate is maximal iff no other candidate strictly contains it. Larger sets
    // are visited first so containment only needs checking against kept ones.
    let mut by_size: Vec<usize> = (0..candidates.len()).collect();
    by_size.sort_by(|&a, &b| {
        candidates[b].1.len().cmp(&candidates[a].1.len()).then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = Vec::new();
    for idx in by_size {
        let c = &candidates[idx].1;
        if !kept.iter().any(|&k| is_subset_sorted(c, &candidates[k].1)) {
            kept.push(idx);
        }
    }
    // Reverse elimination order of representatives.
    kept.sort_by(|&a, &b| candidates[b].0.cmp(&candidates[a].0));
    let cliques = kept.into_iter().map(|k| candidates[k].1.clone()).collect();
    CliqueCover::from_cliques(n, cliques)
}

/// CSP graph → chordal extension → ordered maximal cliques. Cliques fixed on the
/// instance are used as given after checking that they cover every term and constraint.
pub fn clique_cover(pop: &PopInstance) -> Result<CliqueCover> {
    if let Some(fixed) = &pop.cliques {
        let cover = CliqueCover::from_cliques(pop.nvars, fixed.clone())?;
        let objective = pop.objective.terms().map(|(m, _)| m.variables().collect::<Vec<_>>());
        let constraints = pop.constraints.iter().map(|c| c.poly.variables());
        for vars in objective.chain(constraints) {
            if cover.containment_count(&vars) == 0 {
                return Err(Error::Structural(format!("no fixed clique contains {vars:?}")));
            }
        }
        return Ok(cover);
    }
    let g = build_csp_graph(pop);
    let (chordal, order) = chordal_extension(&g);
    maximal_cliques(&chordal, &order)
}

/// Summary row matching the columns of the instance summary tables.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SparsitySummary {
    pub name: String,
    #[serde(rename = "nVar")]
    pub nvar: usize,
    pub density: f64,
    #[serde(rename = "nCliques")]
    pub ncliques: usize,
    #[serde(rename = "MaxClique")]
    pub max_clique: usize,
    #[serde(rename = "MinClique")]
    pub min_clique: usize,
}

pub fn summarize(pop: &PopInstance) -> Result<SparsitySummary> {
    let g = build_csp_graph(pop);
    let cover = clique_cover(pop)?;
    Ok(SparsitySummary {
        name: pop.name.clone(),
        nvar: pop.nvars,
        density: g.density(),
        ncliques: cover.len(),
        max_clique: cover.max_size(),
        min_clique: cover.min_size(),
    })
}
