use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::PopInstance;
use crate::sparsity::{is_subset_sorted, CliqueCover};

use super::config::{Heuristic, Mode, SublevelConfig};
use super::owners::{owners, Owner};
use super::rules::{anchored_walk, cyclic_window, SubsetRule};

/// Extra data the ranking heuristics read.
#[derive(Clone, Debug, Default)]
pub struct HeuristicInput {
    /// First-order moment matrix per clique of the working cover, indexed by `1` and
    /// the clique variables in order.
    pub moments: Option<Vec<DMatrix<f64>>>,
    /// Graph Laplacian (or any symmetric weight matrix) over all variables.
    pub laplacian: Option<DMatrix<f64>>,
}

/// Subsets chosen for one owner inside one clique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanEntry {
    pub owner: usize,
    pub clique: usize,
    pub subsets: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SubsetPlan {
    pub entries: Vec<PlanEntry>,
}

impl SubsetPlan {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.iter().all(|e| e.subsets.is_empty())
    }

    /// Distinct subsets in plan order.
    pub fn distinct_subsets(&self) -> Vec<Vec<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for e in &self.entries {
            for s in &e.subsets {
                if seen.insert(s.clone()) {
                    out.push(s.clone());
                }
            }
        }
        out
    }
}

/// The cover relaxations are built on: the given cliques, or one clique of all
/// variables in dense mode.
pub fn working_cover(pop: &PopInstance, cover: &CliqueCover, mode: Mode) -> CliqueCover {
    match mode {
        Mode::Dense => CliqueCover::dense(pop.nvars),
        Mode::Sparse => cover.clone(),
    }
}

/// Induced ∞-norm (largest absolute row sum).
fn inf_norm(m: &DMatrix<f64>, idx: &[usize]) -> f64 {
    idx.iter()
        .map(|&r| idx.iter().map(|&c| m[(r, c)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

struct WindowScorer<'a> {
    cfg: &'a SublevelConfig,
    aux: &'a HeuristicInput,
    counts_cover: &'a CliqueCover,
}

impl WindowScorer<'_> {
    fn moment_score(&self, k: usize, clique: &[usize], w: &[usize]) -> Result<f64> {
        let mats = self
            .aux
            .moments
            .as_ref()
            .ok_or_else(|| Error::Config("heuristic needs first-order moment matrices".into()))?;
        let m = mats
            .get(k)
            .ok_or_else(|| Error::Config(format!("no moment matrix for clique {k}")))?;
        if m.nrows() != clique.len() + 1 {
            return Err(Error::Dimension(format!(
                "moment matrix of clique {k} has size {}, expected {}",
                m.nrows(),
                clique.len() + 1
            )));
        }
        let mut idx = vec![0];
        idx.extend(w.iter().map(|v| 1 + clique.iter().position(|u| u == v).expect("window in clique")));
        Ok(inf_norm(m, &idx))
    }

    fn laplacian_score(&self, w: &[usize]) -> Result<f64> {
        let l = self
            .aux
            .laplacian
            .as_ref()
            .ok_or_else(|| Error::Config("heuristic needs the Laplacian matrix".into()))?;
        if w.iter().any(|&v| v >= l.nrows()) {
            return Err(Error::Dimension("Laplacian smaller than the instance".into()));
        }
        Ok(inf_norm(l, w))
    }

    /// First `q` of the `τ` cyclic windows of size `l`, ranked by the heuristic.
    fn pick(&self, owner: usize, k: usize, clique: &[usize], l: usize, q: usize) -> Result<Vec<Vec<usize>>> {
        let tau = clique.len();
        let windows: Vec<Vec<usize>> = (0..tau).map(|j| cyclic_window(clique, j, l)).collect();
        let q = q.min(tau);
        let ranked: Vec<usize> = match self.cfg.heuristic {
            Heuristic::H1 => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
                rng.set_stream(((owner as u64) << 32) | k as u64);
                let mut order: Vec<usize> = (0..tau).collect();
                order.shuffle(&mut rng);
                order
            }
            Heuristic::H2 | Heuristic::ProblemSpecific => (0..tau).collect(),
            Heuristic::H3 | Heuristic::H4 => {
                let scores = windows
                    .iter()
                    .map(|w| self.score(k, clique, w))
                    .collect::<Result<Vec<_>>>()?;
                let mut order: Vec<usize> = (0..tau).collect();
                order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
                order
            }
            Heuristic::H5 | Heuristic::H6 => {
                let counts: Vec<usize> = windows.iter().map(|w| self.counts_cover.containment_count(w)).collect();
                let mut order: Vec<usize> = (0..tau).collect();
                if self.cfg.heuristic == Heuristic::H5 {
                    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
                } else {
                    order.sort_by(|&a, &b| counts[a].cmp(&counts[b]).then(a.cmp(&b)));
                }
                order
            }
            Heuristic::H35 | Heuristic::H45 => {
                let counts: Vec<usize> = windows.iter().map(|w| self.counts_cover.containment_count(w)).collect();
                let scores = windows
                    .iter()
                    .map(|w| self.score(k, clique, w))
                    .collect::<Result<Vec<_>>>()?;
                let mut order: Vec<usize> = (0..tau).collect();
                order.sort_by(|&a, &b| {
                    counts[a]
                        .cmp(&counts[b])
                        .then(scores[b].total_cmp(&scores[a]))
                        .then(a.cmp(&b))
                });
                order
            }
        };
        Ok(ranked.into_iter().take(q).map(|j| windows[j].clone()).collect())
    }

    fn score(&self, k: usize, clique: &[usize], w: &[usize]) -> Result<f64> {
        match self.cfg.heuristic {
            Heuristic::H3 | Heuristic::H35 => self.moment_score(k, clique, w),
            _ => self.laplacian_score(w),
        }
    }
}

/// Chooses the subsets `Γ` of every owner in every clique containing its variables.
///
/// `cover` is the sparsity cover of the instance; in dense mode windows are drawn from
/// the single all-variable clique while clique-containment counts still use `cover`.
pub fn select_subsets(
    pop: &PopInstance,
    cover: &CliqueCover,
    cfg: &SublevelConfig,
    aux: &HeuristicInput,
) -> Result<SubsetPlan> {
    let work = working_cover(pop, cover, cfg.mode);
    let mut cfg = cfg.clone();
    if cfg.heuristic == Heuristic::ProblemSpecific && pop.encoder.is_none() {
        cfg.heuristic = Heuristic::H2;
    }
    if cfg.heuristic.needs_moments() && aux.moments.is_none() {
        return Err(Error::Config(format!("heuristic {} needs first-order moment matrices", cfg.heuristic)));
    }
    if cfg.heuristic.needs_laplacian() && aux.laplacian.is_none() {
        return Err(Error::Config(format!("heuristic {} needs a Laplacian matrix", cfg.heuristic)));
    }
    let scorer = WindowScorer {
        cfg: &cfg,
        aux,
        counts_cover: cover,
    };
    let mut plan = SubsetPlan::empty();
    for (o, owner) in owners(pop).iter().enumerate() {
        let (level, depth) = (cfg.level.get(o), cfg.depth.get(o));
        if level == 0 || depth == 0 || owner.rule == SubsetRule::Skip || owner.vars.is_empty() {
            continue;
        }
        if cfg.heuristic == Heuristic::ProblemSpecific {
            rule_entries(&mut plan, o, owner, &work, level, depth)?;
            continue;
        }
        for k in work.containing(&owner.vars) {
            let clique = &work.cliques()[k];
            let Some((l, q)) = SublevelConfig::effective(level, depth, clique.len()) else {
                continue;
            };
            let subsets = scorer.pick(o, k, clique, l, q)?;
            plan.entries.push(PlanEntry {
                owner: o,
                clique: k,
                subsets,
            });
        }
    }
    Ok(plan)
}

fn push_unique(v: &mut Vec<Vec<usize>>, s: Vec<usize>) {
    if !s.is_empty() && !v.contains(&s) {
        v.push(s);
    }
}

fn rule_entries(
    plan: &mut SubsetPlan,
    o: usize,
    owner: &Owner,
    work: &CliqueCover,
    level: usize,
    depth: usize,
) -> Result<()> {
    match &owner.rule {
        SubsetRule::Skip => {}
        SubsetRule::Ordered | SubsetRule::Anchored { .. } => {
            let mut need = owner.vars.clone();
            if let SubsetRule::Anchored { var } = owner.rule {
                if !need.contains(&var) {
                    need.push(var);
                    need.sort_unstable();
                }
            }
            for k in work.containing(&need) {
                let clique = &work.cliques()[k];
                let Some((l, q)) = SublevelConfig::effective(level, depth, clique.len()) else {
                    continue;
                };
                let mut subsets = Vec::new();
                for t in 1..=q.min(clique.len()) {
                    let s = if l == clique.len() {
                        clique.clone()
                    } else {
                        match owner.rule {
                            SubsetRule::Anchored { var } => {
                                let pos = clique.iter().position(|&v| v == var).expect("anchor in clique");
                                anchored_walk(clique, pos, l, t)
                            }
                            _ => cyclic_window(clique, t - 1, l),
                        }
                    };
                    push_unique(&mut subsets, s);
                }
                plan.entries.push(PlanEntry {
                    owner: o,
                    clique: k,
                    subsets,
                });
            }
        }
        SubsetRule::Mixed { parts } => {
            let mut by_clique: Vec<PlanEntry> = Vec::new();
            for t in 1..=depth {
                let mut s: Vec<usize> = parts.iter().flat_map(|p| p.members(level, t)).collect();
                s.sort_unstable();
                s.dedup();
                if s.is_empty() {
                    continue;
                }
                let mut need = s.clone();
                need.extend(&owner.vars);
                need.sort_unstable();
                need.dedup();
                let k = *work.containing(&need).first().ok_or_else(|| {
                    Error::Structural(format!("no clique contains the subset {s:?} of owner {o}"))
                })?;
                match by_clique.iter_mut().find(|e| e.clique == k) {
                    Some(e) => push_unique(&mut e.subsets, s),
                    None => by_clique.push(PlanEntry {
                        owner: o,
                        clique: k,
                        subsets: vec![s],
                    }),
                }
            }
            plan.entries.extend(by_clique);
        }
    }
    Ok(())
}

/// Checks that every subset is sorted and lies in its clique.
pub fn check_plan(plan: &SubsetPlan, work: &CliqueCover, nowners: usize) -> Result<()> {
    for e in &plan.entries {
        if e.owner >= nowners {
            return Err(Error::Structural(format!("plan refers to owner {}", e.owner)));
        }
        let clique = work
            .cliques()
            .get(e.clique)
            .ok_or_else(|| Error::Structural(format!("plan refers to clique {}", e.clique)))?;
        for s in &e.subsets {
            if !s.windows(2).all(|w| w[0] < w[1]) || !is_subset_sorted(s, clique) {
                return Err(Error::Structural(format!("subset {s:?} is not inside clique {clique:?}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Polynomial, Sense, VarDomain};

    fn pm1_pop(n: usize) -> PopInstance {
        let mut pop = PopInstance::new("pm1", n, Sense::Max, Polynomial::zero(n));
        pop.domains = vec![VarDomain::PlusMinusOne; n];
        pop
    }

    #[test]
    fn ordered_windows() {
        let pop = pm1_pop(6);
        let cover = CliqueCover::dense(6);
        let cfg = SublevelConfig::new(1, 4, 2).with_mode(Mode::Dense);
        let plan = select_subsets(&pop, &cover, &cfg, &HeuristicInput::default()).unwrap();
        assert_eq!(plan.entries.len(), 6);
        assert_eq!(plan.entries[0].subsets, vec![vec![0, 1, 2, 3], vec![1, 2, 3, 4]]);
        assert_eq!(plan.distinct_subsets().len(), 2);
    }

    #[test]
    fn ordered_windows_wrap() {
        let pop = pm1_pop(5);
        let cfg = SublevelConfig::new(1, 4, 5).with_mode(Mode::Dense);
        let plan = select_subsets(&pop, &CliqueCover::dense(5), &cfg, &HeuristicInput::default()).unwrap();
        assert_eq!(plan.entries[0].subsets[4], vec![0, 1, 2, 4]);
    }

    #[test]
    fn random_windows_are_seeded_and_nested() {
        let pop = pm1_pop(9);
        let cover = CliqueCover::dense(9);
        let aux = HeuristicInput::default();
        let cfg = |q| {
            SublevelConfig::new(1, 3, q)
                .with_mode(Mode::Dense)
                .with_heuristic(Heuristic::H1)
                .with_seed(7)
        };
        let a = select_subsets(&pop, &cover, &cfg(3), &aux).unwrap();
        let b = select_subsets(&pop, &cover, &cfg(3), &aux).unwrap();
        assert_eq!(a, b);
        let c = select_subsets(&pop, &cover, &cfg(4), &aux).unwrap();
        for (x, y) in a.entries.iter().zip(&c.entries) {
            assert_eq!(x.subsets[..], y.subsets[..3]);
        }
        let d = select_subsets(&pop, &cover, &cfg(3).with_seed(8), &aux).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn missing_aux_is_a_config_error() {
        let pop = pm1_pop(4);
        let cover = CliqueCover::dense(4);
        for h in [Heuristic::H3, Heuristic::H4, Heuristic::H35, Heuristic::H45] {
            let cfg = SublevelConfig::new(1, 2, 1).with_heuristic(h);
            let err = select_subsets(&pop, &cover, &cfg, &HeuristicInput::default()).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{h}");
        }
    }

    #[test]
    fn laplacian_ranking_prefers_heavy_windows() {
        let pop = pm1_pop(4);
        let mut l = DMatrix::zeros(4, 4);
        l[(2, 3)] = -5.0;
        l[(3, 2)] = -5.0;
        l[(2, 2)] = 5.0;
        l[(3, 3)] = 5.0;
        let aux = HeuristicInput {
            moments: None,
            laplacian: Some(l),
        };
        let cfg = SublevelConfig::new(1, 2, 1)
            .with_mode(Mode::Dense)
            .with_heuristic(Heuristic::H4);
        let plan = select_subsets(&pop, &CliqueCover::dense(4), &cfg, &aux).unwrap();
        assert_eq!(plan.entries[0].subsets, vec![vec![2, 3]]);
    }

    #[test]
    fn containment_counts_order_h5_h6() {
        let pop = pm1_pop(5);
        let cover = CliqueCover::from_cliques(5, vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4]]).unwrap();
        let base = SublevelConfig::new(1, 2, 1);
        let aux = HeuristicInput::default();
        let h5 = select_subsets(&pop, &cover, &base.clone().with_heuristic(Heuristic::H5), &aux).unwrap();
        let h6 = select_subsets(&pop, &cover, &base.with_heuristic(Heuristic::H6), &aux).unwrap();
        // {1,2} sits in two cliques, {0,1} and {0,2} in one.
        let e5 = h5.entries.iter().find(|e| e.clique == 0).unwrap();
        let e6 = h6.entries.iter().find(|e| e.clique == 0).unwrap();
        assert_eq!(e5.subsets, vec![vec![1, 2]]);
        assert_eq!(e6.subsets, vec![vec![0, 1]]);
    }

    #[test]
    fn full_level_collapses_to_the_clique() {
        let pop = pm1_pop(5);
        let cover = CliqueCover::dense(5);
        let aux = HeuristicInput::default();
        let big = select_subsets(&pop, &cover, &SublevelConfig::new(1, 9, 3), &aux).unwrap();
        let exact = select_subsets(&pop, &cover, &SublevelConfig::new(1, 5, 1), &aux).unwrap();
        assert_eq!(big, exact);
        assert_eq!(big.entries[0].subsets, vec![vec![0, 1, 2, 3, 4]]);
    }
}
