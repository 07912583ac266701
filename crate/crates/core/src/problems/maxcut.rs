use crate::poly::{Monomial, Polynomial, PopInstance, Sense, VarDomain};
use crate::sparsity::CliqueCover;
use crate::sublevel::{anchored_walk, PlanEntry, SubsetPlan};

use super::graph::GraphInstance;

/// Max-Cut as a ±1 program maximizing the cut weight `¼ xᵀLx = Σ w_ij (1 - x_i x_j) / 2`.
/// `x_i² = 1` is carried by the domains, and each variable anchors its own subsets.
pub fn encode_maxcut(g: &GraphInstance) -> PopInstance {
    let n = g.n;
    let mut f = Polynomial::zero(n);
    let mut total = 0.0;
    for &(i, j, w) in &g.edges {
        total += w / 2.0;
        f.add_term(Monomial::from_pairs([(i, 1), (j, 1)]), -w / 2.0);
    }
    f.add_term(Monomial::one(), total);
    let mut pop = PopInstance::new(g.name.clone(), n, Sense::Max, f);
    pop.domains = vec![VarDomain::PlusMinusOne; n];
    pop.encoder = Some("maxcut".into());
    pop
}

/// Anchored windows: for every variable `i` and clique containing it, the subsets
/// `{i, i_{j(i)+t}, ..., i_{j(i)+t+l-2}}` for `t = 1..q` (one subset, the clique, at
/// full level). Owner `i` is variable `i`.
pub fn maxcut_subsets(cover: &CliqueCover, l: usize, q: usize) -> SubsetPlan {
    let mut plan = SubsetPlan::empty();
    if l == 0 || q == 0 {
        return plan;
    }
    for i in 0..cover.nvars() {
        for k in cover.containing(&[i]) {
            let clique = &cover.cliques()[k];
            let tau = clique.len();
            let mut subsets: Vec<Vec<usize>> = Vec::new();
            if l >= tau {
                subsets.push(clique.clone());
            } else {
                let pos = clique.iter().position(|&v| v == i).expect("vertex in clique");
                for t in 1..=q.min(tau) {
                    let s = anchored_walk(clique, pos, l, t);
                    if !subsets.contains(&s) {
                        subsets.push(s);
                    }
                }
            }
            plan.entries.push(PlanEntry {
                owner: i,
                clique: k,
                subsets,
            });
        }
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sublevel::{select_subsets, Heuristic, HeuristicInput, Mode, SublevelConfig};

    #[test]
    fn cut_values() {
        let g = GraphInstance::cycle(4);
        let pop = encode_maxcut(&g);
        assert_eq!(pop.value(&[1.0, -1.0, 1.0, -1.0]), 4.0);
        assert_eq!(pop.value(&[1.0, 1.0, 1.0, 1.0]), 0.0);
        let e = GraphInstance::new("e", 2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(encode_maxcut(&e).value(&[1.0, -1.0]), 1.0);
    }

    #[test]
    fn anchored_dense_windows() {
        let plan = maxcut_subsets(&CliqueCover::dense(6), 4, 2);
        assert_eq!(plan.entries[2].subsets, vec![vec![2, 3, 4, 5], vec![0, 2, 4, 5]]);
        let single = maxcut_subsets(&CliqueCover::dense(6), 1, 3);
        assert_eq!(single.entries[2].subsets, vec![vec![2]]);
    }

    #[test]
    fn matches_problem_specific_selection() {
        let g = GraphInstance::random("r", 12, 0.3, false, 5);
        let pop = encode_maxcut(&g);
        let cover = crate::sparsity::clique_cover(&pop).unwrap();
        for (l, q) in [(2, 1), (3, 2), (4, 3), (20, 2)] {
            let cfg = SublevelConfig::new(1, l, q).with_heuristic(Heuristic::ProblemSpecific);
            let a = select_subsets(&pop, &cover, &cfg, &HeuristicInput::default()).unwrap();
            assert_eq!(a, maxcut_subsets(&cover, l, q), "l={l} q={q}");
            let dense = cfg.with_mode(Mode::Dense);
            let b = select_subsets(&pop, &cover, &dense, &HeuristicInput::default()).unwrap();
            assert_eq!(b, maxcut_subsets(&CliqueCover::dense(12), l, q));
        }
    }
}
