use crate::poly::{Constraint, Monomial, Polynomial, PopInstance, Sense};
use crate::sublevel::SubsetRule;

use super::graph::GraphInstance;

/// Motzkin–Straus program `max xᵀAx` over the unit simplex, with the box written as
/// `x_i - x_i² ≥ 0`. The simplex couples every variable, so the only clique is the
/// whole variable set.
pub fn encode_maxclique(g: &GraphInstance) -> PopInstance {
    let n = g.n;
    let mut f = Polynomial::zero(n);
    for &(i, j, _) in &g.edges {
        f.add_term(Monomial::from_pairs([(i, 1), (j, 1)]), 2.0);
    }
    let mut pop = PopInstance::new(g.name.clone(), n, Sense::Max, f);
    let mut simplex = Polynomial::constant(n, -1.0);
    for i in 0..n {
        simplex.add_term(Monomial::var(i), 1.0);
    }
    pop.push(Constraint::eq(simplex));
    for i in 0..n {
        let mut b = Polynomial::var(n, i);
        b.add_term(Monomial::from_pairs([(i, 2)]), -1.0);
        pop.push(Constraint::ge(b).with_rule(SubsetRule::Anchored { var: i }));
    }
    pop.encoder = Some("maxclique".into());
    pop
}

/// Size of a largest clique (exhaustive search with pruning).
pub fn clique_number(g: &GraphInstance) -> usize {
    let n = g.n;
    let mut adj = vec![0u128; n];
    assert!(n <= 128, "clique_number supports at most 128 vertices");
    for &(i, j, _) in &g.edges {
        adj[i] |= 1 << j;
        adj[j] |= 1 << i;
    }
    fn grow(adj: &[u128], size: usize, cand: u128, best: &mut usize) {
        if cand == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + cand.count_ones() as usize <= *best {
            return;
        }
        let mut rest = cand;
        while rest != 0 {
            if size + rest.count_ones() as usize <= *best {
                return;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= !(1 << v);
            grow(adj, size + 1, rest & adj[v], best);
        }
    }
    let mut best = 0;
    let all = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    grow(&adj, 0, all, &mut best);
    best
}

/// Optimum of the Motzkin–Straus program: `1 - 1/ω`.
pub fn maxclique_optimum(g: &GraphInstance) -> f64 {
    let w = clique_number(g);
    if w == 0 {
        0.0
    } else {
        1.0 - 1.0 / w as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graph_optima() {
        let k2 = GraphInstance::complete(2);
        assert_eq!(maxclique_optimum(&k2), 0.5);
        let pop = encode_maxclique(&k2);
        assert_eq!(pop.value(&[0.5, 0.5]), 0.5);
        assert!(pop.is_feasible(&[0.5, 0.5], 1e-12));
        let k3 = GraphInstance::complete(3);
        assert!((maxclique_optimum(&k3) - 2.0 / 3.0).abs() < 1e-15);
        let t = 1.0 / 3.0;
        assert!((encode_maxclique(&k3).value(&[t, t, t]) - 2.0 / 3.0).abs() < 1e-15);
        let single = GraphInstance::new("v", 1, []).unwrap();
        assert_eq!(maxclique_optimum(&single), 0.0);
    }

    #[test]
    fn clique_number_examples() {
        assert_eq!(clique_number(&GraphInstance::cycle(5)), 2);
        assert_eq!(clique_number(&GraphInstance::complete(6)), 6);
        let mut edges: Vec<(usize, usize, f64)> = GraphInstance::complete(4).edges;
        edges.push((3, 4, 1.0));
        edges.push((4, 5, 1.0));
        assert_eq!(clique_number(&GraphInstance::new("g", 6, edges).unwrap()), 4);
    }

    #[test]
    fn simplex_is_dense() {
        let pop = encode_maxclique(&GraphInstance::cycle(6));
        let cover = crate::sparsity::clique_cover(&pop).unwrap();
        assert_eq!(cover.cliques(), &[vec![0, 1, 2, 3, 4, 5]]);
    }
}
