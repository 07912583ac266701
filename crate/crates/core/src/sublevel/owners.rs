use crate::poly::{Monomial, Polynomial, PopInstance, Relation, VarDomain};

use super::SubsetRule;

/// Where a sublevel owner comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OwnerSource {
    /// Explicit constraint `i` of the instance.
    Constraint(usize),
    /// Domain of variable `v` (a box, or a ±1 / binary domain).
    Domain(usize),
}

/// A constraint that receives localizing and sublevel blocks. Discrete domains are
/// absorbed by the reduction rule and carry no polynomial; they still own subsets.
#[derive(Clone, Debug, PartialEq)]
pub struct Owner {
    pub source: OwnerSource,
    pub poly: Option<Polynomial>,
    pub rel: Relation,
    pub vars: Vec<usize>,
    pub rule: SubsetRule,
}

impl Owner {
    /// `⌈deg g / 2⌉`, zero for polynomial-free owners.
    pub fn omega(&self) -> u32 {
        self.poly.as_ref().map_or(0, |p| p.degree().div_ceil(2))
    }
}

/// Explicit constraints first, then box domains as `(x - lo)(hi - x) >= 0`, then the
/// discrete domains.
pub fn owners(pop: &PopInstance) -> Vec<Owner> {
    let n = pop.nvars;
    let mut out: Vec<Owner> = pop
        .constraints
        .iter()
        .enumerate()
        .map(|(i, c)| Owner {
            source: OwnerSource::Constraint(i),
            poly: Some(c.poly.clone()),
            rel: c.rel,
            vars: c.poly.variables(),
            rule: c.rule.clone(),
        })
        .collect();
    for (v, d) in pop.domains.iter().enumerate() {
        if let VarDomain::Box { lo, hi } = *d {
            let mut g = Polynomial::zero(n);
            g.add_term(Monomial::from_pairs([(v, 2)]), -1.0);
            g.add_term(Monomial::var(v), lo + hi);
            g.add_term(Monomial::one(), -lo * hi);
            out.push(Owner {
                source: OwnerSource::Domain(v),
                vars: vec![v],
                poly: Some(g),
                rel: Relation::Ge,
                rule: pop.domain_rule(v),
            });
        }
    }
    for (v, d) in pop.domains.iter().enumerate() {
        if d.is_discrete() {
            out.push(Owner {
                source: OwnerSource::Domain(v),
                poly: None,
                rel: Relation::Ge,
                vars: vec![v],
                rule: pop.domain_rule(v),
            });
        }
    }
    out
}
