use std::collections::HashMap;

use super::Monomial;

/// Per-variable power reduction applied before a monomial is given a moment index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum VarReduction {
    #[default]
    None,
    /// `x² = 1`, i.e. `x ∈ {-1, 1}`.
    Involutory,
    /// `x² = x`, i.e. `x ∈ {0, 1}`.
    Idempotent,
}

impl VarReduction {
    pub fn apply(self, power: u32) -> u32 {
        match self {
            VarReduction::None => power,
            VarReduction::Involutory => power % 2,
            VarReduction::Idempotent => power.min(1),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionRule {
    kinds: Vec<VarReduction>,
}

impl ReductionRule {
    pub fn none(nvars: usize) -> Self {
        Self {
            kinds: vec![VarReduction::None; nvars],
        }
    }

    pub fn uniform(nvars: usize, kind: VarReduction) -> Self {
        Self {
            kinds: vec![kind; nvars],
        }
    }

    pub fn from_kinds(kinds: Vec<VarReduction>) -> Self {
        Self { kinds }
    }

    pub fn kind(&self, var: usize) -> VarReduction {
        self.kinds.get(var).copied().unwrap_or_default()
    }

    pub fn is_trivial(&self) -> bool {
        self.kinds.iter().all(|k| *k == VarReduction::None)
    }

    pub fn reduce(&self, m: &Monomial) -> Monomial {
        if self.is_trivial() {
            return m.clone();
        }
        m.map_powers(|v, p| self.kind(v).apply(p))
    }
}

pub fn reduce_monomial(m: &Monomial, rule: &ReductionRule) -> Monomial {
    rule.reduce(m)
}

/// Bijection between reduced monomials and dense moment indices `y_α`.
///
/// Index 0 is always the constant monomial. The dictionary grows on lookup while a
/// relaxation is being assembled and is only read afterwards.
#[derive(Clone, Debug)]
pub struct MomentDictionary {
    index: HashMap<Monomial, usize>,
    monomials: Vec<Monomial>,
    rule: ReductionRule,
}

impl PartialEq for MomentDictionary {
    fn eq(&self, other: &Self) -> bool {
        self.monomials == other.monomials && self.rule == other.rule
    }
}

impl MomentDictionary {
    pub fn new(rule: ReductionRule) -> Self {
        let mut index = HashMap::new();
        index.insert(Monomial::one(), 0);
        Self {
            index,
            monomials: vec![Monomial::one()],
            rule,
        }
    }

    pub fn rule(&self) -> &ReductionRule {
        &self.rule
    }

    /// Index of `m` after reduction, allocating a fresh one on first sight.
    pub fn riesz_index(&mut self, m: &Monomial) -> usize {
        let reduced = self.rule.reduce(m);
        if let Some(&k) = self.index.get(&reduced) {
            return k;
        }
        let k = self.monomials.len();
        self.index.insert(reduced.clone(), k);
        self.monomials.push(reduced);
        k
    }

    /// Read-only lookup (reduction applied).
    pub fn get(&self, m: &Monomial) -> Option<usize> {
        self.index.get(&self.rule.reduce(m)).copied()
    }

    pub fn monomial(&self, idx: usize) -> &Monomial {
        &self.monomials[idx]
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduction_examples() {
        let m = Monomial::from_pairs([(1, 3), (2, 2)]);
        let inv = ReductionRule::uniform(3, VarReduction::Involutory);
        let idem = ReductionRule::uniform(3, VarReduction::Idempotent);
        assert_eq!(reduce_monomial(&m, &inv), Monomial::var(1));
        assert_eq!(
            reduce_monomial(&m, &idem),
            Monomial::from_pairs([(1, 1), (2, 1)])
        );
        let m2 = Monomial::from_pairs([(1, 1), (2, 1)]);
        assert_eq!(reduce_monomial(&m2, &ReductionRule::none(3)), m2);
    }

    #[test]
    fn dictionary_examples() {
        let mut d = MomentDictionary::new(ReductionRule::uniform(4, VarReduction::Involutory));
        assert_eq!(d.riesz_index(&Monomial::one()), 0);
        let k = d.riesz_index(&Monomial::var(3));
        assert_eq!(k, 1);
        assert_eq!(d.riesz_index(&Monomial::var(3)), k);
        assert_eq!(d.riesz_index(&Monomial::from_pairs([(1, 2)])), 0);
    }

    fn arb_monomial() -> impl Strategy<Value = Monomial> {
        prop::collection::vec(0u32..6, 6).prop_map(|e| Monomial::from_dense(&e))
    }

    fn arb_rule() -> impl Strategy<Value = ReductionRule> {
        prop::collection::vec(
            prop_oneof![
                Just(VarReduction::None),
                Just(VarReduction::Involutory),
                Just(VarReduction::Idempotent)
            ],
            6,
        )
        .prop_map(ReductionRule::from_kinds)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn reduction_idempotent(m in arb_monomial(), rule in arb_rule()) {
            let once = rule.reduce(&m);
            prop_assert_eq!(rule.reduce(&once), once.clone());
            prop_assert!(once.degree() <= m.degree());
        }
    }

    #[test]
    fn dictionary_bijection_on_random_monomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for kind in [VarReduction::None, VarReduction::Involutory, VarReduction::Idempotent] {
            let mut d = MomentDictionary::new(ReductionRule::uniform(8, kind));
            let mut seen = Vec::new();
            for _ in 0..10_000 {
                let e: Vec<u32> = (0..8).map(|_| rng.random_range(0..4)).collect();
                let m = Monomial::from_dense(&e);
                let k = d.riesz_index(&m);
                seen.push((k, d.rule().reduce(&m)));
            }
            for (k, reduced) in seen {
                assert_eq!(d.monomial(k), &reduced);
                assert_eq!(d.get(&reduced), Some(k));
            }
        }
    }
}
