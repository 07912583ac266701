use std::collections::BTreeMap;
use std::fmt;

use super::Monomial;
use crate::error::{Error, Result};

/// Coefficients smaller than this in magnitude are dropped after arithmetic.
pub const COEFF_EPS: f64 = 1e-12;

/// Sparse multivariate polynomial with `f64` coefficients over `nvars` variables.
#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, f64>,
    nvars: usize,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self {
            terms: BTreeMap::new(),
            nvars,
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(i), 1.0);
        p
    }

    /// Builds from `(coefficient, monomial)` terms; checks variable bounds.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, Monomial)>,
    {
        let mut p = Self::zero(nvars);
        for (c, m) in terms {
            if m.span() > nvars {
                return Err(Error::Dimension(format!(
                    "monomial {m} references a variable outside 0..{nvars}"
                )));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Adds `c * m` in place.
    pub fn add_term(&mut self, m: Monomial, c: f64) {
        debug_assert!(m.span() <= self.nvars);
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                if c.abs() >= COEFF_EPS {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().abs() < COEFF_EPS {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical monomial order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn support(&self) -> Vec<Monomial> {
        self.terms.keys().cloned().collect()
    }

    pub fn coeff(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Sorted, deduplicated variable indices appearing in the polynomial.
    pub fn variables(&self) -> Vec<usize> {
        let mut vars: Vec<usize> = self.terms.keys().flat_map(|m| m.variables()).collect();
        vars.sort_unstable();
        vars.dedup();
        vars
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.evaluate(x)).sum()
    }

    fn check_nvars(&self, other: &Polynomial) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension(format!(
                "polynomials over {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), s * c);
        }
        out
    }

    /// Exact distributive product.
    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_nvars(other)?;
        let mut acc: BTreeMap<Monomial, f64> = BTreeMap::new();
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                *acc.entry(ma.mul(mb)).or_insert(0.0) += ca * cb;
            }
        }
        acc.retain(|_, c| c.abs() >= COEFF_EPS);
        Ok(Polynomial {
            terms: acc,
            nvars: self.nvars,
        })
    }

    /// Multiplies every term by a monomial.
    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(k, &c)| (k.mul(m), c)).collect(),
            nvars: self.nvars,
        }
    }

    /// Re-embeds the polynomial in a space with more variables.
    pub fn with_nvars(&self, nvars: usize) -> Result<Polynomial> {
        if self.terms.keys().any(|m| m.span() > nvars) {
            return Err(Error::Dimension(format!(
                "cannot embed polynomial in {nvars} variables"
            )));
        }
        Ok(Polynomial {
            terms: self.terms.clone(),
            nvars,
        })
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(i: usize) -> Polynomial {
        Polynomial::var(3, i)
    }

    #[test]
    fn difference_of_squares() {
        let a = x(0).add(&x(1)).unwrap();
        let b = x(0).sub(&x(1)).unwrap();
        let p = a.mul(&b).unwrap();
        let mut expected = Polynomial::zero(3);
        expected.add_term(Monomial::from_pairs([(0, 2)]), 1.0);
        expected.add_term(Monomial::from_pairs([(1, 2)]), -1.0);
        assert_eq!(p, expected);
    }

    #[test]
    fn monomial_product() {
        let a = Polynomial::from_terms(3, [(2.0, Monomial::from_pairs([(0, 1), (1, 1)]))]).unwrap();
        let b = Polynomial::from_terms(3, [(3.0, Monomial::var(0))]).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&Monomial::from_pairs([(0, 2), (1, 1)])), 6.0);
    }

    #[test]
    fn mismatched_nvars_is_error() {
        let a = Polynomial::var(2, 0);
        let b = Polynomial::var(3, 0);
        assert!(matches!(a.mul(&b), Err(Error::Dimension(_))));
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = x(0).sub(&x(0)).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn out_of_range_variable_rejected() {
        assert!(Polynomial::from_terms(2, [(1.0, Monomial::var(2))]).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(
            (-5i32..=5, prop::collection::vec(0u32..3, 4)),
            0..20,
        )
        .prop_map(|terms| {
            let mut p = Polynomial::zero(4);
            for (c, e) in terms {
                p.add_term(Monomial::from_dense(&e), c as f64);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn identity_product(p in arb_poly()) {
            let one = Polynomial::constant(4, 1.0);
            prop_assert_eq!(one.mul(&p).unwrap(), p);
        }

        #[test]
        fn distributive(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
            let lhs = p.add(&q).unwrap().mul(&r).unwrap();
            let rhs = p.mul(&r).unwrap().add(&q.mul(&r).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
