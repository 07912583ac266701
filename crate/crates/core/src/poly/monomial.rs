use std::cmp::Ordering;
use std::fmt;

/// A monomial `x^α` stored as a sparse, variable-sorted list of `(variable, power)`.
///
/// Powers are always positive; the constant monomial has no entries.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: Vec<(usize, u32)>,
    degree: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(i: usize) -> Self {
        Self {
            exps: vec![(i, 1)],
            degree: 1,
        }
    }

    /// Builds a monomial from arbitrary `(variable, power)` pairs. Repeated variables
    /// are merged and zero powers dropped.
    pub fn from_pairs<I: IntoIterator<Item = (usize, u32)>>(pairs: I) -> Self {
        let mut exps: Vec<(usize, u32)> = pairs.into_iter().filter(|&(_, p)| p > 0).collect();
        exps.sort_unstable_by_key(|&(v, _)| v);
        let mut merged: Vec<(usize, u32)> = Vec::with_capacity(exps.len());
        for (v, p) in exps {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        let degree = merged.iter().map(|&(_, p)| p).sum();
        Self { exps: merged, degree }
    }

    /// Dense exponent vector of length `nvars`.
    pub fn from_dense(exps: &[u32]) -> Self {
        Self::from_pairs(exps.iter().enumerate().map(|(i, &p)| (i, p)))
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[(usize, u32)] {
        &self.exps
    }

    pub fn power_of(&self, var: usize) -> u32 {
        self.exps
            .binary_search_by_key(&var, |&(v, _)| v)
            .map(|k| self.exps[k].1)
            .unwrap_or(0)
    }

    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().map(|&(v, _)| v)
    }

    /// Largest variable index plus one (0 for the constant).
    pub fn span(&self) -> usize {
        self.exps.last().map_or(0, |&(v, _)| v + 1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut a, mut b) = (0, 0);
        while a < self.exps.len() && b < other.exps.len() {
            let (va, pa) = self.exps[a];
            let (vb, pb) = other.exps[b];
            match va.cmp(&vb) {
                Ordering::Less => {
                    exps.push((va, pa));
                    a += 1;
                }
                Ordering::Greater => {
                    exps.push((vb, pb));
                    b += 1;
                }
                Ordering::Equal => {
                    exps.push((va, pa + pb));
                    a += 1;
                    b += 1;
                }
            }
        }
        exps.extend_from_slice(&self.exps[a..]);
        exps.extend_from_slice(&other.exps[b..]);
        Monomial {
            exps,
            degree: self.degree + other.degree,
        }
    }

    /// Rewrites every power with `f(var, power)`; zero results drop the variable.
    pub(crate) fn map_powers(&self, mut f: impl FnMut(usize, u32) -> u32) -> Monomial {
        Monomial::from_pairs(self.exps.iter().map(|&(v, p)| (v, f(v, p))))
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.exps
            .iter()
            .map(|&(v, p)| x[v].powi(p as i32))
            .product()
    }
}

impl Ord for Monomial {
    /// Graded order: lower degree first; within a degree, the monomial with the larger
    /// power on the lowest differing variable comes first (so `x0 < x1`, `x0² < x0x1 < x1²`).
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| {
            for (&(va, pa), &(vb, pb)) in self.exps.iter().zip(other.exps.iter()) {
                if va != vb {
                    return va.cmp(&vb);
                }
                if pa != pb {
                    return pb.cmp(&pa);
                }
            }
            self.exps.len().cmp(&other.exps.len())
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        for (k, &(v, p)) in self.exps.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if p == 1 {
                write!(f, "x{v}")?;
            } else {
                write!(f, "x{v}^{p}")?;
            }
        }
        Ok(())
    }
}

/// All monomials in `vars` of total degree at most `d`, in canonical order.
///
/// No reduction rule is applied; the length is always `C(|vars| + d, d)`.
pub fn monomial_basis(vars: &[usize], d: u32) -> Vec<Monomial> {
    let mut sorted = vars.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = vec![Monomial::one()];
    // Degree-k monomials are multisets of size k; grow them by appending variables
    // no smaller than the last one used.
    let mut frontier: Vec<(Monomial, usize)> = vec![(Monomial::one(), 0)];
    for _ in 0..d {
        let mut next = Vec::new();
        for (m, start) in &frontier {
            for (pos, &v) in sorted.iter().enumerate().skip(*start) {
                next.push((m.mul(&Monomial::var(v)), pos));
            }
        }
        out.extend(next.iter().map(|(m, _)| m.clone()));
        frontier = next;
    }
    out.sort();
    out
}

/// Binomial coefficient as `usize`; panics on overflow.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(acc).expect("binomial overflow")
}
