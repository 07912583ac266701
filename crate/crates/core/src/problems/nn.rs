use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Constraint, Monomial, Polynomial, PopInstance, Sense, VarDomain};
use crate::sublevel::{PartSize, RulePart, SubsetRule};

/// One-hidden-layer ReLU network `x ↦ cᵀ ReLU(Ax + b)` with an input box
/// `‖x - x̄‖∞ ≤ ε`. `a` holds the `p2` rows of `A`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NNInstance {
    pub p1: usize,
    pub p2: usize,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub xbar: Vec<f64>,
    pub eps: f64,
}

impl NNInstance {
    pub fn validate(&self) -> Result<()> {
        if self.p1 == 0 || self.p2 == 0 {
            return Err(Error::Invalid("network needs p1 >= 1 and p2 >= 1".into()));
        }
        if self.a.len() != self.p2 || self.a.iter().any(|r| r.len() != self.p1) {
            return Err(Error::Dimension(format!("A must be {}x{}", self.p2, self.p1)));
        }
        if self.b.len() != self.p2 || self.c.len() != self.p2 || self.xbar.len() != self.p1 {
            return Err(Error::Dimension("b, c or xbar has the wrong length".into()));
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return Err(Error::Invalid(format!("eps = {}", self.eps)));
        }
        Ok(())
    }

    pub fn a_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.p2, self.p1, |j, k| self.a[j][k])
    }

    /// `cᵀ ReLU(Ax + b)`.
    pub fn forward(&self, x: &[f64]) -> f64 {
        (0..self.p2)
            .map(|j| {
                let pre: f64 = self.a[j].iter().zip(x).map(|(a, x)| a * x).sum::<f64>() + self.b[j];
                self.c[j] * pre.max(0.0)
            })
            .sum()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("json")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let nn: Self = serde_json::from_str(s)?;
        nn.validate()?;
        Ok(nn)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

/// `A ~ N(0, 1)/√p1`, `b, c ~ N(0, 1)`, `x̄ = 0`, `ε = 0.1`, drawn in that order
/// (A row by row) from ChaCha8 seeded with `seed`.
pub fn gen_random_nn(p1: usize, p2: usize, seed: u64) -> Result<NNInstance> {
    if p1 == 0 || p2 == 0 {
        return Err(Error::Invalid("network needs p1 >= 1 and p2 >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let scale = 1.0 / (p1 as f64).sqrt();
    let a = (0..p2).map(|_| (0..p1).map(|_| draw() * scale).collect()).collect();
    let b = (0..p2).map(|_| draw()).collect();
    let c = (0..p2).map(|_| draw()).collect();
    Ok(NNInstance {
        p1,
        p2,
        a,
        b,
        c,
        xbar: vec![0.0; p1],
        eps: 0.1,
    })
}

fn affine(nn: &NNInstance, nvars: usize, j: usize) -> Polynomial {
    let mut p = Polynomial::constant(nvars, nn.b[j]);
    for k in 0..nn.p1 {
        p.add_term(Monomial::var(k), nn.a[j][k]);
    }
    p
}

/// `ε² - (x_k - x̄_k)² ≥ 0`
fn input_ball(nn: &NNInstance, nvars: usize, k: usize) -> Polynomial {
    let mut p = Polynomial::constant(nvars, nn.eps * nn.eps - nn.xbar[k] * nn.xbar[k]);
    p.add_term(Monomial::from_pairs([(k, 2)]), -1.0);
    p.add_term(Monomial::var(k), 2.0 * nn.xbar[k]);
    p
}

/// Lipschitz constant of the network over the input box with respect to `‖·‖∞`:
/// `max tᵀAᵀdiag(u)c` over `t ∈ [-1, 1]^p1` and activation indicators `u` consistent
/// with some input. Variables are `x` (p1), `u` (p2), `t` (p1), in that order.
pub fn encode_lipschitz(nn: &NNInstance) -> Result<PopInstance> {
    nn.validate()?;
    let (p1, p2) = (nn.p1, nn.p2);
    let n = 2 * p1 + p2;
    let xs: Vec<usize> = (0..p1).collect();
    let us: Vec<usize> = (p1..p1 + p2).collect();
    let t = |k: usize| p1 + p2 + k;
    let mut f = Polynomial::zero(n);
    for k in 0..p1 {
        for j in 0..p2 {
            f.add_term(Monomial::from_pairs([(us[j], 1), (t(k), 1)]), nn.a[j][k] * nn.c[j]);
        }
    }
    let mut pop = PopInstance::new(format!("lip_{p1}_{p2}"), n, Sense::Max, f);
    for j in 0..p2 {
        let mut half = Polynomial::var(n, us[j]);
        half.add_term(Monomial::one(), -0.5);
        let g = half.mul(&affine(nn, n, j))?;
        pop.push(Constraint::ge(g).with_rule(SubsetRule::Mixed {
            parts: vec![
                RulePart::new(xs.clone(), None, PartSize::HalfDown),
                RulePart::new(us.clone(), Some(us[j]), PartSize::HalfUp),
            ],
        }));
    }
    for k in 0..p1 {
        let mut g = Polynomial::constant(n, 1.0);
        g.add_term(Monomial::from_pairs([(t(k), 2)]), -1.0);
        pop.push(Constraint::ge(g).with_rule(SubsetRule::Mixed {
            parts: vec![
                RulePart::new(us.clone(), None, PartSize::LevelMinusOne),
                RulePart::new(vec![t(k)], None, PartSize::One),
            ],
        }));
    }
    for k in 0..p1 {
        pop.push(Constraint::ge(input_ball(nn, n, k)).with_rule(SubsetRule::Mixed {
            parts: vec![
                RulePart::new(xs.clone(), Some(k), PartSize::HalfUp),
                RulePart::new(us.clone(), None, PartSize::HalfDown),
            ],
        }));
    }
    for &u in &us {
        pop.domains[u] = VarDomain::Binary;
        pop.domain_rules.insert(u, SubsetRule::Skip);
    }
    let mut cliques = vec![[xs.clone(), us.clone()].concat()];
    for k in 0..p1 {
        cliques.push([us.clone(), vec![t(k)]].concat());
    }
    pop.cliques = Some(cliques);
    let mut scales = input_scales(nn);
    scales.resize(n, 1.0);
    pop.scales = Some(scales);
    pop.encoder = Some("lip".into());
    Ok(pop)
}

/// Largest network output over the input box, `max cᵀu` with `u = ReLU(Ax + b)`
/// written as `u ≥ 0`, `u ≥ Ax + b`, `u(u - Ax - b) = 0`. Variables are `x` then `u`.
pub fn encode_cert(nn: &NNInstance) -> Result<PopInstance> {
    nn.validate()?;
    let (p1, p2) = (nn.p1, nn.p2);
    let n = p1 + p2;
    let xs: Vec<usize> = (0..p1).collect();
    let u = |j: usize| p1 + j;
    let mut f = Polynomial::zero(n);
    for j in 0..p2 {
        f.add_term(Monomial::var(u(j)), nn.c[j]);
    }
    let mut pop = PopInstance::new(format!("cert_{p1}_{p2}"), n, Sense::Max, f);
    let rule_for = |j: usize| SubsetRule::Mixed {
        parts: vec![
            RulePart::new(xs.clone(), None, PartSize::LevelMinusOne),
            RulePart::new(vec![u(j)], None, PartSize::One),
        ],
    };
    for j in 0..p2 {
        let slack = Polynomial::var(n, u(j)).sub(&affine(nn, n, j))?;
        let comp = Polynomial::var(n, u(j)).mul(&slack)?;
        pop.push(Constraint::eq(comp).with_rule(rule_for(j)));
        pop.push(Constraint::ge(slack).with_rule(rule_for(j)));
        pop.push(Constraint::ge(Polynomial::var(n, u(j))).with_rule(rule_for(j)));
    }
    for k in 0..p1 {
        pop.push(Constraint::ge(input_ball(nn, n, k)).with_rule(SubsetRule::Mixed {
            parts: vec![
                RulePart::new(xs.clone(), Some(k), PartSize::LevelMinusOne),
                RulePart::new(vec![u(k % p2)], None, PartSize::One),
            ],
        }));
    }
    pop.cliques = Some((0..p2).map(|j| [xs.clone(), vec![u(j)]].concat()).collect());
    let mut scales = input_scales(nn);
    scales.extend((0..p2).map(|j| {
        let centre: f64 = nn.b[j] + nn.a[j].iter().zip(&nn.xbar).map(|(a, x)| a * x).sum::<f64>();
        let reach = centre.abs() + nn.eps * nn.a[j].iter().map(|a| a.abs()).sum::<f64>();
        if reach > 0.0 { reach } else { 1.0 }
    }));
    pop.scales = Some(scales);
    pop.encoder = Some("cert".into());
    Ok(pop)
}

/// `|x̄_k| + ε` per input, or 1 for a degenerate box at the origin.
fn input_scales(nn: &NNInstance) -> Vec<f64> {
    nn.xbar
        .iter()
        .map(|x| if x.abs() + nn.eps > 0.0 { x.abs() + nn.eps } else { 1.0 })
        .collect()
}

/// Vertices of `{x : lo ≤ x ≤ hi, s_j (A_j x + b_j) ≥ 0}` where `s_j = +1` for active
/// units and `-1` otherwise.
fn pattern_vertices(nn: &NNInstance, active: &[bool]) -> Vec<DVector<f64>> {
    let p1 = nn.p1;
    let lo: Vec<f64> = nn.xbar.iter().map(|v| v - nn.eps).collect();
    let hi: Vec<f64> = nn.xbar.iter().map(|v| v + nn.eps).collect();
    // rows r·x ≤ h
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for k in 0..p1 {
        let mut e = vec![0.0; p1];
        e[k] = 1.0;
        rows.push((e.clone(), hi[k]));
        e[k] = -1.0;
        rows.push((e, -lo[k]));
    }
    for j in 0..nn.p2 {
        let s = if active[j] { -1.0 } else { 1.0 };
        rows.push((nn.a[j].iter().map(|a| s * a).collect(), -s * nn.b[j]));
    }
    let mut out = Vec::new();
    let m = rows.len();
    let mut pick: Vec<usize> = (0..p1).collect();
    loop {
        let mat = DMatrix::from_fn(p1, p1, |r, c| rows[pick[r]].0[c]);
        let rhs = DVector::from_fn(p1, |r, _| rows[pick[r]].1);
        if let Some(x) = mat.lu().solve(&rhs) {
            let ok = rows.iter().all(|(r, h)| r.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>() <= h + 1e-9);
            if ok && x.iter().all(|v| v.is_finite()) {
                out.push(x);
            }
        }
        // next combination
        let mut i = p1;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < m - p1 + i {
                pick[i] += 1;
                for t in i + 1..p1 {
                    pick[t] = pick[t - 1] + 1;
                }
                break;
            }
        }
    }
}

fn patterns(p2: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << p2).map(move |mask| (0..p2).map(|j| mask >> j & 1 == 1).collect())
}

/// Exact optimum of [`encode_lipschitz`] by enumerating activation patterns and the
/// vertices of their input polytopes. Meant for `p1 ≤ 3`, `p2 ≤ 10`.
pub fn lipschitz_optimum(nn: &NNInstance) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for act in patterns(nn.p2) {
        if pattern_vertices(nn, &act).is_empty() {
            continue;
        }
        let grad: f64 = (0..nn.p1)
            .map(|k| {
                (0..nn.p2)
                    .filter(|&j| act[j])
                    .map(|j| nn.a[j][k] * nn.c[j])
                    .sum::<f64>()
                    .abs()
            })
            .sum();
        best = best.max(grad);
    }
    best
}

/// Exact optimum of [`encode_cert`]: the largest network output over the input box.
pub fn cert_optimum(nn: &NNInstance) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for act in patterns(nn.p2) {
        for x in pattern_vertices(nn, &act) {
            best = best.max(nn.forward(x.as_slice()));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(c: f64) -> NNInstance {
        NNInstance {
            p1: 1,
            p2: 1,
            a: vec![vec![1.0]],
            b: vec![0.0],
            c: vec![c],
            xbar: vec![0.0],
            eps: 0.1,
        }
    }

    #[test]
    fn one_unit_values() {
        let nn = unit(1.0);
        assert_eq!(lipschitz_optimum(&nn), 1.0);
        assert!((cert_optimum(&nn) - 0.1).abs() < 1e-15);
        assert_eq!(cert_optimum(&unit(-1.0)), 0.0);
        let lip = encode_lipschitz(&nn).unwrap();
        // x, u, t
        assert_eq!(lip.value(&[0.05, 1.0, 1.0]), 1.0);
        assert!(lip.is_feasible(&[0.05, 1.0, 1.0], 1e-12));
        assert!(!lip.is_feasible(&[-0.05, 1.0, 1.0], 1e-12));
        let cert = encode_cert(&nn).unwrap();
        assert!(cert.is_feasible(&[0.1, 0.1], 1e-12));
        assert!(!cert.is_feasible(&[0.1, 0.05], 1e-12));
        assert!((cert.value(&[0.1, 0.1]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn generator_shapes_and_errors() {
        let nn = gen_random_nn(3, 5, 1).unwrap();
        nn.validate().unwrap();
        assert_eq!(nn.a_matrix().shape(), (5, 3));
        assert!(gen_random_nn(3, 0, 1).is_err());
        assert_eq!(gen_random_nn(3, 5, 1).unwrap(), nn);
        assert_ne!(gen_random_nn(3, 5, 2).unwrap(), nn);
    }

    #[test]
    fn encoders_use_fixed_cliques() {
        let nn = gen_random_nn(3, 4, 7).unwrap();
        let lip = encode_lipschitz(&nn).unwrap();
        let cover = crate::sparsity::clique_cover(&lip).unwrap();
        assert_eq!(cover.len(), 4);
        assert_eq!(cover.cliques()[0], vec![0, 1, 2, 3, 4, 5, 6]);
        let cert = encode_cert(&nn).unwrap();
        assert_eq!(crate::sparsity::clique_cover(&cert).unwrap().cliques()[2], vec![0, 1, 2, 5]);
    }

    #[test]
    fn oracles_agree_with_sampling() {
        use rand::Rng;
        let nn = gen_random_nn(2, 3, 11).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut best = f64::NEG_INFINITY;
        for _ in 0..20000 {
            let x: Vec<f64> = (0..2).map(|k| nn.xbar[k] + rng.random_range(-nn.eps..=nn.eps)).collect();
            best = best.max(nn.forward(&x));
        }
        let exact = cert_optimum(&nn);
        assert!(exact >= best - 1e-12 && exact - best < 1e-2, "{exact} {best}");
    }
}
