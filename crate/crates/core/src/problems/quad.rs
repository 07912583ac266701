use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{Constraint, Monomial, Polynomial, PopInstance, Sense, VarDomain};
use crate::sublevel::SubsetRule;

/// `opt xᵀQ₀x + b₀ᵀx` subject to `xᵀQᵢx + bᵢᵀx ≤ cᵢ`, `Ax = b` and `lo ≤ x ≤ hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadInstance {
    pub name: String,
    pub sense: Sense,
    pub q0: DMatrix<f64>,
    pub b0: DVector<f64>,
    /// Quadratic inequality constraints `(Qᵢ, bᵢ, cᵢ)`.
    pub quad: Vec<(DMatrix<f64>, DVector<f64>, f64)>,
    pub a_eq: DMatrix<f64>,
    pub b_eq: DVector<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Marks the variables restricted to `{0, 1}`.
    pub integer: Vec<bool>,
}

impl QuadInstance {
    /// Unconstrained-objective skeleton over `[0, 1]ⁿ` with no constraints.
    pub fn new(name: impl Into<String>, sense: Sense, q0: DMatrix<f64>, b0: DVector<f64>) -> Self {
        let n = b0.len();
        Self {
            name: name.into(),
            sense,
            q0,
            b0,
            quad: Vec::new(),
            a_eq: DMatrix::zeros(0, n),
            b_eq: DVector::zeros(0),
            lo: vec![0.0; n],
            hi: vec![1.0; n],
            integer: vec![false; n],
        }
    }

    pub fn nvars(&self) -> usize {
        self.b0.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nvars();
        let square = |m: &DMatrix<f64>| m.nrows() == n && m.ncols() == n;
        if !square(&self.q0) || self.quad.iter().any(|(q, b, _)| !square(q) || b.len() != n) {
            return Err(Error::Dimension(format!("quadratic data must be {n}x{n}")));
        }
        if self.a_eq.ncols() != n || self.a_eq.nrows() != self.b_eq.len() {
            return Err(Error::Dimension("equality system has mismatched sizes".into()));
        }
        if self.lo.len() != n || self.hi.len() != n || self.integer.len() != n {
            return Err(Error::Dimension("bounds or integrality mask have the wrong length".into()));
        }
        let symmetric = |m: &DMatrix<f64>| (m - m.transpose()).amax() <= 1e-12 * (1.0 + m.amax());
        if !symmetric(&self.q0) || self.quad.iter().any(|(q, _, _)| !symmetric(q)) {
            return Err(Error::Invalid("quadratic matrices must be symmetric".into()));
        }
        for i in 0..n {
            if !(self.lo[i].is_finite() && self.hi[i].is_finite() && self.lo[i] <= self.hi[i]) {
                return Err(Error::Invalid(format!("bad bounds on x{i}")));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        x.dot(&(&self.q0 * &x)) + self.b0.dot(&x)
    }

    pub fn to_json_string(&self) -> String {
        let rows = |m: &DMatrix<f64>| (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect();
        let doc = QuadJson {
            name: self.name.clone(),
            sense: self.sense,
            q0: rows(&self.q0),
            b0: self.b0.iter().copied().collect(),
            quad: self
                .quad
                .iter()
                .map(|(q, b, c)| QuadConJson {
                    q: rows(q),
                    b: b.iter().copied().collect(),
                    c: *c,
                })
                .collect(),
            a_eq: rows(&self.a_eq),
            b_eq: self.b_eq.iter().copied().collect(),
            lo: Some(self.lo.clone()),
            hi: Some(self.hi.clone()),
            integer: self.integer.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("json")
    }

    /// Parses the JSON form; see [`QuadInstance::read`].
    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: QuadJson = serde_json::from_str(s)?;
        let n = doc.b0.len();
        let mat = |rows: &[Vec<f64>], ncols: usize| -> Result<DMatrix<f64>> {
            if rows.iter().any(|r| r.len() != ncols) {
                return Err(Error::Dimension(format!("matrix rows must have {ncols} entries")));
            }
            Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
        };
        let q0 = mat(&doc.q0, n)?;
        let quad = doc
            .quad
            .iter()
            .map(|c| Ok((mat(&c.q, n)?, DVector::from_column_slice(&c.b), c.c)))
            .collect::<Result<Vec<_>>>()?;
        let inst = QuadInstance {
            name: doc.name,
            sense: doc.sense,
            q0,
            b0: DVector::from_vec(doc.b0),
            quad,
            a_eq: mat(&doc.a_eq, n)?,
            b_eq: DVector::from_vec(doc.b_eq),
            lo: doc.lo.unwrap_or_else(|| vec![0.0; n]),
            hi: doc.hi.unwrap_or_else(|| vec![1.0; n]),
            integer: if doc.integer.is_empty() { vec![false; n] } else { doc.integer },
        };
        inst.validate()?;
        Ok(inst)
    }

    /// JSON with keys `name`, `sense`, `q0`, `b0`, and optionally `quad` (list of
    /// `{q, b, c}` meaning `xᵀqx + bᵀx ≤ c`), `a_eq`, `b_eq`, `lo`, `hi` (default
    /// `[0, 1]`) and `integer`.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct QuadConJson {
    q: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct QuadJson {
    #[serde(default)]
    name: String,
    sense: Sense,
    q0: Vec<Vec<f64>>,
    b0: Vec<f64>,
    #[serde(default)]
    quad: Vec<QuadConJson>,
    #[serde(default)]
    a_eq: Vec<Vec<f64>>,
    #[serde(default)]
    b_eq: Vec<f64>,
    #[serde(default)]
    lo: Option<Vec<f64>>,
    #[serde(default)]
    hi: Option<Vec<f64>>,
    #[serde(default)]
    integer: Vec<bool>,
}

/// `xᵀQx + bᵀx + c` as a polynomial; `Q` is symmetrized.
pub fn quadratic_poly(q: &DMatrix<f64>, b: &DVector<f64>, c: f64) -> Polynomial {
    let n = b.len();
    let mut p = Polynomial::constant(n, c);
    for i in 0..n {
        p.add_term(Monomial::from_pairs([(i, 2)]), q[(i, i)]);
        for j in i + 1..n {
            p.add_term(Monomial::from_pairs([(i, 1), (j, 1)]), q[(i, j)] + q[(j, i)]);
        }
        p.add_term(Monomial::var(i), b[i]);
    }
    p
}

fn is_identity(q: &DMatrix<f64>) -> bool {
    q.is_square() && *q == DMatrix::identity(q.nrows(), q.ncols())
}

fn encode_quad(inst: &QuadInstance, binary: bool, encoder: &str) -> Result<PopInstance> {
    inst.validate()?;
    let n = inst.nvars();
    let f = quadratic_poly(&inst.q0, &inst.b0, 0.0);
    let mut pop = PopInstance::new(inst.name.clone(), n, inst.sense, f);
    for (q, b, c) in &inst.quad {
        let g = quadratic_poly(q, b, -c).scale(-1.0);
        let rule = if is_identity(q) {
            SubsetRule::Ordered
        } else {
            SubsetRule::Skip
        };
        pop.push(Constraint::ge(g).with_rule(rule));
    }
    for r in 0..inst.a_eq.nrows() {
        let mut h = Polynomial::constant(n, -inst.b_eq[r]);
        for j in 0..n {
            h.add_term(Monomial::var(j), inst.a_eq[(r, j)]);
        }
        if !h.is_zero() {
            pop.push(Constraint::eq(h));
        }
    }
    for i in 0..n {
        pop.domains[i] = if binary && inst.integer[i] {
            if inst.lo[i] != 0.0 || inst.hi[i] != 1.0 {
                return Err(Error::Invalid(format!("integer x{i} must have bounds [0, 1]")));
            }
            VarDomain::Binary
        } else {
            VarDomain::Box {
                lo: inst.lo[i],
                hi: inst.hi[i],
            }
        };
    }
    pop.encoder = Some(encoder.into());
    Ok(pop)
}

/// Binary variables become `x² = x` domains; the rest keep their boxes.
/// Quadratic constraints with `Q = I` get ordered subsets, the others none.
pub fn encode_miqcp(inst: &QuadInstance) -> Result<PopInstance> {
    encode_quad(inst, true, "miqcp")
}

/// Continuous relaxation of the same data with every variable boxed.
pub fn encode_qcqp(inst: &QuadInstance) -> Result<PopInstance> {
    encode_quad(inst, false, "qcqp")
}

/// Seeded instance with a banded symmetric objective (`bandwidth` off-diagonals), one
/// ball constraint `‖x‖² ≤ n/2` and, if requested, one cardinality row `Σx = ⌊n/2⌋`.
pub fn random_quad(name: impl Into<String>, n: usize, bandwidth: usize, integer: bool, cardinality: bool, seed: u64) -> QuadInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n.min(i + bandwidth + 1) {
            let v: f64 = rng.random_range(-1.0..1.0);
            q[(i, j)] = v;
            q[(j, i)] = v;
        }
    }
    let b = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let mut inst = QuadInstance::new(name, Sense::Min, q, b);
    inst.quad.push((DMatrix::identity(n, n), DVector::zeros(n), n as f64 / 2.0));
    if cardinality {
        inst.a_eq = DMatrix::from_element(1, n, 1.0);
        inst.b_eq = DVector::from_element(1, (n / 2) as f64);
    }
    inst.integer = vec![integer; n];
    inst
}

/// Minimum of `xᵀQx + bᵀx` over the box `[lo, hi]`, found by solving the stationarity
/// system on every face. Exponential in `n`; meant for `n ≤ 10`.
pub fn box_qp_optimum(q: &DMatrix<f64>, b: &DVector<f64>, lo: &[f64], hi: &[f64], sense: Sense) -> f64 {
    let n = b.len();
    let s = sense.sign();
    let qs = (q + q.transpose()) * (0.5 * s);
    let bs = b * s;
    let eval = |x: &DVector<f64>| x.dot(&(&qs * x)) + bs.dot(x);
    let mut best = f64::INFINITY;
    // 0 = free, 1 = at lo, 2 = at hi
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0u8; n];
        let mut c = code;
        for st in state.iter_mut() {
            *st = (c % 3) as u8;
            c /= 3;
        }
        let mut x = DVector::zeros(n);
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 0).collect();
        for i in 0..n {
            match state[i] {
                1 => x[i] = lo[i],
                2 => x[i] = hi[i],
                _ => {}
            }
        }
        if !free.is_empty() {
            // 2 Q_FF x_F = -(b_F + 2 Q_FB x_B)
            let k = free.len();
            let mut m = DMatrix::zeros(k, k);
            let mut r = DVector::zeros(k);
            for (a, &i) in free.iter().enumerate() {
                for (bb, &j) in free.iter().enumerate() {
                    m[(a, bb)] = 2.0 * qs[(i, j)];
                }
                let mut fixed = 0.0;
                for j in 0..n {
                    if state[j] != 0 {
                        fixed += 2.0 * qs[(i, j)] * x[j];
                    }
                }
                r[a] = -(bs[i] + fixed);
            }
            let Some(sol) = m.clone().lu().solve(&r) else { continue };
            if (&m * &sol - &r).norm() > 1e-9 * (1.0 + r.norm()) {
                continue;
            }
            for (a, &i) in free.iter().enumerate() {
                x[i] = sol[a];
            }
            if free.iter().any(|&i| x[i] < lo[i] - 1e-12 || x[i] > hi[i] + 1e-12) {
                continue;
            }
        }
        best = best.min(eval(&x));
    }
    s * best
}
