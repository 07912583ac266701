use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Weighted undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphInstance {
    pub name: String,
    pub n: usize,
    /// `(i, j, w)` with `i < j`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl GraphInstance {
    /// Builds a graph, normalizing each edge to `i < j`. Self-loops, repeated edges,
    /// out-of-range vertices and non-finite weights are rejected.
    pub fn new(name: impl Into<String>, n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::Invalid(format!("edge ({i}, {j}) outside {n} vertices")));
            }
            if i == j {
                return Err(Error::Invalid(format!("self-loop at {i}")));
            }
            if !w.is_finite() {
                return Err(Error::Invalid(format!("weight {w} on edge ({i}, {j})")));
            }
            let e = (i.min(j), i.max(j));
            if !seen.insert(e) {
                return Err(Error::Invalid(format!("duplicate edge {e:?}")));
            }
            out.push((e.0, e.1, w));
        }
        Ok(Self {
            name: name.into(),
            n,
            edges: out,
        })
    }

    pub fn weight_matrix(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n, self.n);
        for &(i, j, v) in &self.edges {
            w[(i, j)] += v;
            w[(j, i)] += v;
        }
        w
    }

    /// 0/1 adjacency matrix (weights ignored).
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(i, j, _) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        let (a, b) = (i.min(j), i.max(j));
        self.edges.iter().any(|&(u, v, _)| (u, v) == (a, b))
    }

    /// Seeded Erdős–Rényi graph; each edge gets weight 1 or, with `signed`, ±1.
    pub fn random(name: impl Into<String>, n: usize, density: f64, signed: bool, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < density {
                    let w = if signed && rng.random::<bool>() { -1.0 } else { 1.0 };
                    edges.push((i, j, w));
                }
            }
        }
        Self::new(name, n, edges).expect("valid random graph")
    }

    /// Cycle `0-1-...-(n-1)-0` with unit weights.
    pub fn cycle(n: usize) -> Self {
        Self::new(format!("cycle{n}"), n, (0..n).map(|i| (i, (i + 1) % n, 1.0))).expect("cycle")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)));
        Self::new(format!("K{n}"), n, edges).expect("complete graph")
    }
}

/// `L = diag(W 1) - W`.
pub fn laplacian(g: &GraphInstance) -> DMatrix<f64> {
    let w = g.weight_matrix();
    let mut l = -&w;
    for i in 0..g.n {
        l[(i, i)] = w.row(i).sum();
    }
    l
}

/// Reads the rudy edge-list format: `n m`, then `m` lines `i j w` with 1-based vertices.
pub fn parse_rudy_str(text: &str, name: &str) -> Result<GraphInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, head) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let hv: Vec<&str> = head.split_whitespace().collect();
    let parse_usize = |t: &str, line: usize| {
        t.parse::<usize>().map_err(|_| Error::Parse {
            line,
            msg: format!("expected a non-negative integer, got {t:?}"),
        })
    };
    if hv.len() < 2 {
        return Err(Error::Parse {
            line: ln,
            msg: "header must be `n m`".into(),
        });
    }
    let n = parse_usize(hv[0], ln)?;
    let m = parse_usize(hv[1], ln)?;
    let mut edges = Vec::with_capacity(m);
    for (ln, l) in lines.by_ref().take(m) {
        let t: Vec<&str> = l.split_whitespace().collect();
        if t.len() < 3 {
            return Err(Error::Parse {
                line: ln,
                msg: "edge line must be `i j w`".into(),
            });
        }
        let i = parse_usize(t[0], ln)?;
        let j = parse_usize(t[1], ln)?;
        let w = t[2].parse::<f64>().map_err(|_| Error::Parse {
            line: ln,
            msg: format!("bad weight {:?}", t[2]),
        })?;
        if i == 0 || j == 0 || i > n || j > n {
            return Err(Error::Parse {
                line: ln,
                msg: format!("vertex out of range 1..={n}"),
            });
        }
        edges.push((i - 1, j - 1, w));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: ln,
            msg: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    GraphInstance::new(name, n, edges).map_err(|e| Error::Parse {
        line: ln,
        msg: e.to_string(),
    })
}

pub fn parse_rudy(path: impl AsRef<Path>) -> Result<GraphInstance> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("graph")
        .to_string();
    parse_rudy_str(&std::fs::read_to_string(path)?, &name)
}

/// Inverse of [`parse_rudy_str`]; weights use the shortest round-trip representation.
pub fn write_rudy_string(g: &GraphInstance) -> String {
    let mut s = format!("{} {}\n", g.n, g.edges.len());
    for &(i, j, w) in &g.edges {
        let _ = writeln!(s, "{} {} {}", i + 1, j + 1, w);
    }
    s
}

pub fn write_rudy(g: &GraphInstance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, write_rudy_string(g))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn laplacian_examples() {
        let g = GraphInstance::new("e", 2, [(0, 1, 1.0)]).unwrap();
        assert_eq!(laplacian(&g), DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let empty = GraphInstance::new("z", 3, []).unwrap();
        assert_eq!(laplacian(&empty), DMatrix::zeros(3, 3));
        let l = laplacian(&GraphInstance::complete(3));
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l[(i, j)], if i == j { 2.0 } else { -1.0 });
            }
        }
    }

    #[test]
    fn rudy_examples() {
        let g = parse_rudy_str("2 1\n1 2 3", "t").unwrap();
        assert_eq!((g.n, g.edges.clone()), (2, vec![(0, 1, 3.0)]));
        let g = parse_rudy_str("3 0\n", "t").unwrap();
        assert!(g.edges.is_empty() && g.n == 3);
        let err = parse_rudy_str("2 1\n0 1 1\n", "t").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let g = parse_rudy_str("  3   2 \n 1 2   1\n\n2 3 -1\n", "t").unwrap();
        assert_eq!(g.edges, vec![(0, 1, 1.0), (1, 2, -1.0)]);
        assert!(parse_rudy_str("3 2\n1 2 1\n", "t").is_err());
        assert!(parse_rudy_str("3 1\n1 2 x\n", "t").is_err());
    }

    proptest! {
        #[test]
        fn rudy_round_trip(n in 1usize..12, seed in any::<u64>(), density in 0.0f64..1.0) {
            let mut g = GraphInstance::random("r", n, density, true, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
            for e in g.edges.iter_mut() {
                e.2 *= rng.random_range(0.1..10.0);
            }
            let back = parse_rudy_str(&write_rudy_string(&g), "r").unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
