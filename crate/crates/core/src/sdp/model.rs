use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::Sense;
use crate::sublevel::{BlockTag, Relaxation};

/// Entry of a block coefficient matrix: `mat = 0` is the constant term, `mat = j + 1`
/// the coefficient of variable `j`. Only the upper triangle is stored.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LmiEntry {
    pub mat: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Linear matrix inequality block `F_0 + Σ y_j F_j ⪰ 0`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LmiBlock {
    pub size: usize,
    pub entries: Vec<LmiEntry>,
}

impl LmiBlock {
    pub fn new(size: usize) -> Self {
        Self {
            size,
            entries: Vec::new(),
        }
    }

    /// Adds `value` at `(row, col)` of matrix `mat` (either triangle).
    pub fn add(&mut self, mat: usize, row: usize, col: usize, value: f64) {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        self.entries.push(LmiEntry { mat, row, col, value });
    }

    /// Sorts entries by `(mat, row, col)`, merging duplicates and dropping zeros.
    pub fn normalize(&mut self) {
        let mut acc: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        for e in &self.entries {
            *acc.entry((e.mat, e.row, e.col)).or_insert(0.0) += e.value;
        }
        self.entries = acc
            .into_iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|((mat, row, col), value)| LmiEntry { mat, row, col, value })
            .collect();
    }

    /// `F_0 + Σ y_j F_j` as a dense matrix.
    pub fn evaluate(&self, y: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.size, self.size);
        for e in &self.entries {
            let v = if e.mat == 0 { e.value } else { e.value * y[e.mat - 1] };
            m[(e.row, e.col)] += v;
            if e.row != e.col {
                m[(e.col, e.row)] += v;
            }
        }
        m
    }
}

/// Linear equality `Σ coeff_j y_j = rhs`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EqRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Block semidefinite program in the free variables `y`:
/// optimize `c·y + offset` subject to `F_0^b + Σ y_j F_j^b ⪰ 0` for every block and
/// the equality rows.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSdp {
    pub m: usize,
    pub sense: Sense,
    pub c: Vec<f64>,
    pub offset: f64,
    pub blocks: Vec<LmiBlock>,
    pub eqs: Vec<EqRow>,
}

impl BlockSdp {
    pub fn new(m: usize, sense: Sense) -> Self {
        Self {
            m,
            sense,
            c: vec![0.0; m],
            offset: 0.0,
            blocks: Vec::new(),
            eqs: Vec::new(),
        }
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.size).collect()
    }

    pub fn objective(&self, y: &[f64]) -> f64 {
        self.offset + self.c.iter().zip(y).map(|(c, y)| c * y).sum::<f64>()
    }

    /// Checks index bounds and symmetry storage.
    pub fn validate(&self) -> Result<()> {
        if self.c.len() != self.m {
            return Err(Error::Dimension(format!("objective has {} entries for m = {}", self.c.len(), self.m)));
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            for e in &blk.entries {
                if e.row > e.col || e.col >= blk.size || e.mat > self.m || !e.value.is_finite() {
                    return Err(Error::Structural(format!("bad entry {e:?} in block {b}")));
                }
            }
        }
        for row in &self.eqs {
            if row.coeffs.iter().any(|&(j, v)| j >= self.m || !v.is_finite()) || !row.rhs.is_finite() {
                return Err(Error::Structural("bad equality row".into()));
            }
        }
        Ok(())
    }
}

/// How the SDP variables relate to the moment variables: SDP variable `j` stands for
/// `Σ s·y[idx]` over `groups[j]`. Moment variables that only appear in equalities are
/// eliminated and do not occur here.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct VarMap {
    pub groups: Vec<Vec<(usize, f64)>>,
    pub nmoments: usize,
}

impl VarMap {
    /// A moment vector consistent with SDP values `z` (y[0] = 1; a merged group puts its
    /// value on its first member).
    pub fn moments(&self, z: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nmoments];
        if !y.is_empty() {
            y[0] = 1.0;
        }
        for (g, &v) in self.groups.iter().zip(z) {
            let (idx, s) = g[0];
            y[idx] = v / s;
        }
        y
    }
}

/// Converts a relaxation into a block SDP.
pub fn assemble(relax: &Relaxation) -> Result<BlockSdp> {
    assemble_mapped(relax).map(|(s, _)| s)
}

type Row = BTreeMap<usize, f64>;

fn axpy_row(dst: &mut Row, a: f64, src: &Row) {
    for (&j, &v) in src {
        let e = dst.entry(j).or_insert(0.0);
        *e += a * v;
    }
    dst.retain(|_, v| v.abs() > 1e-14);
}

/// `assemble` plus the variable map. `y[0]` is substituted by 1; equality blocks become
/// rows; variables found only in equalities are eliminated by pivoting; variables with
/// proportional coefficient patterns are merged so the Schur complement stays regular.
pub fn assemble_mapped(relax: &Relaxation) -> Result<(BlockSdp, VarMap)> {
    let nmom = relax.dict.len();
    let psd: Vec<usize> = (0..relax.blocks.len()).filter(|&b| !relax.blocks[b].tag.is_zero()).collect();
    let mut in_psd = vec![false; nmom];
    for &b in &psd {
        for e in &relax.blocks[b].block.entries {
            in_psd[e.index] = true;
        }
    }

    // Equality rows (index 0 moves to the right-hand side as -coeff).
    let mut rows: Vec<Row> = Vec::new();
    for tb in relax.blocks.iter().filter(|b| b.tag.is_zero()) {
        let mut by_pos: BTreeMap<(usize, usize), Row> = BTreeMap::new();
        for e in &tb.block.entries {
            *by_pos.entry((e.row, e.col)).or_default().entry(e.index).or_insert(0.0) += e.coeff;
        }
        for (_, mut r) in by_pos {
            r.retain(|_, v| *v != 0.0);
            if !r.is_empty() {
                rows.push(r);
            }
        }
    }
    let mut objective: Row = relax.objective.iter().copied().collect();

    // Pivot out moments that no PSD block constrains.
    let free: BTreeSet<usize> = rows
        .iter()
        .flat_map(|r| r.keys().copied())
        .chain(objective.keys().copied())
        .filter(|&i| i != 0 && !in_psd[i])
        .collect();
    for f in free {
        let pivot = rows
            .iter()
            .enumerate()
            .filter_map(|(k, r)| r.get(&f).map(|v| (k, v.abs())))
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(k, _)| k);
        match pivot {
            Some(k) => {
                let prow = rows.swap_remove(k);
                let pv = prow[&f];
                for r in rows.iter_mut() {
                    if let Some(&v) = r.get(&f) {
                        axpy_row(r, -v / pv, &prow);
                        r.remove(&f);
                    }
                }
                if let Some(&v) = objective.get(&f) {
                    axpy_row(&mut objective, -v / pv, &prow);
                    objective.remove(&f);
                }
            }
            None => {
                if objective.get(&f).is_some_and(|v| *v != 0.0) {
                    return Err(Error::Structural(format!(
                        "objective moment {} is not constrained by any block",
                        relax.dict.monomial(f)
                    )));
                }
            }
        }
    }
    rows.retain(|r| r.keys().any(|&i| i != 0) || r.get(&0).is_some_and(|v| v.abs() > 1e-12));

    // Coefficient signature of every remaining variable.
    let mut sig: Vec<Vec<(u8, usize, usize, usize, f64)>> = vec![Vec::new(); nmom];
    for (bn, &b) in psd.iter().enumerate() {
        for e in &relax.blocks[b].block.entries {
            if e.index != 0 {
                sig[e.index].push((0, bn, e.row, e.col, e.coeff));
            }
        }
    }
    for (k, r) in rows.iter().enumerate() {
        for (&i, &v) in r {
            if i != 0 {
                sig[i].push((1, k, 0, 0, v));
            }
        }
    }
    for (&i, &v) in &objective {
        if i != 0 {
            sig[i].push((2, 0, 0, 0, v));
        }
    }
    let mut key_of: HashMap<Vec<(u8, usize, usize, usize, u64)>, usize> = HashMap::new();
    let mut groups: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut group_lead: Vec<f64> = Vec::new();
    let mut var_of = vec![usize::MAX; nmom];
    for (i, s) in sig.iter_mut().enumerate().skip(1) {
        if s.is_empty() {
            continue;
        }
        s.sort_by(|a, b| (a.0, a.1, a.2, a.3).cmp(&(b.0, b.1, b.2, b.3)));
        let lead = s[0].4;
        let key: Vec<_> = s
            .iter()
            .map(|&(t, a, b, c, v)| (t, a, b, c, (v / lead).to_bits()))
            .collect();
        let j = *key_of.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            group_lead.push(lead);
            groups.len() - 1
        });
        groups[j].push((i, lead / group_lead[j]));
        var_of[i] = j;
    }
    let m = groups.len();
    // Only group representatives carry coefficients; the other members are scaled copies.
    let rep = |i: usize| var_of[i] != usize::MAX && groups[var_of[i]][0].0 == i;

    let mut sdp = BlockSdp::new(m, relax.sense);
    for &b in &psd {
        let src = &relax.blocks[b].block;
        let mut blk = LmiBlock::new(src.size);
        for e in &src.entries {
            if e.index == 0 {
                blk.add(0, e.row, e.col, e.coeff);
            } else if rep(e.index) {
                blk.add(var_of[e.index] + 1, e.row, e.col, e.coeff);
            }
        }
        blk.normalize();
        sdp.blocks.push(blk);
    }
    for r in &rows {
        let mut coeffs: BTreeMap<usize, f64> = BTreeMap::new();
        for (&i, &v) in r {
            if i != 0 && rep(i) {
                coeffs.insert(var_of[i], v);
            }
        }
        sdp.eqs.push(EqRow {
            coeffs: coeffs.into_iter().collect(),
            rhs: -r.get(&0).copied().unwrap_or(0.0),
        });
    }
    for (&i, &v) in &objective {
        if i == 0 {
            sdp.offset = v;
        } else if rep(i) {
            sdp.c[var_of[i]] = v;
        }
    }
    Ok((sdp, VarMap { groups, nmoments: nmom }))
}

/// Order-1 moment block of a clique, evaluated at a moment vector: rows and columns
/// indexed by `1` and the clique variables.
pub fn extract_moment_matrix(relax: &Relaxation, moments: &[f64], clique: &[usize]) -> Result<DMatrix<f64>> {
    let tb = relax
        .blocks
        .iter()
        .find(|b| matches!(&b.tag, BlockTag::MomentMatrix { vars, order } if vars.as_slice() == clique && *order >= 1))
        .ok_or_else(|| Error::Structural(format!("no moment block on clique {clique:?}")))?;
    let full = tb.block.evaluate(moments);
    let k = clique.len() + 1;
    // The reduced basis starts with 1 and the degree-one monomials in variable order.
    Ok(full.view((0, 0), (k, k)).into_owned())
}
