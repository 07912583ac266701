use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::poly::{monomial_basis, Monomial, MomentDictionary, Polynomial, PopInstance, ReductionRule, Relation, Sense};
use crate::sparsity::{is_subset_sorted, CliqueCover};

use super::config::SublevelConfig;
use super::owners::{owners, Owner, OwnerSource};
use super::select::{check_plan, working_cover, SubsetPlan};

/// One stored entry `coeff * y[index]` of a symmetric block at `(row, col)`, `row <= col`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockEntry {
    pub row: usize,
    pub col: usize,
    pub index: usize,
    pub coeff: f64,
}

/// Symmetric matrix whose entries are linear forms in the moment variables.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct PsdBlock {
    pub size: usize,
    pub entries: Vec<BlockEntry>,
}

impl PsdBlock {
    /// Evaluates the block at a moment vector.
    pub fn evaluate(&self, y: &[f64]) -> nalgebra::DMatrix<f64> {
        let mut m = nalgebra::DMatrix::zeros(self.size, self.size);
        for e in &self.entries {
            m[(e.row, e.col)] += e.coeff * y[e.index];
            if e.row != e.col {
                m[(e.col, e.row)] += e.coeff * y[e.index];
            }
        }
        m
    }

    /// Moment indices referenced by the block.
    pub fn indices(&self) -> BTreeSet<usize> {
        self.entries.iter().map(|e| e.index).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockTag {
    MomentMatrix { vars: Vec<usize>, order: u32 },
    LocalizingPsd { owner: OwnerSource, vars: Vec<usize>, order: u32 },
    /// Entries pinned to zero (equality constraint).
    LocalizingZero { owner: OwnerSource, vars: Vec<usize>, order: u32 },
}

impl BlockTag {
    pub fn vars(&self) -> &[usize] {
        match self {
            BlockTag::MomentMatrix { vars, .. }
            | BlockTag::LocalizingPsd { vars, .. }
            | BlockTag::LocalizingZero { vars, .. } => vars,
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            BlockTag::MomentMatrix { order, .. }
            | BlockTag::LocalizingPsd { order, .. }
            | BlockTag::LocalizingZero { order, .. } => *order,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, BlockTag::LocalizingZero { .. })
    }

    fn owner(&self) -> Option<OwnerSource> {
        match self {
            BlockTag::MomentMatrix { .. } => None,
            BlockTag::LocalizingPsd { owner, .. } | BlockTag::LocalizingZero { owner, .. } => Some(*owner),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaggedBlock {
    pub tag: BlockTag,
    pub block: PsdBlock,
}

/// Moment relaxation: blocks over shared moment variables with `y[0] = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Relaxation {
    pub name: String,
    pub dict: MomentDictionary,
    pub blocks: Vec<TaggedBlock>,
    /// `L_y(f)` as sorted `(index, coeff)` pairs.
    pub objective: Vec<(usize, f64)>,
    pub sense: Sense,
    /// Cliques the order-d blocks live on.
    pub cliques: Vec<Vec<usize>>,
    /// Variable magnitudes copied from the instance, used when solving.
    pub scales: Option<Vec<f64>>,
}

impl Relaxation {
    /// Starts an empty relaxation; blocks are added with the `push_*` methods.
    pub fn builder(name: impl Into<String>, rule: ReductionRule, sense: Sense) -> Self {
        Self {
            name: name.into(),
            dict: MomentDictionary::new(rule),
            blocks: Vec::new(),
            objective: Vec::new(),
            sense,
            cliques: Vec::new(),
            scales: None,
        }
    }

    pub fn set_objective(&mut self, f: &Polynomial) {
        self.objective = riesz(&mut self.dict, f);
    }

    pub fn push_moment(&mut self, vars: &[usize], order: u32) {
        let block = moment_block(&mut self.dict, vars, order);
        self.blocks.push(TaggedBlock {
            tag: BlockTag::MomentMatrix {
                vars: vars.to_vec(),
                order,
            },
            block,
        });
    }

    /// Localizing block of `g` on the basis of `vars`; `g` may involve other variables.
    pub fn push_localizing(&mut self, owner: OwnerSource, g: &Polynomial, rel: Relation, vars: &[usize], order: u32) {
        let block = sublevel_localizing_block(&mut self.dict, g, vars, order);
        let (vars, tag_owner) = (vars.to_vec(), owner);
        let tag = match rel {
            Relation::Ge => BlockTag::LocalizingPsd {
                owner: tag_owner,
                vars,
                order,
            },
            Relation::Eq => BlockTag::LocalizingZero {
                owner: tag_owner,
                vars,
                order,
            },
        };
        self.blocks.push(TaggedBlock { tag, block });
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.block.size).collect()
    }

    pub fn nblocks(&self) -> usize {
        self.blocks.len()
    }

    /// Value of the objective at a moment vector.
    pub fn objective_value(&self, y: &[f64]) -> f64 {
        self.objective.iter().map(|&(i, c)| c * y[i]).sum()
    }

    /// Drops every block that is a principal submatrix of another block of the same
    /// kind and owner.
    fn prune_redundant(&mut self) {
        let n = self.blocks.len();
        let mut keep = vec![true; n];
        for a in 0..n {
            for b in 0..n {
                if a == b || !keep[b] {
                    continue;
                }
                let (ta, tb) = (&self.blocks[a].tag, &self.blocks[b].tag);
                let same_kind = std::mem::discriminant(ta) == std::mem::discriminant(tb) && ta.owner() == tb.owner();
                if !same_kind {
                    continue;
                }
                let contained = ta.order() == 0 || (ta.order() <= tb.order() && is_subset_sorted(ta.vars(), tb.vars()));
                // Equal blocks: keep the earlier one.
                let equal = ta.order() == tb.order() && ta.vars() == tb.vars();
                if contained && (!equal || b < a) {
                    keep[a] = false;
                    break;
                }
            }
        }
        let mut it = keep.into_iter();
        self.blocks.retain(|_| it.next().unwrap());
    }
}

/// Monomial basis of degree ≤ `t` in `vars`, reduced and deduplicated.
pub fn reduced_basis(vars: &[usize], t: u32, rule: &ReductionRule) -> Vec<Monomial> {
    let basis = monomial_basis(vars, t);
    if rule.is_trivial() {
        return basis;
    }
    let set: BTreeSet<Monomial> = basis.iter().map(|m| rule.reduce(m)).collect();
    set.into_iter().collect()
}

fn riesz(dict: &mut MomentDictionary, f: &Polynomial) -> Vec<(usize, f64)> {
    let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
    for (m, c) in f.terms() {
        *acc.entry(dict.riesz_index(m)).or_insert(0.0) += c;
    }
    acc.into_iter().filter(|&(_, c)| c != 0.0).collect()
}

/// Order-`t` moment matrix on `vars`: entry `(r, c)` is `y[b_r b_c]`.
pub fn moment_block(dict: &mut MomentDictionary, vars: &[usize], t: u32) -> PsdBlock {
    let basis = reduced_basis(vars, t, dict.rule());
    let mut entries = Vec::with_capacity(basis.len() * (basis.len() + 1) / 2);
    for r in 0..basis.len() {
        for c in r..basis.len() {
            let index = dict.riesz_index(&basis[r].mul(&basis[c]));
            entries.push(BlockEntry {
                row: r,
                col: c,
                index,
                coeff: 1.0,
            });
        }
    }
    PsdBlock {
        size: basis.len(),
        entries,
    }
}

/// Order-`t` localizing matrix of `g` on `vars`; `g` must only involve `vars`.
pub fn localizing_block(dict: &mut MomentDictionary, g: &Polynomial, vars: &[usize], t: u32) -> Result<PsdBlock> {
    let mut sorted = vars.to_vec();
    sorted.sort_unstable();
    if !is_subset_sorted(&g.variables(), &sorted) {
        return Err(Error::Dimension(format!(
            "polynomial variables {:?} are not inside {:?}",
            g.variables(),
            vars
        )));
    }
    Ok(sublevel_localizing_block(dict, g, vars, t))
}

/// Localizing matrix of `g` on the order-`t` basis of `vars`, without requiring
/// `vars(g) ⊆ vars`.
pub fn sublevel_localizing_block(dict: &mut MomentDictionary, g: &Polynomial, vars: &[usize], t: u32) -> PsdBlock {
    let basis = reduced_basis(vars, t, dict.rule());
    let mut entries = Vec::new();
    for r in 0..basis.len() {
        for c in r..basis.len() {
            let prod = basis[r].mul(&basis[c]);
            let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
            for (m, coeff) in g.terms() {
                *acc.entry(dict.riesz_index(&prod.mul(m))).or_insert(0.0) += coeff;
            }
            for (index, coeff) in acc {
                if coeff != 0.0 {
                    entries.push(BlockEntry {
                        row: r,
                        col: c,
                        index,
                        coeff,
                    });
                }
            }
        }
    }
    PsdBlock {
        size: basis.len(),
        entries,
    }
}

/// Assembles the order-`d` relaxation augmented by the plan's subsets.
///
/// Block order: order-d moment blocks per clique, order-(d+1) moment blocks per
/// distinct subset, order-(d-ω) localizers per owner, then the order-(d-ω+1)
/// localizers of each owner on its subsets. Blocks that are principal submatrices of
/// another block of the same kind are dropped.
pub fn build_relaxation(pop: &PopInstance, cover: &CliqueCover, cfg: &SublevelConfig, plan: &SubsetPlan) -> Result<Relaxation> {
    pop.validate()?;
    let d = cfg.order;
    if d == 0 {
        return Err(Error::Config("relaxation order must be at least 1".into()));
    }
    if pop.objective.degree() > 2 * d {
        return Err(Error::Config(format!(
            "objective degree {} exceeds 2d = {}",
            pop.objective.degree(),
            2 * d
        )));
    }
    let work = working_cover(pop, cover, cfg.mode);
    let owners: Vec<Owner> = owners(pop);
    check_plan(plan, &work, owners.len())?;
    for o in &owners {
        if o.omega() > d {
            return Err(Error::Config(format!(
                "constraint of degree {} needs order at least {}",
                o.poly.as_ref().map_or(0, Polynomial::degree),
                o.omega()
            )));
        }
    }

    let mut relax = Relaxation::builder(pop.name.clone(), pop.reduction_rule(), pop.sense);
    relax.cliques = work.cliques().to_vec();
    relax.scales = pop.scales.clone();
    relax.set_objective(&pop.objective);

    for clique in work.cliques() {
        relax.push_moment(clique, d);
    }
    for s in plan.distinct_subsets() {
        relax.push_moment(&s, d + 1);
    }
    for o in &owners {
        let Some(g) = &o.poly else { continue };
        let k = *work
            .containing(&o.vars)
            .first()
            .ok_or_else(|| Error::Structural(format!("no clique contains the variables of {:?}", o.source)))?;
        relax.push_localizing(o.source, g, o.rel, &work.cliques()[k], d - o.omega());
    }
    let mut seen = BTreeSet::new();
    for e in &plan.entries {
        let o = &owners[e.owner];
        let Some(g) = &o.poly else { continue };
        for s in &e.subsets {
            if seen.insert((e.owner, s.clone())) {
                relax.push_localizing(o.source, g, o.rel, s, d - o.omega() + 1);
            }
        }
    }
    relax.prune_redundant();
    Ok(relax)
}
