//! Infeasible-start primal-dual interior-point method (HKM direction, Mehrotra
//! predictor-corrector) for
//!
//! ```text
//!   max  bᵀy   s.t.  C - Σ y_i A_i = S ⪰ 0,   E y = β
//!   min  ⟨C, X⟩ - βᵀw   s.t.  ⟨A_i, X⟩ - (Eᵀw)_i = b_i,   X ⪰ 0
//! ```
//!
//! where `C = F_0`, `A_i = -F_i` and `b = ±c` depending on the sense.

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::model::BlockSdp;
use crate::poly::Sense;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Optimal,
    NearOptimal,
    Infeasible,
    IterLimit,
    NumericalFailure,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::NearOptimal => "near_optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::IterLimit => "iter_limit",
            SolveStatus::NumericalFailure => "numerical_failure",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
    pub step_fraction: f64,
    /// Iterates larger than this are treated as divergence.
    pub divergence: f64,
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            gap_tol: 1e-7,
            feas_tol: 1e-7,
            max_iter: 200,
            step_fraction: 0.98,
            divergence: 1e10,
            verbose: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverReport {
    pub status: SolveStatus,
    /// Reported bound: `primal_obj` when optimal, otherwise the looser of the two objectives.
    pub bound: f64,
    /// `c·y + offset` at the returned `y` (moment side).
    pub primal_obj: f64,
    /// Objective of the conic dual (certificate side), in the same sense.
    pub dual_obj: f64,
    /// `|primal - dual| / (1 + |primal|)`
    pub gap: f64,
    /// Relative residual of the certificate-side equations.
    pub dual_infeasibility: f64,
    /// Largest PSD violation of `F(y)` plus equality residual, relative to the data.
    pub primal_infeasibility: f64,
    pub iterations: usize,
    pub solve_seconds: f64,
    pub y: Vec<f64>,
    pub message: String,
}

impl SolverReport {
    /// The value reported as the relaxation bound.
    pub fn bound(&self) -> f64 {
        self.bound
    }
}

/// One block of the internal problem: dense `C` and the sparse `A_i` entries.
#[derive(Clone)]
struct Blk {
    n: usize,
    c: DMatrix<f64>,
    /// `(var, p, q, a)` with `p <= q`: `A_var += a (e_p e_qᵀ + e_q e_pᵀ)` (`a e_p e_pᵀ` if `p = q`).
    ents: Vec<(usize, usize, usize, f64)>,
}

impl Blk {
    /// `⟨A_i, Z⟩` accumulated into `out` for a possibly non-symmetric `Z`.
    fn apply(&self, z: &DMatrix<f64>, out: &mut DVector<f64>) {
        for &(i, p, q, a) in &self.ents {
            out[i] += if p == q { a * z[(p, p)] } else { a * (z[(p, q)] + z[(q, p)]) };
        }
    }

    /// `Σ y_i A_i`.
    fn combine(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for &(i, p, q, a) in &self.ents {
            m[(p, q)] += a * y[i];
            if p != q {
                m[(q, p)] += a * y[i];
            }
        }
        m
    }

    /// Adds `⟨A_i, X A_j S⁻¹⟩` for all pairs into the Schur complement.
    fn schur(&self, x: &DMatrix<f64>, si: &DMatrix<f64>, mm: &mut DMatrix<f64>) {
        let e = &self.ents;
        for (u, &(i, p, q, a)) in e.iter().enumerate() {
            for (v, &(j, r, s, b)) in e.iter().enumerate().skip(u) {
                let t = if p == q {
                    if r == s {
                        x[(p, r)] * si[(r, p)]
                    } else {
                        x[(p, r)] * si[(s, p)] + x[(p, s)] * si[(r, p)]
                    }
                } else if r == s {
                    x[(q, r)] * si[(r, p)] + x[(p, r)] * si[(r, q)]
                } else {
                    x[(q, r)] * si[(s, p)] + x[(q, s)] * si[(r, p)] + x[(p, r)] * si[(s, q)] + x[(p, s)] * si[(r, q)]
                };
                let val = a * b * t;
                mm[(i, j)] += val;
                if u != v {
                    mm[(j, i)] += val;
                }
            }
        }
    }
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// Largest `α` with `x + α dx ⪰ 0` given the Cholesky factor of `x`.
fn max_step(chol: &Cholesky<f64, Dyn>, dx: &DMatrix<f64>) -> f64 {
    let l = chol.l();
    let n = dx.nrows();
    if n == 1 {
        let v = dx[(0, 0)] / (l[(0, 0)] * l[(0, 0)]);
        return if v < 0.0 { -1.0 / v } else { f64::INFINITY };
    }
    let linv_dx = l.solve_lower_triangular(dx).expect("triangular solve");
    let w = l
        .solve_lower_triangular(&linv_dx.transpose())
        .expect("triangular solve");
    let lmin = SymmetricEigen::new(sym(&w)).eigenvalues.min();
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    if m.nrows() == 1 {
        return m[(0, 0)];
    }
    SymmetricEigen::new(sym(m)).eigenvalues.min()
}

/// Independent rows of `E y = β` (modified Gram–Schmidt). `None` if the rows are
/// inconsistent.
fn independent_rows(rows: &[(Vec<(usize, f64)>, f64)], m: usize) -> Option<(DMatrix<f64>, DVector<f64>)> {
    let mut basis: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut keep: Vec<usize> = Vec::new();
    for (k, (coeffs, rhs)) in rows.iter().enumerate() {
        let mut v = DVector::zeros(m);
        for &(j, a) in coeffs {
            v[j] += a;
        }
        let norm0 = v.norm();
        let mut r = *rhs;
        for (q, qr) in &basis {
            let t = q.dot(&v);
            v.axpy(-t, q, 1.0);
            r -= t * qr;
        }
        let nv = v.norm();
        if nv <= 1e-10 * norm0.max(1.0) {
            if r.abs() > 1e-8 * (1.0 + rhs.abs()) {
                return None;
            }
            continue;
        }
        basis.push((v / nv, r / nv));
        keep.push(k);
    }
    let mut e = DMatrix::zeros(keep.len(), m);
    let mut beta = DVector::zeros(keep.len());
    for (r, &k) in keep.iter().enumerate() {
        for &(j, a) in &rows[k].0 {
            e[(r, j)] += a;
        }
        beta[r] = rows[k].1;
    }
    Some((e, beta))
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    ds: Vec<DMatrix<f64>>,
    dy: DVector<f64>,
    dw: DVector<f64>,
}

/// Factorized Newton system for one iteration.
struct Newton {
    chol: Cholesky<f64, Dyn>,
    /// Cholesky factor of `E M⁻¹ Eᵀ`.
    h: Option<Cholesky<f64, Dyn>>,
}

impl Newton {
    fn solve(&self, e: &DMatrix<f64>, r: &DVector<f64>, re: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let minv_r = self.chol.solve(r);
        let dw = match &self.h {
            Some(h) => h.solve(&(re - e * &minv_r)),
            None => DVector::zeros(0),
        };
        let dy = if dw.is_empty() {
            minv_r
        } else {
            minv_r + self.chol.solve(&(e.transpose() * &dw))
        };
        (dy, dw)
    }
}

/// Solves the SDP.
pub fn solve(sdp: &BlockSdp, opts: &SolverOptions) -> SolverReport {
    let start = Instant::now();
    let m = sdp.m;
    let sign = match sdp.sense {
        Sense::Max => 1.0,
        Sense::Min => -1.0,
    };
    let b = DVector::from_iterator(m, sdp.c.iter().map(|c| sign * c));
    let blocks: Vec<Blk> = sdp
        .blocks
        .iter()
        .map(|blk| {
            let mut c = DMatrix::zeros(blk.size, blk.size);
            let mut ents = Vec::new();
            for e in &blk.entries {
                if e.mat == 0 {
                    c[(e.row, e.col)] += e.value;
                    if e.row != e.col {
                        c[(e.col, e.row)] += e.value;
                    }
                } else {
                    ents.push((e.mat - 1, e.row, e.col, -e.value));
                }
            }
            Blk { n: blk.size, c, ents }
        })
        .collect();
    let fail = |status, msg: String, it| SolverReport {
        status,
        bound: f64::NAN,
        primal_obj: f64::NAN,
        dual_obj: f64::NAN,
        gap: f64::NAN,
        dual_infeasibility: f64::NAN,
        primal_infeasibility: f64::NAN,
        iterations: it,
        solve_seconds: start.elapsed().as_secs_f64(),
        y: vec![0.0; m],
        message: msg,
    };
    let rows: Vec<(Vec<(usize, f64)>, f64)> = sdp.eqs.iter().map(|r| (r.coeffs.clone(), r.rhs)).collect();
    let Some((e, beta)) = independent_rows(&rows, m) else {
        return fail(SolveStatus::Infeasible, "inconsistent equality rows".into(), 0);
    };
    let (e_orig, beta_orig) = (e, beta);
    let mut w = vec![0.0f64; m];
    for blk in &blocks {
        for &(i, p, q, a) in &blk.ents {
            w[i] += if p == q { a * a } else { 2.0 * a * a };
        }
    }
    let w: Vec<f64> = w.into_iter().map(|v| if v > 0.0 { v.sqrt() } else { 1.0 }).collect();
    let elim = Elimination::new(&e_orig, &beta_orig, &w);
    let (blocks, b, shift) = elim.reduce(&blocks, &b);
    let Some(basis) = Basis::new(&blocks, &b) else {
        return fail(
            SolveStatus::NumericalFailure,
            "objective not constant along an unconstrained direction: relaxation unbounded".into(),
            0,
        );
    };
    let (blocks, b) = basis.reduce(&blocks, &b);
    let blocks: Vec<Blk> = blocks.iter().map(equilibrate).collect();
    let m = basis.keep.len();
    let e = DMatrix::<f64>::zeros(0, m);
    let beta = DVector::<f64>::zeros(0);
    let neq = 0;
    let ntot: usize = blocks.iter().map(|b| b.n).sum();

    // Starting point.
    let mut anorm = vec![0.0f64; m];
    for blk in &blocks {
        for &(i, p, q, a) in &blk.ents {
            anorm[i] += if p == q { a * a } else { 2.0 * a * a };
        }
    }
    let anorm: Vec<f64> = anorm.into_iter().map(f64::sqrt).collect();
    let mut x: Vec<DMatrix<f64>> = Vec::new();
    let mut s: Vec<DMatrix<f64>> = Vec::new();
    for blk in &blocks {
        let nb = blk.n as f64;
        let mut xi = 10f64.max(nb.sqrt());
        let mut eta = 10f64.max(nb.sqrt()).max(blk.c.norm());
        for &(i, _, _, _) in &blk.ents {
            xi = xi.max(nb * (1.0 + b[i].abs()) / (1.0 + anorm[i]));
            eta = eta.max(anorm[i]);
        }
        x.push(DMatrix::identity(blk.n, blk.n) * xi);
        s.push(DMatrix::identity(blk.n, blk.n) * eta);
    }
    let mut y = DVector::zeros(m);
    let mut w = DVector::zeros(neq);
    let bnorm = 1.0 + b.norm();
    let cnorm = 1.0 + blocks.iter().map(|b| b.c.norm_squared()).sum::<f64>().sqrt();
    let betanorm = 1.0 + beta.norm();

    let mut status = SolveStatus::IterLimit;
    let mut message = String::new();
    let mut iter = 0;
    let (mut pobj, mut dobj, mut gap, mut pinf, mut dinf);
    // Best iterate so far, scored by its worst relative residual.
    let mut best: Option<(f64, DVector<f64>, f64, f64, f64)> = None;
    loop {
        // Residuals.
        let mut ax = DVector::zeros(m);
        for (blk, xb) in blocks.iter().zip(&x) {
            blk.apply(xb, &mut ax);
        }
        let rp = &b - &ax + e.transpose() * &w;
        let rd: Vec<DMatrix<f64>> = blocks
            .iter()
            .zip(&s)
            .map(|(blk, sb)| &blk.c - blk.combine(&y) - sb)
            .collect();
        let re = &beta - &e * &y;
        pobj = blocks.iter().zip(&x).map(|(blk, xb)| inner(&blk.c, xb)).sum::<f64>() - beta.dot(&w) + shift;
        dobj = b.dot(&y) + shift;
        gap = (pobj - dobj).abs() / (1.0 + (sign * dobj + sdp.offset).abs());
        pinf = rp.norm() / bnorm;
        dinf = (rd.iter().map(|r| r.norm_squared()).sum::<f64>().sqrt() / cnorm).max(re.norm() / betanorm);
        let mu = x.iter().zip(&s).map(|(a, b)| inner(a, b)).sum::<f64>() / ntot.max(1) as f64;
        let score = (gap / opts.gap_tol).max(pinf / opts.feas_tol).max(dinf / opts.feas_tol);
        if best.as_ref().map_or(true, |b| score < b.0) {
            best = Some((score, y.clone(), pobj, dobj, pinf));
        }
        if opts.verbose {
            eprintln!("{iter:3} pobj {pobj:+.8e} dobj {dobj:+.8e} gap {gap:.1e} pinf {pinf:.1e} dinf {dinf:.1e} mu {mu:.1e}");
        }
        if gap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol {
            status = SolveStatus::Optimal;
            break;
        }
        if ntot == 0 {
            status = SolveStatus::NumericalFailure;
            message = "no semidefinite blocks".into();
            break;
        }
        if iter >= opts.max_iter {
            break;
        }
        let xmax = x.iter().map(|m| m.amax()).fold(0.0, f64::max);
        if xmax > opts.divergence {
            status = SolveStatus::Infeasible;
            message = "certificate iterates diverge: relaxation infeasible".into();
            break;
        }
        if y.amax() > opts.divergence || w.amax() > opts.divergence {
            status = SolveStatus::NumericalFailure;
            message = "moment iterates diverge: relaxation unbounded".into();
            break;
        }
        iter += 1;

        // Schur complement.
        let mut sinv = Vec::with_capacity(blocks.len());
        let mut xchol = Vec::with_capacity(blocks.len());
        let mut schol = Vec::with_capacity(blocks.len());
        let mut ok = true;
        for (xb, sb) in x.iter().zip(&s) {
            match (Cholesky::new(xb.clone()), Cholesky::new(sb.clone())) {
                (Some(cx), Some(cs)) => {
                    sinv.push(cs.inverse());
                    xchol.push(cx);
                    schol.push(cs);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            status = SolveStatus::NumericalFailure;
            message = "iterate lost positive definiteness".into();
            break;
        }
        let mut mm = DMatrix::zeros(m, m);
        for ((blk, xb), si) in blocks.iter().zip(&x).zip(&sinv) {
            blk.schur(xb, si, &mut mm);
        }
        let Some(newton) = factor(&mm, &e) else {
            status = SolveStatus::NumericalFailure;
            message = "Schur complement not positive definite".into();
            break;
        };

        let direction = |sigma_mu: f64, corr: Option<&Direction>| -> Direction {
            // G = σμ S⁻¹ - X - X Rd S⁻¹ (- dXa dSa S⁻¹)
            let mut rhs = rp.clone();
            let mut gs = Vec::with_capacity(blocks.len());
            for k in 0..blocks.len() {
                let mut g = &sinv[k] * sigma_mu - &x[k] - &x[k] * &rd[k] * &sinv[k];
                if let Some(c) = corr {
                    g -= &c.dx[k] * &c.ds[k] * &sinv[k];
                }
                let mut a = DVector::zeros(m);
                blocks[k].apply(&g, &mut a);
                rhs -= a;
                gs.push(g);
            }
            let (dy, dw) = newton.solve(&e, &rhs, &re);
            let mut dx = Vec::with_capacity(blocks.len());
            let mut ds = Vec::with_capacity(blocks.len());
            for k in 0..blocks.len() {
                let dsk = &rd[k] - blocks[k].combine(&dy);
                let dxk = sym(&(&gs[k] + &x[k] * blocks[k].combine(&dy) * &sinv[k]));
                dx.push(dxk);
                ds.push(dsk);
            }
            Direction { dx, ds, dy, dw }
        };
        let steps = |d: &Direction| -> (f64, f64) {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for k in 0..blocks.len() {
                ap = ap.min(max_step(&xchol[k], &d.dx[k]));
                ad = ad.min(max_step(&schol[k], &d.ds[k]));
            }
            (ap, ad)
        };

        // Predictor.
        let pred = direction(0.0, None);
        let (ap, ad) = steps(&pred);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mu_aff = x
            .iter()
            .zip(&s)
            .zip(pred.dx.iter().zip(&pred.ds))
            .map(|((xb, sb), (dxb, dsb))| inner(&(xb + dxb * ap), &(sb + dsb * ad)))
            .sum::<f64>()
            / ntot as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        // Corrector.
        let d = direction(sigma * mu, Some(&pred));
        let (ap, ad) = steps(&d);
        let ap = (opts.step_fraction * ap).min(1.0);
        let ad = (opts.step_fraction * ad).min(1.0);
        for k in 0..blocks.len() {
            x[k] += &d.dx[k] * ap;
            s[k] += &d.ds[k] * ad;
        }
        w += &d.dw * ap;
        y += &d.dy * ad;
        if ap < 1e-10 && ad < 1e-10 {
            message = "step length collapsed".into();
            break;
        }
    }

    if status != SolveStatus::Optimal {
        if let Some((score, by, bp, bd, bpi)) = best.take() {
            if score <= 1e3 {
                (y, pobj, dobj, pinf) = (by, bp, bd, bpi);
                status = SolveStatus::NearOptimal;
                message.clear();
            }
        }
    }

    // Moment-side feasibility of the returned y.
    let mut viol = 0.0f64;
    for blk in &blocks {
        let f = &blk.c - blk.combine(&y);
        viol = viol.max(-min_eig(&f));
    }
    let y = elim.recover(&basis.recover(&y));
    let eq_res = if e_orig.nrows() == 0 {
        0.0
    } else {
        (&beta_orig - &e_orig * &y).amax()
    };
    let primal_infeasibility = viol.max(eq_res).max(0.0);
    if status == SolveStatus::Optimal && primal_infeasibility > opts.feas_tol * cnorm {
        status = SolveStatus::NearOptimal;
    }
    if matches!(status, SolveStatus::IterLimit) && message.is_empty() {
        message = format!("no convergence after {iter} iterations");
    }
    if message == "step length collapsed" {
        status = SolveStatus::NumericalFailure;
    }
    let primal_obj = sign * dobj + sdp.offset;
    let dual_obj = sign * pobj + sdp.offset;
    let bound = if status == SolveStatus::Optimal {
        primal_obj
    } else if sign > 0.0 {
        primal_obj.max(dual_obj)
    } else {
        primal_obj.min(dual_obj)
    };
    SolverReport {
        status,
        bound,
        primal_obj,
        dual_obj,
        gap: (primal_obj - dual_obj).abs() / (1.0 + primal_obj.abs()),
        dual_infeasibility: pinf,
        primal_infeasibility,
        iterations: iter,
        solve_seconds: start.elapsed().as_secs_f64(),
        y: y.iter().copied().collect(),
        message,
    }
}

/// `E y = β` solved for pivot columns by Gauss–Jordan elimination:
/// `y_pivot[k] = rhs[k] - Σ_f r[(k, f)] y_free[f]`.
struct Elimination {
    m: usize,
    pivots: Vec<usize>,
    free: Vec<usize>,
    r: DMatrix<f64>,
    rhs: DVector<f64>,
}

impl Elimination {
    /// Gauss-Jordan with full pivoting on the matrix with columns measured by the block
    /// norms `w` and rows by their largest entry.
    fn new(e: &DMatrix<f64>, beta: &DVector<f64>, w: &[f64]) -> Self {
        let (neq, m) = e.shape();
        let mut a = e.clone();
        let mut rhs = beta.clone();
        for k in 0..neq {
            let big = (0..m).map(|j| (a[(k, j)] / w[j]).abs()).fold(0.0, f64::max);
            if big > 0.0 {
                for j in 0..m {
                    a[(k, j)] /= big;
                }
                rhs[k] /= big;
            }
        }
        let mut pivots = vec![usize::MAX; neq];
        let mut is_pivot = vec![false; m];
        let mut row_done = vec![false; neq];
        for _ in 0..neq {
            let (mut best, mut at) = (0.0, (usize::MAX, usize::MAX));
            for k in (0..neq).filter(|&k| !row_done[k]) {
                for j in (0..m).filter(|&j| !is_pivot[j]) {
                    let v = (a[(k, j)] / w[j]).abs();
                    if v > best {
                        best = v;
                        at = (k, j);
                    }
                }
            }
            // rows are independent, so a pivot always exists
            let (k, col) = at;
            let piv = a[(k, col)];
            for j in 0..m {
                a[(k, j)] /= piv;
            }
            rhs[k] /= piv;
            for r in 0..neq {
                let f = a[(r, col)];
                if r != k && f != 0.0 {
                    for j in 0..m {
                        a[(r, j)] -= f * a[(k, j)];
                    }
                    rhs[r] -= f * rhs[k];
                }
            }
            is_pivot[col] = true;
            row_done[k] = true;
            pivots[k] = col;
        }
        let free: Vec<usize> = (0..m).filter(|&j| !is_pivot[j]).collect();
        let r = DMatrix::from_fn(neq, free.len(), |k, f| {
            let v = a[(k, free[f])];
            if v.abs() < 1e-14 {
                0.0
            } else {
                v
            }
        });
        Self {
            m,
            pivots,
            free,
            r,
            rhs,
        }
    }

    /// Blocks, objective and objective constant over the free variables.
    fn reduce(&self, blocks: &[Blk], b: &DVector<f64>) -> (Vec<Blk>, DVector<f64>, f64) {
        if self.pivots.is_empty() {
            return (blocks.iter().map(Blk::clone).collect(), b.clone(), 0.0);
        }
        let mut slot = vec![None; self.m];
        for (f, &j) in self.free.iter().enumerate() {
            slot[j] = Some(f);
        }
        let mut pivot_row = vec![None; self.m];
        for (k, &j) in self.pivots.iter().enumerate() {
            pivot_row[j] = Some(k);
        }
        let out = blocks
            .iter()
            .map(|blk| {
                let mut c = blk.c.clone();
                let mut acc: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
                for &(i, p, q, a) in &blk.ents {
                    if let Some(f) = slot[i] {
                        *acc.entry((f, p, q)).or_default() += a;
                        continue;
                    }
                    let k = pivot_row[i].expect("pivot or free");
                    c[(p, q)] -= a * self.rhs[k];
                    if p != q {
                        c[(q, p)] -= a * self.rhs[k];
                    }
                    for f in 0..self.free.len() {
                        let rk = self.r[(k, f)];
                        if rk != 0.0 {
                            *acc.entry((f, p, q)).or_default() -= a * rk;
                        }
                    }
                }
                let ents = acc
                    .into_iter()
                    .filter(|&(_, v)| v.abs() > 1e-15)
                    .map(|((f, p, q), v)| (f, p, q, v))
                    .collect();
                Blk { n: blk.n, c, ents }
            })
            .collect();
        let bp = DVector::from_iterator(self.pivots.len(), self.pivots.iter().map(|&j| b[j]));
        let bf = DVector::from_iterator(self.free.len(), self.free.iter().map(|&j| b[j]));
        (out, bf - self.r.transpose() * &bp, bp.dot(&self.rhs))
    }

    fn recover(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.m);
        for (f, &j) in self.free.iter().enumerate() {
            y[j] = z[f];
        }
        let yp = &self.rhs - &self.r * z;
        for (k, &j) in self.pivots.iter().enumerate() {
            y[j] = yp[k];
        }
        y
    }
}

/// Variables whose matrices `A_i` are linearly independent (greedy pivoted Cholesky
/// of the normalized Gram matrix). The others are fixed at zero, which loses nothing
/// when the objective is constant along the dependent directions. Kept variables are
/// rescaled to `z_i = ‖A_i‖ y_i`.
struct Basis {
    m: usize,
    keep: Vec<usize>,
    scale: Vec<f64>,
}

impl Basis {
    fn new(blocks: &[Blk], b: &DVector<f64>) -> Option<Self> {
        let m = b.len();
        let mut g = DMatrix::<f64>::zeros(m, m);
        for blk in blocks {
            let mut at: BTreeMap<(usize, usize), Vec<(usize, f64)>> = BTreeMap::new();
            for &(i, p, q, a) in &blk.ents {
                let w = if p == q { a } else { a * std::f64::consts::SQRT_2 };
                at.entry((p, q)).or_default().push((i, w));
            }
            for v in at.values() {
                for &(i, a) in v {
                    for &(j, c) in v {
                        g[(i, j)] += a * c;
                    }
                }
            }
        }
        let scale: Vec<f64> = (0..m).map(|i| if g[(i, i)] > 0.0 { g[(i, i)].sqrt() } else { 1.0 }).collect();
        for i in 0..m {
            for j in 0..m {
                g[(i, j)] /= scale[i] * scale[j];
            }
        }
        let b = DVector::from_fn(m, |i, _| b[i] / scale[i]);
        let mut d: Vec<f64> = (0..m).map(|i| g[(i, i)]).collect();
        let mut l = DMatrix::<f64>::zeros(m, m);
        let mut chosen: Vec<usize> = Vec::new();
        let mut used = vec![false; m];
        loop {
            let Some(piv) = (0..m).filter(|&i| !used[i]).max_by(|&i, &j| d[i].total_cmp(&d[j])) else {
                break;
            };
            if d[piv] <= 1e-11 {
                break;
            }
            let k = chosen.len();
            let root = d[piv].sqrt();
            for i in 0..m {
                if used[i] || i == piv {
                    continue;
                }
                let mut v = g[(i, piv)];
                for t in 0..k {
                    v -= l[(i, t)] * l[(piv, t)];
                }
                l[(i, k)] = v / root;
                d[i] -= l[(i, k)] * l[(i, k)];
            }
            l[(piv, k)] = root;
            used[piv] = true;
            chosen.push(piv);
        }
        if chosen.len() < m {
            // objective must lie in the span of the kept rows: b_D = c_Dᵀ b_I
            let r = chosen.len();
            let lii = DMatrix::from_fn(r, r, |a, c| l[(chosen[a], c)]);
            let bi = DVector::from_iterator(r, chosen.iter().map(|&i| b[i]));
            let t = lii.solve_lower_triangular(&bi).expect("nonsingular pivots");
            let bscale = 1.0 + b.amax();
            for j in (0..m).filter(|&j| !used[j]) {
                let lj = DVector::from_iterator(r, (0..r).map(|c| l[(j, c)]));
                if (b[j] - lj.dot(&t)).abs() > 1e-8 * bscale {
                    return None;
                }
            }
        }
        chosen.sort_unstable();
        Some(Self { m, keep: chosen, scale })
    }

    fn reduce(&self, blocks: &[Blk], b: &DVector<f64>) -> (Vec<Blk>, DVector<f64>) {
        let mut slot = vec![None; self.m];
        for (k, &i) in self.keep.iter().enumerate() {
            slot[i] = Some(k);
        }
        let out = blocks
            .iter()
            .map(|blk| Blk {
                n: blk.n,
                c: blk.c.clone(),
                ents: blk
                    .ents
                    .iter()
                    .filter_map(|&(i, p, q, a)| slot[i].map(|k| (k, p, q, a / self.scale[i])))
                    .collect(),
            })
            .collect();
        let bk = DVector::from_iterator(self.keep.len(), self.keep.iter().map(|&i| b[i] / self.scale[i]));
        (out, bk)
    }

    fn recover(&self, z: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.m);
        for (k, &i) in self.keep.iter().enumerate() {
            y[i] = z[k] / self.scale[i];
        }
        y
    }
}

/// Congruence `D F D` with `D_pp = 1 / sqrt(max |F_j[p, p]|)`, which keeps the PSD
/// constraint and evens out the diagonal scale of the block.
fn equilibrate(blk: &Blk) -> Blk {
    let mut big: Vec<f64> = (0..blk.n).map(|p| blk.c[(p, p)].abs()).collect();
    for &(_, p, q, a) in &blk.ents {
        if p == q {
            big[p] = big[p].max(a.abs());
        }
    }
    let d: Vec<f64> = big.iter().map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 }).collect();
    Blk {
        n: blk.n,
        c: DMatrix::from_fn(blk.n, blk.n, |p, q| blk.c[(p, q)] * d[p] * d[q]),
        ents: blk.ents.iter().map(|&(i, p, q, a)| (i, p, q, a * d[p] * d[q])).collect(),
    }
}

/// Cholesky of the Schur complement (regularized if needed) and of `E M⁻¹ Eᵀ`.
fn factor(mm: &DMatrix<f64>, e: &DMatrix<f64>) -> Option<Newton> {
    let m = mm.nrows();
    let dmax = (0..m).map(|i| mm[(i, i)]).fold(0.0, f64::max).max(1e-300);
    let mut reg = 0.0;
    for attempt in 0..6 {
        let mut a = mm.clone();
        if reg > 0.0 {
            for i in 0..m {
                a[(i, i)] += reg;
            }
        }
        if let Some(chol) = Cholesky::new(a) {
            if e.nrows() == 0 {
                return Some(Newton { chol, h: None });
            }
            let z = chol
                .l()
                .solve_lower_triangular(&e.transpose())
                .expect("triangular solve");
            let h = z.transpose() * &z;
            if let Some(hc) = Cholesky::new(h) {
                return Some(Newton { chol, h: Some(hc) });
            }
        }
        reg = dmax * 1e-14 * 100f64.powi(attempt);
    }
    None
}
