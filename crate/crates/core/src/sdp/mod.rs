//! Block SDPs: assembly from relaxations, the embedded interior-point solver and SDPA
//! sparse files.

mod model;
mod sdpa;
mod solver;

pub use model::{assemble, assemble_mapped, extract_moment_matrix, BlockSdp, EqRow, LmiBlock, LmiEntry, VarMap};
pub use sdpa::{export_sdpa, parse_sdpa, read_sdpa, to_sdpa_string};
pub use solver::{solve, SolveStatus, SolverOptions, SolverReport};

use crate::error::Result;
use crate::sublevel::Relaxation;

/// Solver report together with the moment vector of the relaxation.
#[derive(Clone, Debug)]
pub struct RelaxationSolution {
    pub report: SolverReport,
    /// Moment values indexed like the relaxation dictionary (`moments[0] = 1`).
    pub moments: Vec<f64>,
}

impl RelaxationSolution {
    pub fn bound(&self) -> f64 {
        self.report.bound()
    }
}

/// Assembles and solves a relaxation. With variable scales `σ`, the SDP is posed in the
/// moments of `x / σ` and the result is mapped back.
pub fn solve_relaxation(relax: &Relaxation, opts: &SolverOptions) -> Result<RelaxationSolution> {
    let Some(scales) = &relax.scales else {
        let (sdp, map) = assemble_mapped(relax)?;
        let report = solve(&sdp, opts);
        let moments = map.moments(&report.y);
        return Ok(RelaxationSolution { report, moments });
    };
    // y_α = σ^α y'_α
    let w: Vec<f64> = relax
        .dict
        .monomials()
        .iter()
        .map(|m| m.exponents().iter().map(|&(i, p)| scales[i].powi(p as i32)).product())
        .collect();
    let attempt = |balance: bool| -> Result<RelaxationSolution> {
        let (sdp, map) = assemble_mapped(&rescaled(relax, &w, balance))?;
        let report = solve(&sdp, opts);
        let moments = map.moments(&report.y).iter().zip(&w).map(|(y, w)| y * w).collect();
        Ok(RelaxationSolution { report, moments })
    };
    let first = attempt(true)?;
    if first.report.status == SolveStatus::Optimal {
        return Ok(first);
    }
    let second = attempt(false)?;
    Ok(if rank(&second.report) < rank(&first.report) { second } else { first })
}

/// Moments replaced by `y'_α = y_α / w_α`. With `balance`, each block also gets the
/// diagonal congruence that brings its diagonal entries to unit scale.
fn rescaled(relax: &Relaxation, w: &[f64], balance: bool) -> Relaxation {
    let mut scaled = relax.clone();
    for tb in &mut scaled.blocks {
        for e in &mut tb.block.entries {
            e.coeff *= w[e.index];
        }
        if !balance {
            continue;
        }
        let mut big = vec![0.0f64; tb.block.size];
        for e in tb.block.entries.iter().filter(|e| e.row == e.col) {
            big[e.row] = big[e.row].max(e.coeff.abs());
        }
        let d: Vec<f64> = big.iter().map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 }).collect();
        for e in &mut tb.block.entries {
            e.coeff *= d[e.row] * d[e.col];
        }
    }
    for (i, c) in &mut scaled.objective {
        *c *= w[*i];
    }
    scaled
}

/// Orders reports by status, then by the largest residual.
fn rank(r: &SolverReport) -> (u8, f64) {
    let tier = match r.status {
        SolveStatus::Optimal => 0,
        SolveStatus::NearOptimal => 1,
        _ => 2,
    };
    let score = r.gap.max(r.dual_infeasibility).max(r.primal_infeasibility);
    (tier, if score.is_nan() { f64::INFINITY } else { score })
}
