use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poly::PopInstance;
use crate::problems::{
    encode_cert, encode_lipschitz, encode_maxclique, encode_maxcut, encode_miqcp, encode_qcqp, laplacian,
    parse_rudy, GraphInstance, NNInstance, QuadInstance,
};
use crate::sdp::{extract_moment_matrix, solve_relaxation, SolverOptions, SolverReport};
use crate::sparsity::{clique_cover, CliqueCover};
use crate::sublevel::{
    build_relaxation, select_subsets, working_cover, HeuristicInput, PerOwner, Relaxation, SublevelConfig,
    SubsetPlan,
};

/// Problem class of an instance file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Problem {
    MaxCut,
    MaxClique,
    Miqcp,
    Qcqp,
    Lip,
    Cert,
    PopJson,
}

impl Problem {
    pub const ALL: [Problem; 7] = [
        Problem::MaxCut,
        Problem::MaxClique,
        Problem::Miqcp,
        Problem::Qcqp,
        Problem::Lip,
        Problem::Cert,
        Problem::PopJson,
    ];
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::MaxCut => "maxcut",
            Problem::MaxClique => "maxclique",
            Problem::Miqcp => "miqcp",
            Problem::Qcqp => "qcqp",
            Problem::Lip => "lip",
            Problem::Cert => "cert",
            Problem::PopJson => "pop-json",
        })
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.to_string() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown problem {s:?}")))
    }
}

/// An encoded instance plus the symmetric matrix the norm heuristics read.
#[derive(Clone, Debug)]
pub struct Instance {
    pub problem: Problem,
    pub pop: PopInstance,
    pub weights: DMatrix<f64>,
}

impl Instance {
    /// Wraps a POP; the heuristic matrix is the quadratic part of its objective.
    pub fn from_pop(problem: Problem, pop: PopInstance) -> Self {
        let weights = objective_matrix(&pop);
        Self { problem, pop, weights }
    }

    pub fn maxcut(g: &GraphInstance) -> Self {
        Self {
            problem: Problem::MaxCut,
            pop: encode_maxcut(g),
            weights: laplacian(g),
        }
    }

    pub fn maxclique(g: &GraphInstance) -> Self {
        let unweighted = GraphInstance::new(&*g.name, g.n, g.edges.iter().map(|&(i, j, _)| (i, j, 1.0)))
            .expect("edges already validated");
        Self {
            problem: Problem::MaxClique,
            pop: encode_maxclique(g),
            weights: laplacian(&unweighted),
        }
    }

    pub fn name(&self) -> &str {
        &self.pop.name
    }
}

/// Symmetric matrix of the degree-2 part of the objective: `f ≈ xᵀQx + ...`.
pub fn objective_matrix(pop: &PopInstance) -> DMatrix<f64> {
    let n = pop.nvars;
    let mut q = DMatrix::zeros(n, n);
    for (m, c) in pop.objective.terms() {
        if m.degree() != 2 {
            continue;
        }
        let vars: Vec<usize> = m.variables().collect();
        match vars[..] {
            [i] => q[(i, i)] += c,
            [i, j] => {
                q[(i, j)] += c / 2.0;
                q[(j, i)] += c / 2.0;
            }
            _ => {}
        }
    }
    q
}

/// Reads and encodes an instance file: rudy edge lists for the graph problems, quadratic
/// and network JSON for the others, native POP JSON for `pop-json`.
pub fn load_instance(problem: Problem, path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance").to_string();
    let mut inst = match problem {
        Problem::MaxCut => Instance::maxcut(&parse_rudy(path)?),
        Problem::MaxClique => Instance::maxclique(&parse_rudy(path)?),
        Problem::Miqcp => Instance::from_pop(problem, encode_miqcp(&QuadInstance::read(path)?)?),
        Problem::Qcqp => Instance::from_pop(problem, encode_qcqp(&QuadInstance::read(path)?)?),
        Problem::Lip => Instance::from_pop(problem, encode_lipschitz(&NNInstance::read(path)?)?),
        Problem::Cert => Instance::from_pop(problem, encode_cert(&NNInstance::read(path)?)?),
        Problem::PopJson => {
            Instance::from_pop(problem, PopInstance::from_json_str(&std::fs::read_to_string(path)?)?)
        }
    };
    if matches!(problem, Problem::Lip | Problem::Cert) {
        inst.pop.name = stem;
    }
    Ok(inst)
}

/// Instance with its clique cover, shared by every run on it.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub instance: Instance,
    pub cover: CliqueCover,
}

impl Prepared {
    pub fn new(instance: Instance) -> Result<Self> {
        instance.pop.validate()?;
        let cover = clique_cover(&instance.pop)?;
        Ok(Self { instance, cover })
    }
}

/// Result of one relaxation solve.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub relaxation: Relaxation,
    pub plan: SubsetPlan,
    pub report: SolverReport,
    /// Moment vector indexed like the relaxation dictionary.
    pub moments: Vec<f64>,
    pub build_seconds: f64,
}

impl RunOutcome {
    pub fn bound(&self) -> f64 {
        self.report.bound()
    }
}

/// The same configuration without sublevel blocks.
pub fn base_config(cfg: &SublevelConfig) -> SublevelConfig {
    SublevelConfig {
        level: PerOwner::Uniform(0),
        depth: PerOwner::Uniform(0),
        ..cfg.clone()
    }
}

/// Auxiliary heuristic data: the instance matrix, and for the moment-based heuristics
/// the order-1 moment matrices of a solved base relaxation.
pub fn heuristic_input(prep: &Prepared, cfg: &SublevelConfig, opts: &SolverOptions) -> Result<HeuristicInput> {
    let mut aux = HeuristicInput::default();
    if cfg.heuristic.needs_laplacian() {
        aux.laplacian = Some(prep.instance.weights.clone());
    }
    if cfg.heuristic.needs_moments() {
        let base = build_relaxation(&prep.instance.pop, &prep.cover, &base_config(cfg), &SubsetPlan::empty())?;
        let sol = solve_relaxation(&base, opts)?;
        let work = working_cover(&prep.instance.pop, &prep.cover, cfg.mode);
        let mats = work
            .cliques()
            .iter()
            .map(|c| extract_moment_matrix(&base, &sol.moments, c))
            .collect::<Result<Vec<_>>>()?;
        aux.moments = Some(mats);
    }
    Ok(aux)
}

/// Selects subsets, builds and solves one relaxation.
pub fn run_config(prep: &Prepared, cfg: &SublevelConfig, opts: &SolverOptions) -> Result<RunOutcome> {
    let start = Instant::now();
    let aux = heuristic_input(prep, cfg, opts)?;
    let plan = select_subsets(&prep.instance.pop, &prep.cover, cfg, &aux)?;
    let relaxation = build_relaxation(&prep.instance.pop, &prep.cover, cfg, &plan)?;
    let build_seconds = start.elapsed().as_secs_f64();
    let sol = solve_relaxation(&relaxation, opts)?;
    Ok(RunOutcome {
        relaxation,
        plan,
        report: sol.report,
        moments: sol.moments,
        build_seconds,
    })
}

/// Builds the relaxation of `cfg` without solving it.
pub fn build_config(prep: &Prepared, cfg: &SublevelConfig, opts: &SolverOptions) -> Result<Relaxation> {
    let aux = heuristic_input(prep, cfg, opts)?;
    let plan = select_subsets(&prep.instance.pop, &prep.cover, cfg, &aux)?;
    build_relaxation(&prep.instance.pop, &prep.cover, cfg, &plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Monomial, Polynomial, Sense};

    #[test]
    fn problem_names_round_trip() {
        for p in Problem::ALL {
            assert_eq!(p.to_string().parse::<Problem>().unwrap(), p);
        }
        assert!("tsp".parse::<Problem>().is_err());
    }

    #[test]
    fn objective_matrix_halves_cross_terms() {
        let mut f = Polynomial::zero(2);
        f.add_term(Monomial::from_pairs([(0, 1), (1, 1)]), 3.0);
        f.add_term(Monomial::from_pairs([(1, 2)]), -1.0);
        f.add_term(Monomial::var(0), 5.0);
        let q = objective_matrix(&PopInstance::new("q", 2, Sense::Min, f));
        assert_eq!(q, DMatrix::from_row_slice(2, 2, &[0.0, 1.5, 1.5, -1.0]));
    }

    #[test]
    fn moment_heuristic_runs_end_to_end() {
        let g = GraphInstance::random("r", 8, 0.5, false, 2);
        let prep = Prepared::new(Instance::maxcut(&g)).unwrap();
        let opts = SolverOptions::default();
        let shor = run_config(&prep, &SublevelConfig::base(1), &opts).unwrap().bound();
        for h in [crate::sublevel::Heuristic::H3, crate::sublevel::Heuristic::H45] {
            let cfg = SublevelConfig::new(1, 3, 1).with_heuristic(h);
            let out = run_config(&prep, &cfg, &opts).unwrap();
            assert!(out.bound() <= shor + 1e-6);
            assert!(!out.plan.is_empty());
        }
    }
}
