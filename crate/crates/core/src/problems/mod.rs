//! Encoders for the benchmark problem classes, instance readers and generators, and
//! exact oracles for small instances.

mod graph;
mod maxclique;
mod maxcut;
mod nn;
mod oracle;
mod quad;

pub use graph::{laplacian, parse_rudy, parse_rudy_str, write_rudy, write_rudy_string, GraphInstance};
pub use maxclique::{clique_number, encode_maxclique, maxclique_optimum};
pub use maxcut::{encode_maxcut, maxcut_subsets};
pub use nn::{cert_optimum, encode_cert, encode_lipschitz, gen_random_nn, lipschitz_optimum, NNInstance};
pub use oracle::{brute_force, BruteForce, MAX_ENUMERATION_VARS};
pub use quad::{box_qp_optimum, encode_miqcp, encode_qcqp, quadratic_poly, random_quad, QuadInstance};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{solve_relaxation, SolveStatus, SolverOptions};
    use crate::sparsity::clique_cover;
    use crate::sublevel::{build_relaxation, SublevelConfig, SubsetPlan};

    #[test]
    fn shor_bound_on_four_cycle() {
        let pop = encode_maxcut(&GraphInstance::cycle(4));
        let cover = clique_cover(&pop).unwrap();
        let relax = build_relaxation(&pop, &cover, &SublevelConfig::base(1), &SubsetPlan::empty()).unwrap();
        let sol = solve_relaxation(&relax, &SolverOptions::default()).unwrap();
        assert_eq!(sol.report.status, SolveStatus::Optimal);
        assert!((sol.bound() - 4.0).abs() < 1e-5, "{}", sol.bound());
    }

    #[test]
    fn golden_network() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/nn_p1_2_p2_2_seed_42.json");
        let want = NNInstance::read(path).unwrap();
        assert_eq!(gen_random_nn(2, 2, 42).unwrap(), want);
        assert_eq!(want.to_json_string() + "\n", std::fs::read_to_string(path).unwrap());
    }
}
