//! Motzkin-Straus quadratic program over the simplex; the optimum is 1 - 1/ω.

use sublevel::bench::{run_config, Instance, Prepared};
use sublevel::problems::{clique_number, maxclique_optimum, GraphInstance};
use sublevel::sdp::SolverOptions;
use sublevel::sublevel::SublevelConfig;

fn main() -> sublevel::Result<()> {
    let g = GraphInstance::random("mc", 8, 0.5, false, 4);
    let prep = Prepared::new(Instance::maxclique(&g))?;
    println!("ω = {}, optimum {:.6}", clique_number(&g), maxclique_optimum(&g));
    for (l, q) in [(0, 0), (2, 1), (4, 1), (8, 1)] {
        let out = run_config(&prep, &SublevelConfig::new(1, l, q), &SolverOptions::default())?;
        println!("l={l} q={q}  bound {:.6} [{}]", out.bound(), out.report.status);
    }
    Ok(())
}
