//! Binary quadratic program with a ball constraint and a cardinality row, compared with
//! enumeration.

use sublevel::bench::{run_config, Instance, Prepared, Problem};
use sublevel::problems::{brute_force, encode_miqcp, random_quad};
use sublevel::sdp::SolverOptions;
use sublevel::sublevel::SublevelConfig;

fn main() -> sublevel::Result<()> {
    let inst = random_quad("bqp10", 10, 3, true, true, 2);
    let pop = encode_miqcp(&inst)?;
    let exact = brute_force(&pop, 0, 0, 1e-7);
    let prep = Prepared::new(Instance::from_pop(Problem::Miqcp, pop))?;
    for (l, q) in [(0, 0), (2, 1), (4, 1), (4, 2)] {
        let out = run_config(&prep, &SublevelConfig::new(1, l, q), &SolverOptions::default())?;
        println!("l={l} q={q}  lower bound {:.6} [{}]", out.bound(), out.report.status);
    }
    println!("optimum      {:.6}", exact.value.expect("feasible"));
    Ok(())
}
