//! Bounds on the worst-case output of a ReLU network over an input ball, with the
//! ReLU encoded by complementarity.

use sublevel::bench::{run_config, Instance, Prepared, Problem};
use sublevel::problems::{cert_optimum, encode_cert, gen_random_nn};
use sublevel::sdp::SolverOptions;
use sublevel::sublevel::SublevelConfig;

fn main() -> sublevel::Result<()> {
    let mut nn = gen_random_nn(3, 3, 5)?;
    nn.eps = 0.5;
    let prep = Prepared::new(Instance::from_pop(Problem::Cert, encode_cert(&nn)?))?;
    let opts = SolverOptions::default();
    for (l, q) in [(0, 0), (2, 1), (4, 1), (4, 2)] {
        let out = run_config(&prep, &SublevelConfig::new(1, l, q), &opts)?;
        println!("l={l} q={q}  max cᵀReLU(Ax+b) <= {:.6} [{}]", out.bound(), out.report.status);
    }
    println!("attained     {:.6}", cert_optimum(&nn));
    Ok(())
}
