//! Upper bounds on the L1 Lipschitz constant of a random one-hidden-layer ReLU network.
//!
//! `cargo run --release --example lipschitz_bound -- [p1] [p2] [seed]`

use sublevel::bench::{run_config, Instance, Prepared, Problem};
use sublevel::problems::{encode_lipschitz, gen_random_nn, lipschitz_optimum};
use sublevel::sdp::SolverOptions;
use sublevel::sublevel::SublevelConfig;

fn main() -> sublevel::Result<()> {
    let a: Vec<usize> = std::env::args().skip(1).map(|s| s.parse().expect("integer")).collect();
    let (p1, p2, seed) = (*a.first().unwrap_or(&3), *a.get(1).unwrap_or(&3), *a.get(2).unwrap_or(&0) as u64);
    let nn = gen_random_nn(p1, p2, seed)?;
    let prep = Prepared::new(Instance::from_pop(Problem::Lip, encode_lipschitz(&nn)?))?;
    println!("network {p1}x{p2}, cliques {:?}", prep.cover.cliques());
    let opts = SolverOptions::default();
    for (l, q) in [(0, 0), (2, 1), (2, 2), (4, 1)] {
        let out = run_config(&prep, &SublevelConfig::new(1, l, q), &opts)?;
        println!("l={l} q={q}  upper bound {:.6} [{}]", out.bound(), out.report.status);
    }
    if p2 <= 12 {
        println!("exact       {:.6}", lipschitz_optimum(&nn));
    }
    Ok(())
}
