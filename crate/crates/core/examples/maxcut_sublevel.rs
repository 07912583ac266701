//! Max-Cut on a random sparse graph: Shor bound, then sublevel bounds at growing levels.
//!
//! `cargo run --release --example maxcut_sublevel -- [n] [seed]`

use sublevel::bench::{run_config, Instance, Prepared};
use sublevel::problems::{brute_force, GraphInstance};
use sublevel::sdp::SolverOptions;
use sublevel::sublevel::SublevelConfig;

fn main() -> sublevel::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(14, |s| s.parse().expect("n"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let g = GraphInstance::random(format!("rand{n}"), n, 0.3, true, seed);
    let prep = Prepared::new(Instance::maxcut(&g))?;
    println!("{} vertices, {} edges, {} cliques", g.n, g.edges.len(), prep.cover.len());

    let exact = brute_force(&prep.instance.pop, 0, 0, 1e-9);
    let opts = SolverOptions::default();
    for (l, q) in [(0, 0), (4, 1), (6, 1), (8, 1), (4, 2)] {
        let out = run_config(&prep, &SublevelConfig::new(1, l, q), &opts)?;
        println!(
            "l={l} q={q}  bound {:>10.5}  [{}]  blocks {:>3}  max block {:>3}",
            out.bound(),
            out.report.status,
            out.relaxation.nblocks(),
            out.relaxation.block_sizes().into_iter().max().unwrap_or(0)
        );
    }
    if let Some(v) = exact.value {
        println!("max cut       {v:>10.5}");
    }
    Ok(())
}
