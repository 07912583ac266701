//! Assemble a sublevel relaxation, write it in SDPA sparse format and parse it back.
//!
//! `cargo run --example sdpa_export -- [out.dat-s]`

use sublevel::bench::{build_config, Instance, Prepared};
use sublevel::problems::GraphInstance;
use sublevel::sdp::{assemble, parse_sdpa, solve, to_sdpa_string, SolverOptions};
use sublevel::sublevel::SublevelConfig;

fn main() -> sublevel::Result<()> {
    let prep = Prepared::new(Instance::maxcut(&GraphInstance::random("g12", 12, 0.3, true, 2)))?;
    let relax = build_config(&prep, &SublevelConfig::new(1, 4, 1), &SolverOptions::default())?;
    let sdp = assemble(&relax)?;
    let text = to_sdpa_string(&sdp, "g12 l=4 q=1");
    let back = parse_sdpa(&text)?;
    assert_eq!(to_sdpa_string(&back, "g12 l=4 q=1"), text);
    println!("m = {}, blocks {:?}", sdp.m, sdp.block_sizes());
    println!("bound from the parsed copy: {:.6}", solve(&back, &SolverOptions::default()).bound());
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(&path, &text)?,
        None => print!("{}", text.lines().take(8).collect::<Vec<_>>().join("\n") + "\n...\n"),
    }
    Ok(())
}
