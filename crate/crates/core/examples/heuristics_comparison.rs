//! Every subset heuristic on one instance at l in {4, 6}, q in {1, 2}, printed as a table
//! of RI/RG against the exact cut.

use sublevel::bench::{sweep, Instance, Prepared, Reference, SweepGrid};
use sublevel::problems::{brute_force, GraphInstance};
use sublevel::sdp::SolverOptions;
use sublevel::sublevel::Heuristic;

fn main() -> sublevel::Result<()> {
    let a: Vec<u64> = std::env::args().skip(1).map(|s| s.parse().expect("integer")).collect();
    let (n, seed) = (*a.first().unwrap_or(&20) as usize, *a.get(1).unwrap_or(&2));
    let g = GraphInstance::random(format!("g{n}"), n, 0.2, true, seed);
    let prep = Prepared::new(Instance::maxcut(&g))?;
    let opt = brute_force(&prep.instance.pop, 0, 0, 1e-9).value.expect("enumerable");
    let reference = Reference { value: opt, kind: Default::default(), shor: None };

    let mut grid = SweepGrid::new(vec![4, 6], vec![1, 2]);
    grid.heuristics = Heuristic::ALL_GENERIC.to_vec();
    grid.seed = 3;
    let rows = sweep(&prep, &grid.cells(), &SolverOptions::default(), 4, Some(&reference))?;

    println!("optimum {opt:.4}, Shor {:.4}", rows[0].shor.unwrap_or(f64::NAN));
    print!("{:6}", "");
    for (l, q) in [(4, 1), (4, 2), (6, 1), (6, 2)] {
        print!("  {:>16}", format!("l={l} q={q}"));
    }
    println!();
    for chunk in rows.chunks(4) {
        print!("{:6}", chunk[0].heuristic);
        for r in chunk {
            let cell = match (r.ri, r.rg) {
                (Some(ri), Some(rg)) => format!("({:.1}%, {:.1}%)", ri + 0.0, rg + 0.0),
                _ => "-".into(),
            };
            print!("  {cell:>16}");
        }
        println!();
    }
    Ok(())
}
