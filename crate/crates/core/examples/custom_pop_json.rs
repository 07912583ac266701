//! A hand-written POP in the native JSON format: minimize a nonconvex quartic over the
//! unit disk and a box.

use sublevel::bench::{run_config, Instance, Prepared, Problem};
use sublevel::poly::PopInstance;
use sublevel::sdp::SolverOptions;
use sublevel::sublevel::SublevelConfig;

const DOC: &str = r#"{
  "name": "disk_quartic",
  "nvars": 3,
  "sense": "min",
  "objective": [[1.0, [0, 4]], [1.0, [1, 4]], [-2.0, [0, 1], [1, 1]], [-1.0, [1, 1], [2, 1]], [1.0, [2, 2]]],
  "constraints": [{"poly": [[1.0], [-1.0, [0, 2]], [-1.0, [1, 2]]], "rel": "ge"}],
  "domains": ["free", "free", {"box": [-1.0, 1.0]}]
}"#;

fn main() -> sublevel::Result<()> {
    let pop = PopInstance::from_json_str(DOC)?;
    let prep = Prepared::new(Instance::from_pop(Problem::PopJson, pop))?;
    for (d, l, q) in [(2, 0, 0), (2, 3, 1), (3, 0, 0)] {
        let out = run_config(&prep, &SublevelConfig::new(d, l, q), &SolverOptions::default())?;
        println!("d={d} l={l} q={q}  lower bound {:.6} [{}]", out.bound(), out.report.status);
    }
    Ok(())
}
