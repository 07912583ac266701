//! RI/RG metrics, instance loading, single runs and parameter sweeps.

mod metrics;
mod pipeline;
mod sweep;

pub use metrics::{rg, rg_sense, ri, RefKind, Reference};
pub use pipeline::{
    base_config, build_config, heuristic_input, load_instance, objective_matrix, run_config, Instance, Prepared,
    Problem, RunOutcome,
};
pub use sweep::{sweep, write_csv, write_json, RunRecord, SweepGrid};
