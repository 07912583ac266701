//! Subset selection and assembly of sublevel moment relaxations.

mod config;
mod owners;
mod relaxation;
mod rules;
mod select;

pub use config::{Heuristic, Mode, PerOwner, SublevelConfig};
pub use owners::{owners, Owner, OwnerSource};
pub use relaxation::{
    build_relaxation, localizing_block, moment_block, reduced_basis, sublevel_localizing_block, BlockEntry, BlockTag,
    PsdBlock, Relaxation, TaggedBlock,
};
pub use rules::{anchored_walk, cyclic_window, PartSize, RulePart, SubsetRule};
pub use select::{check_plan, select_subsets, working_cover, HeuristicInput, PlanEntry, SubsetPlan};
