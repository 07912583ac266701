//! Sublevel moment-SOS relaxations of polynomial optimization problems.
//!
//! An instance ([`poly::PopInstance`]) is split into cliques ([`sparsity`]), subsets are
//! chosen per constraint ([`sublevel::select_subsets`]), the moment relaxation is built
//! ([`sublevel::build_relaxation`]) and solved by the embedded interior-point solver or
//! exported in SDPA sparse format ([`sdp`]). Encoders for the benchmark problem classes
//! live in [`problems`], metrics and sweeps in [`bench`].

pub mod bench;
pub mod error;
pub mod poly;
pub mod problems;
pub mod sparsity;
pub mod sdp;
pub mod sublevel;

pub use error::{Error, Result};
