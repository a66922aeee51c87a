//! Exact solvers for the maximum cardinality subset of vectors problem:
//! given integer vectors `Y` and `alpha` in `(0, 1)`, find the largest
//! non-empty `C` with `||sum_C y||^2 / |C| <= alpha ||sum_Y y||^2 / |Y|`.
//!
//! The crate provides the pseudo-polynomial dynamic program ([`dp`]), a
//! brute-force reference ([`oracle`]), hard instances derived from exact
//! cover by 3-sets ([`reductions`]), a quadratic model writer for external
//! MIQCP solvers ([`modelgen`]), seeded instance families ([`generators`])
//! and a benchmark harness ([`bench`]).

pub mod bench;
pub mod dp;
pub mod error;
pub mod format;
pub mod generators;
pub mod instance;
pub mod modelgen;
pub mod oracle;
pub mod quantize;
pub mod reductions;

pub use dp::{dp_feasible_set, dp_solve, dp_solve_with, reconstruct, Backend, DpOptions, DpStats, StateSet};
pub use error::{Error, Result};
pub use format::{parse_instance, parse_real, write_instance, write_real, RealInstance};
pub use instance::{
    is_feasible, spread_identity_check, threshold, Alpha, Instance, Solution, SolveOutcome, Threshold,
};
pub use oracle::brute_solve;
