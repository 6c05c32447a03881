//! Scenario-driven runner for the dispersive atom-field simulator.
//!
//! A scenario (JSON) fixes the truncation, model parameters, drive, initial
//! state, time grid and requested outputs. [`run::run_scenario`] propagates it
//! with the closed-form blocks, the RK4 oracle, or both, and writes
//! `observables.csv`, `blocks_t{k}.json`, optional `q_grid_t{k}.csv` /
//! `w_grid_t{k}.csv`, and `verification.json` when both methods run.

// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod output;
pub mod run;
pub mod scenario;
pub mod verify;

pub use error::CliError;
pub use run::{run_scenario, RunSummary, Source};
pub use scenario::{Method, Overrides, Scenario};
