//! Damped, linearly amplified dispersive atom-field dynamics in a truncated
//! Fock space.
//!
//! The master equation `ρ̇ = −i[H_T, ρ] + γ(J − L)ρ` with
//! `H_T = χa†aσ_z + f_ν(t)a† + f_ν*(t)a` decouples into four block equations.
//! [`blocks`] propagates each block in closed form; [`oracle`] integrates the
//! same equations numerically for verification.

// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod drive;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod phase_space;
pub mod quad;
pub mod superops;

pub use blocks::{evolve_state, AtomFieldState, PrefactorRoute};
pub use drive::DriveSpec;
pub use error::{Error, Result};
pub use fock::{FieldMatrix, FieldVector, Truncation};
pub use model::ModelParams;
pub use num_complex::Complex64;
pub use oracle::BlockKind;
