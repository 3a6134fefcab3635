// Copyright 2026 The mdc Authors
// SPDX-License-Identifier: Apache-2.0

//! Spectra, decay rates, stability and gate fidelities of molecular ensemble
//! qubits stored in self-assembled dipolar crystals.
//!
//! Everything downstream of [`scales`] works in crystal units: lengths in the
//! lattice spacing `a0`, energies in the dipole-dipole energy `U_dd`, `ħ = 1`,
//! and the molecular mass equal to the dimensionless interaction strength `γ`.

// `!(x >= 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fidelity;
pub mod homogeneous;
pub mod lifetime;
pub mod par;
pub mod rotor;
pub mod scales;
pub mod specfun;
pub mod trapped;

mod linalg;

pub use error::{Error, Result};

/// Version tag written into every JSON report and CSV header.
pub const SCHEMA_VERSION: &str = "1";
