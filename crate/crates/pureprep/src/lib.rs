//! Temporal-averaging preparation plans for effective pure states in
//! n-spin-1/2 ensembles.
//!
//! The library builds, simulates, and verifies the experiment lists whose
//! weighted average realizes the effective pure state 2^(n-1) D_0 - E/2 (and
//! the two-experiment logical-labeling variant D_0 - D_{N-1}), starting from
//! the longitudinal n-spin order 2^(n-1) I_1z...I_nz. Every unitary the
//! plans use compiles down to one-qubit rotations plus two-qubit diagonal
//! gates, and every claim is checked against an exact dense oracle.
//!
//! Module map:
//!
//! - [`pauli`] - exact product-operator (Pauli-string) algebra with
//!   Cartesian/ladder bases and coherence-order bookkeeping.
//! - [`dense`] - the 2^n x 2^n complex-matrix oracle: Kronecker assembly,
//!   projection back to sums, conjugation, matrix exponentials.
//! - [`operators`] - the named building blocks: the all-ones operator and its
//!   closed-form exponential, basis projectors, the ground phase flip, the
//!   Walsh-Hadamard and diffusion transforms, multibody propagators, and the
//!   longitudinal-order expansion of the scaled ground projector.
//! - [`identities`] - machine checks for the derivation chain the schemes
//!   rest on, each reporting a residual against tolerance.
//! - [`planner`] - experiment-list generation for the general and
//!   logical-labeling schemes, plus end-to-end dense simulation.
//! - [`compiler`] - lowering of every plan step to the one-qubit +
//!   two-qubit-diagonal gate set, the equilibrium-to-spin-order chain, and
//!   recomposition checks.
//! - [`serial`] - the JSON wire formats for plans, compiled gate files, and
//!   reports.
//! - [`cli`] - the command-line front end (plan / simulate / verify /
//!   compile / check-compile).

pub mod cli;
pub mod compiler;
pub mod dense;
pub mod error;
pub mod identities;
pub mod operators;
pub mod pauli;
pub mod planner;
pub mod serial;

pub use error::{Error, Result};
