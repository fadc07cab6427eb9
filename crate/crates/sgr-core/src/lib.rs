//! Core algorithms for comparing classical iterative PDE solvers with
//! optimization-based solvers under different loss formulations.
//!
//! The crate is `no_std`-compatible (it requires `alloc`): enable the `libm`
//! feature instead of the default `std` feature to build without the standard
//! library. All state is owned and explicit; nothing here does IO, threading,
//! or timing — that lives in the companion `sgr-lab` crate.
//!
//! Module map:
//!
//! - [`linalg`] — CSR sparse matrices, dense eigenvalue decomposition,
//!   condition-number estimation, and the step-size bound for residual
//!   iterations.
//! - [`problems`] — the benchmark systems (2D Poisson, space-time Allen-Cahn,
//!   lid-driven cavity), their analytic Jacobians, and the Newton outer loop.
//! - [`losses`] — MSE, QP, GR, and SGR loss values and gradients with exact
//!   contracts.
//! - [`optimizers`] — gradient descent, Adam, L-BFGS, and learning-rate
//!   schedules.
//! - [`iterative`] — CG, restarted GMRES, explicit pseudo-time marching, and
//!   the GR/MSE stationary iterations.
//! - [`pinn_nd`] — a small fully connected network with manual reverse-mode
//!   backpropagation, chained through the discrete residuals.

#![cfg_attr(not(feature = "std"), no_std)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("sgr-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub mod iterative;
pub mod linalg;
pub mod losses;
pub(crate) mod math;
pub mod optimizers;
pub mod pinn_nd;
pub mod problems;

pub use linalg::{SparseMatrix, Spectrum};


