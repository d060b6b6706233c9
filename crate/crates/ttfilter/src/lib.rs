//! Tensor-train nonlinear filtering.
//!
//! This crate solves the pathwise-robust DMZ equation of nonlinear filtering
//! with an explicit finite-difference scheme compressed in quantized
//! tensor-train (QTT) format. The expensive part of the solve — the local
//! forward-Kolmogorov propagator — is assembled once per model/grid in an
//! offline stage; the online stage advances the conditional density through
//! each observation interval and assimilates observation increments with
//! Kronecker-built exponential factors.
//!
//! The crate is organized as a library with a thin benchmark CLI on top:
//!
//! - [`tensor`] — dense tensors plus the TT/QTT format and its algebra
//!   (compression, rounding, addition, Hadamard and operator products,
//!   Kronecker assembly, inner products, binary reshaping).
//! - [`polyadic`] — multivariate functions given as sums of products of
//!   low-dimensional factors, the structure that makes Kronecker assembly
//!   cheap.
//! - [`operators`] — the offline stage: discretized Laplacian, convection
//!   and potential operators, stability checks, and the precomputed
//!   propagator with checkpointing.
//! - [`filter`] — the online stage: density prediction, observation
//!   assimilation, rescaling, moments, and marginal export.
//! - [`models`] — signal–observation models, Euler–Maruyama simulation, and
//!   the built-in experiment presets.
//! - [`baselines`] — bootstrap particle filter and continuous-discrete
//!   extended Kalman filter consuming the same trajectories.
//! - [`bench`] — experiment configs, seeded multi-trial runs, RMSE, and
//!   CSV/JSON reporting.
//!
//! Runnable walkthroughs for each area live in `examples/`.

pub mod baselines;
pub mod bench;
pub mod filter;
pub mod models;
pub mod operators;
pub mod polyadic;
pub mod rng;
pub mod tensor;
