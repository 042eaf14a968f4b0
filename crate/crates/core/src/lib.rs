//! Stochastic Fejér-monotone hybrid steepest descent (S-FM-HSDM) for affinely
//! constrained composite convex minimization, its hierarchical recursive
//! least-squares offspring (HRLSa, HRLSb), the ℓ1-regularized
//! least-squares variant, and the synthetic data model used to benchmark them.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense symmetric matrices, Cholesky solves, Jacobi
//!   eigendecomposition, PSD square roots and the power-iteration estimate of
//!   the spectral norm.
//! * [`maps`]: the affine nonexpansive mappings `T = Q + π` whose fixed-point
//!   set is the affine constraint.
//! * [`prox`]: proximal operators (soft thresholding, quadratic prox,
//!   product-space prox) and a brute-force scalar prox oracle.
//! * [`stats`]: running second-moment estimates `(R_n, r_n)`.
//! * [`solvers`]: the generic engine, the specialized steppers, classical
//!   RLS and Fejér diagnostics.
//! * [`datagen`]: sparse systems, IID/AR(1) inputs and SNR-calibrated noise.

// `!(x > 0.0)` is used on purpose: unlike `x <= 0.0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod prox;
pub mod solvers;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::{SymMat, Vector};
