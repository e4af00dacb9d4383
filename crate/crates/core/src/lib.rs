//! Smoothed accelerated first-order solvers for sparse recovery.
//!
//! The crate solves quadratically constrained problems of the form
//!
//! ```text
//! minimize f(x)  subject to  ‖b − A x‖₂ ≤ ε
//! ```
//!
//! where `f` is the ℓ1 norm, an analysis ℓ1 norm `‖W* x‖₁`, or the isotropic
//! total variation of an image, and `A` has orthonormal rows. The nonsmooth
//! `f` is replaced by its Moreau/Huber smoothing `f_μ` and minimized with a
//! three-sequence accelerated gradient scheme whose projections onto the
//! constraint set are available in closed form.
//!
//! Module map:
//!
//! * [`operators`]: linear maps (subsampled DCT / Hadamard / 2-D Fourier,
//!   dense matrices, dictionaries, finite differences).
//! * [`smoothing`]: smoothed regularizers with value, gradient and Lipschitz
//!   constant.
//! * [`solver`]: the accelerated solver, its projection step, stopping rule
//!   and the continuation wrapper.
//! * [`reference`]: FISTA, the closed-form support oracle and KKT residuals.
//! * [`experiment`]: problem generators, cross-solver stopping criteria and
//!   the benchmark protocol.
//! * [`config`], [`io`]: key-value configuration files and binary/PGM output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod operators;
pub mod reference;
pub mod rng;
pub mod selftest;
pub mod smoothing;
pub mod solver;
pub(crate) mod vecops;

pub use error::{Error, Result};
pub use operators::{CallCounter, LinearMap, OperatorKind, OrthoBasis, SamplingMask};
pub use smoothing::{Regularizer, SmoothedObjective};
pub use solver::{
    nesta_continuation, nesta_solve, solve_in_transform_domain, ContinuationConfig,
    ProblemInstance, SolveResult, SolverConfig, SolverPath,
};
