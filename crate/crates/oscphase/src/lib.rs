//! oscphase: a solver for second order inhomogeneous linear ODEs
//!
//! ```text
//! y''(t) + q(t) y(t) = f(t),    a < t < b,
//! ```
//!
//! with `q` slowly varying and positive and `f` slowly varying and real.
//!
//! The homogeneous equation is represented through a nonoscillatory phase
//! function `alpha` with basis `u = cos(alpha)/sqrt(alpha')`,
//! `v = sin(alpha)/sqrt(alpha')`; a particular solution is assembled from
//! the running oscillatory integrals of `u f` and `v f`, which are computed
//! with an adaptive Levin method instead of quadrature. The cost of both
//! stages is essentially independent of the magnitude of `q`, so the solver
//! stays fast at frequencies where step-by-step integrators would need
//! millions of steps.
//!
//! Modules mirror the pipeline:
//! - [`chebyshev`]: piecewise Chebyshev representations and transforms
//! - [`linalg`]: small dense LU / SVD / column-pivoted QR kernels
//! - [`ode_solver`]: adaptive spectral collocation for first-order systems
//! - [`phase`]: nonoscillatory phase construction and the homogeneous basis
//! - [`levin`]: adaptive Levin tables for running oscillatory integrals
//! - [`solve`]: the end-to-end inhomogeneous solver with boundary conditions
//!
//! With the default `parallel` feature, batch evaluation helpers distribute
//! work with rayon; disabling the feature gives a fully sequential build
//! with identical results.

pub mod chebyshev;
pub mod error;
pub mod levin;
pub mod linalg;
pub mod ode_solver;
pub mod phase;
pub mod quadrature;
pub mod scalar;
pub mod solve;
pub mod special;

pub use error::{Error, Result, Stage};
