//! Numerical laboratory for quadratic Weyl sums and Jacobi theta functions
//! on the homogeneous space of the affine special linear group.
//!
//! The crate evaluates the normalized sums `S_N(x; c, alpha) / sqrt(N)`, the
//! theta series they converge to, samples the two limiting measures on the
//! fundamental domain, and verifies the heavy-tail laws (`R^-4` rational,
//! `R^-6` irrational) together with every explicit constant that controls
//! the error terms.
//!
//! Module map:
//! - [`group`]: exact arithmetic on ASL(2,R), Iwasawa coordinates, flows,
//!   and reduction to the fundamental domain.
//! - [`windows`]: piecewise-quadratic window functions (trapezoids, dyadic
//!   truncations) with exact norms.
//! - [`oscillator`]: the harmonic-oscillator propagator / metaplectic
//!   transform of a window, closed form via Fresnel moments.
//! - [`theta`]: Jacobi theta series and the product statistic.
//! - [`weyl`]: direct high-throughput Weyl sums.
//! - [`measures`]: exact inverse-CDF samplers for the two limiting measures.
//! - [`constants`]: every explicit constant of the tail laws, with
//!   quadrature oracles for the closed forms.
//! - [`experiments`]: Monte Carlo drivers for histograms, tail curves,
//!   equidistribution, and envelope checks.
//! - [`verify`]: the acceptance checklist run by `weyl-theta verify`.

pub mod cli;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod fresnel;
pub mod group;
pub mod measures;
pub mod oscillator;
pub mod quad;
pub mod theta;
pub mod verify;
pub mod weyl;
pub mod windows;

pub use error::{Error, Result};
