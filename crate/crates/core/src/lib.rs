//! Damped nonlinear wave equations in first-order form, with numerical checks
//! of their dissipative structure.
//!
//! The two equations
//!
//! ```text
//! u_tt + λu_t − Δu + u + f(u) = g     on a truncated whole space
//! u_tt + λu_t − Δu     + f(u) = g     on a strip bounded along axis 0
//! ```
//!
//! are rewritten for `w = (u, δu + u_t)` with `δ = λ/(λ² + 4)` as
//! `w_t + Gw = R(w)`. The crate discretizes them on Dirichlet boxes, integrates
//! them with a scheme that inherits the accretivity of `G`, and turns the
//! dissipativity, absorbing-ball, tail and attractor estimates into checks
//! that pass or fail on recorded trajectories.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attract;
pub mod config;
pub mod diagnose;
pub mod error;
pub mod geometry;
pub mod integrate;
pub mod io;
pub mod model;
pub mod phase;
pub mod random;
pub mod solve;
pub mod suite;

pub use attract::{hausdorff_semidistance, Ensemble};
pub use config::RunConfig;
pub use diagnose::{CheckReport, Verdict};
pub use error::{Error, Result};
pub use geometry::{build_grid, DomainKind, Grid, GridConfig, ScalarField};
pub use integrate::{simulate, ObserverConfig, Stepper, TimeSeries, Trajectory};
pub use model::{Constants, Corruption, ModelConfig, NonlinearitySpec, Variant};
pub use phase::{EnergySample, State};
pub use suite::{run_suite, Suite, SuiteOptions};
