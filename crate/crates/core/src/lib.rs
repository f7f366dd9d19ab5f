//! Numerical laboratory for entropic dynamics.
//!
//! The crate reconstructs quantum probability flow (osmotic, drift and current
//! velocities together with their fluxes) for a handful of canonical states,
//! and checks the closed-form laws against independent numerical routes:
//! a unitary Schrödinger integrator, a Fokker-Planck integrator, stochastic
//! trajectory ensembles and finite-difference gradients.
//!
//! Module map:
//!
//! * [`inference`]: discrete probability algebra, Bayes, entropy, MaxEnt.
//! * [`kernel`]: units, grids, wave fields, velocity extraction, momenta,
//!   the energy functional and continuity diagnostics.
//! * [`states`]: closed-form catalog of states and their velocity fields.
//! * [`dynamics`]: Schrödinger and Fokker-Planck integrators, trajectory
//!   sampling and drift estimation.
//! * [`scenarios`]: the worked experiments with built-in checks.
//! * [`io`]: configuration, CSV/SVG/manifest output.
//! * [`acceptance`]: the acceptance criteria, shared by tests and the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod dynamics;
pub mod error;
pub mod inference;
pub mod io;
pub mod kernel;
pub mod numerics;
pub mod scenarios;
pub mod states;
pub mod stats;

pub use error::{Error, Result};
