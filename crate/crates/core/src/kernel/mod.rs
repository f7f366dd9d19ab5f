//! Kinematics layer: units, grids, wave fields, the maximum-entropy
//! transition step, velocity and flux extraction, momenta, the energy
//! functional and continuity diagnostics.

mod continuity;
mod energy;
mod grid;
mod momenta;
mod transition;
mod units;
mod velocity;
mod wavefield;

pub use continuity::{continuity_residual, ResidualNorms};
pub use energy::{hamiltonian_functional, EnergyReport};
pub use grid::{Axis, GridSpec};
pub use momenta::{momenta, momenta_with_fields, Momenta};
pub use transition::{alpha_from_timestep, transition_step, GaussianStep};
pub use units::UnitsConfig;
pub use velocity::{velocities_from_wavefield, velocities_with_route, GradientRoute, VelocityFields};
pub use wavefield::{decompose, Decomposition, WaveField, AMPLITUDE_FLOOR};
