//! Numerical engines: a Schrödinger grid integrator, a Fokker–Planck density
//! integrator and a stochastic trajectory sampler.

mod fokker_planck;
mod sampler;
mod schrodinger;

pub use fokker_planck::{cell_mass, fokker_planck_evolve, fokker_planck_evolve_with, Boundary, FokkerPlanckOptions};
pub use sampler::{
    estimate_drifts, sample_trajectories, DriftEstimates, DriftSource, Frame, InitialPositions, RecordPolicy,
    SamplerConfig, TrajectoryEnsemble, WaveFieldDrift, MIN_BIN_SAMPLES,
};
pub use schrodinger::{schrodinger_evolve, schrodinger_evolve_with, EvolveOptions, PotentialSpec, SchrodingerStepper};
