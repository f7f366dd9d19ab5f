//! Explicit finite-volume integration of
//! `∂ρ/∂t = −∂(bρ)/∂x + (η/2m)∂²ρ/∂x²` on a line.

use crate::error::{Error, Result};
use crate::kernel::{GridSpec, UnitsConfig};

/// Treatment of probability reaching the ends of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Boundary {
    /// No flux through the ends; total mass is conserved.
    #[default]
    Reflecting,
    /// Zero density just outside the ends; mass leaks out.
    Absorbing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FokkerPlanckOptions {
    pub boundary: Boundary,
    pub record_every: usize,
    /// Upper bound on `(η/2m)dt/dx²`.
    pub diffusion_limit: f64,
    /// Upper bound on `max|b|dt/dx`.
    pub advection_limit: f64,
}

impl Default for FokkerPlanckOptions {
    fn default() -> Self {
        Self {
            boundary: Boundary::Reflecting,
            record_every: 1,
            diffusion_limit: 0.5,
            advection_limit: 0.9,
        }
    }
}

/// Evolves `rho0` with default options.
pub fn fokker_planck_evolve(
    grid: &GridSpec,
    rho0: &[f64],
    drift: impl Fn(f64, f64) -> f64,
    units: &UnitsConfig,
    dt: f64,
    steps: usize,
) -> Result<Vec<Vec<f64>>> {
    fokker_planck_evolve_with(grid, rho0, drift, units, dt, steps, FokkerPlanckOptions::default())
}

/// Evolves `rho0` under drift `b(x, t)`. Cells are centred on the nodes;
/// face fluxes use the face drift times the mean of the adjacent densities.
/// The returned sequence starts with `rho0`.
pub fn fokker_planck_evolve_with(
    grid: &GridSpec,
    rho0: &[f64],
    drift: impl Fn(f64, f64) -> f64,
    units: &UnitsConfig,
    dt: f64,
    steps: usize,
    options: FokkerPlanckOptions,
) -> Result<Vec<Vec<f64>>> {
    if grid.dim() != 1 {
        return Err(Error::Shape("the density integrator works on a line".into()));
    }
    if rho0.len() != grid.len() {
        return Err(Error::Shape(format!("{} densities for {} nodes", rho0.len(), grid.len())));
    }
    if options.record_every == 0 {
        return Err(Error::domain("record_every must be at least 1"));
    }
    let h = grid.spacing(0);
    let d = units.diffusion();
    let n = grid.len();
    let number = d * dt / (h * h);
    if !(number <= options.diffusion_limit) {
        return Err(Error::Config(format!(
            "diffusion number {number:.4} exceeds {} (reduce dt or coarsen the grid)",
            options.diffusion_limit
        )));
    }
    let faces: Vec<f64> = (0..n - 1).map(|i| grid.axis(0).coord(i) + 0.5 * h).collect();
    let courant = |t: f64| faces.iter().map(|x| drift(*x, t).abs()).fold(0.0, f64::max) * dt / h;
    for t in [0.0, steps as f64 * dt] {
        let c = courant(t);
        if !(c <= options.advection_limit) {
            return Err(Error::Config(format!(
                "advective Courant number {c:.4} at t = {t} exceeds {}",
                options.advection_limit
            )));
        }
    }

    let mut rho = rho0.to_vec();
    let mut out = vec![rho.clone()];
    let mut flux = vec![0.0; n + 1];
    for s in 1..=steps {
        let t = (s - 1) as f64 * dt;
        for (i, x) in faces.iter().enumerate() {
            let b = drift(*x, t);
            if !(b.abs() * dt / h <= options.advection_limit) {
                return Err(Error::Config(format!(
                    "advective Courant number exceeds {} at step {s}",
                    options.advection_limit
                )));
            }
            flux[i + 1] = b * 0.5 * (rho[i] + rho[i + 1]) - d * (rho[i + 1] - rho[i]) / h;
        }
        match options.boundary {
            Boundary::Reflecting => {
                flux[0] = 0.0;
                flux[n] = 0.0;
            }
            Boundary::Absorbing => {
                let lo = grid.axis(0).min - 0.5 * h;
                let hi = grid.axis(0).max + 0.5 * h;
                flux[0] = drift(lo, t) * 0.5 * rho[0] - d * rho[0] / h;
                flux[n] = drift(hi, t) * 0.5 * rho[n - 1] + d * rho[n - 1] / h;
            }
        }
        for i in 0..n {
            rho[i] -= dt / h * (flux[i + 1] - flux[i]);
        }
        if s % options.record_every == 0 || s == steps {
            out.push(rho.clone());
        }
    }
    Ok(out)
}

/// `Σρᵢ·h`, the mass the scheme conserves.
pub fn cell_mass(grid: &GridSpec, rho: &[f64]) -> f64 {
    crate::numerics::pairwise_sum(rho) * grid.spacing(0)
}
