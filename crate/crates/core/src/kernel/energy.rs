use super::units::UnitsConfig;
use super::wavefield::WaveField;
use crate::error::{Error, Result};

/// Terms of the energy functional
/// `H = ∫ ρ(∇Φ)²/2m + (ξ/m)∫(∇ρ)²/ρ + ∫ρV` with `Φ = ħφ`, `ξ = ħ²/8`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub total: f64,
    /// Current (phase-gradient) term.
    pub current: f64,
    /// Fisher-information term.
    pub fisher: f64,
    pub potential: f64,
    /// Nodes below the amplitude floor, left out of the gradient terms.
    pub excluded_nodes: usize,
}

/// Evaluates the energy functional on a normalized field. The Fisher
/// integrand `(∇ρ)²/ρ` is evaluated as `4ρ(∇R)²`, with `ρ(∇R)²` and
/// `ρ(∇φ)²` formed from `Re` and `Im` of `ψ*∇ψ` so that both stay finite
/// through near-nodes.
pub fn hamiltonian_functional(psi: &WaveField, potential: &[f64], units: &UnitsConfig) -> Result<EnergyReport> {
    psi.check_normalized(1e-6)?;
    let grid = psi.grid();
    if potential.len() != grid.len() {
        return Err(Error::Shape(format!(
            "potential has {} values for {} nodes",
            potential.len(),
            grid.len()
        )));
    }
    let rho = psi.density();
    let mask = psi.phase_mask();
    let grad = grid.gradient(psi.amplitude());
    let n = grid.len();
    let mut phase_sq = vec![0.0; n];
    let mut log_sq = vec![0.0; n];
    for comp in &grad {
        for i in 0..n {
            if mask[i] {
                continue;
            }
            let j = psi.amplitude()[i].conj() * comp[i];
            phase_sq[i] += j.im * j.im / rho[i];
            log_sq[i] += j.re * j.re / rho[i];
        }
    }
    let hbar = units.hbar;
    let m = units.mass;
    let current = hbar * hbar / (2.0 * m) * grid.integrate(&phase_sq);
    let fisher = units.xi() / m * 4.0 * grid.integrate(&log_sq);
    let pot: Vec<f64> = rho.iter().zip(potential).map(|(r, v)| r * v).collect();
    let potential = grid.integrate(&pot);
    Ok(EnergyReport {
        total: current + fisher + potential,
        current,
        fisher,
        potential,
        excluded_nodes: mask.iter().filter(|m| **m).count(),
    })
}
