use crate::error::{Error, Result};

/// Physical constants of a run. The default convention is `η = ħ`, which is
/// the identification that yields the Schrödinger equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitsConfig {
    pub hbar: f64,
    pub mass: f64,
    pub eta: f64,
}

impl Default for UnitsConfig {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            eta: 1.0,
        }
    }
}

impl UnitsConfig {
    pub fn new(hbar: f64, mass: f64, eta: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("eta", eta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} = {v} must be positive")));
            }
        }
        Ok(Self { hbar, mass, eta })
    }

    /// Units with `η = ħ`.
    pub fn schrodinger(hbar: f64, mass: f64) -> Result<Self> {
        Self::new(hbar, mass, hbar)
    }

    /// Coefficient of the Fisher-information term, `ħ²/8`.
    pub fn xi(&self) -> f64 {
        self.hbar * self.hbar / 8.0
    }

    /// Diffusion constant `η/2m` of the Fokker-Planck equation.
    pub fn diffusion(&self) -> f64 {
        self.eta / (2.0 * self.mass)
    }

    /// `ħ/m`, the factor between phase gradients and velocities.
    pub fn hbar_over_m(&self) -> f64 {
        self.hbar / self.mass
    }
}
