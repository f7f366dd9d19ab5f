use super::units::UnitsConfig;
use crate::error::{Error, Result};

/// Gaussian short-step transition: mean displacement and the isotropic
/// covariance scale `1/α`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStep {
    pub mean: Vec<f64>,
    pub covariance_scale: f64,
}

/// `α = m / (η Δt)`.
pub fn alpha_from_timestep(units: &UnitsConfig, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::domain(format!("dt = {dt} must be positive")));
    }
    Ok(units.mass / (units.eta * dt))
}

/// Maximum-entropy transition from `x`: mean `∇φ/α` (with the drift
/// multiplier set to one), covariance `δ/α`.
pub fn transition_step(x: &[f64], drift_gradient: &[f64], alpha: f64) -> Result<GaussianStep> {
    if x.len() != drift_gradient.len() {
        return Err(Error::Shape(format!(
            "position has {} components, gradient {}",
            x.len(),
            drift_gradient.len()
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::domain(format!("alpha = {alpha} must be positive")));
    }
    Ok(GaussianStep {
        mean: drift_gradient.iter().map(|g| g / alpha).collect(),
        covariance_scale: 1.0 / alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_values() {
        let u = UnitsConfig::default();
        assert!((alpha_from_timestep(&u, 0.1).unwrap() - 10.0).abs() < 1e-12);
        let u2 = UnitsConfig::new(1.0, 2.0, 1.0).unwrap();
        assert_eq!(alpha_from_timestep(&u2, 1.0).unwrap(), 2.0);
        let a = alpha_from_timestep(&u, 0.3).unwrap();
        let a4 = alpha_from_timestep(&u, 1.2).unwrap();
        assert!((a4 - a / 4.0).abs() < 1e-12);
        assert!(alpha_from_timestep(&u, 0.0).is_err());
    }

    #[test]
    fn step_moments() {
        let s = transition_step(&[0.3, -1.0], &[0.0, 0.0], 5.0).unwrap();
        assert_eq!(s.mean, vec![0.0, 0.0]);
        let s = transition_step(&[0.0], &[2.0], 4.0).unwrap();
        assert_eq!(s.mean, vec![0.5]);
        let s2 = transition_step(&[0.0], &[2.0], 8.0).unwrap();
        assert_eq!(s2.covariance_scale, s.covariance_scale / 2.0);
        assert_eq!(s2.mean[0], s.mean[0] / 2.0);
        assert!(transition_step(&[0.0], &[1.0], -1.0).is_err());
    }
}
