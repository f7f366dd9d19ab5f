//! Freely spreading Gaussian packets.

use crate::kernel::UnitsConfig;

/// Spreading time scale `T = 2mσ₀²/ħ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicTime(f64);

impl CharacteristicTime {
    pub fn new(sigma0: f64, units: &UnitsConfig) -> Self {
        assert!(sigma0 > 0.0, "sigma0 must be positive");
        Self(2.0 * units.mass * sigma0 * sigma0 / units.hbar)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `σ_t² = σ₀²(1 + (t/T)²)`.
pub fn sigma_t_sq(sigma0: f64, big_t: f64, t: f64) -> f64 {
    sigma0 * sigma0 * (1.0 + (t / big_t).powi(2))
}

/// Parameters of a packet `ψ(x, 0) ∝ exp(−(x−x₀)²/4σ₀² + ik₀(x−x₀))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub sigma0: f64,
    pub center: f64,
    pub wavenumber: f64,
}

/// Log-amplitude, phase and the three velocities of a packet at `(x, t)`.
pub(crate) fn packet_fields(p: &GaussianPacket, units: &UnitsConfig, x: f64, t: f64) -> [f64; 5] {
    let big_t = CharacteristicTime::new(p.sigma0, units).value();
    let group = units.hbar_over_m() * p.wavenumber;
    let xi = x - p.center - group * t;
    let s2 = sigma_t_sq(p.sigma0, big_t, t);
    let alpha_t = (t / big_t).atan();
    let r = -xi * xi / (4.0 * s2) - 0.25 * (2.0 * std::f64::consts::PI * s2).ln();
    let phase = p.wavenumber * (x - p.center) - 0.5 * group * p.wavenumber * t
        + xi * xi / (4.0 * s2) * (t / big_t)
        - 0.5 * alpha_t;
    let denom = t * t + big_t * big_t;
    let u = xi * big_t / denom;
    let v = group + xi * t / denom;
    [r, phase, u, v - u, v]
}

/// `(R, φ)` of the centred packet at rest.
pub fn free_gaussian(sigma0: f64, units: &UnitsConfig, x: f64, t: f64) -> (f64, f64) {
    let f = packet_fields(
        &GaussianPacket {
            sigma0,
            center: 0.0,
            wavenumber: 0.0,
        },
        units,
        x,
        t,
    );
    (f[0], f[1])
}

/// `(u, b, v)` of the centred packet at rest:
/// `u = xT/(t²+T²)`, `b = x(t−T)/(t²+T²)`, `v = xt/(t²+T²)`.
pub fn free_gaussian_velocities(sigma0: f64, units: &UnitsConfig, x: f64, t: f64) -> (f64, f64, f64) {
    let big_t = CharacteristicTime::new(sigma0, units).value();
    let denom = t * t + big_t * big_t;
    (x * big_t / denom, x * (t - big_t) / denom, x * t / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{linspace, trapezoid};

    #[test]
    fn variance_doubles_at_characteristic_time() {
        let units = UnitsConfig::default();
        let t = CharacteristicTime::new(1.3, &units).value();
        assert!((sigma_t_sq(1.3, t, t) - 2.0 * 1.3 * 1.3).abs() < 1e-14);
        assert!((sigma_t_sq(1.0, 2.0, 4.0) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn initial_phase_vanishes() {
        let units = UnitsConfig::default();
        for x in [-3.0, -0.5, 0.0, 2.0] {
            assert_eq!(free_gaussian(0.8, &units, x, 0.0).1, 0.0);
        }
    }

    #[test]
    fn normalized_at_several_times() {
        let units = UnitsConfig::new(1.0, 1.5, 1.0).unwrap();
        let big_t = CharacteristicTime::new(1.0, &units).value();
        let xs = linspace(-60.0, 60.0, 24001);
        for t in [0.0, big_t, 5.0 * big_t] {
            let rho: Vec<f64> = xs.iter().map(|x| (2.0 * free_gaussian(1.0, &units, *x, t).0).exp()).collect();
            assert!((trapezoid(&rho, xs[1] - xs[0]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn velocity_limits() {
        let units = UnitsConfig::default();
        let big_t = CharacteristicTime::new(1.0, &units).value();
        for x in [-2.0, 0.7, 3.0] {
            let (u, b, v) = free_gaussian_velocities(1.0, &units, x, big_t);
            assert_eq!(b, 0.0);
            assert!((v - (b + u)).abs() < 1e-15);
            let late = 1e8 * big_t;
            let (u, b, _) = free_gaussian_velocities(1.0, &units, x, late);
            assert!((b - x / late).abs() < 1e-6 * (x / late).abs());
            assert!(u.abs() < 1e-11);
        }
    }

    #[test]
    fn phase_matches_closed_form_at_t_equals_big_t() {
        let units = UnitsConfig::default();
        let big_t = CharacteristicTime::new(1.0, &units).value();
        for x in [-4.0, -1.0, 0.0, 2.5] {
            let (_, phi) = free_gaussian(1.0, &units, x, big_t);
            let expect = x * x / (4.0 * 2.0) - std::f64::consts::FRAC_PI_4 / 2.0;
            assert!((phi - expect).abs() < 1e-14);
        }
    }
}
