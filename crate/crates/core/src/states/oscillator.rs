//! Harmonic-oscillator eigenstates and the lowest two-level superposition.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::UnitsConfig;

/// Highest quantum number accepted by the double-precision recurrence.
pub const MAX_QUANTUM_NUMBER: u32 = 60;

/// `(H_n(ξ), H_{n−1}(ξ))` by upward recurrence.
pub fn hermite_pair(n: u32, xi: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let next = 2.0 * xi * cur - 2.0 * f64::from(k) * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| f64::from(k).ln()).sum()
}

pub(crate) fn check_quantum_number(n: u32) -> Result<()> {
    if n > MAX_QUANTUM_NUMBER {
        return Err(Error::HermiteOverflow(n));
    }
    Ok(())
}

/// Log-amplitude, phase and `(u, b, v)` of eigenstate `n` at `(x, t)`.
/// The amplitude is `−∞` on nodes, where the velocities are NaN.
pub(crate) fn eigen_fields(n: u32, omega: f64, units: &UnitsConfig, x: f64, t: f64) -> [f64; 5] {
    let scale = (units.mass * omega / units.hbar).sqrt();
    let xi = scale * x;
    let (h, h_prev) = hermite_pair(n, xi);
    let ln_norm = 0.25 * (scale * scale / PI).ln() - 0.5 * (f64::from(n) * 2f64.ln() + ln_factorial(n));
    let r = ln_norm - 0.5 * xi * xi + h.abs().ln();
    let mut phase = -(f64::from(n) + 0.5) * omega * t;
    if h < 0.0 {
        phase += PI;
    }
    let u = if h == 0.0 {
        f64::NAN
    } else {
        units.hbar_over_m() * scale * (xi - 2.0 * f64::from(n) * h_prev / h)
    };
    [r, phase, u, -u, 0.0]
}

/// `ψ_n` and `dψ_n/dx`, finite on nodes as well.
pub(crate) fn eigen_value_and_slope(n: u32, omega: f64, units: &UnitsConfig, x: f64, t: f64) -> (Complex64, Complex64) {
    let scale = (units.mass * omega / units.hbar).sqrt();
    let xi = scale * x;
    let (h, h_prev) = hermite_pair(n, xi);
    let ln_norm = 0.25 * (scale * scale / PI).ln() - 0.5 * (f64::from(n) * 2f64.ln() + ln_factorial(n));
    let envelope = (ln_norm - 0.5 * xi * xi).exp();
    let rot = Complex64::from_polar(1.0, -(f64::from(n) + 0.5) * omega * t);
    let value = envelope * h;
    let slope = scale * envelope * (2.0 * f64::from(n) * h_prev - xi * h);
    (rot * value, rot * slope)
}

/// `(R, φ_w)` of eigenstate `n`; sign changes of `H_n` appear as a phase of π.
pub fn ho_eigenstate(n: u32, omega: f64, units: &UnitsConfig, x: f64, t: f64) -> Result<(f64, f64)> {
    check_quantum_number(n)?;
    if omega <= 0.0 {
        return Err(Error::domain("oscillator frequency must be positive"));
    }
    let f = eigen_fields(n, omega, units, x, t);
    Ok((f[0], f[1]))
}

/// Density and phase of `(ψ₀ + ψ₁)/√2`.
///
/// The phase is `−ωt/2 + arg(1 + ax·e^{−iωt})`, taken on the branch that is
/// continuous in `t` at fixed `x`; across `x = 0` it stays continuous as well.
pub fn ho_superposition_1d(omega: f64, units: &UnitsConfig, x: f64, t: f64) -> (f64, f64) {
    let mw = units.mass * omega / units.hbar;
    let a = (2.0 * mw).sqrt();
    let ax = a * x;
    let wt = omega * t;
    let rho = 0.5 * (mw / PI).sqrt() * (-mw * x * x).exp() * (1.0 + ax * ax + 2.0 * ax * wt.cos());
    let phase = if ax.abs() < 1.0 {
        -0.5 * wt + (-ax * wt.sin()).atan2(1.0 + ax * wt.cos())
    } else {
        // 1 + ax e^{−iωt} = ax e^{−iωt} (1 + e^{iωt}/ax)
        let base = if ax < 0.0 { PI } else { 0.0 };
        let inner = (wt.sin() / ax).atan2(1.0 + wt.cos() / ax);
        -0.5 * wt + base - wt + inner
    };
    (rho, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{linspace, trapezoid, wrap_angle};

    #[test]
    fn hermite_low_orders() {
        for xi in [-1.3, 0.0, 0.4, 2.2] {
            assert_eq!(hermite_pair(0, xi).0, 1.0);
            assert_eq!(hermite_pair(1, xi).0, 2.0 * xi);
            assert!((hermite_pair(3, xi).0 - (8.0 * xi.powi(3) - 12.0 * xi)).abs() < 1e-12);
            assert!((hermite_pair(4, xi).0 - (16.0 * xi.powi(4) - 48.0 * xi * xi + 12.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn ground_and_first_excited_closed_forms() {
        let units = UnitsConfig::new(1.0, 2.0, 1.0).unwrap();
        let w = 1.5;
        let mw = units.mass * w / units.hbar;
        for x in [-1.1, 0.3, 0.9] {
            let (r0, p0) = ho_eigenstate(0, w, &units, x, 0.7).unwrap();
            let rho0 = (mw / PI).sqrt() * (-mw * x * x).exp();
            assert!(((2.0 * r0).exp() - rho0).abs() < 1e-14);
            assert!((p0 + 0.5 * w * 0.7).abs() < 1e-15);
            let (r1, p1) = ho_eigenstate(1, w, &units, x, 0.7).unwrap();
            let rho1 = 2.0 * mw * x * x * rho0;
            assert!(((2.0 * r1).exp() - rho1).abs() < 1e-13);
            let expect = if x < 0.0 { PI - 1.5 * w * 0.7 } else { -1.5 * w * 0.7 };
            assert!((p1 - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenstates_normalized() {
        let units = UnitsConfig::default();
        let xs = linspace(-15.0, 15.0, 6001);
        for n in 0..=10 {
            let rho: Vec<f64> = xs
                .iter()
                .map(|x| (2.0 * ho_eigenstate(n, 1.0, &units, *x, 0.0).unwrap().0).exp())
                .collect();
            assert!((trapezoid(&rho, xs[1] - xs[0]) - 1.0).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn slope_matches_difference_quotient() {
        let units = UnitsConfig::default();
        for n in [0, 1, 3] {
            for x in [-1.2, 0.0, 0.8] {
                let (_, d) = eigen_value_and_slope(n, 1.0, &units, x, 0.4);
                let h = 1e-6;
                let fd = (eigen_value_and_slope(n, 1.0, &units, x + h, 0.4).0
                    - eigen_value_and_slope(n, 1.0, &units, x - h, 0.4).0)
                    / (2.0 * h);
                assert!((d - fd).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn overflow_guard() {
        let units = UnitsConfig::default();
        assert!(ho_eigenstate(60, 1.0, &units, 0.5, 0.0).is_ok());
        assert!(matches!(ho_eigenstate(61, 1.0, &units, 0.5, 0.0), Err(Error::HermiteOverflow(61))));
    }

    #[test]
    fn stationary_velocities_match_log_gradient() {
        let units = UnitsConfig::default();
        let h = 1e-5;
        for n in [0, 1, 4, 9] {
            for x in [-2.3, -0.77, 0.41, 1.9] {
                let f = eigen_fields(n, 1.0, &units, x, 0.0);
                let rp = eigen_fields(n, 1.0, &units, x + h, 0.0)[0];
                let rm = eigen_fields(n, 1.0, &units, x - h, 0.0)[0];
                let fd = (rp - rm) / (2.0 * h);
                assert!((f[2] + fd).abs() < 1e-6 * (1.0 + fd.abs()), "n={n} x={x}");
                assert_eq!(f[4], 0.0);
                assert_eq!(f[3], -f[2]);
            }
        }
    }

    #[test]
    fn superposition_properties() {
        let units = UnitsConfig::default();
        let period = 2.0 * PI;
        for x in [0.3, 1.0, 2.0] {
            assert!(ho_superposition_1d(1.0, &units, x, 0.0).0 > ho_superposition_1d(1.0, &units, -x, 0.0).0);
        }
        for x in [-1.7, 0.2, 0.9] {
            for t in [0.0, 0.4, 2.5] {
                let a = ho_superposition_1d(1.0, &units, x, t).0;
                let b = ho_superposition_1d(1.0, &units, x, t + period).0;
                assert!((a - b).abs() < 1e-14);
            }
        }
        let xs = linspace(-15.0, 15.0, 6001);
        for t in [0.0, PI] {
            let rho: Vec<f64> = xs.iter().map(|x| ho_superposition_1d(1.0, &units, *x, t).0).collect();
            assert!((trapezoid(&rho, xs[1] - xs[0]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn superposition_phase_is_the_complex_argument() {
        let units = UnitsConfig::default();
        for x in [-2.0, -0.4, 0.0, 0.6, 1.8] {
            for t in [0.0, 0.9, 3.0, 5.5] {
                let (rho, phase) = ho_superposition_1d(1.0, &units, x, t);
                let (r0, p0) = ho_eigenstate(0, 1.0, &units, x, t).unwrap();
                let (r1, p1) = ho_eigenstate(1, 1.0, &units, x, t).unwrap();
                let psi = (Complex64::from_polar(r0.exp(), p0) + Complex64::from_polar(r1.exp(), p1))
                    / 2f64.sqrt();
                assert!((psi.norm_sqr() - rho).abs() < 1e-14);
                assert!(wrap_angle(psi.arg() - phase).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn superposition_phase_continuous_in_time() {
        let units = UnitsConfig::default();
        for x in [-1.5, -0.4, 0.8, 2.0] {
            let mut prev = ho_superposition_1d(1.0, &units, x, 0.0).1;
            for k in 1..=4000 {
                let t = 4.0 * PI * f64::from(k) / 4000.0;
                let p = ho_superposition_1d(1.0, &units, x, t).1;
                assert!((p - prev).abs() < 0.05, "jump at x={x} t={t}");
                prev = p;
            }
        }
    }
}
