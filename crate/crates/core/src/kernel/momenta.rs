use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::GridSpec;
use super::units::UnitsConfig;
use super::velocity::{velocities_from_wavefield, VelocityFields};
use super::wavefield::WaveField;
use crate::error::{Error, Result};

/// Pointwise drift, osmotic and current momenta with the four expectation
/// values. Expectations carry one entry per axis.
#[derive(Debug, Clone)]
pub struct Momenta {
    pub drift: Vec<Vec<f64>>,
    pub osmotic: Vec<Vec<f64>>,
    pub current: Vec<Vec<f64>>,
    pub mean_drift: Vec<f64>,
    pub mean_osmotic: Vec<f64>,
    pub mean_current: Vec<f64>,
    /// `⟨ψ|−iħ∇|ψ⟩`, real part.
    pub mean_quantum: Vec<f64>,
    /// Imaginary part of the same integral; vanishes for a consistent field.
    pub quantum_imag: Vec<f64>,
}

/// Momenta `p = m·velocity` and their expectations. The quantum momentum is
/// computed from a spectral derivative of `ψ`, independent of the
/// finite-difference route behind the velocities.
pub fn momenta(psi: &WaveField, units: &UnitsConfig) -> Result<Momenta> {
    let fields = velocities_from_wavefield(psi, units)?;
    momenta_with_fields(psi, &fields, units)
}

/// As [`momenta`], with velocities supplied by the caller (for instance the
/// closed-form fields of a catalog state sampled on the same grid).
pub fn momenta_with_fields(psi: &WaveField, fields: &VelocityFields, units: &UnitsConfig) -> Result<Momenta> {
    psi.check_normalized(1e-6)?;
    if fields.grid != *psi.grid() {
        return Err(Error::Shape("velocity fields and wave field use different grids".into()));
    }
    let grid = psi.grid();
    let m = units.mass;
    let scale = |c: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        c.iter().map(|v| v.iter().map(|x| m * x).collect()).collect()
    };
    let mean = |flux: &Vec<Vec<f64>>| -> Vec<f64> { flux.iter().map(|f| m * grid.integrate(f)).collect() };

    let mut mean_quantum = Vec::with_capacity(grid.dim());
    let mut quantum_imag = Vec::with_capacity(grid.dim());
    for axis in 0..grid.dim() {
        let d = spectral_derivative(grid, psi.amplitude(), axis);
        let integrand: Vec<Complex64> = psi
            .amplitude()
            .iter()
            .zip(&d)
            .map(|(a, da)| a.conj() * Complex64::new(0.0, -units.hbar) * da)
            .collect();
        let re: Vec<f64> = integrand.iter().map(|c| c.re).collect();
        let im: Vec<f64> = integrand.iter().map(|c| c.im).collect();
        mean_quantum.push(grid.integrate(&re));
        quantum_imag.push(grid.integrate(&im));
    }

    Ok(Momenta {
        drift: scale(&fields.b),
        osmotic: scale(&fields.u),
        current: scale(&fields.v),
        mean_drift: mean(&fields.flux_b),
        mean_osmotic: mean(&fields.flux_u),
        mean_current: mean(&fields.flux_v),
        mean_quantum,
        quantum_imag,
    })
}

/// Fourier derivative along one axis, treating each line as periodic with
/// period `points · spacing`. Accurate for fields that vanish at the edges.
pub(crate) fn spectral_derivative(grid: &GridSpec, values: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = grid.axis(axis).points;
    let h = grid.spacing(axis);
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let period = n as f64 * h;
    let wavenumber = |j: usize| -> f64 {
        let tau = std::f64::consts::TAU;
        if 2 * j < n {
            tau * j as f64 / period
        } else if 2 * j == n {
            0.0
        } else {
            tau * (j as f64 - n as f64) / period
        }
    };
    let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let lines: Vec<Vec<usize>> = if grid.dim() == 1 {
        vec![(0..n).collect()]
    } else if axis == 0 {
        let ny = grid.axis(1).points;
        (0..ny).map(|j| (0..n).map(|i| i * ny + j).collect()).collect()
    } else {
        let nx = grid.axis(0).points;
        (0..nx).map(|i| (0..n).map(|j| i * n + j).collect()).collect()
    };
    for idx in lines {
        for (slot, &k) in line.iter_mut().zip(&idx) {
            *slot = values[k];
        }
        fwd.process(&mut line);
        for (j, c) in line.iter_mut().enumerate() {
            *c *= Complex64::new(0.0, wavenumber(j) / n as f64);
        }
        inv.process(&mut line);
        for (slot, &k) in line.iter().zip(&idx) {
            out[k] = *slot;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet(k0: f64) -> WaveField {
        let g = GridSpec::line(-25.0, 25.0, 2048).unwrap();
        let norm = (2.0 * std::f64::consts::PI).powf(-0.25);
        WaveField::from_fn(g, 0.0, |p| {
            Complex64::from_polar(norm * (-(p[0] - 1.0).powi(2) / 4.0).exp(), k0 * p[0])
        })
        .normalized()
        .unwrap()
    }

    #[test]
    fn real_field_has_zero_quantum_momentum() {
        let m = momenta(&packet(0.0), &UnitsConfig::default()).unwrap();
        assert!(m.mean_quantum[0].abs() < 1e-12);
        assert!(m.mean_osmotic[0].abs() < 1e-8);
    }

    #[test]
    fn current_and_quantum_momentum_coincide_for_modulated_packet() {
        let units = UnitsConfig::new(1.0, 2.0, 1.0).unwrap();
        let m = momenta(&packet(1.3), &units).unwrap();
        assert!((m.mean_quantum[0] - 1.3).abs() < 1e-8, "{}", m.mean_quantum[0]);
        assert!((m.mean_current[0] - m.mean_quantum[0]).abs() < 1e-6);
        assert!((m.mean_drift[0] - m.mean_current[0]).abs() < 1e-8);
        assert!(m.quantum_imag[0].abs() < 1e-8);
        assert!(m.mean_osmotic[0].abs() < 1e-8);
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let g = GridSpec::line(-5.0, 5.0, 64).unwrap();
        let psi = WaveField::from_fn(g, 0.0, |_| Complex64::new(1.0, 0.0));
        assert!(momenta(&psi, &UnitsConfig::default()).is_err());
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let g = GridSpec::line(-20.0, 20.0, 512).unwrap();
        let vals: Vec<Complex64> = g.points().iter().map(|p| Complex64::new((-p[0] * p[0]).exp(), 0.0)).collect();
        let d = spectral_derivative(&g, &vals, 0);
        for (k, p) in g.points().iter().enumerate() {
            let exact = -2.0 * p[0] * (-p[0] * p[0]).exp();
            assert!((d[k].re - exact).abs() < 1e-10);
        }
    }
}
