use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{Error, Result};
use crate::numerics::unwrap_from;

/// Relative amplitude below which the phase of a node is treated as
/// undefined: `|ψ| < AMPLITUDE_FLOOR · max|ψ|`.
pub const AMPLITUDE_FLOOR: f64 = 1e-8;

/// Complex amplitude sampled on a grid at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: GridSpec,
    amplitude: Vec<Complex64>,
    time: f64,
}

impl WaveField {
    pub fn new(grid: GridSpec, amplitude: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitude.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} amplitudes for {} grid nodes",
                amplitude.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, amplitude, time })
    }

    /// Samples `f(point)` at every node.
    pub fn from_fn(grid: GridSpec, time: f64, f: impl Fn([f64; 2]) -> Complex64) -> Self {
        let amplitude = grid.points().into_iter().map(f).collect();
        Self { grid, amplitude, time }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn amplitude(&self) -> &[Complex64] {
        &self.amplitude
    }

    pub fn amplitude_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitude
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn set_time(&mut self, t: f64) {
        self.time = t;
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitude.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `∫|ψ|² dx` by the trapezoidal rule.
    pub fn norm(&self) -> f64 {
        self.grid.integrate(&self.density())
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::DegenerateField("zero norm".into()));
        }
        let s = 1.0 / n.sqrt();
        self.amplitude.iter_mut().for_each(|a| *a *= s);
        Ok(self)
    }

    pub fn check_normalized(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(Error::domain(format!("wave field norm is {n}, expected 1 within {tol}")));
        }
        Ok(())
    }

    /// Multiplies by a global phase `e^{iθ}`.
    pub fn with_global_phase(mut self, theta: f64) -> Self {
        let f = Complex64::from_polar(1.0, theta);
        self.amplitude.iter_mut().for_each(|a| *a *= f);
        self
    }

    /// Nodes whose amplitude falls under the phase floor.
    pub fn phase_mask(&self) -> Vec<bool> {
        let max = self.amplitude.iter().map(|a| a.norm()).fold(0.0, f64::max);
        let floor = AMPLITUDE_FLOOR * max;
        self.amplitude.iter().map(|a| !(a.norm() >= floor) || max == 0.0).collect()
    }
}

/// Log-polar form `ψ = exp(R + iφ)` of a wave field.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// `R = log|ψ|`; `-inf` at exact zeros.
    pub r: Vec<f64>,
    /// Continuous phase; `NaN` where masked.
    pub phase: Vec<f64>,
    /// Nodes where the phase is undefined.
    pub masked: Vec<bool>,
}

/// Splits `ψ` into `R` and an unwrapped phase. Unwrapping starts at the
/// domain centre and proceeds outward along the first axis, then along the
/// second axis from the central row.
pub fn decompose(psi: &WaveField) -> Decomposition {
    let grid = psi.grid();
    let masked = psi.phase_mask();
    let r: Vec<f64> = psi.amplitude().iter().map(|a| a.norm().ln()).collect();
    let mut phase: Vec<f64> = psi.amplitude().iter().map(|a| a.arg()).collect();
    let [ci, cj] = grid.center_index();
    match grid.dim() {
        1 => unwrap_from(&mut phase, &masked, ci),
        _ => {
            let (nx, ny) = (grid.axis(0).points, grid.axis(1).points);
            // Central column of constant y (varying x) first.
            let mut line: Vec<f64> = (0..nx).map(|i| phase[i * ny + cj]).collect();
            let line_mask: Vec<bool> = (0..nx).map(|i| masked[i * ny + cj]).collect();
            unwrap_from(&mut line, &line_mask, ci);
            for i in 0..nx {
                phase[i * ny + cj] = line[i];
            }
            for i in 0..nx {
                let row = &mut phase[i * ny..(i + 1) * ny];
                unwrap_from(row, &masked[i * ny..(i + 1) * ny], cj);
            }
        }
    }
    for (p, m) in phase.iter_mut().zip(&masked) {
        if *m {
            *p = f64::NAN;
        }
    }
    Decomposition { r, phase, masked }
}
