//! Crank–Nicolson integration of `iħ∂ψ/∂t = −(ħ²/2m)∇²ψ + Vψ`.
//!
//! The Laplacian uses the compact fourth-order (Numerov) form
//! `M⁻¹δ²/h²` with `M = 1 + δ²/12`, so each line solve stays tridiagonal.
//! `ψ` vanishes just outside the grid. Two-dimensional fields are advanced by
//! one implicit sweep per axis.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{GridSpec, UnitsConfig, WaveField};
use crate::numerics::pairwise_sum;

/// External potential of a Schrödinger run.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    /// `½mω²|x|²`.
    Harmonic { omega: f64 },
    /// One value per node of the evolution grid.
    Tabulated(Vec<f64>),
}

impl PotentialSpec {
    pub fn harmonic(omega: f64) -> Result<Self> {
        if !(omega > 0.0) {
            return Err(Error::domain("harmonic potential needs ω > 0"));
        }
        Ok(Self::Harmonic { omega })
    }

    /// Values at every node of `grid`.
    pub fn values(&self, grid: &GridSpec, units: &UnitsConfig) -> Result<Vec<f64>> {
        match self {
            Self::Free => Ok(vec![0.0; grid.len()]),
            Self::Harmonic { omega } => {
                let k = 0.5 * units.mass * omega * omega;
                Ok(grid
                    .points()
                    .iter()
                    .map(|p| k * (p[0] * p[0] + p[1] * p[1]))
                    .collect())
            }
            Self::Tabulated(v) => {
                if v.len() != grid.len() {
                    return Err(Error::Shape(format!(
                        "tabulated potential has {} values for {} nodes",
                        v.len(),
                        grid.len()
                    )));
                }
                Ok(v.clone())
            }
        }
    }

    /// Per-axis parts `V(x, y) = V₀(x) + V₁(y)` when the potential splits.
    fn axis_parts(&self, grid: &GridSpec, units: &UnitsConfig) -> Option<Vec<Vec<f64>>> {
        match self {
            Self::Free => Some(grid.axes().iter().map(|a| vec![0.0; a.points]).collect()),
            Self::Harmonic { omega } => {
                let k = 0.5 * units.mass * omega * omega;
                Some(
                    grid.axes()
                        .iter()
                        .map(|a| a.coords().iter().map(|x| k * x * x).collect())
                        .collect(),
                )
            }
            Self::Tabulated(_) => None,
        }
    }
}

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Largest accepted relative change of `Σ|ψ|²` in one step.
    pub norm_tolerance: f64,
    /// Keep every `record_every`-th field; the initial and final fields are
    /// always kept.
    pub record_every: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            norm_tolerance: 1e-10,
            record_every: 1,
        }
    }
}

/// Thomas factorization of a fixed tridiagonal matrix plus the explicit
/// half-step operator applied before each solve.
#[derive(Debug, Clone)]
struct LineOperator {
    lower: Vec<Complex64>,
    upper_mod: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
    rhs_lower: Vec<Complex64>,
    rhs_diag: Vec<Complex64>,
    rhs_upper: Vec<Complex64>,
}

impl LineOperator {
    /// `(M + iτH)ψ' = (M − iτH)ψ` with `H = K + M·diag(V)`, `τ = dt/2ħ`.
    fn new(h: f64, potential: &[f64], units: &UnitsConfig, dt: f64) -> Self {
        let n = potential.len();
        let tau = dt / (2.0 * units.hbar);
        let kin = units.hbar * units.hbar / (2.0 * units.mass * h * h);
        let i = Complex64::i();
        let diag_h: Vec<f64> = potential.iter().map(|v| 2.0 * kin + 10.0 / 12.0 * v).collect();
        // Off-diagonal entry in row r, column c.
        let off_h = |c: usize| -kin + potential[c] / 12.0;
        let mut a_lower = vec![Complex64::new(0.0, 0.0); n];
        let mut a_diag = vec![Complex64::new(0.0, 0.0); n];
        let mut a_upper = vec![Complex64::new(0.0, 0.0); n];
        let mut rhs_lower = vec![Complex64::new(0.0, 0.0); n];
        let mut rhs_diag = vec![Complex64::new(0.0, 0.0); n];
        let mut rhs_upper = vec![Complex64::new(0.0, 0.0); n];
        for r in 0..n {
            a_diag[r] = 10.0 / 12.0 + i * tau * diag_h[r];
            rhs_diag[r] = 10.0 / 12.0 - i * tau * diag_h[r];
            if r > 0 {
                a_lower[r] = 1.0 / 12.0 + i * tau * off_h(r - 1);
                rhs_lower[r] = 1.0 / 12.0 - i * tau * off_h(r - 1);
            }
            if r + 1 < n {
                a_upper[r] = 1.0 / 12.0 + i * tau * off_h(r + 1);
                rhs_upper[r] = 1.0 / 12.0 - i * tau * off_h(r + 1);
            }
        }
        let mut upper_mod = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); n];
        let mut pivot = a_diag[0];
        inv_pivot[0] = pivot.inv();
        upper_mod[0] = a_upper[0] * inv_pivot[0];
        for r in 1..n {
            pivot = a_diag[r] - a_lower[r] * upper_mod[r - 1];
            inv_pivot[r] = pivot.inv();
            upper_mod[r] = a_upper[r] * inv_pivot[r];
        }
        Self {
            lower: a_lower,
            upper_mod,
            inv_pivot,
            rhs_lower,
            rhs_diag,
            rhs_upper,
        }
    }

    fn apply(&self, line: &mut [Complex64], tmp: &mut Vec<Complex64>) {
        let n = line.len();
        tmp.clear();
        tmp.extend((0..n).map(|r| {
            let mut acc = self.rhs_diag[r] * line[r];
            if r > 0 {
                acc += self.rhs_lower[r] * line[r - 1];
            }
            if r + 1 < n {
                acc += self.rhs_upper[r] * line[r + 1];
            }
            acc
        }));
        line[0] = tmp[0] * self.inv_pivot[0];
        for r in 1..n {
            line[r] = (tmp[r] - self.lower[r] * line[r - 1]) * self.inv_pivot[r];
        }
        for r in (0..n - 1).rev() {
            let next = line[r + 1];
            line[r] -= self.upper_mod[r] * next;
        }
    }
}

/// Line operators for one axis: a single shared operator or one per line.
#[derive(Debug, Clone)]
enum AxisOperators {
    Shared(LineOperator),
    PerLine(Vec<LineOperator>),
}

impl AxisOperators {
    fn get(&self, line: usize) -> &LineOperator {
        match self {
            Self::Shared(op) => op,
            Self::PerLine(ops) => &ops[line],
        }
    }
}

/// Step-by-step integrator; [`schrodinger_evolve`] wraps it.
#[derive(Debug, Clone)]
pub struct SchrodingerStepper {
    psi: WaveField,
    dt: f64,
    steps_taken: usize,
    tolerance: f64,
    sum_norm: f64,
    axes: Vec<AxisOperators>,
    /// Tabulated 2D potentials alternate the sweep order to stay second order.
    alternate: bool,
}

impl SchrodingerStepper {
    pub fn new(psi0: WaveField, potential: &PotentialSpec, units: &UnitsConfig, dt: f64, tolerance: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::domain("time step must be positive"));
        }
        let grid = psi0.grid().clone();
        let values = potential.values(&grid, units)?;
        let (axes, alternate) = if grid.dim() == 1 {
            (vec![AxisOperators::Shared(LineOperator::new(grid.spacing(0), &values, units, dt))], false)
        } else if let Some(parts) = potential.axis_parts(&grid, units) {
            let ops = (0..2)
                .map(|k| AxisOperators::Shared(LineOperator::new(grid.spacing(k), &parts[k], units, dt)))
                .collect();
            (ops, false)
        } else {
            let [nx, ny] = [grid.axis(0).points, grid.axis(1).points];
            let half = |i: usize, j: usize| 0.5 * values[grid.flat(i, j)];
            let x_ops = (0..ny)
                .map(|j| {
                    let v: Vec<f64> = (0..nx).map(|i| half(i, j)).collect();
                    LineOperator::new(grid.spacing(0), &v, units, dt)
                })
                .collect();
            let y_ops = (0..nx)
                .map(|i| {
                    let v: Vec<f64> = (0..ny).map(|j| half(i, j)).collect();
                    LineOperator::new(grid.spacing(1), &v, units, dt)
                })
                .collect();
            (vec![AxisOperators::PerLine(x_ops), AxisOperators::PerLine(y_ops)], true)
        };
        let sum_norm = sum_norm(psi0.amplitude());
        if !(sum_norm > 0.0) {
            return Err(Error::DegenerateField("initial wave field is zero".into()));
        }
        Ok(Self {
            psi: psi0,
            dt,
            steps_taken: 0,
            tolerance,
            sum_norm,
            axes,
            alternate,
        })
    }

    pub fn field(&self) -> &WaveField {
        &self.psi
    }

    pub fn into_field(self) -> WaveField {
        self.psi
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// Advances one step of length `dt`.
    pub fn step(&mut self) -> Result<()> {
        let grid = self.psi.grid().clone();
        if grid.dim() == 1 {
            let mut tmp = Vec::new();
            self.axes[0].get(0).apply(self.psi.amplitude_mut(), &mut tmp);
        } else {
            let order = if self.alternate && self.steps_taken % 2 == 1 {
                [1, 0]
            } else {
                [0, 1]
            };
            for axis in order {
                self.sweep(&grid, axis);
            }
        }
        self.steps_taken += 1;
        let t = self.psi.time() + self.dt;
        self.psi.set_time(t);
        let now = sum_norm(self.psi.amplitude());
        let drift = (now - self.sum_norm).abs() / self.sum_norm;
        if !(drift <= self.tolerance) {
            return Err(Error::Stability {
                step: self.steps_taken,
                drift,
                tolerance: self.tolerance,
            });
        }
        self.sum_norm = now;
        Ok(())
    }

    fn sweep(&mut self, grid: &GridSpec, axis: usize) {
        let [nx, ny] = [grid.axis(0).points, grid.axis(1).points];
        let ops = &self.axes[axis];
        let amp = self.psi.amplitude_mut();
        if axis == 1 {
            // Lines along y are contiguous in row-major storage.
            amp.par_chunks_mut(ny).enumerate().for_each_init(Vec::new, |tmp, (i, line)| {
                ops.get(i).apply(line, tmp);
            });
        } else {
            let src: &[Complex64] = amp;
            let columns: Vec<Vec<Complex64>> = (0..ny)
                .into_par_iter()
                .map_init(Vec::new, |tmp, j| {
                    let mut line: Vec<Complex64> = (0..nx).map(|i| src[i * ny + j]).collect();
                    ops.get(j).apply(&mut line, tmp);
                    line
                })
                .collect();
            for (j, line) in columns.iter().enumerate() {
                for (i, z) in line.iter().enumerate() {
                    amp[i * ny + j] = *z;
                }
            }
        }
    }
}

fn sum_norm(amp: &[Complex64]) -> f64 {
    let sq: Vec<f64> = amp.iter().map(|a| a.norm_sqr()).collect();
    pairwise_sum(&sq)
}

/// Evolves `psi0` by `steps` steps of `dt` with default options.
pub fn schrodinger_evolve(
    psi0: &WaveField,
    potential: &PotentialSpec,
    units: &UnitsConfig,
    dt: f64,
    steps: usize,
) -> Result<Vec<WaveField>> {
    schrodinger_evolve_with(psi0, potential, units, dt, steps, EvolveOptions::default())
}

/// Evolves `psi0`; the returned sequence starts with `psi0` itself.
pub fn schrodinger_evolve_with(
    psi0: &WaveField,
    potential: &PotentialSpec,
    units: &UnitsConfig,
    dt: f64,
    steps: usize,
    options: EvolveOptions,
) -> Result<Vec<WaveField>> {
    if options.record_every == 0 {
        return Err(Error::domain("record_every must be at least 1"));
    }
    let mut stepper = SchrodingerStepper::new(psi0.clone(), potential, units, dt, options.norm_tolerance)?;
    let mut out = vec![psi0.clone()];
    for s in 1..=steps {
        stepper.step()?;
        if s % options.record_every == 0 || s == steps {
            out.push(stepper.field().clone());
        }
    }
    Ok(out)
}
