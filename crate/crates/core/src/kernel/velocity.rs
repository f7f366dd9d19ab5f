use num_complex::Complex64;

use super::grid::GridSpec;
use super::units::UnitsConfig;
use super::wavefield::{decompose, WaveField};
use crate::error::{Error, Result};

/// How `∇R` and `∇φ` are formed from a sampled field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientRoute {
    /// `∇R + i∇φ = ∇ψ / ψ` with `∇ψ` by finite differences. Smooth through
    /// near-nodes and free of phase branch cuts.
    #[default]
    Complex,
    /// Finite differences of `R = log|ψ|` and the unwrapped phase. Nodes whose
    /// stencil touches a masked node are masked.
    LogPolar,
}

/// Osmotic, drift and current velocities with their fluxes. Vector
/// quantities carry one component per grid axis; masked nodes hold `NaN`
/// velocities and zero flux.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityFields {
    pub grid: GridSpec,
    pub time: f64,
    pub rho: Vec<f64>,
    pub masked: Vec<bool>,
    pub u: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub flux_u: Vec<Vec<f64>>,
    pub flux_b: Vec<Vec<f64>>,
    pub flux_v: Vec<Vec<f64>>,
}

impl VelocityFields {
    /// Assembles fields from `u` and `v`; `b = v − u` and the fluxes are
    /// formed here so the identities hold by construction.
    pub fn assemble(
        grid: GridSpec,
        time: f64,
        rho: Vec<f64>,
        masked: Vec<bool>,
        u: Vec<Vec<f64>>,
        v: Vec<Vec<f64>>,
    ) -> Self {
        let b: Vec<Vec<f64>> = u
            .iter()
            .zip(&v)
            .map(|(uk, vk)| uk.iter().zip(vk).map(|(u, v)| v - u).collect())
            .collect();
        let flux = |field: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            field
                .iter()
                .map(|comp| {
                    comp.iter()
                        .zip(&rho)
                        .zip(&masked)
                        .map(|((c, r), m)| if *m { 0.0 } else { c * r })
                        .collect()
                })
                .collect()
        };
        let flux_u = flux(&u);
        let flux_b = flux(&b);
        let flux_v = flux(&v);
        Self {
            grid,
            time,
            rho,
            masked,
            u,
            b,
            v,
            flux_u,
            flux_b,
            flux_v,
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }
}

/// Velocities by the default [`GradientRoute::Complex`] route.
pub fn velocities_from_wavefield(psi: &WaveField, units: &UnitsConfig) -> Result<VelocityFields> {
    velocities_with_route(psi, units, GradientRoute::Complex)
}

/// `u = −(ħ/m)∇R`, `v = (ħ/m)∇φ`, `b = v − u`.
pub fn velocities_with_route(
    psi: &WaveField,
    units: &UnitsConfig,
    route: GradientRoute,
) -> Result<VelocityFields> {
    let grid = psi.grid().clone();
    let n = grid.len();
    let mut masked = psi.phase_mask();
    let k = units.hbar_over_m();

    let (grad_r, grad_phase) = match route {
        GradientRoute::Complex => {
            let g = grid.gradient(psi.amplitude());
            let mut gr = vec![vec![0.0; n]; grid.dim()];
            let mut gp = vec![vec![0.0; n]; grid.dim()];
            for (axis, comp) in g.iter().enumerate() {
                for i in 0..n {
                    if masked[i] {
                        continue;
                    }
                    let w: Complex64 = comp[i] / psi.amplitude()[i];
                    gr[axis][i] = w.re;
                    gp[axis][i] = w.im;
                }
            }
            (gr, gp)
        }
        GradientRoute::LogPolar => {
            let d = decompose(psi);
            // Masked entries get placeholder values; every node whose stencil
            // reaches them is masked afterwards.
            let r: Vec<f64> = d.r.iter().zip(&d.masked).map(|(r, m)| if *m { 0.0 } else { *r }).collect();
            let ph: Vec<f64> = d.phase.iter().zip(&d.masked).map(|(p, m)| if *m { 0.0 } else { *p }).collect();
            masked = dilate_mask(&grid, &d.masked, 2);
            (grid.gradient(&r), grid.gradient(&ph))
        }
    };

    if masked.iter().all(|m| *m) {
        return Err(Error::DegenerateField("every node is below the amplitude floor".into()));
    }

    let u: Vec<Vec<f64>> = grad_r
        .iter()
        .map(|c| c.iter().zip(&masked).map(|(g, m)| if *m { f64::NAN } else { -k * g }).collect())
        .collect();
    let v: Vec<Vec<f64>> = grad_phase
        .iter()
        .map(|c| c.iter().zip(&masked).map(|(g, m)| if *m { f64::NAN } else { k * g }).collect())
        .collect();
    Ok(VelocityFields::assemble(grid, psi.time(), psi.density(), masked, u, v))
}

fn dilate_mask(grid: &GridSpec, mask: &[bool], reach: usize) -> Vec<bool> {
    let mut out = mask.to_vec();
    for (flat, m) in mask.iter().enumerate() {
        if !*m {
            continue;
        }
        let [i, j] = grid.unravel(flat);
        let nx = grid.axis(0).points;
        for ii in i.saturating_sub(reach)..=(i + reach).min(nx - 1) {
            out[grid.flat(ii, j)] = true;
        }
        if grid.dim() == 2 {
            let ny = grid.axis(1).points;
            for jj in j.saturating_sub(reach)..=(j + reach).min(ny - 1) {
                out[grid.flat(i, jj)] = true;
            }
        }
    }
    out
}
