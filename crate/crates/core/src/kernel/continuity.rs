use super::grid::GridSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualNorms {
    pub max: f64,
    /// `(∫ r² dx)^{1/2}`.
    pub l2: f64,
}

/// Norms of `(ρ_after − ρ_before)/dt + ∇·(ρv)` with the flux taken at the
/// midpoint of the step.
pub fn continuity_residual(
    grid: &GridSpec,
    rho_before: &[f64],
    rho_after: &[f64],
    dt: f64,
    flux: &[Vec<f64>],
) -> Result<ResidualNorms> {
    let n = grid.len();
    if rho_before.len() != n || rho_after.len() != n {
        return Err(Error::Shape(format!(
            "densities have {} and {} nodes, grid has {n}",
            rho_before.len(),
            rho_after.len()
        )));
    }
    if flux.len() != grid.dim() || flux.iter().any(|f| f.len() != n) {
        return Err(Error::Shape("flux must have one full component per axis".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::domain(format!("dt = {dt} must be positive")));
    }
    let mut residual: Vec<f64> = rho_after
        .iter()
        .zip(rho_before)
        .map(|(a, b)| (a - b) / dt)
        .collect();
    for (axis, f) in flux.iter().enumerate() {
        let d = grid.derivative_along(f, axis);
        residual.iter_mut().zip(&d).for_each(|(r, d)| *r += d);
    }
    let max = residual.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
    let sq: Vec<f64> = residual.iter().map(|r| r * r).collect();
    Ok(ResidualNorms {
        max,
        l2: grid.integrate(&sq).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_density_with_divergence_free_flux() {
        let g = GridSpec::square(-1.0, 1.0, 33).unwrap();
        let rho = vec![0.25; g.len()];
        let pts = g.points();
        // v = (−y, x) is divergence free; ρ uniform.
        let flux = vec![
            pts.iter().map(|p| -0.25 * p[1]).collect(),
            pts.iter().map(|p| 0.25 * p[0]).collect(),
        ];
        let r = continuity_residual(&g, &rho, &rho, 0.01, &flux).unwrap();
        assert!(r.max < 1e-14);
    }

    #[test]
    fn shape_mismatch() {
        let g = GridSpec::line(0.0, 1.0, 20).unwrap();
        let err = continuity_residual(&g, &[0.0; 20], &[0.0; 19], 0.1, &[vec![0.0; 20]]);
        assert!(matches!(err, Err(Error::Shape(_))));
    }
}
