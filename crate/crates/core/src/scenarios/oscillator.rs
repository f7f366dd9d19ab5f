use std::f64::consts::PI;

use num_complex::Complex64;

use super::{analytic_snapshot, validate_times, Check, Scenario, SnapshotSet, TimeUnit};
use crate::error::{Error, Result};
use crate::kernel::{velocities_from_wavefield, GridSpec, UnitsConfig, VelocityFields};
use crate::numerics::linspace;
use crate::states::{ho_superposition_1d, AnalyticState};

fn check_omega(omega: f64) -> Result<()> {
    if omega > 0.0 && omega.is_finite() {
        Ok(())
    } else {
        Err(Error::Config("omega must be positive".into()))
    }
}

fn check_dim(grid: &GridSpec, dim: usize) -> Result<()> {
    if grid.dim() == dim {
        Ok(())
    } else {
        Err(Error::Config(format!("scenario needs a {dim}-dimensional grid")))
    }
}

fn sup_relative(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs()));
    let err = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if scale > 0.0 {
        err / scale
    } else {
        err
    }
}

/// `(ψ₀ + ψ₁)/√2` of a 1D oscillator.
pub(crate) fn ho_1d_state(omega: f64, units: &UnitsConfig) -> Result<AnalyticState> {
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    AnalyticState::superposition(
        AnalyticState::ho_eigen(0, omega, *units)?,
        AnalyticState::ho_eigen(1, omega, *units)?,
        w,
        w,
    )
}

/// `(ψ₀₁ + iψ₁₀)/√2`, with `ψ_{n_x n_y}`.
pub(crate) fn rotating_state(omega: f64, units: &UnitsConfig) -> Result<AnalyticState> {
    let w = std::f64::consts::FRAC_1_SQRT_2;
    AnalyticState::superposition(
        AnalyticState::ho_product(0, 1, omega, *units)?,
        AnalyticState::ho_product(1, 0, omega, *units)?,
        Complex64::new(w, 0.0),
        Complex64::new(0.0, w),
    )
}

/// `(ψ₀₀ + ψ₁₁)/√2`.
pub(crate) fn breathing_state(omega: f64, units: &UnitsConfig) -> Result<AnalyticState> {
    let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    AnalyticState::superposition(
        AnalyticState::ho_product(0, 0, omega, *units)?,
        AnalyticState::ho_product(1, 1, omega, *units)?,
        w,
        w,
    )
}

/// One period of `(ψ₀ + ψ₁)/√2`; labels are fractions of `2π/ω`.
pub fn run_ho_1d(omega: f64, units: &UnitsConfig, grid: &GridSpec, times: &[f64]) -> Result<SnapshotSet> {
    validate_times(times)?;
    check_omega(omega)?;
    check_dim(grid, 1)?;
    let state = ho_1d_state(omega, units)?;
    let period = 2.0 * PI / omega;
    let amplitude = (units.hbar / (2.0 * units.mass * omega)).sqrt();
    let mut set = SnapshotSet::new(Scenario::Ho1d, TimeUnit::Period(period));
    let x = grid.axis(0).coords();
    for &label in times {
        let t = label * period;
        let mut snap = analytic_snapshot(&state, grid, label, t, &mut set.checks)?;
        let f = &snap.fields;

        let closed: Vec<f64> = x.iter().map(|x| ho_superposition_1d(omega, units, *x, t).0).collect();
        set.checks.push(Check::within(
            format!("closed-form density at {label}"),
            sup_relative(&closed, &f.rho),
            1e-12,
        ));

        let mirrored: Vec<f64> = x.iter().map(|x| state.density([-x, 0.0], t + PI / omega)).collect();
        set.checks.push(Check::within(
            format!("parity half a period later at {label}"),
            sup_relative(&mirrored, &f.rho),
            1e-12,
        ));

        let moment: Vec<f64> = f.rho.iter().zip(&x).map(|(r, x)| r * x).collect();
        let mean = grid.integrate(&moment);
        let wt = omega * t;
        set.checks.push(Check::within(
            format!("mean position at {label}"),
            (mean - amplitude * wt.cos()).abs() / amplitude,
            1e-8,
        ));
        let current = grid.integrate(&f.flux_v[0]);
        let rate = -amplitude * omega * wt.sin();
        set.checks.push(Check::within(
            format!("current flux integral at {label}"),
            (current - rate).abs(),
            1e-6,
        ));

        let positive = f.flux_v[0].iter().filter(|j| **j > 0.0).count() as f64 / f.rho.len() as f64;
        snap.summary.insert("mean".into(), mean);
        snap.summary.insert("current_flux_integral".into(), current);
        snap.summary.insert("current_flux_sign".into(), sign(current, 1e-12));
        snap.summary.insert("current_flux_positive_fraction".into(), positive);
        set.snapshots.push(snap);
    }
    Ok(set)
}

fn sign(v: f64, eps: f64) -> f64 {
    if v > eps {
        1.0
    } else if v < -eps {
        -1.0
    } else {
        0.0
    }
}

/// Pointwise `L_c = m(x v_y − y v_x)` and its `ρ`-weighted integral. Masked
/// nodes give `NaN` and are left out of the integral.
pub fn angular_momentum(fields: &VelocityFields, units: &UnitsConfig) -> Result<(Vec<f64>, f64)> {
    let grid = &fields.grid;
    if grid.dim() != 2 {
        return Err(Error::Config("angular momentum needs a 2D field".into()));
    }
    if fields.v.len() != 2 || fields.v.iter().any(|c| c.len() != grid.len()) || fields.rho.len() != grid.len() {
        return Err(Error::Config("velocity and density grids do not match".into()));
    }
    let mut lc = vec![f64::NAN; grid.len()];
    let mut weighted = vec![0.0; grid.len()];
    for i in 0..grid.len() {
        if fields.masked[i] {
            continue;
        }
        let [x, y] = grid.point(i);
        lc[i] = units.mass * (x * fields.v[1][i] - y * fields.v[0][i]);
        weighted[i] = fields.rho[i] * lc[i];
    }
    Ok((lc, grid.integrate(&weighted)))
}

/// Results specific to the rotating state.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularReport {
    /// Largest `| |v|r − ħ/m |` relative to `ħ/m` for `r ∈ [0.3, 3]ℓ`,
    /// `ℓ = (ħ/mω)^{1/2}`.
    pub speed_radius_error: f64,
    /// Largest `|L_c + ħ|` off the origin, over all snapshots.
    pub pointwise_error: f64,
    /// `⟨L⟩` from the closed-form velocities, per snapshot.
    pub mean_analytic: Vec<f64>,
    /// `⟨L⟩` from velocities extracted on the grid, per snapshot.
    pub mean_grid: Vec<f64>,
    /// Largest `sup|ρ(t) − ρ(0)|` over the snapshots.
    pub density_drift: f64,
    pub max_speed: f64,
    /// Radius of the density maximum along a fine radial line.
    pub ring_radius: f64,
    pub ring_expected: f64,
}

/// `(ψ₀₁ + iψ₁₀)/√2`, whose density is stationary while its current circulates.
pub fn run_ho_2d_rotating(
    omega: f64,
    units: &UnitsConfig,
    grid: &GridSpec,
    times: &[f64],
) -> Result<(SnapshotSet, AngularReport)> {
    validate_times(times)?;
    check_omega(omega)?;
    check_dim(grid, 2)?;
    let state = rotating_state(omega, units)?;
    let period = 2.0 * PI / omega;
    let ell = (units.hbar / (units.mass * omega)).sqrt();
    let hm = units.hbar_over_m();
    let mut set = SnapshotSet::new(Scenario::Ho2dRotating, TimeUnit::Period(period));
    let mut report = AngularReport {
        speed_radius_error: 0.0,
        pointwise_error: 0.0,
        mean_analytic: Vec::new(),
        mean_grid: Vec::new(),
        density_drift: 0.0,
        max_speed: 0.0,
        ring_radius: 0.0,
        ring_expected: ell,
    };
    let mut rho0: Option<Vec<f64>> = None;
    for &label in times {
        let t = label * period;
        let mut snap = analytic_snapshot(&state, grid, label, t, &mut set.checks)?;
        let f = &snap.fields;
        let reference = rho0.get_or_insert_with(|| f.rho.clone());
        let drift = reference.iter().zip(&f.rho).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        report.density_drift = report.density_drift.max(drift);

        let mut speed_err = 0.0f64;
        for i in 0..grid.len() {
            if f.masked[i] {
                continue;
            }
            let [x, y] = grid.point(i);
            let r = x.hypot(y);
            let speed = f.v[0][i].hypot(f.v[1][i]);
            report.max_speed = report.max_speed.max(speed);
            if (0.3 * ell..=3.0 * ell).contains(&r) {
                speed_err = speed_err.max((speed * r - hm).abs() / hm);
            }
        }
        report.speed_radius_error = report.speed_radius_error.max(speed_err);

        let (lc, mean) = angular_momentum(f, units)?;
        let point_err = lc
            .iter()
            .enumerate()
            .filter(|(i, l)| l.is_finite() && grid.point(*i) != [0.0, 0.0])
            .fold(0.0f64, |m, (_, l)| m.max((l + units.hbar).abs()));
        report.pointwise_error = report.pointwise_error.max(point_err);
        let numeric = velocities_from_wavefield(&state.sample(grid, t)?, units)?;
        let (_, mean_grid) = angular_momentum(&numeric, units)?;
        report.mean_analytic.push(mean);
        report.mean_grid.push(mean_grid);
        set.checks.push(Check::within(
            format!("mean angular momentum on the grid at {label}"),
            (mean_grid + units.hbar).abs() / units.hbar,
            1e-4,
        ));
        snap.summary.insert("mean_angular_momentum".into(), mean);
        snap.summary.insert("mean_angular_momentum_grid".into(), mean_grid);
        set.snapshots.push(snap);
    }
    let radial = linspace(0.0, 4.0 * ell, 40_001);
    report.ring_radius = radial
        .iter()
        .copied()
        .max_by(|a, b| state.density([*a, 0.0], 0.0).total_cmp(&state.density([*b, 0.0], 0.0)))
        .unwrap_or(0.0);
    let ring_tol = radial[1] - radial[0];
    let max_rho = |f: &VelocityFields| f.rho.iter().cloned().fold(0.0, f64::max);
    set.checks.push(Check::within(
        "density stationary",
        report.density_drift / max_rho(&set.snapshots[0].fields),
        1e-12,
    ));
    set.checks.push(Check::new(
        "current circulates",
        report.max_speed > 0.0,
        format!("max |v| = {:.3e}", report.max_speed),
    ));
    set.checks.push(Check::within("tangential speed times radius", report.speed_radius_error, 1e-6));
    set.checks.push(Check::within(
        "pointwise angular momentum",
        report.pointwise_error / units.hbar,
        1e-8,
    ));
    set.checks.push(Check::within(
        "density ring radius",
        (report.ring_radius - ell).abs(),
        ring_tol,
    ));
    Ok((set, report))
}

/// `(ψ₀₀ + ψ₁₁)/√2` over one cycle of its `cos 2ωt` term; labels are
/// fractions of `π/ω`.
pub fn run_ho_2d_breathing(omega: f64, units: &UnitsConfig, grid: &GridSpec, times: &[f64]) -> Result<SnapshotSet> {
    validate_times(times)?;
    check_omega(omega)?;
    check_dim(grid, 2)?;
    let state = breathing_state(omega, units)?;
    let cycle = PI / omega;
    let mw = units.mass * omega / units.hbar;
    let mut set = SnapshotSet::new(Scenario::Ho2dBreathing, TimeUnit::Period(cycle));
    let points = grid.points();
    for &label in times {
        let t = label * cycle;
        let mut snap = analytic_snapshot(&state, grid, label, t, &mut set.checks)?;
        let f = &snap.fields;
        let later: Vec<f64> = points.iter().map(|p| state.density(*p, t + cycle)).collect();
        set.checks.push(Check::within(
            format!("density period at {label}"),
            sup_relative(&later, &f.rho),
            1e-12,
        ));
        let mut quadrant = [0.0f64; 4];
        let h = grid.spacing(0) * grid.spacing(1);
        for (i, [x, y]) in points.iter().enumerate() {
            let r = x.hypot(*y);
            if f.masked[i] || r == 0.0 {
                continue;
            }
            let radial = (f.flux_v[0][i] * x + f.flux_v[1][i] * y) / r;
            let q = match (*x >= 0.0, *y >= 0.0) {
                (true, true) => 0,
                (false, true) => 1,
                (false, false) => 2,
                (true, false) => 3,
            };
            quadrant[q] += radial * h;
        }
        for (q, value) in quadrant.iter().enumerate() {
            snap.summary.insert(format!("radial_flux_q{}", q + 1), *value);
            snap.summary.insert(format!("radial_flux_sign_q{}", q + 1), sign(*value, 1e-12));
        }
        set.snapshots.push(snap);
    }

    let quarter = 0.25 * cycle;
    let exact: Vec<f64> = points
        .iter()
        .map(|[x, y]| 0.5 * mw / PI * (-mw * (x * x + y * y)).exp() * (1.0 + 4.0 * mw * mw * x * x * y * y))
        .collect();
    let sampled: Vec<f64> = points.iter().map(|p| state.density(*p, quarter)).collect();
    set.checks.push(Check::within(
        "quarter-cycle density",
        sup_relative(&exact, &sampled),
        1e-12,
    ));

    let eps = 0.01 * cycle;
    let before = state.velocity_fields(grid, 0.5 * cycle - eps)?;
    let after = state.velocity_fields(grid, 0.5 * cycle + eps)?;
    let floor = 1e-3 * before.rho.iter().cloned().fold(0.0, f64::max);
    let (mut total, mut reversed) = (0usize, 0usize);
    for i in 0..grid.len() {
        if before.rho[i] <= floor || before.masked[i] || after.masked[i] {
            continue;
        }
        total += 1;
        if before.v[0][i] * after.v[0][i] + before.v[1][i] * after.v[1][i] < 0.0 {
            reversed += 1;
        }
    }
    let fraction = reversed as f64 / total.max(1) as f64;
    set.checks.push(Check::new(
        "current reverses across the half-cycle",
        fraction > 0.9,
        format!("{reversed} of {total} nodes reversed"),
    ));
    Ok(set)
}
