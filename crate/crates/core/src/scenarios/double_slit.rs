//! Two Gaussian slits of width `σ₀` at `x = −l` and `x = +l`, followed in the
//! co-moving frame so that only the transverse coordinate remains.

use num_complex::Complex64;

use super::extrema::{locate_extrema, locate_maxima, locate_minima};
use super::{analytic_snapshot, validate_times, Check, Scenario, SnapshotSet, TimeUnit};
use crate::error::{Error, Result};
use crate::kernel::{GridSpec, UnitsConfig};
use crate::states::{sigma_t_sq, AnalyticState, CharacteristicTime};

/// Slit geometry and complex weights; `first` belongs to the slit at `−l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitConfig {
    pub half_separation: f64,
    pub sigma0: f64,
    pub first: Complex64,
    pub second: Complex64,
}

impl SlitConfig {
    /// Weights are rescaled so that `|w₁|² + |w₂|² = 1`; the overlap of the
    /// two packets is accounted for by the superposition itself.
    pub fn new(half_separation: f64, sigma0: f64, first: Complex64, second: Complex64) -> Result<Self> {
        if !(half_separation > 0.0) || !(sigma0 > 0.0) {
            return Err(Error::Config("slit separation and width must be positive".into()));
        }
        let total = first.norm_sqr() + second.norm_sqr();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Config("slit weights must not both vanish".into()));
        }
        let s = total.sqrt().recip();
        Ok(Self {
            half_separation,
            sigma0,
            first: first * s,
            second: second * s,
        })
    }

    pub fn equal(half_separation: f64, sigma0: f64) -> Result<Self> {
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self::new(half_separation, sigma0, w, w)
    }

    /// Real weights `√p` at `−l` and `√(1−p)` at `+l`.
    pub fn weighted(half_separation: f64, sigma0: f64, first_probability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&first_probability) {
            return Err(Error::Config("slit probability must lie in [0, 1]".into()));
        }
        Self::new(
            half_separation,
            sigma0,
            Complex64::new(first_probability.sqrt(), 0.0),
            Complex64::new((1.0 - first_probability).sqrt(), 0.0),
        )
    }

    fn is_equal_real(&self) -> bool {
        self.first == self.second && self.first.im == 0.0
    }

    pub fn state(&self, units: &UnitsConfig) -> Result<AnalyticState> {
        let a = AnalyticState::moving_gaussian(self.sigma0, -self.half_separation, 0.0, *units);
        let b = AnalyticState::moving_gaussian(self.sigma0, self.half_separation, 0.0, *units);
        AnalyticState::superposition(a, b, self.first, self.second)
    }

    /// `2|w₁||w₂|`, the coefficient of the cross term.
    pub fn cross_coefficient(&self) -> f64 {
        2.0 * self.first.norm() * self.second.norm()
    }
}

/// Equal-weight density in closed form,
/// `e^{R₁+R₂}[cosh(xl/σ_t²) + cos(xlt/σ_t²T)] / (1 + e^{−l²/2σ₀²})`.
pub fn double_slit_density(x: f64, t: f64, half_separation: f64, sigma0: f64, units: &UnitsConfig) -> f64 {
    let l = half_separation;
    let big_t = CharacteristicTime::new(sigma0, units).value();
    let s2 = sigma_t_sq(sigma0, big_t, t);
    let envelope = -(x * x + l * l) / (2.0 * s2);
    let a = x * l / s2;
    let b = a * t / big_t;
    let pre = (2.0 * std::f64::consts::PI * s2).sqrt().recip();
    let overlap = (-l * l / (2.0 * sigma0 * sigma0)).exp();
    let value = 0.5 * ((envelope + a).exp() + (envelope - a).exp()) + envelope.exp() * b.cos();
    pre * value / (1.0 + overlap)
}

/// Large-time minimum positions `x_n = (2n+1)πσ₀²t/(Tl)`.
pub fn minima_law(n: usize, t: f64, slits: &SlitConfig, units: &UnitsConfig) -> f64 {
    let big_t = CharacteristicTime::new(slits.sigma0, units).value();
    (2 * n + 1) as f64 * std::f64::consts::PI * slits.sigma0 * slits.sigma0 * t / (big_t * slits.half_separation)
}

/// Located minimum matched against the large-time law on one side.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaComparison {
    pub order: usize,
    /// `−1` left of the origin, `+1` right of it.
    pub side: i8,
    pub predicted: f64,
    pub located: Option<f64>,
    pub tolerance: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimaReport {
    pub label: f64,
    pub time: f64,
    pub minima: Vec<f64>,
    /// Density at the grid node nearest each minimum.
    pub minimum_values: Vec<f64>,
    /// Filled for `t ≥ 10T`, orders `0..=4` on both sides.
    pub comparisons: Vec<MinimaComparison>,
}

/// Orders compared against the large-time law.
pub const LAW_ORDERS: usize = 5;

fn compare_minima(minima: &[f64], t: f64, slits: &SlitConfig, units: &UnitsConfig, dx: f64) -> Vec<MinimaComparison> {
    let mut out = Vec::new();
    for side in [-1i8, 1] {
        for n in 0..LAW_ORDERS {
            let predicted = f64::from(side) * minima_law(n, t, slits, units);
            let located = minima
                .iter()
                .filter(|m| m.signum() == f64::from(side))
                .min_by(|a, b| (*a - predicted).abs().total_cmp(&(*b - predicted).abs()))
                .copied();
            let tolerance = dx.max(0.01 * predicted.abs());
            let matched = located.is_some_and(|m| (m - predicted).abs() <= tolerance);
            out.push(MinimaComparison {
                order: n,
                side,
                predicted,
                located,
                tolerance,
                matched,
            });
        }
    }
    out
}

/// Density below this fraction of the peak is treated as empty tail.
pub const TAIL_FLOOR: f64 = 1e-12;

/// Runs `locate` on the stretch of nodes where `ρ > TAIL_FLOOR·max ρ`, so
/// that underflowing tails produce no spurious extrema.
pub(crate) fn in_window(locate: fn(&[f64], &[f64]) -> Vec<f64>, coords: &[f64], rho: &[f64]) -> Vec<f64> {
    let floor = TAIL_FLOOR * rho.iter().cloned().fold(0.0, f64::max);
    let first = rho.iter().position(|r| *r > floor);
    let last = rho.iter().rposition(|r| *r > floor);
    match (first, last) {
        (Some(a), Some(b)) if b > a => locate(&coords[a..=b], &rho[a..=b]),
        _ => Vec::new(),
    }
}

fn nearest_value(coords: &[f64], values: &[f64], x: f64) -> f64 {
    let h = coords[1] - coords[0];
    let i = (((x - coords[0]) / h).round().max(0.0) as usize).min(values.len() - 1);
    values[i]
}

/// Snapshots of the slit pair with minima located at every time.
pub fn run_double_slit(
    slits: &SlitConfig,
    units: &UnitsConfig,
    grid: &GridSpec,
    times: &[f64],
) -> Result<(SnapshotSet, Vec<MinimaReport>)> {
    validate_times(times)?;
    if grid.dim() != 1 {
        return Err(Error::Config("the slit scenario runs on a line".into()));
    }
    let state = slits.state(units)?;
    let big_t = CharacteristicTime::new(slits.sigma0, units).value();
    let mut set = SnapshotSet::new(Scenario::DoubleSlit, TimeUnit::Characteristic(big_t));
    let coords = grid.axis(0).coords();
    let dx = grid.spacing(0);
    let mut reports = Vec::new();
    for &label in times {
        let t = label * big_t;
        let snap = analytic_snapshot(&state, grid, label, t, &mut set.checks)?;
        let rho = &snap.fields.rho;
        if slits.is_equal_real() {
            let err = coords
                .iter()
                .zip(rho)
                .map(|(x, r)| {
                    let c = double_slit_density(*x, t, slits.half_separation, slits.sigma0, units);
                    (c - r).abs() / c.max(*r).max(f64::MIN_POSITIVE)
                })
                .fold(0.0, f64::max);
            set.checks.push(Check::within(format!("closed-form density at {label}"), err, 1e-12));
            if (grid.axis(0).min + grid.axis(0).max).abs() < 1e-12 * grid.axis(0).max.abs() {
                let n = rho.len();
                let asym = (0..n / 2)
                    .map(|i| (rho[i] - rho[n - 1 - i]).abs() / rho[i].max(rho[n - 1 - i]).max(f64::MIN_POSITIVE))
                    .fold(0.0, f64::max);
                set.checks.push(Check::within(format!("mirror symmetry at {label}"), asym, 1e-12));
            }
        }
        let minima = in_window(locate_minima, &coords, rho);
        let minimum_values: Vec<f64> = minima.iter().map(|m| nearest_value(&coords, rho, *m)).collect();
        if t > 0.0 && !minima.is_empty() {
            let lowest = minimum_values.iter().cloned().fold(f64::INFINITY, f64::min);
            set.checks.push(Check::new(
                format!("minima stay positive at {label}"),
                lowest > 0.0,
                format!("lowest minimum {lowest:.3e}"),
            ));
        }
        let comparisons = if label >= 10.0 {
            compare_minima(&minima, t, slits, units, dx)
        } else {
            Vec::new()
        };
        reports.push(MinimaReport {
            label,
            time: t,
            minima,
            minimum_values,
            comparisons,
        });
        set.snapshots.push(snap);
    }
    Ok((set, reports))
}

/// Extrema of an unequal run against the equal-weight run at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaComparison {
    pub label: f64,
    pub equal: Vec<f64>,
    pub unequal: Vec<f64>,
    /// Largest distance from an equal-run extremum to the nearest extremum
    /// of the unequal run, in grid cells.
    pub max_offset_cells: f64,
}

/// Extremum distance measured in cells of `dx`.
pub(crate) fn extrema_offset(equal: &[f64], unequal: &[f64], dx: f64) -> f64 {
    equal
        .iter()
        .map(|e| unequal.iter().map(|u| (u - e).abs()).fold(f64::INFINITY, f64::min) / dx)
        .fold(0.0, f64::max)
}

/// `¼`/`¾` slit pair (`¼` at `−l`) compared with the equal-weight pair.
pub fn run_double_slit_unequal(
    half_separation: f64,
    sigma0: f64,
    units: &UnitsConfig,
    grid: &GridSpec,
    times: &[f64],
) -> Result<(SnapshotSet, Vec<ExtremaComparison>)> {
    let slits = SlitConfig::weighted(half_separation, sigma0, 0.25)?;
    let equal = SlitConfig::equal(half_separation, sigma0)?.state(units)?;
    let (mut set, _) = run_double_slit(&slits, units, grid, times)?;
    let coords = grid.axis(0).coords();
    let dx = grid.spacing(0);
    let mut out = Vec::new();
    for snap in &set.snapshots {
        let rho = &snap.fields.rho;
        let reference: Vec<f64> = coords.iter().map(|x| equal.density([*x, 0.0], snap.time)).collect();
        let e = in_window(locate_extrema, &coords, &reference);
        let u = in_window(locate_extrema, &coords, rho);
        out.push(ExtremaComparison {
            label: snap.label,
            max_offset_cells: extrema_offset(&e, &u, dx),
            equal: e,
            unequal: u,
        });
    }
    for snap in &set.snapshots {
        if snap.time == 0.0 {
            continue;
        }
        let rho = &snap.fields.rho;
        let maxima = in_window(locate_maxima, &coords, rho);
        let mut pairs = 0;
        let mut higher = 0;
        for m in maxima.iter().filter(|m| **m > 0.0) {
            if let Some(mirror) = maxima
                .iter()
                .filter(|x| **x < 0.0 && (**x + m).abs() < 0.5 * m.abs())
                .min_by(|a, b| (**a + m).abs().total_cmp(&(**b + m).abs()))
            {
                pairs += 1;
                if nearest_value(&coords, rho, *m) > nearest_value(&coords, rho, *mirror) {
                    higher += 1;
                }
            }
        }
        set.checks.push(Check::new(
            format!("heavier slit keeps higher maxima at {}", snap.label),
            higher == pairs,
            format!("{higher} of {pairs} mirrored maxima higher on the heavier side"),
        ));
    }
    Ok((set, out))
}

/// Summary of the extreme weighting `|w₁|² = 1/1000`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeReport {
    pub first_probability: f64,
    pub cross_coefficient: f64,
    /// Height of the weak hump over the strong one at `t = 0`.
    pub hump_ratio: f64,
    /// Region at `t = 2T` where the modulation depth exceeds 5%.
    pub modulated_region: Option<(f64, f64)>,
    pub sigma_at_two_t: f64,
    pub confined: bool,
}

/// Modulation depth `2|w₁||w₂|e^{R₁+R₂} / (|w₁|²e^{2R₁} + |w₂|²e^{2R₂})`.
fn modulation_depth(slits: &SlitConfig, units: &UnitsConfig, x: f64, t: f64) -> f64 {
    let big_t = CharacteristicTime::new(slits.sigma0, units).value();
    let s2 = sigma_t_sq(slits.sigma0, big_t, t);
    // R₁ − R₂ for packets centred at ∓l.
    let delta = -x * slits.half_separation / s2;
    let (a2, b2) = (slits.first.norm_sqr(), slits.second.norm_sqr());
    slits.cross_coefficient() / (a2 * delta.exp() + b2 * (-delta).exp())
}

/// Slit pair with `|w₁|² = 1/1000` at `−l`.
pub fn run_double_slit_extreme(
    half_separation: f64,
    sigma0: f64,
    units: &UnitsConfig,
    grid: &GridSpec,
    times: &[f64],
) -> Result<(SnapshotSet, ExtremeReport)> {
    let p = 1e-3;
    let slits = SlitConfig::weighted(half_separation, sigma0, p)?;
    let (set, _) = run_double_slit(&slits, units, grid, times)?;
    let state = slits.state(units)?;
    let coords = grid.axis(0).coords();
    let hump = |c: f64| {
        coords
            .iter()
            .filter(|x| (**x - c).abs() < 2.0 * sigma0)
            .map(|x| state.density([*x, 0.0], 0.0))
            .fold(0.0, f64::max)
    };
    let hump_ratio = hump(-half_separation) / hump(half_separation);
    let big_t = CharacteristicTime::new(sigma0, units).value();
    let t2 = 2.0 * big_t;
    let sigma_at_two_t = sigma_t_sq(sigma0, big_t, t2).sqrt();
    let fine = crate::numerics::linspace(grid.axis(0).min, grid.axis(0).max, 20 * grid.axis(0).points);
    let above: Vec<f64> = fine
        .iter()
        .copied()
        .filter(|x| modulation_depth(&slits, units, *x, t2) > 0.05)
        .collect();
    let modulated_region = above.first().map(|lo| (*lo, *above.last().unwrap()));
    let confined = above.iter().all(|x| (x + half_separation).abs() < 3.0 * sigma_at_two_t);
    Ok((
        set,
        ExtremeReport {
            first_probability: p,
            cross_coefficient: slits.cross_coefficient(),
            hump_ratio,
            modulated_region,
            sigma_at_two_t,
            confined,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units() -> UnitsConfig {
        UnitsConfig::default()
    }

    #[test]
    fn closed_form_matches_superposition() {
        let slits = SlitConfig::equal(2.0, 1.0).unwrap();
        let state = slits.state(&units()).unwrap();
        for x in [-6.0, -1.3, 0.0, 0.4, 3.3] {
            for t in [0.0, 1.0, 9.0] {
                let a = double_slit_density(x, t, 2.0, 1.0, &units());
                let b = state.density([x, 0.0], t);
                assert!((a - b).abs() <= 1e-13 * a, "x={x} t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn two_humps_at_start() {
        let slits = SlitConfig::equal(5.0, 1.0).unwrap();
        let grid = GridSpec::line(-40.0, 40.0, 1024).unwrap();
        let coords = grid.axis(0).coords();
        let (set, _) = run_double_slit(&slits, &units(), &grid, &[0.0]).unwrap();
        let maxima = locate_maxima(&coords, &set.snapshots[0].fields.rho);
        assert_eq!(maxima.len(), 2);
        assert!((maxima[0] + 5.0).abs() < 1e-3 && (maxima[1] - 5.0).abs() < 1e-3, "{maxima:?}");
    }

    #[test]
    fn single_weight_is_single_slit_spreading() {
        let slits = SlitConfig::new(3.0, 1.0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)).unwrap();
        let state = slits.state(&units()).unwrap();
        let single = AnalyticState::moving_gaussian(1.0, -3.0, 0.0, units());
        for x in [-5.0, -3.0, 0.0, 2.0] {
            for t in [0.0, 2.0, 6.0] {
                let (a, b) = (state.density([x, 0.0], t), single.density([x, 0.0], t));
                assert!((a - b).abs() <= 1e-14 * b, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn fringe_law_for_the_central_minimum() {
        let slits = SlitConfig::equal(5.0, 1.0).unwrap();
        let grid = GridSpec::line(-40.0, 40.0, 1024).unwrap();
        let (_, reports) = run_double_slit(&slits, &units(), &grid, &[12.0]).unwrap();
        let c = &reports[0].comparisons;
        assert_eq!(c.len(), 2 * LAW_ORDERS);
        for side in [-1, 1] {
            let first = c.iter().find(|m| m.order == 0 && m.side == side).unwrap();
            assert!(first.matched, "{first:?}");
        }
    }

    #[test]
    fn fringes_widen_with_time() {
        let slits = SlitConfig::equal(5.0, 1.0).unwrap();
        let grid = GridSpec::line(-40.0, 40.0, 1024).unwrap();
        let (_, reports) = run_double_slit(&slits, &units(), &grid, &[6.0, 12.0]).unwrap();
        let count = |r: &MinimaReport| r.minima.iter().filter(|m| m.abs() < 20.0).count();
        let (early, late) = (count(&reports[0]), count(&reports[1]));
        assert!(late >= 1 && early >= 2 * late - 1, "{early} {late}");
    }

    #[test]
    fn unequal_weights_keep_heavier_side_higher() {
        let grid = Scenario::DoubleSlit.default_grid();
        let (set, cmp) = run_double_slit_unequal(5.0, 1.0, &units(), &grid, &[0.0, 6.0, 12.0]).unwrap();
        for c in &set.checks {
            assert!(c.passed, "{} {}", c.name, c.detail);
        }
        assert_eq!(cmp.len(), 3);
        // The humps themselves stay put; only the saddle between them moves
        // towards the lighter slit.
        let humps = |v: &[f64]| v.iter().filter(|x| (x.abs() - 5.0).abs() < 1.0).copied().collect::<Vec<_>>();
        assert!(extrema_offset(&humps(&cmp[0].equal), &humps(&cmp[0].unequal), 80.0 / 1023.0) < 1.0);
    }

    #[test]
    fn extreme_weighting_report() {
        let grid = GridSpec::line(-40.0, 40.0, 1024).unwrap();
        let (_, report) = run_double_slit_extreme(5.0, 1.0, &units(), &grid, &[0.0, 2.0]).unwrap();
        assert!((report.cross_coefficient - 0.063214).abs() < 1e-6);
        let expected = 1e-3 / (1.0 - 1e-3);
        assert!((report.hump_ratio / expected - 1.0).abs() < 1e-6, "{}", report.hump_ratio);
        assert!(report.confined, "{report:?}");
        let (lo, hi) = report.modulated_region.unwrap();
        assert!(lo < -5.0 && hi > -5.0);
    }

    #[test]
    fn bad_geometry_rejected() {
        assert!(SlitConfig::equal(0.0, 1.0).is_err());
        assert!(SlitConfig::new(1.0, 1.0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).is_err());
        assert!(SlitConfig::weighted(1.0, 1.0, 1.5).is_err());
    }
}
