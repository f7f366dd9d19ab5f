//! Runnable experiments with built-in checks: packet spreading, the double
//! slit in its equal, unequal and extreme forms, and oscillator
//! superpositions in one and two dimensions.

mod double_slit;
mod extrema;
mod free_packet;
mod oscillator;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{velocities_from_wavefield, GridSpec, UnitsConfig, VelocityFields};
use crate::states::AnalyticState;

pub use double_slit::{
    double_slit_density, minima_law, run_double_slit, run_double_slit_extreme, run_double_slit_unequal,
    ExtremaComparison, ExtremeReport, MinimaComparison, MinimaReport, SlitConfig,
};
pub use extrema::{locate_extrema, locate_maxima, locate_minima};
pub use free_packet::run_free_packet;
pub use oscillator::{angular_momentum, run_ho_1d, run_ho_2d_breathing, run_ho_2d_rotating, AngularReport};

/// The runnable scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scenario {
    FreePacket,
    DoubleSlit,
    Ho1d,
    Ho2dRotating,
    Ho2dBreathing,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::FreePacket,
        Scenario::DoubleSlit,
        Scenario::Ho1d,
        Scenario::Ho2dRotating,
        Scenario::Ho2dBreathing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::FreePacket => "free_packet",
            Scenario::DoubleSlit => "double_slit",
            Scenario::Ho1d => "ho_1d",
            Scenario::Ho2dRotating => "ho_2d_rotating",
            Scenario::Ho2dBreathing => "ho_2d_breathing",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Scenario::FreePacket => "spreading Gaussian packet; times in units of T = 2m*sigma0^2/hbar",
            Scenario::DoubleSlit => "two Gaussian slits at -l and +l; times in units of T",
            Scenario::Ho1d => "(psi0 + psi1)/sqrt(2) in a 1D oscillator; times as fractions of 2*pi/omega",
            Scenario::Ho2dRotating => "(psi01 + i*psi10)/sqrt(2) in a 2D oscillator; times as fractions of 2*pi/omega",
            Scenario::Ho2dBreathing => "(psi00 + psi11)/sqrt(2) in a 2D oscillator; times as fractions of pi/omega",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Scenario::Ho2dRotating | Scenario::Ho2dBreathing => 2,
            _ => 1,
        }
    }

    /// Default snapshot times in the scenario's own time unit.
    pub fn default_times(self) -> Vec<f64> {
        match self {
            Scenario::FreePacket => vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            Scenario::DoubleSlit => vec![0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 12.0],
            Scenario::Ho1d | Scenario::Ho2dBreathing => (0..=8).map(|k| f64::from(k) / 8.0).collect(),
            Scenario::Ho2dRotating => vec![0.0, 0.25, 0.5, 0.75, 1.0],
        }
    }

    /// Default grid: 1024 nodes over `[−40, 40]`, or 256² over `[−6, 6]²`.
    /// The slit pair spreads past `±40` by `t = 8T`, so it gets 2047 nodes
    /// over `[−80, 80]` at the same spacing.
    pub fn default_grid(self) -> GridSpec {
        if self == Scenario::DoubleSlit {
            GridSpec::line(-80.0, 80.0, 2047).expect("valid default grid")
        } else if self.dim() == 1 {
            GridSpec::line(-40.0, 40.0, 1024).expect("valid default grid")
        } else {
            GridSpec::square(-6.0, 6.0, 256).expect("valid default grid")
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario `{s}`")))
    }
}

/// How snapshot labels map to physical time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeUnit {
    /// Multiples of the packet spreading time.
    Characteristic(f64),
    /// Fractions of an oscillation period.
    Period(f64),
}

impl TimeUnit {
    pub fn scale(self) -> f64 {
        match self {
            TimeUnit::Characteristic(t) | TimeUnit::Period(t) => t,
        }
    }
}

/// Outcome of one built-in check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// Passes when `error <= tolerance`.
    pub fn within(name: impl Into<String>, error: f64, tolerance: f64) -> Self {
        Self::new(name, error <= tolerance, format!("error {error:.3e} (tolerance {tolerance:.1e})"))
    }
}

/// Fields at one instant plus scalar summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// Time in the scenario's unit.
    pub label: f64,
    pub time: f64,
    pub fields: VelocityFields,
    pub summary: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotSet {
    pub scenario: Scenario,
    pub unit: TimeUnit,
    pub snapshots: Vec<Snapshot>,
    pub checks: Vec<Check>,
}

impl SnapshotSet {
    pub(crate) fn new(scenario: Scenario, unit: TimeUnit) -> Self {
        Self {
            scenario,
            unit,
            snapshots: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub(crate) fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Config("at least one snapshot time is required".into()));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::Config("snapshot times must be finite and non-negative".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Config("snapshot times must be strictly increasing".into()));
    }
    Ok(())
}

/// Closed-form fields of `state` with normalization and route checks.
pub(crate) fn analytic_snapshot(
    state: &AnalyticState,
    grid: &GridSpec,
    label: f64,
    time: f64,
    checks: &mut Vec<Check>,
) -> Result<Snapshot> {
    let fields = state.velocity_fields(grid, time)?;
    let mass = grid.integrate(&fields.rho);
    checks.push(Check::within(format!("normalization at {label}"), (mass - 1.0).abs(), 1e-6));
    let route = velocity_route_error(state, grid, time, &fields)?;
    checks.push(Check::within(format!("grid velocities at {label}"), route, 1e-4));
    Ok(Snapshot {
        label,
        time,
        fields,
        summary: BTreeMap::new(),
    })
}

/// Largest sup-norm relative disagreement between closed-form velocities and
/// those extracted from the sampled wave field, over nodes with
/// `ρ > 10⁻⁶ max ρ`. A component whose own scale is below `10⁻⁸` of the
/// largest velocity is measured against that largest velocity instead.
pub fn velocity_route_error(state: &AnalyticState, grid: &GridSpec, t: f64, exact: &VelocityFields) -> Result<f64> {
    let psi = state.sample(grid, t)?;
    let numeric = velocities_from_wavefield(&psi, state.units())?;
    let floor = 1e-6 * exact.rho.iter().cloned().fold(0.0, f64::max);
    let keep = |i: usize| exact.rho[i] > floor && !exact.masked[i] && !numeric.masked[i];
    let mut parts = Vec::new();
    for (num, ex) in [(&numeric.u, &exact.u), (&numeric.v, &exact.v)] {
        for axis in 0..grid.dim() {
            let (mut err, mut scale) = (0.0f64, 0.0f64);
            for i in (0..grid.len()).filter(|i| keep(*i)) {
                err = err.max((num[axis][i] - ex[axis][i]).abs());
                scale = scale.max(ex[axis][i].abs());
            }
            parts.push((err, scale));
        }
    }
    let largest = parts.iter().fold(0.0f64, |m, p| m.max(p.1));
    Ok(parts.iter().fold(0.0f64, |m, (err, scale)| {
        let s = scale.max(1e-8 * largest);
        m.max(if s > 0.0 { err / s } else { *err })
    }))
}

/// Parameters shared by every scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub scenario: Scenario,
    pub units: UnitsConfig,
    pub sigma0: f64,
    pub half_separation: f64,
    pub omega: f64,
    pub weights: (Complex64, Complex64),
    pub grid: GridSpec,
    pub times: Vec<f64>,
}

impl ScenarioParams {
    pub fn defaults(scenario: Scenario) -> Self {
        let w = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            scenario,
            units: UnitsConfig::default(),
            sigma0: 1.0,
            half_separation: 5.0,
            omega: 1.0,
            weights: (w, w),
            grid: scenario.default_grid(),
            times: scenario.default_times(),
        }
    }
}

/// The closed-form state behind a scenario.
pub fn scenario_state(params: &ScenarioParams) -> Result<AnalyticState> {
    let p = params;
    match p.scenario {
        Scenario::FreePacket => {
            if !(p.sigma0 > 0.0) {
                return Err(Error::Config("sigma0 must be positive".into()));
            }
            Ok(AnalyticState::free_gaussian(p.sigma0, p.units))
        }
        Scenario::DoubleSlit => SlitConfig::new(p.half_separation, p.sigma0, p.weights.0, p.weights.1)?.state(&p.units),
        Scenario::Ho1d => oscillator::ho_1d_state(p.omega, &p.units),
        Scenario::Ho2dRotating => oscillator::rotating_state(p.omega, &p.units),
        Scenario::Ho2dBreathing => oscillator::breathing_state(p.omega, &p.units),
    }
}

/// Runs the scenario named in `params`.
pub fn run_scenario(params: &ScenarioParams) -> Result<SnapshotSet> {
    if params.grid.dim() != params.scenario.dim() {
        return Err(Error::Config(format!(
            "scenario {} needs a {}-dimensional grid",
            params.scenario,
            params.scenario.dim()
        )));
    }
    let p = params;
    match p.scenario {
        Scenario::FreePacket => run_free_packet(p.sigma0, &p.units, &p.grid, &p.times),
        Scenario::DoubleSlit => {
            let slits = SlitConfig::new(p.half_separation, p.sigma0, p.weights.0, p.weights.1)?;
            run_double_slit(&slits, &p.units, &p.grid, &p.times).map(|(set, _)| set)
        }
        Scenario::Ho1d => run_ho_1d(p.omega, &p.units, &p.grid, &p.times),
        Scenario::Ho2dRotating => run_ho_2d_rotating(p.omega, &p.units, &p.grid, &p.times).map(|(set, _)| set),
        Scenario::Ho2dBreathing => run_ho_2d_breathing(p.omega, &p.units, &p.grid, &p.times),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!("slit".parse::<Scenario>().is_err());
    }

    #[test]
    fn times_must_increase() {
        assert!(validate_times(&[0.0, 1.0, 1.0]).is_err());
        assert!(validate_times(&[]).is_err());
        assert!(validate_times(&[0.0, 0.5]).is_ok());
    }

    #[test]
    fn default_runs_pass_their_checks() {
        for s in [Scenario::FreePacket, Scenario::DoubleSlit, Scenario::Ho1d] {
            let set = run_scenario(&ScenarioParams::defaults(s)).unwrap();
            for c in &set.checks {
                assert!(c.passed, "{s}: {} {}", c.name, c.detail);
            }
            assert_eq!(set.snapshots.len(), s.default_times().len());
        }
    }

    #[test]
    fn grid_dimension_must_match() {
        let mut p = ScenarioParams::defaults(Scenario::Ho2dRotating);
        p.grid = GridSpec::line(-5.0, 5.0, 64).unwrap();
        assert!(run_scenario(&p).is_err());
    }
}
