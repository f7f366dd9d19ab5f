use super::{analytic_snapshot, validate_times, Check, Scenario, SnapshotSet, TimeUnit};
use crate::error::Result;
use crate::kernel::{GridSpec, UnitsConfig};
use crate::states::{sigma_t_sq, AnalyticState, CharacteristicTime};

/// Packet at rest centred at the origin, sampled at multiples of `T`.
pub fn run_free_packet(sigma0: f64, units: &UnitsConfig, grid: &GridSpec, times: &[f64]) -> Result<SnapshotSet> {
    validate_times(times)?;
    if !(sigma0 > 0.0) {
        return Err(crate::Error::Config("sigma0 must be positive".into()));
    }
    let state = AnalyticState::free_gaussian(sigma0, *units);
    let big_t = CharacteristicTime::new(sigma0, units).value();
    let mut set = SnapshotSet::new(Scenario::FreePacket, TimeUnit::Characteristic(big_t));
    let x: Vec<f64> = grid.points().iter().map(|p| p[0]).collect();
    for &label in times {
        let t = label * big_t;
        let mut snap = analytic_snapshot(&state, grid, label, t, &mut set.checks)?;
        let f = &snap.fields;
        let m1: Vec<f64> = f.rho.iter().zip(&x).map(|(r, x)| r * x).collect();
        let m2: Vec<f64> = f.rho.iter().zip(&x).map(|(r, x)| r * x * x).collect();
        let mean = grid.integrate(&m1);
        let variance = grid.integrate(&m2) - mean * mean;
        let expect = sigma_t_sq(sigma0, big_t, t);
        set.checks.push(Check::within(
            format!("variance at {label}"),
            (variance / expect - 1.0).abs(),
            1e-6,
        ));
        let osmotic_total = grid.integrate(&f.flux_u[0]);
        set.checks.push(Check::within(format!("osmotic flux integral at {label}"), osmotic_total.abs(), 1e-10));
        if label == 1.0 {
            let drift_max = f.flux_b[0].iter().fold(0.0f64, |a, v| a.max(v.abs()));
            set.checks.push(Check::within("drift flux vanishes at T", drift_max, 1e-10));
        }
        snap.summary.insert("variance".into(), variance);
        snap.summary.insert("mean".into(), mean);
        set.snapshots.push(snap);
    }
    Ok(set)
}
