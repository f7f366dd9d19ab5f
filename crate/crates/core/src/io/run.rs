use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::ScenarioConfig;
use super::csv::{snapshot_csv, snapshot_stem, write_file};
use super::manifest::{FileRecord, RunManifest, MANIFEST_NAME};
use super::svg::render_plot;
use crate::dynamics::{sample_trajectories, Boundary, InitialPositions, RecordPolicy, SamplerConfig};
use crate::error::{Error, Result};
use crate::kernel::GridSpec;
use crate::scenarios::{run_double_slit, run_scenario, scenario_state, Check, MinimaReport, Scenario, SlitConfig, SnapshotSet};
use crate::stats::ks_two_sample;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub set: SnapshotSet,
    pub manifest: RunManifest,
}

impl RunOutcome {
    pub fn all_passed(&self) -> bool {
        self.manifest.all_passed
    }
}

fn prepare_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let stale = dir.join(MANIFEST_NAME);
    if stale.exists() {
        std::fs::remove_file(&stale).map_err(|e| Error::io(&stale, e))?;
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

fn minima_files(reports: &[MinimaReport]) -> (String, String) {
    let mut located = String::from("label,position,rho\n");
    let mut law = String::from("label,order,side,predicted,located,tolerance,matched\n");
    for r in reports {
        for (x, v) in r.minima.iter().zip(&r.minimum_values) {
            let _ = writeln!(located, "{},{},{}", fmt(r.label), fmt(*x), fmt(*v));
        }
        for c in &r.comparisons {
            let _ = writeln!(
                law,
                "{},{},{},{},{},{},{}",
                fmt(r.label),
                c.order,
                c.side,
                fmt(c.predicted),
                fmt(c.located.unwrap_or(f64::NAN)),
                fmt(c.tolerance),
                c.matched
            );
        }
    }
    (located, law)
}

/// Runs a scenario and writes one CSV and one SVG per snapshot (plus minima
/// tables for the slit pair) into the configured directory, then the
/// manifest.
pub fn run_config(config: &ScenarioConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let params = config.params()?;
    let (set, minima) = if config.scenario == Scenario::DoubleSlit {
        let slits = SlitConfig::new(params.half_separation, params.sigma0, params.weights.0, params.weights.1)?;
        let (set, reports) = run_double_slit(&slits, &params.units, &params.grid, &params.times)?;
        (set, Some(reports))
    } else {
        (run_scenario(&params)?, None)
    };
    let dir = config.output_dir.clone();
    prepare_dir(&dir)?;
    let mut names = Vec::new();
    for (k, snap) in set.snapshots.iter().enumerate() {
        let stem = snapshot_stem(k);
        let csv = format!("{stem}.csv");
        write_file(&dir.join(&csv), snapshot_csv(snap).as_bytes())?;
        let svg = format!("{stem}.svg");
        let title = format!("{} t = {}", config.scenario, snap.label);
        write_file(&dir.join(&svg), render_plot(snap, &title).as_bytes())?;
        names.push(csv);
        names.push(svg);
    }
    if let Some(reports) = &minima {
        let (located, law) = minima_files(reports);
        for (name, body) in [("minima.csv", located), ("minima_law.csv", law)] {
            write_file(&dir.join(name), body.as_bytes())?;
            names.push(name.to_string());
        }
    }
    let mut manifest = RunManifest::new("run", config);
    manifest.files = names.iter().map(|n| FileRecord::of(&dir, n)).collect::<Result<_>>()?;
    manifest.set_checks(&set.checks);
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    manifest.write(&dir)?;
    Ok(RunOutcome { dir, set, manifest })
}

#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub dir: PathBuf,
    pub manifest: RunManifest,
    pub final_time: f64,
}

impl SampleOutcome {
    pub fn all_passed(&self) -> bool {
        self.manifest.all_passed
    }
}

struct Histogram {
    text: String,
}

fn histogram(grid: &GridSpec, bins: usize, positions: &[f64], dim: usize, exact: impl Fn([f64; 2]) -> f64) -> Histogram {
    let (ax, ay) = (grid.axis(0), grid.axis(grid.dim() - 1));
    let (wx, wy) = ((ax.max - ax.min) / bins as f64, (ay.max - ay.min) / bins as f64);
    let cells = if dim == 1 { bins } else { bins * bins };
    let mut counts = vec![0usize; cells];
    let mut total = 0usize;
    for p in positions.chunks(dim) {
        if !p[0].is_finite() {
            continue;
        }
        total += 1;
        let bx = (((p[0] - ax.min) / wx) as usize).min(bins - 1);
        let k = if dim == 1 {
            bx
        } else {
            bx * bins + (((p[1] - ay.min) / wy) as usize).min(bins - 1)
        };
        counts[k] += 1;
    }
    let volume = if dim == 1 { wx } else { wx * wy };
    let mut text = if dim == 1 {
        String::from("x_lo,x_hi,count,density,analytic\n")
    } else {
        String::from("x_lo,x_hi,y_lo,y_hi,count,density,analytic\n")
    };
    for (k, c) in counts.iter().enumerate() {
        let (bx, by) = if dim == 1 { (k, 0) } else { (k / bins, k % bins) };
        let (x0, y0) = (ax.min + bx as f64 * wx, ay.min + by as f64 * wy);
        let density = *c as f64 / (total.max(1) as f64 * volume);
        let centre = [x0 + 0.5 * wx, if dim == 1 { 0.0 } else { y0 + 0.5 * wy }];
        if dim == 1 {
            let _ = write!(text, "{},{},", fmt(x0), fmt(x0 + wx));
        } else {
            let _ = write!(text, "{},{},{},{},", fmt(x0), fmt(x0 + wx), fmt(y0), fmt(y0 + wy));
        }
        let _ = writeln!(text, "{c},{},{}", fmt(density), fmt(exact(centre)));
    }
    Histogram { text }
}

/// Samples trajectories of the scenario state from its density at `t = 0`
/// and writes final positions, a histogram against the analytic density and
/// the manifest. In 1D a KS test against inverse-CDF draws from the analytic
/// density is recorded as a check.
pub fn sample_config(config: &ScenarioConfig) -> Result<SampleOutcome> {
    let start = Instant::now();
    let params = config.params()?;
    let state = scenario_state(&params)?;
    let grid = params.grid.clone();
    let dim = grid.dim();
    let domain: Vec<(f64, f64)> = grid.axes().iter().map(|a| (a.min, a.max)).collect();
    let mut sc = SamplerConfig::new(config.particles, config.dt, config.steps, config.seed, domain.clone());
    sc.units = params.units;
    sc.boundary = if config.absorbing {
        Boundary::Absorbing
    } else {
        Boundary::Reflecting
    };
    sc.record = RecordPolicy::Steps(vec![0, config.steps]);
    let initial = InitialPositions::from_state(&state, &grid, 0.0);
    let ensemble = sample_trajectories(&state, &initial, &sc)?;
    let final_time = ensemble.time(config.steps);
    let frame = ensemble
        .frame(config.steps)
        .ok_or_else(|| Error::Config("final step was not recorded".into()))?;

    let mut checks = Vec::new();
    if dim == 1 {
        let mut rc = SamplerConfig::new(config.particles, config.dt, 0, config.seed ^ 0x5EED_0F0D_D5EE_D5EE, domain);
        rc.record = RecordPolicy::All;
        let reference = sample_trajectories(&state, &InitialPositions::from_state(&state, &grid, final_time), &rc)?;
        let drawn = reference.coordinate(0, 0).unwrap_or_default();
        let sampled = ensemble.coordinate(config.steps, 0).unwrap_or_default();
        if !drawn.is_empty() && !sampled.is_empty() {
            let ks = ks_two_sample(&sampled, &drawn);
            checks.push(Check::new(
                "ensemble matches analytic density",
                ks.p_value > 0.01,
                format!("KS statistic {:.4e}, p = {:.4}", ks.statistic, ks.p_value),
            ));
        }
    }

    let dir = config.output_dir.clone();
    prepare_dir(&dir)?;
    let mut positions = String::from(if dim == 1 { "x\n" } else { "x,y\n" });
    for p in frame.positions.chunks(dim) {
        let row: Vec<String> = p.iter().map(|v| fmt(*v)).collect();
        positions.push_str(&row.join(","));
        positions.push('\n');
    }
    write_file(&dir.join("final_positions.csv"), positions.as_bytes())?;
    let hist = histogram(&grid, config.bins, &frame.positions, dim, |p| state.density(p, final_time));
    write_file(&dir.join("histogram.csv"), hist.text.as_bytes())?;
    let mut summary = String::from("key,value\n");
    let _ = writeln!(summary, "final_time,{}", fmt(final_time));
    let _ = writeln!(summary, "boundary_events,{}", ensemble.boundary_events);
    let alive = frame.positions.chunks(dim).filter(|p| p[0].is_finite()).count();
    let _ = writeln!(summary, "surviving_particles,{alive}");
    write_file(&dir.join("sample_summary.csv"), summary.as_bytes())?;

    let mut manifest = RunManifest::new("sample", config);
    manifest.files = ["final_positions.csv", "histogram.csv", "sample_summary.csv"]
        .iter()
        .map(|n| FileRecord::of(&dir, n))
        .collect::<Result<_>>()?;
    manifest.set_checks(&checks);
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    manifest.write(&dir)?;
    Ok(SampleOutcome {
        dir,
        manifest,
        final_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(scenario: Scenario, dir: &Path) -> ScenarioConfig {
        let mut c = ScenarioConfig::defaults(scenario);
        c.output_dir = dir.to_path_buf();
        c
    }

    #[test]
    fn run_writes_manifest_last_and_checksums_match() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = small(Scenario::DoubleSlit, tmp.path());
        c.times = vec![0.0, 12.0];
        let out = run_config(&c).unwrap();
        assert!(out.all_passed());
        let m = RunManifest::read(tmp.path()).unwrap();
        assert_eq!(m.files.len(), 6);
        for f in &m.files {
            assert!(f.verify(tmp.path()), "{}", f.path);
        }
        assert_eq!(m.config["scenario"], "double_slit");
        let law = std::fs::read_to_string(tmp.path().join("minima_law.csv")).unwrap();
        assert_eq!(law.lines().count(), 11);
    }

    #[test]
    fn repeated_runs_are_byte_identical() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let mut ca = small(Scenario::Ho2dRotating, a.path());
        ca.grid_points = 48;
        ca.times = vec![0.0, 0.5];
        let mut cb = ca.clone();
        cb.output_dir = b.path().to_path_buf();
        let (ra, rb) = (run_config(&ca).unwrap(), run_config(&cb).unwrap());
        assert_eq!(ra.manifest.files, rb.manifest.files);
        for f in &ra.manifest.files {
            let x = std::fs::read(a.path().join(&f.path)).unwrap();
            let y = std::fs::read(b.path().join(&f.path)).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn sampling_free_packet() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = small(Scenario::FreePacket, tmp.path());
        c.particles = 4000;
        c.steps = 200;
        c.dt = 0.01;
        c.seed = 7;
        let out = sample_config(&c).unwrap();
        assert!(out.all_passed(), "{:?}", out.manifest.checks);
        assert!((out.final_time - 2.0).abs() < 1e-12);
        let hist = std::fs::read_to_string(tmp.path().join("histogram.csv")).unwrap();
        assert_eq!(hist.lines().count(), 65);
        let again = sample_config(&c).unwrap();
        assert_eq!(out.manifest.files, again.manifest.files);
    }
}
