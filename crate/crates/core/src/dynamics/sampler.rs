//! Stochastic trajectories `Δx = b·dt + √(η·dt/m)·ξ` and drift estimates
//! recovered from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::fokker_planck::Boundary;
use crate::error::{Error, Result};
use crate::kernel::{velocities_from_wavefield, GridSpec, UnitsConfig, VelocityFields, WaveField};
use crate::states::AnalyticState;

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Anything that yields a drift velocity at `(x, t)`.
pub trait DriftSource: Sync {
    fn dim(&self) -> usize;
    fn drift(&self, p: [f64; 2], t: f64) -> [f64; 2];
}

impl DriftSource for AnalyticState {
    fn dim(&self) -> usize {
        AnalyticState::dim(self)
    }

    fn drift(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        AnalyticState::drift(self, p, t)
    }
}

/// Drift read off a recorded sequence of wave fields, interpolated linearly
/// in space and time. Masked nodes contribute zero drift.
#[derive(Debug, Clone)]
pub struct WaveFieldDrift {
    frames: Vec<VelocityFields>,
}

impl WaveFieldDrift {
    pub fn new(sequence: &[WaveField], units: &UnitsConfig) -> Result<Self> {
        if sequence.is_empty() {
            return Err(Error::domain("empty wave-field sequence"));
        }
        let frames = sequence
            .iter()
            .map(|psi| velocities_from_wavefield(psi, units))
            .collect::<Result<Vec<_>>>()?;
        if frames.windows(2).any(|w| !(w[1].time > w[0].time)) {
            return Err(Error::domain("wave-field times must increase"));
        }
        Ok(Self { frames })
    }

    fn spatial(f: &VelocityFields, p: [f64; 2]) -> [f64; 2] {
        let g = &f.grid;
        let locate = |k: usize| -> (usize, f64) {
            let a = g.axis(k);
            let s = ((p[k] - a.min) / a.spacing()).clamp(0.0, (a.points - 1) as f64);
            let i = (s.floor() as usize).min(a.points - 2);
            (i, s - i as f64)
        };
        let value = |flat: usize, k: usize| if f.masked[flat] { 0.0 } else { f.b[k][flat] };
        let mut out = [0.0; 2];
        if g.dim() == 1 {
            let (i, w) = locate(0);
            out[0] = (1.0 - w) * value(i, 0) + w * value(i + 1, 0);
        } else {
            let (i, wx) = locate(0);
            let (j, wy) = locate(1);
            for (k, slot) in out.iter_mut().enumerate() {
                *slot = (1.0 - wx) * (1.0 - wy) * value(g.flat(i, j), k)
                    + wx * (1.0 - wy) * value(g.flat(i + 1, j), k)
                    + (1.0 - wx) * wy * value(g.flat(i, j + 1), k)
                    + wx * wy * value(g.flat(i + 1, j + 1), k);
            }
        }
        out
    }
}

impl DriftSource for WaveFieldDrift {
    fn dim(&self) -> usize {
        self.frames[0].grid.dim()
    }

    fn drift(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        let k = self.frames.partition_point(|f| f.time <= t);
        if k == 0 {
            return Self::spatial(&self.frames[0], p);
        }
        if k == self.frames.len() {
            return Self::spatial(&self.frames[k - 1], p);
        }
        let (a, b) = (&self.frames[k - 1], &self.frames[k]);
        let w = (t - a.time) / (b.time - a.time);
        let (da, db) = (Self::spatial(a, p), Self::spatial(b, p));
        [(1.0 - w) * da[0] + w * db[0], (1.0 - w) * da[1] + w * db[1]]
    }
}

/// Where particles start.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialPositions {
    /// Drawn by inverse CDF from a density tabulated on `grid`; each node
    /// stands for the cell around it.
    Density { grid: GridSpec, rho: Vec<f64> },
    /// Every particle starts at the same point.
    Point([f64; 2]),
}

impl InitialPositions {
    pub fn from_state(state: &AnalyticState, grid: &GridSpec, t: f64) -> Self {
        let rho = grid.points().iter().map(|p| state.density(*p, t)).collect();
        Self::Density { grid: grid.clone(), rho }
    }
}

/// Which steps keep the full ensemble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordPolicy {
    All,
    Steps(Vec<usize>),
}

impl RecordPolicy {
    fn keeps(&self, s: usize) -> bool {
        match self {
            Self::All => true,
            Self::Steps(list) => list.contains(&s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub particles: usize,
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    pub start_time: f64,
    pub units: UnitsConfig,
    /// Axis-aligned box `[lo, hi]` per axis that particles may not leave.
    pub domain: Vec<(f64, f64)>,
    pub boundary: Boundary,
    pub record: RecordPolicy,
    pub chunk_size: usize,
}

impl SamplerConfig {
    pub fn new(particles: usize, dt: f64, steps: usize, seed: u64, domain: Vec<(f64, f64)>) -> Self {
        Self {
            particles,
            dt,
            steps,
            seed,
            start_time: 0.0,
            units: UnitsConfig::default(),
            domain,
            boundary: Boundary::Reflecting,
            record: RecordPolicy::All,
            chunk_size: 1024,
        }
    }
}

/// Positions at one recorded step, flattened particle-major (`N × dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub step: usize,
    pub positions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub dim: usize,
    pub particles: usize,
    pub dt: f64,
    pub start_time: f64,
    pub seed: u64,
    pub chunk_seeds: Vec<u64>,
    pub frames: Vec<Frame>,
    /// Boundary events: reflections, or absorptions with an absorbing box.
    pub boundary_events: usize,
}

impl TrajectoryEnsemble {
    pub fn frame(&self, step: usize) -> Option<&Frame> {
        self.frames
            .binary_search_by_key(&step, |f| f.step)
            .ok()
            .map(|k| &self.frames[k])
    }

    /// One coordinate of every particle at a recorded step; absorbed
    /// particles are skipped.
    pub fn coordinate(&self, step: usize, axis: usize) -> Option<Vec<f64>> {
        let f = self.frame(step)?;
        Some(
            f.positions
                .chunks(self.dim)
                .map(|p| p[axis])
                .filter(|x| x.is_finite())
                .collect(),
        )
    }

    pub fn time(&self, step: usize) -> f64 {
        self.start_time + step as f64 * self.dt
    }
}

fn chunk_seed(seed: u64, chunk: usize) -> u64 {
    seed ^ (chunk as u64).wrapping_mul(SEED_STRIDE)
}

/// Standard normals by the Box–Muller transform, two per pair of uniforms.
struct Normals {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Normals {
    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Cumulative cell masses for inverse-CDF draws.
struct CellSampler<'a> {
    grid: &'a GridSpec,
    cdf: Vec<f64>,
}

impl<'a> CellSampler<'a> {
    fn new(grid: &'a GridSpec, rho: &[f64]) -> Result<Self> {
        if rho.len() != grid.len() {
            return Err(Error::Shape(format!("{} densities for {} nodes", rho.len(), grid.len())));
        }
        let mut cdf = Vec::with_capacity(rho.len());
        let mut acc = 0.0;
        for r in rho {
            if !(*r >= 0.0) {
                return Err(Error::domain("initial density must be non-negative"));
            }
            acc += r;
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::domain("initial density has no mass"));
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(Self { grid, cdf })
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> [f64; 2] {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|c| *c <= u).min(self.cdf.len() - 1);
        let centre = self.grid.point(k);
        let mut p = [0.0; 2];
        for (axis, slot) in p.iter_mut().enumerate().take(self.grid.dim()) {
            let jitter: f64 = rng.random::<f64>() - 0.5;
            *slot = centre[axis] + jitter * self.grid.spacing(axis);
        }
        p
    }
}

/// Reflects `x` into `[lo, hi]`; returns whether it had left.
fn reflect(x: &mut f64, lo: f64, hi: f64) -> bool {
    let mut hit = false;
    while *x < lo || *x > hi {
        hit = true;
        if *x < lo {
            *x = 2.0 * lo - *x;
        } else {
            *x = 2.0 * hi - *x;
        }
    }
    hit
}

/// Euler–Maruyama ensemble. Chunk `k` draws from its own ChaCha stream seeded
/// with `seed ^ (k·0x9E3779B97F4A7C15)`, so the result does not depend on how
/// chunks are scheduled.
pub fn sample_trajectories(
    source: &dyn DriftSource,
    initial: &InitialPositions,
    config: &SamplerConfig,
) -> Result<TrajectoryEnsemble> {
    let dim = source.dim();
    if config.particles == 0 {
        return Err(Error::domain("ensemble needs at least one particle"));
    }
    if !(config.dt > 0.0) || config.chunk_size == 0 {
        return Err(Error::domain("time step and chunk size must be positive"));
    }
    if config.domain.len() != dim || config.domain.iter().any(|(lo, hi)| !(hi > lo)) {
        return Err(Error::Shape(format!("domain must give {dim} increasing intervals")));
    }
    let sampler = match initial {
        InitialPositions::Density { grid, rho } => {
            if grid.dim() != dim {
                return Err(Error::Shape("start grid dimension differs from the drift".into()));
            }
            Some(CellSampler::new(grid, rho)?)
        }
        InitialPositions::Point(_) => None,
    };
    let chunks = config.particles.div_ceil(config.chunk_size);
    let chunk_seeds: Vec<u64> = (0..chunks).map(|k| chunk_seed(config.seed, k)).collect();
    let recorded: Vec<usize> = (0..=config.steps).filter(|s| config.record.keeps(*s)).collect();
    let noise = (config.units.eta * config.dt / config.units.mass).sqrt();

    let results: Vec<(Vec<Vec<f64>>, usize)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let count = config.chunk_size.min(config.particles - k * config.chunk_size);
            let mut rng = ChaCha8Rng::seed_from_u64(chunk_seeds[k]);
            let mut pos: Vec<[f64; 2]> = (0..count)
                .map(|_| match (&sampler, initial) {
                    (Some(s), _) => s.draw(&mut rng),
                    (None, InitialPositions::Point(p)) => *p,
                    (None, _) => unreachable!(),
                })
                .collect();
            let mut normals = Normals { rng, spare: None };
            let mut frames = Vec::with_capacity(recorded.len());
            let mut events = 0;
            let record = |pos: &[[f64; 2]], frames: &mut Vec<Vec<f64>>| {
                frames.push(pos.iter().flat_map(|p| p[..dim].iter().copied()).collect());
            };
            if config.record.keeps(0) {
                record(&pos, &mut frames);
            }
            for s in 0..config.steps {
                let t = config.start_time + s as f64 * config.dt;
                for p in pos.iter_mut() {
                    if !p[0].is_finite() {
                        continue;
                    }
                    let b = source.drift(*p, t);
                    let mut out = false;
                    for axis in 0..dim {
                        p[axis] += b[axis] * config.dt + noise * normals.next();
                        let (lo, hi) = config.domain[axis];
                        match config.boundary {
                            Boundary::Reflecting => out |= reflect(&mut p[axis], lo, hi),
                            Boundary::Absorbing => out |= p[axis] < lo || p[axis] > hi,
                        }
                    }
                    if out {
                        events += 1;
                        if config.boundary == Boundary::Absorbing {
                            *p = [f64::NAN; 2];
                        }
                    }
                }
                if config.record.keeps(s + 1) {
                    record(&pos, &mut frames);
                }
            }
            (frames, events)
        })
        .collect();

    let mut frames: Vec<Frame> = recorded
        .iter()
        .map(|s| Frame {
            step: *s,
            positions: Vec::with_capacity(config.particles * dim),
        })
        .collect();
    let mut boundary_events = 0;
    for (chunk_frames, events) in results {
        boundary_events += events;
        for (f, part) in frames.iter_mut().zip(chunk_frames) {
            f.positions.extend(part);
        }
    }
    Ok(TrajectoryEnsemble {
        dim,
        particles: config.particles,
        dt: config.dt,
        start_time: config.start_time,
        seed: config.seed,
        chunk_seeds,
        frames,
        boundary_events,
    })
}

/// Bin-averaged forward and backward drifts at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftEstimates {
    pub bins: GridSpec,
    pub counts: Vec<usize>,
    /// Bins with fewer samples than the floor.
    pub masked: Vec<bool>,
    /// `⟨(x_{s+1} − x_s)/dt | x_s⟩` per axis.
    pub forward: Vec<Vec<f64>>,
    /// `⟨(x_s − x_{s−1})/dt | x_s⟩` per axis.
    pub backward: Vec<Vec<f64>>,
    pub forward_se: Vec<Vec<f64>>,
    pub backward_se: Vec<Vec<f64>>,
}

/// Minimum samples for a reported bin.
pub const MIN_BIN_SAMPLES: usize = 30;

/// Estimates drifts at `step` from the frames at `step − 1`, `step` and
/// `step + 1`, binning by the position at `step` into the cells around the
/// nodes of `bins`.
pub fn estimate_drifts(ensemble: &TrajectoryEnsemble, bins: &GridSpec, step: usize) -> Result<DriftEstimates> {
    if ensemble.particles == 0 || ensemble.frames.is_empty() {
        return Err(Error::domain("empty ensemble"));
    }
    if bins.dim() != ensemble.dim {
        return Err(Error::Shape("bin grid dimension differs from the ensemble".into()));
    }
    let missing = |s: usize| Error::domain(format!("step {s} was not recorded"));
    if step == 0 {
        return Err(Error::domain("backward estimate needs a preceding step"));
    }
    let prev = ensemble.frame(step - 1).ok_or_else(|| missing(step - 1))?;
    let here = ensemble.frame(step).ok_or_else(|| missing(step))?;
    let next = ensemble.frame(step + 1).ok_or_else(|| missing(step + 1))?;
    let dim = ensemble.dim;
    let n = bins.len();
    let mut counts = vec![0usize; n];
    let mut sums = vec![[[0.0f64; 2]; 2]; n * dim];
    let locate = |p: &[f64]| -> Option<usize> {
        let mut idx = [0usize; 2];
        for axis in 0..dim {
            let a = bins.axis(axis);
            let s = ((p[axis] - a.min) / a.spacing()).round();
            if !(s >= 0.0 && s < a.points as f64) {
                return None;
            }
            idx[axis] = s as usize;
        }
        Some(if dim == 1 { idx[0] } else { bins.flat(idx[0], idx[1]) })
    };
    for k in 0..ensemble.particles {
        let x = &here.positions[k * dim..(k + 1) * dim];
        let xp = &prev.positions[k * dim..(k + 1) * dim];
        let xn = &next.positions[k * dim..(k + 1) * dim];
        if x.iter().chain(xp).chain(xn).any(|c| !c.is_finite()) {
            continue;
        }
        let Some(cell) = locate(x) else { continue };
        counts[cell] += 1;
        for axis in 0..dim {
            let f = (xn[axis] - x[axis]) / ensemble.dt;
            let b = (x[axis] - xp[axis]) / ensemble.dt;
            let slot = &mut sums[cell * dim + axis];
            slot[0][0] += f;
            slot[0][1] += f * f;
            slot[1][0] += b;
            slot[1][1] += b * b;
        }
    }
    let masked: Vec<bool> = counts.iter().map(|c| *c < MIN_BIN_SAMPLES).collect();
    let mut forward = vec![vec![f64::NAN; n]; dim];
    let mut backward = vec![vec![f64::NAN; n]; dim];
    let mut forward_se = vec![vec![f64::NAN; n]; dim];
    let mut backward_se = vec![vec![f64::NAN; n]; dim];
    for cell in 0..n {
        if masked[cell] {
            continue;
        }
        let c = counts[cell] as f64;
        for axis in 0..dim {
            let slot = sums[cell * dim + axis];
            for (dir, (mean_out, se_out)) in [(&mut forward, &mut forward_se), (&mut backward, &mut backward_se)]
                .into_iter()
                .enumerate()
            {
                let mean = slot[dir][0] / c;
                let var = (slot[dir][1] / c - mean * mean).max(0.0) * c / (c - 1.0);
                mean_out[axis][cell] = mean;
                se_out[axis][cell] = (var / c).sqrt();
            }
        }
    }
    Ok(DriftEstimates {
        bins: bins.clone(),
        counts,
        masked,
        forward,
        backward,
        forward_se,
        backward_se,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::mean_variance;

    struct Constant(f64);

    impl DriftSource for Constant {
        fn dim(&self) -> usize {
            1
        }
        fn drift(&self, _: [f64; 2], _: f64) -> [f64; 2] {
            [self.0, 0.0]
        }
    }

    fn one_step(source: &dyn DriftSource, x0: f64, n: usize, dt: f64) -> Vec<f64> {
        let mut cfg = SamplerConfig::new(n, dt, 1, 11, vec![(-1e3, 1e3)]);
        cfg.record = RecordPolicy::Steps(vec![1]);
        let e = sample_trajectories(source, &InitialPositions::Point([x0, 0.0]), &cfg).unwrap();
        e.coordinate(1, 0).unwrap().iter().map(|x| x - x0).collect()
    }

    #[test]
    fn one_step_moments() {
        let units = UnitsConfig::default();
        let state = AnalyticState::free_gaussian(1.0, units);
        let dt = 1e-3;
        let x0 = 1.5;
        let d = one_step(&state, x0, 100_000, dt);
        let (mean, var) = mean_variance(&d);
        let b = state.drift([x0, 0.0], 0.0)[0] * dt;
        let se = (var / d.len() as f64).sqrt();
        assert!((mean - b).abs() < 4.0 * se, "{mean} vs {b} ± {se}");
        assert!((var / dt - 1.0).abs() < 0.02, "{}", var / dt);
    }

    #[test]
    fn brownian_spread_from_a_point() {
        let d = one_step(&Constant(0.0), 0.0, 50_000, 0.5);
        let (mean, var) = mean_variance(&d);
        assert!(mean.abs() < 4.0 * (var / 50_000.0).sqrt());
        assert!((var - 0.5).abs() < 0.02);
    }

    #[test]
    fn identical_seeds_are_bit_identical() {
        let units = UnitsConfig::default();
        let state = AnalyticState::free_gaussian(1.0, units);
        let grid = GridSpec::line(-10.0, 10.0, 401).unwrap();
        let init = InitialPositions::from_state(&state, &grid, 0.0);
        let cfg = SamplerConfig::new(3000, 0.01, 20, 42, vec![(-20.0, 20.0)]);
        let a = sample_trajectories(&state, &init, &cfg).unwrap();
        let b = sample_trajectories(&state, &init, &cfg).unwrap();
        assert_eq!(a, b);
        let mut other = cfg.clone();
        other.seed = 43;
        assert_ne!(a.frames, sample_trajectories(&state, &init, &other).unwrap().frames);
        assert_eq!(a.chunk_seeds.len(), 3);
    }

    #[test]
    fn reflection_keeps_particles_inside() {
        let cfg = SamplerConfig::new(2000, 0.1, 50, 3, vec![(-1.0, 1.0)]);
        let e = sample_trajectories(&Constant(2.0), &InitialPositions::Point([0.0, 0.0]), &cfg).unwrap();
        assert!(e.boundary_events > 0);
        for f in &e.frames {
            assert!(f.positions.iter().all(|x| (-1.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn absorbing_box_removes_particles() {
        let mut cfg = SamplerConfig::new(500, 0.1, 50, 3, vec![(-1.0, 1.0)]);
        cfg.boundary = Boundary::Absorbing;
        let e = sample_trajectories(&Constant(2.0), &InitialPositions::Point([0.0, 0.0]), &cfg).unwrap();
        assert!(e.coordinate(50, 0).unwrap().len() < 500);
    }

    #[test]
    fn pure_diffusion_has_no_forward_drift() {
        let mut cfg = SamplerConfig::new(100_000, 0.01, 3, 5, vec![(-1e3, 1e3)]);
        cfg.record = RecordPolicy::Steps(vec![1, 2, 3]);
        let grid = GridSpec::line(-5.0, 5.0, 401).unwrap();
        let rho: Vec<f64> = grid.points().iter().map(|p| (-p[0] * p[0] / 2.0).exp()).collect();
        let init = InitialPositions::Density { grid, rho };
        let e = sample_trajectories(&Constant(0.0), &init, &cfg).unwrap();
        let bins = GridSpec::line(-2.0, 2.0, 17).unwrap();
        let est = estimate_drifts(&e, &bins, 2).unwrap();
        for k in 0..bins.len() {
            if !est.masked[k] {
                assert!(est.forward[0][k].abs() < 4.5 * est.forward_se[0][k], "bin {k}");
            }
        }
    }

    #[test]
    fn estimates_need_recorded_neighbours() {
        let mut cfg = SamplerConfig::new(100, 0.01, 3, 5, vec![(-10.0, 10.0)]);
        cfg.record = RecordPolicy::Steps(vec![2]);
        let e = sample_trajectories(&Constant(0.0), &InitialPositions::Point([0.0, 0.0]), &cfg).unwrap();
        assert!(estimate_drifts(&e, &GridSpec::line(-1.0, 1.0, 16).unwrap(), 2).is_err());
    }

    #[test]
    fn wave_field_drift_matches_analytic() {
        let units = UnitsConfig::default();
        let state = AnalyticState::free_gaussian(1.0, units);
        let grid = GridSpec::line(-20.0, 20.0, 801).unwrap();
        let seq: Vec<WaveField> = [0.0, 0.5].iter().map(|t| state.sample(&grid, *t).unwrap()).collect();
        let src = WaveFieldDrift::new(&seq, &units).unwrap();
        for x in [-2.0, 0.3, 1.7] {
            for t in [0.0, 0.25, 0.5] {
                let exact = state.drift([x, 0.0], t)[0];
                assert!((src.drift([x, 0.0], t)[0] - exact).abs() < 0.02, "x={x} t={t}");
            }
        }
    }
}
