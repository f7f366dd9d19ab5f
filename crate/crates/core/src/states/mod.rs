//! Closed-form wave fields and their velocity fields.
//!
//! Every state evaluates pointwise at `(x, t)`; scenario code chooses its own
//! sampling. Points are `[x, y]` with `y` ignored by one-dimensional states.

mod gaussian;
mod oscillator;
mod superposition;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{GridSpec, UnitsConfig, VelocityFields, WaveField, AMPLITUDE_FLOOR};
use crate::numerics::linspace;

pub use gaussian::{free_gaussian, free_gaussian_velocities, sigma_t_sq, CharacteristicTime, GaussianPacket};
pub use oscillator::{hermite_pair, ho_eigenstate, ho_superposition_1d, MAX_QUANTUM_NUMBER};
pub use superposition::{superpose2_equal_imag, superpose2_equal_real, superpose2_general, Flow};

/// Log-amplitude `R`, phase and velocities of a state at one point.
/// `r = −∞` marks a node; its velocities are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSample {
    pub r: f64,
    pub phase: f64,
    pub u: [f64; 2],
    pub b: [f64; 2],
    pub v: [f64; 2],
}

impl StateSample {
    pub(crate) fn node() -> Self {
        Self {
            r: f64::NEG_INFINITY,
            phase: 0.0,
            u: [f64::NAN; 2],
            b: [f64::NAN; 2],
            v: [f64::NAN; 2],
        }
    }

    pub fn rho(&self) -> f64 {
        (2.0 * self.r).exp()
    }

    pub fn is_node(&self) -> bool {
        self.r == f64::NEG_INFINITY
    }

    pub fn psi(&self) -> Complex64 {
        if self.is_node() {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(self.r.exp(), self.phase)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateKind {
    FreeGaussian(GaussianPacket),
    HoEigen1D { n: u32, omega: f64 },
    /// `ψ(x, y) = ψ_nx(x) ψ_ny(y)`.
    HoProduct2D { nx: u32, ny: u32, omega: f64 },
    Superposition2(Box<Superposition>),
}

/// `norm · (w₁ψ₁ + w₂ψ₂)` with `norm` fixed so the combination integrates to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Superposition {
    pub first: AnalyticState,
    pub second: AnalyticState,
    pub w1: Complex64,
    pub w2: Complex64,
    norm: f64,
}

impl Superposition {
    /// Factor applied to the raw weights, `1/‖w₁ψ₁ + w₂ψ₂‖`.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `⟨ψ₁|ψ₂⟩` at `t = 0` by quadrature.
    pub fn overlap(&self) -> Complex64 {
        let (grid, w) = quadrature(&self.first.extent().union(&self.second.extent()));
        let mut acc = Complex64::new(0.0, 0.0);
        for (flat, wi) in w.iter().enumerate() {
            let p = grid.point(flat);
            acc += self.first.psi(p, 0.0).conj() * self.second.psi(p, 0.0) * wi;
        }
        acc
    }
}

/// A catalog state together with its unit system.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticState {
    kind: StateKind,
    units: UnitsConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Extent {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    step: f64,
}

impl Extent {
    fn union(&self, other: &Extent) -> Extent {
        Extent {
            dim: self.dim,
            lo: [self.lo[0].min(other.lo[0]), self.lo[1].min(other.lo[1])],
            hi: [self.hi[0].max(other.hi[0]), self.hi[1].max(other.hi[1])],
            step: self.step.min(other.step),
        }
    }
}

fn quadrature(e: &Extent) -> (GridSpec, Vec<f64>) {
    let points = |k: usize| (((e.hi[k] - e.lo[k]) / e.step).ceil() as usize + 1).max(64);
    let grid = if e.dim == 1 {
        GridSpec::line(e.lo[0], e.hi[0], points(0))
    } else {
        GridSpec::new(vec![
            crate::kernel::Axis {
                min: e.lo[0],
                max: e.hi[0],
                points: points(0),
            },
            crate::kernel::Axis {
                min: e.lo[1],
                max: e.hi[1],
                points: points(1),
            },
        ])
    }
    .expect("quadrature extent is valid");
    let w = grid.quadrature_weights();
    (grid, w)
}

impl AnalyticState {
    /// Packet centred at the origin, at rest.
    pub fn free_gaussian(sigma0: f64, units: UnitsConfig) -> Self {
        Self::moving_gaussian(sigma0, 0.0, 0.0, units)
    }

    /// Packet centred at `center` with mean wavenumber `k0` at `t = 0`.
    pub fn moving_gaussian(sigma0: f64, center: f64, k0: f64, units: UnitsConfig) -> Self {
        assert!(sigma0 > 0.0, "sigma0 must be positive");
        Self {
            kind: StateKind::FreeGaussian(GaussianPacket {
                sigma0,
                center,
                wavenumber: k0,
            }),
            units,
        }
    }

    pub fn ho_eigen(n: u32, omega: f64, units: UnitsConfig) -> Result<Self> {
        oscillator::check_quantum_number(n)?;
        if !(omega > 0.0) {
            return Err(Error::domain("oscillator frequency must be positive"));
        }
        Ok(Self {
            kind: StateKind::HoEigen1D { n, omega },
            units,
        })
    }

    pub fn ho_product(nx: u32, ny: u32, omega: f64, units: UnitsConfig) -> Result<Self> {
        oscillator::check_quantum_number(nx)?;
        oscillator::check_quantum_number(ny)?;
        if !(omega > 0.0) {
            return Err(Error::domain("oscillator frequency must be positive"));
        }
        Ok(Self {
            kind: StateKind::HoProduct2D { nx, ny, omega },
            units,
        })
    }

    /// `w₁ψ₁ + w₂ψ₂`, rescaled so that the result is normalized with the
    /// overlap of the components taken into account.
    pub fn superposition(first: AnalyticState, second: AnalyticState, w1: Complex64, w2: Complex64) -> Result<Self> {
        if first.dim() != second.dim() {
            return Err(Error::Shape("superposed states differ in dimension".into()));
        }
        if first.units != second.units {
            return Err(Error::Inconsistent("superposed states use different units".into()));
        }
        if w1.norm() == 0.0 && w2.norm() == 0.0 {
            return Err(Error::domain("both superposition weights are zero"));
        }
        let units = first.units;
        let mut s = Superposition {
            first,
            second,
            w1,
            w2,
            norm: 1.0,
        };
        let extent = s.first.extent().union(&s.second.extent());
        let (grid, w) = quadrature(&extent);
        let mut total = 0.0;
        for (flat, wi) in w.iter().enumerate() {
            let p = grid.point(flat);
            let z = s.w1 * s.first.psi(p, 0.0) + s.w2 * s.second.psi(p, 0.0);
            total += z.norm_sqr() * wi;
        }
        if !(total > 0.0) {
            return Err(Error::Inconsistent("superposition vanishes identically".into()));
        }
        s.norm = total.sqrt().recip();
        Ok(Self {
            kind: StateKind::Superposition2(Box::new(s)),
            units,
        })
    }

    pub fn kind(&self) -> &StateKind {
        &self.kind
    }

    pub fn units(&self) -> &UnitsConfig {
        &self.units
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            StateKind::FreeGaussian(_) | StateKind::HoEigen1D { .. } => 1,
            StateKind::HoProduct2D { .. } => 2,
            StateKind::Superposition2(s) => s.first.dim(),
        }
    }

    /// Box outside of which the density at `t = 0` is negligible, with a
    /// step that resolves its structure.
    pub(crate) fn extent(&self) -> Extent {
        let ho = |n: u32, omega: f64| {
            let len = (self.units.hbar / (self.units.mass * omega)).sqrt();
            ((f64::from(2 * n + 1)).sqrt() + 10.0) * len
        };
        let ho_step = |n: u32, omega: f64| {
            let len = (self.units.hbar / (self.units.mass * omega)).sqrt();
            len / (20.0 * (f64::from(2 * n + 1)).sqrt())
        };
        match &self.kind {
            StateKind::FreeGaussian(p) => {
                let half = 14.0 * p.sigma0;
                let step = (p.sigma0 / 20.0).min(0.3 / p.wavenumber.abs().max(1e-300));
                Extent {
                    dim: 1,
                    lo: [p.center - half, 0.0],
                    hi: [p.center + half, 0.0],
                    step,
                }
            }
            StateKind::HoEigen1D { n, omega } => Extent {
                dim: 1,
                lo: [-ho(*n, *omega), 0.0],
                hi: [ho(*n, *omega), 0.0],
                step: ho_step(*n, *omega),
            },
            StateKind::HoProduct2D { nx, ny, omega } => Extent {
                dim: 2,
                lo: [-ho(*nx, *omega), -ho(*ny, *omega)],
                hi: [ho(*nx, *omega), ho(*ny, *omega)],
                step: ho_step(*nx.max(ny), *omega) * 2.0,
            },
            StateKind::Superposition2(s) => s.first.extent().union(&s.second.extent()),
        }
    }

    /// Full sample at `(p, t)`, nodes included.
    pub fn eval(&self, p: [f64; 2], t: f64) -> StateSample {
        let one_d = |f: [f64; 5]| {
            if f[0] == f64::NEG_INFINITY {
                return StateSample::node();
            }
            StateSample {
                r: f[0],
                phase: f[1],
                u: [f[2], 0.0],
                b: [f[3], 0.0],
                v: [f[4], 0.0],
            }
        };
        match &self.kind {
            StateKind::FreeGaussian(g) => one_d(gaussian::packet_fields(g, &self.units, p[0], t)),
            StateKind::HoEigen1D { n, omega } => one_d(oscillator::eigen_fields(*n, *omega, &self.units, p[0], t)),
            StateKind::HoProduct2D { nx, ny, omega } => {
                let fx = oscillator::eigen_fields(*nx, *omega, &self.units, p[0], t);
                let fy = oscillator::eigen_fields(*ny, *omega, &self.units, p[1], 0.0);
                if fx[0] == f64::NEG_INFINITY || fy[0] == f64::NEG_INFINITY {
                    return StateSample::node();
                }
                // The time dependence of the y factor is carried by fx: both
                // share ω, so the product phase is −(nx+ny+1)ωt.
                let phase = fx[1] + fy[1] - (f64::from(*ny) + 0.5) * omega * t;
                StateSample {
                    r: fx[0] + fy[0],
                    phase,
                    u: [fx[2], fy[2]],
                    b: [fx[3], fy[3]],
                    v: [0.0, 0.0],
                }
            }
            StateKind::Superposition2(s) => {
                let (s1, s2) = (s.first.eval(p, t), s.second.eval(p, t));
                let mut out = if s1.is_node() != s2.is_node() && s.w1.norm() > 0.0 && s.w2.norm() > 0.0 {
                    // One component vanishes here but its slope does not, so
                    // the log-gradient formulas do not apply.
                    let (z1, g1) = s.first.value_and_gradient(p, t);
                    let (z2, g2) = s.second.value_and_gradient(p, t);
                    let z = s.w1 * z1 + s.w2 * z2;
                    let g = [s.w1 * g1[0] + s.w2 * g2[0], s.w1 * g1[1] + s.w2 * g2[1]];
                    self.sample_from_gradient(z, g)
                } else {
                    superposition::combine(&s1, &s2, s.w1, s.w2)
                };
                out.r += s.norm.ln();
                out
            }
        }
    }

    fn sample_from_gradient(&self, z: Complex64, g: [Complex64; 2]) -> StateSample {
        if z.norm() == 0.0 {
            return StateSample::node();
        }
        let k = self.units.hbar_over_m();
        let mut u = [0.0; 2];
        let mut v = [0.0; 2];
        for axis in 0..self.dim() {
            let q = g[axis] / z * k;
            u[axis] = -q.re;
            v[axis] = q.im;
        }
        StateSample {
            r: z.norm().ln(),
            phase: z.arg(),
            u,
            b: [v[0] - u[0], v[1] - u[1]],
            v,
        }
    }

    /// `ψ` and `∇ψ` at `(p, t)`; finite on nodes.
    pub fn value_and_gradient(&self, p: [f64; 2], t: f64) -> (Complex64, [Complex64; 2]) {
        let zero = Complex64::new(0.0, 0.0);
        match &self.kind {
            StateKind::FreeGaussian(_) => {
                let e = self.eval(p, t);
                let z = e.psi();
                let k = self.units.hbar_over_m();
                (z, [z * Complex64::new(-e.u[0], e.v[0]) / k, zero])
            }
            StateKind::HoEigen1D { n, omega } => {
                let (z, d) = oscillator::eigen_value_and_slope(*n, *omega, &self.units, p[0], t);
                (z, [d, zero])
            }
            StateKind::HoProduct2D { nx, ny, omega } => {
                let (zx, dx) = oscillator::eigen_value_and_slope(*nx, *omega, &self.units, p[0], t);
                let (zy, dy) = oscillator::eigen_value_and_slope(*ny, *omega, &self.units, p[1], t);
                (zx * zy, [dx * zy, zx * dy])
            }
            StateKind::Superposition2(s) => {
                let (z1, g1) = s.first.value_and_gradient(p, t);
                let (z2, g2) = s.second.value_and_gradient(p, t);
                let n = s.norm;
                (
                    (s.w1 * z1 + s.w2 * z2) * n,
                    [(s.w1 * g1[0] + s.w2 * g2[0]) * n, (s.w1 * g1[1] + s.w2 * g2[1]) * n],
                )
            }
        }
    }

    /// Sample at `(p, t)`, or `None` on a node.
    pub fn evaluate(&self, p: [f64; 2], t: f64) -> Option<StateSample> {
        let s = self.eval(p, t);
        (!s.is_node()).then_some(s)
    }

    /// Superpositions are summed as complex numbers, so a real combination of
    /// real components stays exactly real.
    pub fn psi(&self, p: [f64; 2], t: f64) -> Complex64 {
        match &self.kind {
            StateKind::Superposition2(s) => {
                (s.w1 * s.first.psi(p, t) + s.w2 * s.second.psi(p, t)) * s.norm
            }
            StateKind::HoEigen1D { n, omega } => oscillator::eigen_value_and_slope(*n, *omega, &self.units, p[0], t).0,
            StateKind::HoProduct2D { nx, ny, omega } => {
                let (zx, _) = oscillator::eigen_value_and_slope(*nx, *omega, &self.units, p[0], t);
                let (zy, _) = oscillator::eigen_value_and_slope(*ny, *omega, &self.units, p[1], t);
                zx * zy
            }
            StateKind::FreeGaussian(_) => self.eval(p, t).psi(),
        }
    }

    pub fn density(&self, p: [f64; 2], t: f64) -> f64 {
        self.eval(p, t).rho()
    }

    /// Drift velocity `b`; zero on nodes so that samplers never see NaN.
    pub fn drift(&self, p: [f64; 2], t: f64) -> [f64; 2] {
        let s = self.eval(p, t);
        if s.is_node() {
            [0.0; 2]
        } else {
            s.b
        }
    }

    /// `T = 2mσ₀²/ħ` for free packets.
    pub fn characteristic_time(&self) -> Option<CharacteristicTime> {
        match &self.kind {
            StateKind::FreeGaussian(p) => Some(CharacteristicTime::new(p.sigma0, &self.units)),
            StateKind::Superposition2(s) => s.first.characteristic_time(),
            _ => None,
        }
    }

    pub fn sample(&self, grid: &GridSpec, t: f64) -> Result<WaveField> {
        self.check_grid(grid)?;
        Ok(WaveField::from_fn(grid.clone(), t, |p| self.psi(p, t)))
    }

    /// Closed-form velocity fields on `grid`. Nodes and points under the
    /// amplitude floor are masked as for sampled fields.
    pub fn velocity_fields(&self, grid: &GridSpec, t: f64) -> Result<VelocityFields> {
        self.check_grid(grid)?;
        let samples: Vec<StateSample> = grid.points().into_iter().map(|p| self.eval(p, t)).collect();
        let rho: Vec<f64> = samples.iter().map(StateSample::rho).collect();
        let max_amp = rho.iter().fold(0.0f64, |a, r| a.max(r.sqrt()));
        let masked: Vec<bool> = samples
            .iter()
            .map(|s| s.is_node() || !(s.r.exp() >= AMPLITUDE_FLOOR * max_amp))
            .collect();
        let dim = grid.dim();
        let pick = |f: fn(&StateSample) -> [f64; 2]| -> Vec<Vec<f64>> {
            (0..dim)
                .map(|k| {
                    samples
                        .iter()
                        .zip(&masked)
                        .map(|(s, m)| if *m { f64::NAN } else { f(s)[k] })
                        .collect()
                })
                .collect()
        };
        let u = pick(|s| s.u);
        let v = pick(|s| s.v);
        Ok(VelocityFields::assemble(grid.clone(), t, rho, masked, u, v))
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if grid.dim() != self.dim() {
            return Err(Error::Shape(format!(
                "{}-dimensional state sampled on a {}-dimensional grid",
                self.dim(),
                grid.dim()
            )));
        }
        Ok(())
    }

    /// Density on an evenly spaced 1D abscissa, for plotting and oracles.
    pub fn density_line(&self, lo: f64, hi: f64, points: usize, t: f64) -> Vec<(f64, f64)> {
        linspace(lo, hi, points).into_iter().map(|x| (x, self.density([x, 0.0], t))).collect()
    }
}
