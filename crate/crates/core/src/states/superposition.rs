//! Velocities of two-component superpositions expressed through the
//! components' own amplitudes, phases and velocities.

use num_complex::Complex64;

use super::StateSample;

/// Density and velocities of a combined state at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flow {
    pub rho: f64,
    pub u: [f64; 2],
    pub v: [f64; 2],
    pub b: [f64; 2],
}

impl Flow {
    fn from_uv(rho: f64, u: [f64; 2], v: [f64; 2]) -> Self {
        Self {
            rho,
            u,
            v,
            b: [v[0] - u[0], v[1] - u[1]],
        }
    }
}

fn contributes(weight: f64, s: &StateSample) -> bool {
    weight > 0.0 && s.r > f64::NEG_INFINITY
}

/// Combines `w₁ψ₁ + w₂ψ₂` without normalizing. Amplitudes are rescaled by the
/// larger of the two so that far tails do not underflow. Nodes of the combined
/// state come back with `r = −∞` and NaN velocities.
pub(crate) fn combine(s1: &StateSample, s2: &StateSample, w1: Complex64, w2: Complex64) -> StateSample {
    let (alpha, beta) = (w1.norm(), w2.norm());
    let on1 = contributes(alpha, s1);
    let on2 = contributes(beta, s2);
    let single = |s: &StateSample, w: Complex64| StateSample {
        r: s.r + w.norm().ln(),
        phase: s.phase + w.arg(),
        ..*s
    };
    match (on1, on2) {
        (false, false) => return StateSample::node(),
        (true, false) => return single(s1, w1),
        (false, true) => return single(s2, w2),
        (true, true) => {}
    }
    let rm = s1.r.max(s2.r);
    let a = alpha * (s1.r - rm).exp();
    let c = beta * (s2.r - rm).exp();
    let p1 = s1.phase + w1.arg();
    let p2 = s2.phase + w2.arg();
    let delta = p1 - p2;
    let d = a * a + c * c + 2.0 * a * c * delta.cos();
    if !(d > 0.0) {
        return StateSample::node();
    }
    let big_a = a * a - c * c;
    let big_s = 2.0 * a * c * delta.sin();
    let mut u = [0.0; 2];
    let mut v = [0.0; 2];
    for k in 0..2 {
        let du = s1.u[k] - s2.u[k];
        let dv = s1.v[k] - s2.v[k];
        u[k] = 0.5 * (s1.u[k] + s2.u[k]) + 0.5 * (du * big_a + dv * big_s) / d;
        v[k] = 0.5 * (s1.v[k] + s2.v[k]) + 0.5 * (dv * big_a - du * big_s) / d;
    }
    let z = Complex64::from_polar(a, p1) + Complex64::from_polar(c, p2);
    StateSample {
        r: rm + 0.5 * d.ln(),
        phase: z.arg(),
        u,
        b: [v[0] - u[0], v[1] - u[1]],
        v,
    }
}

/// `|w₁ψ₁ + w₂ψ₂|²` and its velocities; `None` where the combined density
/// vanishes.
pub fn superpose2_general(s1: &StateSample, s2: &StateSample, w1: Complex64, w2: Complex64) -> Option<Flow> {
    let s = combine(s1, s2, w1, w2);
    (!s.is_node()).then(|| Flow::from_uv(s.rho(), s.u, s.v))
}

/// `(ψ₁ + ψ₂)/√2`.
pub fn superpose2_equal_real(s1: &StateSample, s2: &StateSample) -> Option<Flow> {
    let dr = s1.r - s2.r;
    let dphi = s1.phase - s2.phase;
    let den = dr.cosh() + dphi.cos();
    let rho = (s1.r + s2.r).exp() * den;
    if !(rho > 0.0) {
        return None;
    }
    let mut u = [0.0; 2];
    let mut v = [0.0; 2];
    for k in 0..2 {
        let du = s1.u[k] - s2.u[k];
        let dv = s1.v[k] - s2.v[k];
        u[k] = 0.5 * (s1.u[k] + s2.u[k]) + 0.5 * (du * dr.sinh() + dv * dphi.sin()) / den;
        v[k] = 0.5 * (s1.v[k] + s2.v[k]) + 0.5 * (dv * dr.sinh() - du * dphi.sin()) / den;
    }
    Some(Flow::from_uv(rho, u, v))
}

/// `(ψ₁ + iψ₂)/√2`.
pub fn superpose2_equal_imag(s1: &StateSample, s2: &StateSample) -> Option<Flow> {
    let dr = s1.r - s2.r;
    let dphi = s1.phase - s2.phase;
    let den = dr.cosh() + dphi.sin();
    let rho = (s1.r + s2.r).exp() * den;
    if !(rho > 0.0) {
        return None;
    }
    let mut u = [0.0; 2];
    let mut v = [0.0; 2];
    for k in 0..2 {
        let du = s1.u[k] - s2.u[k];
        let dv = s1.v[k] - s2.v[k];
        u[k] = 0.5 * (s1.u[k] + s2.u[k]) + 0.5 * (du * dr.sinh() - dv * dphi.cos()) / den;
        v[k] = 0.5 * (s1.v[k] + s2.v[k]) + 0.5 * (dv * dr.sinh() + du * dphi.cos()) / den;
    }
    Some(Flow::from_uv(rho, u, v))
}
