//! Shared numerical building blocks: deterministic summation, trapezoidal
//! weights, finite-difference stencils, phase wrapping and a complex
//! tridiagonal solver.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

const PAIRWISE_BLOCK: usize = 16;

/// Pairwise (cascade) summation with a fixed split order, so reductions are
/// reproducible for a given input regardless of how the caller built it.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().fold(0.0, |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_complex(values: &[Complex64]) -> Complex64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().fold(Complex64::new(0.0, 0.0), |acc, &v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum_complex(&values[..mid]) + pairwise_sum_complex(&values[mid..])
}

/// `n` evenly spaced nodes from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (n - 1) as f64;
            (0..n).map(|i| lo + h * i as f64).collect()
        }
    }
}

/// Trapezoidal weights for `n` nodes with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n > 0 {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Trapezoidal rule on a uniform 1D grid.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    let w = trapezoid_weights(values.len(), h);
    let terms: Vec<f64> = values.iter().zip(&w).map(|(v, w)| v * w).collect();
    pairwise_sum(&terms)
}

/// First derivative of a uniformly sampled line: sixth-order central
/// differences in the interior, dropping to fourth and second order as the
/// stencil nears an end (one-sided on the very first and last node).
pub fn derivative<T>(f: &[T], h: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = f.len();
    assert!(n >= 5, "derivative needs at least 5 nodes, got {n}");
    let inv60 = 1.0 / (60.0 * h);
    let inv12 = 1.0 / (12.0 * h);
    let inv2 = 1.0 / (2.0 * h);
    (0..n)
        .map(|i| {
            let reach = i.min(n - 1 - i);
            match reach {
                0 if i == 0 => (f[1] * 4.0 - f[0] * 3.0 - f[2]) * inv2,
                0 => (f[n - 1] * 3.0 - f[n - 2] * 4.0 + f[n - 3]) * inv2,
                1 => (f[i + 1] - f[i - 1]) * inv2,
                2 => (f[i - 2] - f[i + 2] + (f[i + 1] - f[i - 1]) * 8.0) * inv12,
                _ => {
                    ((f[i + 1] - f[i - 1]) * 45.0 - (f[i + 2] - f[i - 2]) * 9.0 + (f[i + 3] - f[i - 3])) * inv60
                }
            }
        })
        .collect()
}

/// Wrap an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut w = a.rem_euclid(two_pi);
    if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

/// Unwrap a line of phases starting from index `seed` and moving outward in
/// both directions. Entries flagged in `masked` are skipped and do not
/// anchor their neighbours.
pub fn unwrap_from(phase: &mut [f64], masked: &[bool], seed: usize) {
    let n = phase.len();
    if n == 0 {
        return;
    }
    let mut last: Option<f64> = if masked[seed] { None } else { Some(phase[seed]) };
    for i in seed + 1..n {
        if masked[i] {
            continue;
        }
        if let Some(prev) = last {
            phase[i] = prev + wrap_angle(phase[i] - prev);
        }
        last = Some(phase[i]);
    }
    let mut last: Option<f64> = if masked[seed] { None } else { Some(phase[seed]) };
    for i in (0..seed).rev() {
        if masked[i] {
            continue;
        }
        if let Some(prev) = last {
            phase[i] = prev + wrap_angle(phase[i] - prev);
        }
        last = Some(phase[i]);
    }
}

/// Thomas algorithm for a complex tridiagonal system. `lower[0]` and
/// `upper[n-1]` are ignored. The system must not need pivoting.
pub fn solve_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &mut [Complex64],
    scratch: &mut Vec<Complex64>,
) {
    let n = diag.len();
    scratch.clear();
    scratch.resize(n, Complex64::new(0.0, 0.0));
    let c = scratch;
    let mut beta = diag[0];
    c[0] = upper[0] / beta;
    rhs[0] /= beta;
    for i in 1..n {
        beta = diag[i] - lower[i] * c[i - 1];
        if i + 1 < n {
            c[i] = upper[i] / beta;
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_is_exact_on_quartics_in_the_interior() {
        let h = 0.1;
        let x = linspace(-1.0, 1.0, 21);
        let f: Vec<f64> = x.iter().map(|x| x.powi(4) - 2.0 * x * x + x).collect();
        let d = derivative(&f, h);
        for i in 2..19 {
            let exact = 4.0 * x[i].powi(3) - 4.0 * x[i] + 1.0;
            assert!((d[i] - exact).abs() < 1e-12, "node {i}: {} vs {exact}", d[i]);
        }
    }

    #[test]
    fn boundary_stencils_are_exact_on_quadratics() {
        let x = linspace(0.0, 1.0, 11);
        let f: Vec<f64> = x.iter().map(|x| 3.0 * x * x - x).collect();
        let d = derivative(&f, 0.1);
        for (i, xi) in x.iter().enumerate() {
            assert!((d[i] - (6.0 * xi - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_converges_at_fourth_order() {
        let err = |n: usize| {
            let x = linspace(0.0, 3.0, n);
            let h = x[1] - x[0];
            let f: Vec<f64> = x.iter().map(|x| x.sin()).collect();
            let d = derivative(&f, h);
            (2..n - 2)
                .map(|i| (d[i] - x[i].cos()).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(61) / err(121)).log2();
        assert!(order > 3.8, "order {order}");
    }

    #[test]
    fn trapezoid_integrates_gaussian() {
        let x = linspace(-10.0, 10.0, 401);
        let f: Vec<f64> = x.iter().map(|x| (-x * x / 2.0).exp()).collect();
        let v = trapezoid(&f, x[1] - x[0]);
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_integers() {
        let v: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 500_500.0);
    }

    #[test]
    fn wrap_stays_in_half_open_interval() {
        for k in -20..20 {
            let a = 0.37 * k as f64;
            let w = wrap_angle(a);
            assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
            let turns = (a - w) / std::f64::consts::TAU;
            assert!((turns - turns.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn unwrap_restores_linear_ramp() {
        let truth: Vec<f64> = (0..50).map(|i| 0.9 * (i as f64 - 25.0)).collect();
        let mut p: Vec<f64> = truth.iter().map(|&a| wrap_angle(a)).collect();
        let masked = vec![false; p.len()];
        unwrap_from(&mut p, &masked, 25);
        for (a, b) in p.iter().zip(&truth) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn tridiagonal_solve_matches_direct_product() {
        let n = 12;
        let lower: Vec<Complex64> = (0..n).map(|i| Complex64::new(0.1 * i as f64, -0.2)).collect();
        let upper: Vec<Complex64> = (0..n).map(|i| Complex64::new(-0.3, 0.05 * i as f64)).collect();
        let diag: Vec<Complex64> = (0..n).map(|i| Complex64::new(2.0 + i as f64 * 0.1, 1.0)).collect();
        let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let mut b: Vec<Complex64> = (0..n)
            .map(|i| {
                let mut s = diag[i] * x[i];
                if i > 0 {
                    s += lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += upper[i] * x[i + 1];
                }
                s
            })
            .collect();
        let mut scratch = Vec::new();
        solve_tridiagonal(&lower, &diag, &upper, &mut b, &mut scratch);
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).norm() < 1e-12);
        }
    }
}
