use crate::error::{Error, Result};
use crate::numerics::{derivative, pairwise_sum, trapezoid_weights};

use std::ops::{Add, Mul, Sub};

pub const MIN_POINTS: usize = 16;

/// One grid axis with `points` nodes spanning `[min, max]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.min + self.spacing() * i as f64
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }
}

/// Uniform tensor-product grid in one or two dimensions. Nodes are stored in
/// row-major order with the first axis outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<Axis>,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::domain(format!("grid dimension {} not in 1..=2", axes.len())));
        }
        for (k, a) in axes.iter().enumerate() {
            if a.points < MIN_POINTS {
                return Err(Error::domain(format!(
                    "axis {k} has {} points, need at least {MIN_POINTS}",
                    a.points
                )));
            }
            if !(a.max > a.min) || !a.min.is_finite() || !a.max.is_finite() {
                return Err(Error::domain(format!("axis {k} extent [{}, {}] is degenerate", a.min, a.max)));
            }
        }
        Ok(Self { axes })
    }

    pub fn line(min: f64, max: f64, points: usize) -> Result<Self> {
        Self::new(vec![Axis { min, max, points }])
    }

    pub fn square(min: f64, max: f64, points: usize) -> Result<Self> {
        let a = Axis { min, max, points };
        Self::new(vec![a, a])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, k: usize) -> f64 {
        self.axes[k].spacing()
    }

    /// Multi-index of a flat node index.
    pub fn unravel(&self, flat: usize) -> [usize; 2] {
        match self.dim() {
            1 => [flat, 0],
            _ => {
                let ny = self.axes[1].points;
                [flat / ny, flat % ny]
            }
        }
    }

    pub fn flat(&self, i: usize, j: usize) -> usize {
        match self.dim() {
            1 => i,
            _ => i * self.axes[1].points + j,
        }
    }

    /// Coordinates of a node; the second entry is zero in 1D.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let [i, j] = self.unravel(flat);
        match self.dim() {
            1 => [self.axes[0].coord(i), 0.0],
            _ => [self.axes[0].coord(i), self.axes[1].coord(j)],
        }
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Product trapezoidal weights.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let w0 = trapezoid_weights(self.axes[0].points, self.spacing(0));
        match self.dim() {
            1 => w0,
            _ => {
                let w1 = trapezoid_weights(self.axes[1].points, self.spacing(1));
                w0.iter().flat_map(|a| w1.iter().map(move |b| a * b)).collect()
            }
        }
    }

    /// Trapezoidal integral of nodal values (pairwise reduction).
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        let terms: Vec<f64> = values
            .iter()
            .zip(self.quadrature_weights())
            .map(|(v, w)| v * w)
            .collect();
        pairwise_sum(&terms)
    }

    /// Derivative along axis `k` with the stencils of [`derivative`].
    pub fn derivative_along<T>(&self, values: &[T], k: usize) -> Vec<T>
    where
        T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    {
        assert_eq!(values.len(), self.len());
        let h = self.spacing(k);
        if self.dim() == 1 {
            return derivative(values, h);
        }
        let (nx, ny) = (self.axes[0].points, self.axes[1].points);
        let mut out = vec![T::default(); values.len()];
        if k == 1 {
            for i in 0..nx {
                let d = derivative(&values[i * ny..(i + 1) * ny], h);
                out[i * ny..(i + 1) * ny].copy_from_slice(&d);
            }
        } else {
            let mut line = Vec::with_capacity(nx);
            for j in 0..ny {
                line.clear();
                line.extend((0..nx).map(|i| values[i * ny + j]));
                for (i, d) in derivative(&line, h).into_iter().enumerate() {
                    out[i * ny + j] = d;
                }
            }
        }
        out
    }

    /// Gradient: one component per axis.
    pub fn gradient<T>(&self, values: &[T]) -> Vec<Vec<T>>
    where
        T: Copy + Default + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    {
        (0..self.dim()).map(|k| self.derivative_along(values, k)).collect()
    }

    /// Index of the node nearest to the domain centre on each axis.
    pub fn center_index(&self) -> [usize; 2] {
        let c = |a: &Axis| {
            let mid = 0.5 * (a.min + a.max);
            (((mid - a.min) / a.spacing()).round() as usize).min(a.points - 1)
        };
        match self.dim() {
            1 => [c(&self.axes[0]), 0],
            _ => [c(&self.axes[0]), c(&self.axes[1])],
        }
    }
}
