use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::sum;

/// The grid point `2πi/G`.
#[inline]
pub fn grid_point(i: usize, grid: usize) -> f64 {
    TAU * i as f64 / grid as f64
}

/// Uniform samples of a 2π-periodic real function: `values[i] = f(2πi/G)`.
///
/// Integrals use the rectangle rule, which is exact for trigonometric
/// polynomials of degree below `G`. Operators that need a measure treat each
/// sample as the value of a step density on its cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    values: Vec<f64>,
}

impl SampledFunction {
    /// Wraps samples; rejects an empty grid and non-finite samples.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    /// Samples `f` at the `grid` points `2πi/G`.
    pub fn from_fn(grid: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..grid).map(|i| f(grid_point(i, grid))).collect())
    }

    pub fn constant(grid: usize, c: f64) -> Result<Self> {
        Self::new(vec![c; grid])
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Grid spacing `2π/G`.
    pub fn step(&self) -> f64 {
        TAU / self.grid_size() as f64
    }

    pub fn mean(&self) -> f64 {
        sum::mean(&self.values)
    }

    /// Rectangle-rule integral over `[0, 2π)`.
    pub fn integral(&self) -> f64 {
        TAU * self.mean()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pointwise map; fails if the result has a non-finite sample.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise natural logarithm; zero samples are rejected.
    pub fn ln(&self) -> Result<Self> {
        self.map(f64::ln)
    }

    /// Cyclic shift by `k` cells: `result[i] = values[(i + k) mod G]`.
    pub fn shifted(&self, k: usize) -> Self {
        let g = self.grid_size();
        let k = k % g;
        let mut values = Vec::with_capacity(g);
        values.extend_from_slice(&self.values[k..]);
        values.extend_from_slice(&self.values[..k]);
        Self { values }
    }
}
