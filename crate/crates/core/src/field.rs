//! Uniformly sampled 1-D transverse fields.

use num_complex::Complex64;

use crate::error::{Result, WeakBeamError};

/// Smallest sample count accepted for a [`Grid`].
pub const MIN_SAMPLES: usize = 256;

/// Uniform transverse grid: `x_j = x0 + (j - n/2) dx` for `j in 0..n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    dx: f64,
    x0: f64,
}

impl Grid {
    pub fn new(n: usize, dx: f64, x0: f64) -> Result<Self> {
        if n < MIN_SAMPLES || !n.is_power_of_two() {
            return Err(WeakBeamError::InvalidGrid(format!(
                "sample count must be a power of two >= {MIN_SAMPLES}, got {n}"
            )));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(WeakBeamError::InvalidGrid(format!(
                "spacing must be positive and finite, got {dx}"
            )));
        }
        if !x0.is_finite() {
            return Err(WeakBeamError::InvalidGrid("center must be finite".into()));
        }
        Ok(Self { n, dx, x0 })
    }

    /// `n` samples spanning a total width `window` centered on zero.
    pub fn centered(n: usize, window: f64) -> Result<Self> {
        Self::new(n, window / n as f64, 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Total extent `n * dx`.
    pub fn window(&self) -> f64 {
        self.n as f64 * self.dx
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + (j as f64 - (self.n / 2) as f64) * self.dx
    }

    pub fn positions(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.x(j))
    }

    /// Momentum of FFT bin `j` (standard wrap-around ordering).
    pub fn momentum(&self, j: usize) -> f64 {
        let n = self.n as i64;
        let j = j as i64;
        let signed = if j < n / 2 { j } else { j - n };
        2.0 * std::f64::consts::PI * signed as f64 / (self.n as f64 * self.dx)
    }

    /// Momentum spacing `2 pi / (n dx)`.
    pub fn dp(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.window()
    }

    /// Largest representable momentum, `pi / dx`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.dx
    }
}

/// Complex field sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(WeakBeamError::InvalidGrid(format!(
                "expected {} samples, got {}",
                grid.n(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    /// Samples `f(x)` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid,
            values: grid.positions().map(f).collect(),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `sum |values|^2 dx`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= factor);
        self
    }

    /// Pointwise multiplication by `f(x)`.
    pub fn modulated(mut self, f: impl Fn(f64) -> Complex64) -> Self {
        let grid = self.grid;
        for (j, v) in self.values.iter_mut().enumerate() {
            *v *= f(grid.x(j));
        }
        self
    }

    pub fn same_grid(&self, other: &SampledField) -> bool {
        self.grid == other.grid
    }

    /// Maximum pointwise `|self - other|`.
    pub fn max_abs_diff(&self, other: &SampledField) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(WeakBeamError::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
