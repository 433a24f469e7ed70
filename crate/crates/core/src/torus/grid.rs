//! Uniform sampling grids on `T^n = [0,1)^n` and functions sampled on them.

use num_complex::Complex64;

use super::lattice::{ravel, unravel};
use crate::error::{Error, Result};

/// Uniform grid with `M` samples per axis at `x = k/M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TorusGrid {
    dim: usize,
    samples_per_axis: usize,
}

impl TorusGrid {
    pub fn new(dim: usize, samples_per_axis: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("grid dimension must be ≥ 1".into()));
        }
        if samples_per_axis < 2 {
            return Err(Error::InvalidParameter("need at least 2 samples per axis".into()));
        }
        Ok(Self {
            dim,
            samples_per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples_per_axis(&self) -> usize {
        self.samples_per_axis
    }

    pub fn len(&self) -> usize {
        self.samples_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight of one sample, `M^{-n}`.
    pub fn cell_measure(&self) -> f64 {
        1.0 / self.len() as f64
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.samples_per_axis; self.dim]
    }

    /// Integer coordinates `k` of the sample with flat index `idx`.
    pub fn coords(&self, idx: usize) -> Vec<usize> {
        unravel(idx, &self.shape())
    }

    pub fn index_of(&self, coords: &[usize]) -> usize {
        ravel(coords, &self.shape())
    }

    /// The point `x = k/M`.
    pub fn point(&self, idx: usize) -> Vec<f64> {
        let m = self.samples_per_axis as f64;
        self.coords(idx).into_iter().map(|k| k as f64 / m).collect()
    }

    /// Flat index of the sample at `k + offset` (wrapped).
    pub fn shifted(&self, idx: usize, offset: &[i64]) -> usize {
        let m = self.samples_per_axis as i64;
        let coords: Vec<usize> = self
            .coords(idx)
            .into_iter()
            .zip(offset)
            .map(|(k, o)| (k as i64 + o).rem_euclid(m) as usize)
            .collect();
        self.index_of(&coords)
    }

    /// Nearest sample to an arbitrary point of `R^n` (taken mod 1).
    pub fn nearest(&self, x: &[f64]) -> usize {
        let m = self.samples_per_axis as f64;
        let coords: Vec<usize> = x
            .iter()
            .map(|&v| ((v.rem_euclid(1.0) * m).round() as usize) % self.samples_per_axis)
            .collect();
        self.index_of(&coords)
    }
}

/// Wrap a single coordinate difference into `[-1/2, 1/2]`.
pub fn wrap_component(t: f64) -> f64 {
    t - t.round()
}

/// Periodic distance `min_l |x - y + l|` on `T^n`.
pub fn periodic_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| wrap_component(a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Periodic distance from `x` to the origin, the torus version of `|x|`.
pub fn periodic_norm(x: &[f64]) -> f64 {
    x.iter().map(|a| wrap_component(*a).powi(2)).sum::<f64>().sqrt()
}

/// Samples of a 1-periodic function on a [`TorusGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: TorusGrid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: TorusGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(grid: TorusGrid, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: TorusGrid, c: Complex64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise modulus as a real-valued sample vector.
    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }

    /// Grid average, the quadrature of `∫_{T^n} f`.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.re == 0.0 && v.im == 0.0)
    }

    pub(crate) fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }
}
