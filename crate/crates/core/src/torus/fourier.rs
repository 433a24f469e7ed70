//! Toroidal Fourier transform by grid quadrature.
//!
//! `f̂(ξ) = M^{-n} Σ_x e^{-2πi x·ξ} f(x)` and `f(x) = Σ_ξ e^{2πi x·ξ} f̂(ξ)`,
//! evaluated axis by axis with exact integer phase reduction `(k·ξ) mod M`.
//! Summation order is fixed, so results are bit-reproducible.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::grid::{GridFunction, TorusGrid};
use super::lattice::{LatticeBox, MultiIndex, SpectralFunction};
use crate::error::{Error, Result};

/// `e^{sign·2πi r/M}` for `r = 0..M`.
pub(crate) fn twiddles(m: usize, sign: f64) -> Vec<Complex64> {
    (0..m)
        .map(|r| Complex64::from_polar(1.0, sign * 2.0 * PI * r as f64 / m as f64))
        .collect()
}

/// Radius of the largest alias-free symmetric box on an `M`-point axis.
pub fn alias_free_radius(samples_per_axis: usize) -> usize {
    (samples_per_axis - 1) / 2
}

/// Applies a dense `out_len × in_len` matrix along one axis of a row-major array.
pub(crate) fn transform_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    matrix: &[Complex64],
    out_len: usize,
) -> Vec<Complex64> {
    let in_len = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * out_len * inner];
    for o in 0..outer {
        for r in 0..out_len {
            let row = &matrix[r * in_len..(r + 1) * in_len];
            for i in 0..inner {
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, w) in row.iter().enumerate() {
                    acc += w * data[(o * in_len + c) * inner + i];
                }
                out[(o * out_len + r) * inner + i] = acc;
            }
        }
    }
    out
}

/// Precomputed one-axis transform matrices for a (grid, box) pair.
#[derive(Clone, Debug)]
pub struct GridDft {
    grid: TorusGrid,
    lattice: LatticeBox,
    forward: Vec<Complex64>,
    inverse: Vec<Complex64>,
}

impl GridDft {
    pub fn new(grid: TorusGrid, lattice: LatticeBox) -> Result<Self> {
        if grid.dim() != lattice.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: lattice.dim(),
            });
        }
        let m = grid.samples_per_axis();
        let n = lattice.radius() as i64;
        let side = lattice.side();
        let minus = twiddles(m, -1.0);
        let plus = twiddles(m, 1.0);
        let scale = 1.0 / m as f64;
        let mut forward = Vec::with_capacity(side * m);
        for xi in -n..=n {
            for k in 0..m as i64 {
                forward.push(minus[(k * xi).rem_euclid(m as i64) as usize] * scale);
            }
        }
        let mut inverse = Vec::with_capacity(side * m);
        for k in 0..m as i64 {
            for xi in -n..=n {
                inverse.push(plus[(k * xi).rem_euclid(m as i64) as usize]);
            }
        }
        Ok(Self {
            grid,
            lattice,
            forward,
            inverse,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    /// Grid samples (row-major, length `M^n`) to box coefficients.
    pub fn forward_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        let side = self.lattice.side();
        let mut shape = self.grid.shape();
        let mut data = values.to_vec();
        for axis in 0..shape.len() {
            data = transform_axis(&data, &shape, axis, &self.forward, side);
            shape[axis] = side;
        }
        data
    }

    /// Box coefficients (row-major, length `(2N+1)^n`) to grid samples.
    pub fn inverse_values(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let m = self.grid.samples_per_axis();
        let mut shape = vec![self.lattice.side(); self.lattice.dim()];
        let mut data = coeffs.to_vec();
        for axis in 0..shape.len() {
            data = transform_axis(&data, &shape, axis, &self.inverse, m);
            shape[axis] = m;
        }
        data
    }
}

/// Forward toroidal Fourier transform onto a symmetric box.
///
/// Requires `2N < M`; the quadrature is exact for trigonometric polynomials
/// of degree below `M - N` on each axis.
pub fn fourier_forward(f: &GridFunction, lattice: &LatticeBox) -> Result<SpectralFunction> {
    let grid = *f.grid();
    if grid.dim() != lattice.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            found: lattice.dim(),
        });
    }
    if 2 * lattice.radius() >= grid.samples_per_axis() {
        return Err(Error::InvalidParameter(format!(
            "box radius {} aliases on {} samples per axis (need 2N < M)",
            lattice.radius(),
            grid.samples_per_axis()
        )));
    }
    let dft = GridDft::new(grid, *lattice)?;
    SpectralFunction::new(*lattice, dft.forward_values(f.values()))
}

/// Fourier series `Σ_{ξ∈box} e^{2πi x·ξ} F(ξ)` evaluated on the grid.
pub fn fourier_inverse(spectrum: &SpectralFunction, grid: &TorusGrid) -> Result<GridFunction> {
    let dft = GridDft::new(*grid, *spectrum.lattice())?;
    GridFunction::new(*grid, dft.inverse_values(spectrum.coeffs()))
}

/// Spectral differentiation `∂_x^β` of grid samples read as a trigonometric
/// polynomial on the alias-free box. An even-`M` Nyquist mode is discarded.
#[derive(Clone, Debug)]
pub struct SpectralDerivative {
    dft: GridDft,
    multipliers: Vec<Complex64>,
}

impl SpectralDerivative {
    pub fn new(grid: TorusGrid, beta: &MultiIndex) -> Result<Self> {
        if beta.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: beta.dim(),
            });
        }
        let lattice = LatticeBox::new(grid.dim(), alias_free_radius(grid.samples_per_axis()).max(1))?;
        let dft = GridDft::new(grid, lattice)?;
        let multipliers = lattice
            .points()
            .map(|eta| {
                eta.iter()
                    .zip(beta.entries())
                    .map(|(&e, &b)| Complex64::new(0.0, 2.0 * PI * e as f64).powu(b as u32))
                    .product()
            })
            .collect();
        Ok(Self { dft, multipliers })
    }

    pub fn apply_values(&self, values: &[Complex64]) -> Vec<Complex64> {
        self.apply_values_filtered(values, 0.0)
    }

    /// As [`apply_values`](Self::apply_values), first zeroing modes below
    /// `rel_floor` times the largest one so that transform roundoff is not
    /// amplified by the multiplier.
    pub fn apply_values_filtered(&self, values: &[Complex64], rel_floor: f64) -> Vec<Complex64> {
        let mut coeffs = self.dft.forward_values(values);
        let floor = rel_floor * coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (c, w) in coeffs.iter_mut().zip(&self.multipliers) {
            if c.norm() <= floor {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c *= w;
            }
        }
        self.dft.inverse_values(&coeffs)
    }
}

/// `∂_x^β f` by spectral differentiation on the grid.
pub fn spectral_derivative(f: &GridFunction, beta: &MultiIndex) -> Result<GridFunction> {
    let d = SpectralDerivative::new(*f.grid(), beta)?;
    GridFunction::new(*f.grid(), d.apply_values(f.values()))
}
